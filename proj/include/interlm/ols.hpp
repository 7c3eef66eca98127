#ifndef INTERLM_OLS_HPP
#define INTERLM_OLS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "interlm/design.hpp"
#include "interlm/error.hpp"
#include "interlm/t_dist.hpp"

namespace interlm::ols {

/// Relative pivot tolerance for rank detection, scaled by the largest |R_ii|.
inline constexpr double rank_tolerance = 1e-10;

/// Everything the search strategies read off one least-squares fit.
///
/// `std_errors` and `p_values` are indexed like the design columns. Aliased
/// columns get coefficient 0, a NaN std error and p-value 1. When there are
/// no residual degrees of freedom (`inference_defined == false`) every std
/// error is NaN and every p-value is 1.
struct FitSummary {
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> p_values;
  double r_squared = 0.0;
  double mse = 0.0;
  double log_likelihood = 0.0;
  double aic = 0.0;
  double ss_res = 0.0;
  double ss_tot = 0.0;
  std::size_t n = 0;
  std::size_t rank = 0;
  std::vector<std::size_t> aliased;
  bool inference_defined = false;
  /// SS_tot == 0; r_squared is reported as 0.
  bool constant_target = false;

  double max_p_value() const {
    double m = 0.0;
    for (double p : p_values) m = std::max(m, p);
    return m;
  }
};

/// Gaussian ML log-likelihood with σ̂² = SS_res / n.
inline double gaussian_log_likelihood(double ss_res, std::size_t n) {
  const double nn = static_cast<double>(n);
  const double sigma2 = ss_res / nn;
  return -0.5 * nn * (std::log(2.0 * std::numbers::pi * sigma2) + 1.0);
}

namespace detail {

inline double sum_of_squares_about_mean(const Eigen::Ref<const Eigen::VectorXd>& y) {
  const double mean = y.mean();
  return (y.array() - mean).square().sum();
}

/// Householder QR that keeps the given column order and moves a column to
/// the back only when it lies in the span of the columns before it.
///
/// A column is deficient when the norm of its component orthogonal to the
/// accepted columns is at most rank_tolerance times the largest column norm
/// of the matrix (the leading |R_ii| under norm pivoting). Aliasing is
/// therefore always charged to the later of two dependent columns.
struct OrderedQR {
  std::vector<Eigen::Index> accepted;  // original column indices, in order
  std::vector<Eigen::Index> deficient;
  Eigen::MatrixXd r;                   // accepted.size() square, upper triangular
  Eigen::VectorXd qtb_head;            // first accepted.size() entries of Qᵀb

  OrderedQR(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
    const Eigen::Index m = a.rows();
    const Eigen::Index p = a.cols();
    Eigen::MatrixXd w = a;
    Eigen::VectorXd qtb = b;
    const double threshold = rank_tolerance * w.colwise().norm().maxCoeff();
    Eigen::VectorXd workspace(p + 1);
    Eigen::Index rank = 0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (rank == m) {
        deficient.push_back(j);
        continue;
      }
      const double norm = w.col(j).tail(m - rank).norm();
      if (!(norm > threshold)) {
        deficient.push_back(j);
        continue;
      }
      double tau = 0.0;
      double beta = 0.0;
      auto head = w.col(j).tail(m - rank);
      head.makeHouseholderInPlace(tau, beta);
      const Eigen::VectorXd essential = head.tail(m - rank - 1);
      head(0) = beta;
      head.tail(m - rank - 1).setZero();
      if (j + 1 < p) {
        w.bottomRightCorner(m - rank, p - j - 1)
            .applyHouseholderOnTheLeft(essential, tau, workspace.data());
      }
      qtb.tail(m - rank).applyHouseholderOnTheLeft(essential, tau, workspace.data());
      accepted.push_back(j);
      ++rank;
    }
    r = Eigen::MatrixXd::Zero(rank, rank);
    for (Eigen::Index k = 0; k < rank; ++k) r.col(k) = w.col(accepted[k]).head(rank);
    qtb_head = qtb.head(rank);
  }
};

/// Solves min ‖b − A β‖² and assembles the statistics for a model of `n_obs`
/// observations. `extra_ss_res` is residual mass already projected out of
/// (A, b), which is nonzero when A is a QR-compressed stand-in for the data.
inline FitSummary solve(const Eigen::Ref<const Eigen::MatrixXd>& a,
                        const Eigen::Ref<const Eigen::VectorXd>& b, std::size_t n_obs,
                        double extra_ss_res, double ss_tot, double y_sum_sq) {
  const Eigen::Index p = a.cols();
  if (p == 0) throw Error(ErrorCode::invalid_argument, "design has zero columns");
  if (n_obs < 2) throw Error(ErrorCode::invalid_argument, "need at least 2 observations");

  const OrderedQR qr(a, b);
  const auto rank = static_cast<Eigen::Index>(qr.accepted.size());
  if (rank == 0) throw Error(ErrorCode::numeric, "every design column is aliased");

  const auto& perm = qr.accepted;
  const auto r1 = qr.r.triangularView<Eigen::Upper>();
  const Eigen::VectorXd beta1 = r1.solve(qr.qtb_head);

  FitSummary fit;
  fit.n = n_obs;
  fit.rank = static_cast<std::size_t>(rank);
  fit.coefficients.assign(static_cast<std::size_t>(p), 0.0);
  fit.std_errors.assign(static_cast<std::size_t>(p), std::numeric_limits<double>::quiet_NaN());
  fit.p_values.assign(static_cast<std::size_t>(p), 1.0);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i = 0; i < rank; ++i) {
    const auto col = perm[static_cast<std::size_t>(i)];
    beta(col) = beta1(i);
    fit.coefficients[static_cast<std::size_t>(col)] = beta1(i);
  }
  for (auto c : qr.deficient) fit.aliased.push_back(static_cast<std::size_t>(c));

  fit.ss_res = (b - a * beta).squaredNorm() + extra_ss_res;
  fit.ss_tot = ss_tot;
  const double nn = static_cast<double>(n_obs);
  fit.mse = fit.ss_res / nn;
  fit.constant_target = !(ss_tot > std::numeric_limits<double>::epsilon() * y_sum_sq);
  fit.r_squared = fit.constant_target ? 0.0 : 1.0 - fit.ss_res / ss_tot;
  fit.log_likelihood = gaussian_log_likelihood(fit.ss_res, n_obs);
  fit.aic = 2.0 * static_cast<double>(rank) - 2.0 * fit.log_likelihood;

  const auto dof = static_cast<std::ptrdiff_t>(n_obs) - rank;
  fit.inference_defined = dof > 0;
  if (!fit.inference_defined) return fit;

  const double sigma2 = fit.ss_res / static_cast<double>(dof);
  // diag((X_SᵀX_S)⁻¹) = squared row norms of R₁⁻¹.
  const Eigen::MatrixXd r1_inv = r1.solve(Eigen::MatrixXd::Identity(rank, rank));
  for (Eigen::Index i = 0; i < rank; ++i) {
    const auto col = static_cast<std::size_t>(perm[static_cast<std::size_t>(i)]);
    const double se = std::sqrt(sigma2 * r1_inv.row(i).squaredNorm());
    fit.std_errors[col] = se;
    const double coef = beta1(i);
    if (se > 0.0) {
      fit.p_values[col] = t_tail_two_sided(coef / se, static_cast<double>(dof));
    } else {
      fit.p_values[col] = coef == 0.0 ? 1.0 : 0.0;
    }
  }
  return fit;
}

}  // namespace detail

/// Ordinary least squares through an order-preserving pivoted Householder QR.
inline FitSummary fit(const Eigen::Ref<const Eigen::MatrixXd>& x,
                      const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::invalid_argument, "design rows and target length differ");
  }
  return detail::solve(x, y, static_cast<std::size_t>(y.size()), 0.0,
                       detail::sum_of_squares_about_mean(y), y.squaredNorm());
}

inline FitSummary fit(const DesignMatrix& design, std::span<const double> y) {
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  return fit(design.values, yv);
}

/// Holds X = QR once so fits on column subsets of X run against the small
/// triangular factor instead of the full n-row matrix.
///
/// For any subset S, ‖y − X_S β‖² = ‖Qᵀy − R_S β‖² + ‖tail of Qᵀy‖², so the
/// subset fit is exact; only n and SS_tot are carried over from the data.
class ReducedProblem {
 public:
  ReducedProblem(const Eigen::Ref<const Eigen::MatrixXd>& x,
                 const Eigen::Ref<const Eigen::VectorXd>& y)
      : n_(static_cast<std::size_t>(x.rows())), p_(x.cols()) {
    if (x.rows() != y.size()) {
      throw Error(ErrorCode::invalid_argument, "design rows and target length differ");
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    const Eigen::Index m = std::min(x.rows(), x.cols());
    r_ = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    const Eigen::VectorXd qty = qr.householderQ().adjoint() * y;
    qty_head_ = qty.head(m);
    tail_ss_ = qty.tail(x.rows() - m).squaredNorm();
    ss_tot_ = detail::sum_of_squares_about_mean(y);
    y_sum_sq_ = y.squaredNorm();
  }

  ReducedProblem(const DesignMatrix& design, std::span<const double> y)
      : ReducedProblem(design.values, Eigen::Map<const Eigen::VectorXd>(
                                          y.data(), static_cast<Eigen::Index>(y.size()))) {}

  Eigen::Index cols() const { return p_; }
  std::size_t n() const { return n_; }

  /// Fit on the listed columns; summary vectors follow the listed order.
  FitSummary fit(std::span<const Eigen::Index> columns) const {
    Eigen::MatrixXd a(r_.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j] < 0 || columns[j] >= p_) {
        throw Error(ErrorCode::invalid_argument, "column index out of range");
      }
      a.col(static_cast<Eigen::Index>(j)) = r_.col(columns[j]);
    }
    return detail::solve(a, qty_head_, n_, tail_ss_, ss_tot_, y_sum_sq_);
  }

 private:
  std::size_t n_;
  Eigen::Index p_;
  Eigen::MatrixXd r_;
  Eigen::VectorXd qty_head_;
  double tail_ss_ = 0.0;
  double ss_tot_ = 0.0;
  double y_sum_sq_ = 0.0;
};

}  // namespace interlm::ols

#endif  // INTERLM_OLS_HPP
