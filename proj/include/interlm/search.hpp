#ifndef INTERLM_SEARCH_HPP
#define INTERLM_SEARCH_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "interlm/design.hpp"
#include "interlm/error.hpp"
#include "interlm/formula.hpp"
#include "interlm/ols.hpp"
#include "interlm/parallel.hpp"
#include "interlm/table.hpp"
#include "interlm/term.hpp"

namespace interlm::search {

/// Prior over the number of sampled interactions plus base-feature inclusion.
struct PriorConfig {
  std::vector<double> k_probs{0.2, 0.4, 0.4};
  double p_base = 0.75;
  std::size_t iterations = 5000;
  std::uint64_t seed = 0;

  void validate() const {
    if (k_probs.empty()) throw Error(ErrorCode::invalid_argument, "k_probs is empty");
    double sum = 0.0;
    for (double p : k_probs) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw Error(ErrorCode::invalid_argument, "k_probs entries must be non-negative");
      }
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-12) {
      throw Error(ErrorCode::invalid_argument, "k_probs must sum to 1");
    }
    if (!(p_base > 0.0 && p_base <= 1.0)) {
      throw Error(ErrorCode::invalid_argument, "p_base must lie in (0, 1]");
    }
    if (iterations == 0) throw Error(ErrorCode::invalid_argument, "iterations must be positive");
  }
};

struct StoppingRule {
  double alpha = 0.01;
  double aic_abs_jump = 20.0;
  double aic_rel_jump = 0.01;
  /// Unset means 100 steps for forward selection and one step per design
  /// column for backward elimination.
  std::optional<std::size_t> max_steps;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw Error(ErrorCode::invalid_argument, "alpha must lie in (0, 1)");
    }
    if (!(aic_abs_jump >= 0.0) || !(aic_rel_jump >= 0.0)) {
      throw Error(ErrorCode::invalid_argument, "AIC jump thresholds must be non-negative");
    }
  }
};

struct SearchOptions {
  unsigned threads = 1;
};

/// One iteration (priority search) or one step (stepwise).
struct TraceRecord {
  std::size_t index = 0;
  std::string action;     // "sample", "skip", "add", "remove", "restore", "stop"
  std::string candidate;  // formula or column label
  std::optional<std::size_t> column;
  double p_value = std::numeric_limits<double>::quiet_NaN();
  double std_error = std::numeric_limits<double>::quiet_NaN();
  double r_squared = std::numeric_limits<double>::quiet_NaN();
  double aic = std::numeric_limits<double>::quiet_NaN();
  double log_likelihood = std::numeric_limits<double>::quiet_NaN();
  double mse = std::numeric_limits<double>::quiet_NaN();
  bool accepted = false;
  double best_r_squared = 0.0;
  double seconds = 0.0;
};

struct SearchTrace {
  std::vector<TraceRecord> records;
};

/// True when AIC rises by more than max(abs_jump, rel_jump · |prev|).
inline bool aic_guard(double prev_aic, double new_aic, const StoppingRule& rule) {
  const double threshold = std::max(rule.aic_abs_jump, rule.aic_rel_jump * std::fabs(prev_aic));
  return new_aic - prev_aic > threshold;
}

/// Terms owning at least one of `columns`, normalized. The intercept (column
/// 0) is implicit and ignored.
inline ModelSpec columns_to_spec(std::span<const std::size_t> columns, const DesignMatrix& design) {
  std::set<Term> terms;
  for (auto c : columns) {
    if (c >= design.columns.size()) {
      throw Error(ErrorCode::invalid_argument, "column " + std::to_string(c) + " not in design");
    }
    if (const auto& t = design.columns[c].term) terms.insert(*t);
  }
  return normalize_spec(terms);
}

inline std::string columns_to_formula(std::span<const std::size_t> columns,
                                      const DesignMatrix& design, std::string_view target) {
  return format_formula(target, columns_to_spec(columns, design), design.feature_order);
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline void fill_metrics(TraceRecord& rec, const ols::FitSummary& fit) {
  rec.r_squared = fit.r_squared;
  rec.aic = fit.aic;
  rec.log_likelihood = fit.log_likelihood;
  rec.mse = fit.mse;
}

inline double se_or_inf(double se) {
  return std::isnan(se) ? std::numeric_limits<double>::infinity() : se;
}

inline std::vector<Eigen::Index> with_intercept(std::span<const std::size_t> columns) {
  std::vector<Eigen::Index> cols{0};
  for (auto c : columns) cols.push_back(static_cast<Eigen::Index>(c));
  return cols;
}

}  // namespace detail

/// Direct refit of intercept + `columns` against the design.
inline ols::FitSummary fit_columns(const DesignMatrix& design, std::span<const double> y,
                                   std::span<const std::size_t> columns) {
  const auto cols = detail::with_intercept(columns);
  const Eigen::MatrixXd x = design.values(Eigen::all, cols);
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  return ols::fit(x, yv);
}

struct PriorityResult {
  ModelSpec spec;
  std::string formula;
  ols::FitSummary fit;
  SearchTrace trace;
};

/// Randomized search over term subsets: each iteration draws k ~ k_probs
/// crosses uniformly without replacement, then keeps each base feature not
/// already inside a drawn cross with probability p_base. The incumbent is
/// replaced only on a strict R² improvement.
///
/// Iteration i uses its own mt19937_64 seeded from splitmix64(seed ^ i).
inline PriorityResult priority_search(const DataTable& table, const PriorConfig& prior,
                                      const SearchOptions& options = {}) {
  prior.validate();
  const auto terms = enumerate_terms(table.schema);
  std::vector<Term> bases;
  std::vector<Term> crosses;
  for (const auto& t : terms) (t.is_cross() ? crosses : bases).push_back(t);
  for (std::size_t k = crosses.size() + 1; k < prior.k_probs.size(); ++k) {
    if (prior.k_probs[k] > 0.0) {
      throw Error(ErrorCode::invalid_argument,
                  "prior puts mass on k = " + std::to_string(k) + " but only " +
                      std::to_string(crosses.size()) + " interactions exist");
    }
  }

  const DesignMatrix design = build_design(table, std::span<const Term>(terms));
  const ols::ReducedProblem problem(design, table.target);
  const auto order = design.feature_order;

  struct Candidate {
    ModelSpec spec;
    std::optional<ols::FitSummary> fit;
    double seconds = 0.0;
  };
  std::vector<Candidate> candidates(prior.iterations);

  parallel_for(prior.iterations, options.threads, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(detail::splitmix64(prior.seed ^ static_cast<std::uint64_t>(i)));
    std::discrete_distribution<std::size_t> pick_k(prior.k_probs.begin(), prior.k_probs.end());
    const std::size_t k = pick_k(rng);

    std::vector<Term> chosen;
    std::sample(crosses.begin(), crosses.end(), std::back_inserter(chosen), k, rng);
    std::bernoulli_distribution keep(prior.p_base);
    std::set<Term> picked(chosen.begin(), chosen.end());
    for (const auto& b : bases) {
      const bool crossed = std::any_of(chosen.begin(), chosen.end(),
                                       [&](const Term& c) { return c.involves(b.first()); });
      if (!crossed && keep(rng)) picked.insert(b);
    }

    Candidate& cand = candidates[i];
    cand.spec = normalize_spec(picked);
    if (!cand.spec.empty()) {
      std::vector<Eigen::Index> cols{0};
      for (const auto& t : cand.spec.terms()) {
        for (auto c : design.columns_of(t)) cols.push_back(c);
      }
      cand.fit = problem.fit(cols);
    }
    cand.seconds = detail::seconds_since(start);
  });

  PriorityResult result;
  double best_r2 = 0.0;
  result.trace.records.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Candidate& cand = candidates[i];
    TraceRecord rec;
    rec.index = i + 1;
    rec.candidate = format_formula(table.schema.target, cand.spec, order);
    rec.seconds = cand.seconds;
    if (!cand.fit) {
      rec.action = "skip";
    } else {
      rec.action = "sample";
      detail::fill_metrics(rec, *cand.fit);
      if (cand.fit->r_squared > best_r2) {
        rec.accepted = true;
        best_r2 = cand.fit->r_squared;
        result.spec = cand.spec;
      }
    }
    rec.best_r_squared = best_r2;
    result.trace.records.push_back(std::move(rec));
  }

  const DesignMatrix best_design = build_design(table, result.spec);
  result.fit = ols::fit(best_design, table.target);
  result.formula = format_formula(table.schema.target, result.spec, order);
  return result;
}

struct StepwiseResult {
  DesignMatrix design;
  /// Selected non-intercept columns of `design`, ascending.
  std::vector<std::size_t> selected;
  std::string formula;
  /// Fit on intercept + selected (in that order).
  ols::FitSummary fit;
  SearchTrace trace;
  bool guard_triggered = false;
  std::optional<std::size_t> restored_column;
};

namespace detail {

inline void finish(StepwiseResult& result, std::span<const double> y, std::string_view target) {
  std::sort(result.selected.begin(), result.selected.end());
  result.fit = fit_columns(result.design, y, result.selected);
  result.formula = columns_to_formula(result.selected, result.design, target);
}

}  // namespace detail

/// Greedy column addition from the intercept-only model. Each step refits one
/// model per remaining column and takes the smallest p-value (ties: smaller
/// std error, then lower column index). Stops once that p-value reaches
/// alpha, when the addition would trip the AIC guard, or at max_steps.
inline StepwiseResult forward_selection(DesignMatrix design, std::span<const double> y,
                                        std::string_view target, const StoppingRule& rule,
                                        const SearchOptions& options = {}) {
  rule.validate();
  if (design.p() <= 1) throw Error(ErrorCode::invalid_argument, "design has no candidate columns");
  const ols::ReducedProblem problem(design, y);
  const std::size_t max_steps = rule.max_steps.value_or(100);

  StepwiseResult result;
  std::vector<std::size_t> remaining;
  for (Eigen::Index c = 1; c < design.p(); ++c) remaining.push_back(static_cast<std::size_t>(c));

  ols::FitSummary current = problem.fit(std::vector<Eigen::Index>{0});
  double best_r2 = current.r_squared;

  struct Probe {
    double p = 1.0;
    double se = std::numeric_limits<double>::infinity();
    ols::FitSummary fit;
  };

  for (std::size_t step = 1; step <= max_steps && !remaining.empty(); ++step) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<Probe> probes(remaining.size());
    parallel_for(remaining.size(), options.threads, [&](std::size_t i) {
      auto cols = detail::with_intercept(result.selected);
      cols.push_back(static_cast<Eigen::Index>(remaining[i]));
      probes[i].fit = problem.fit(cols);
      probes[i].p = probes[i].fit.p_values.back();
      probes[i].se = detail::se_or_inf(probes[i].fit.std_errors.back());
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < probes.size(); ++i) {
      const auto& a = probes[i];
      const auto& b = probes[best];
      if (a.p < b.p || (a.p == b.p && a.se < b.se)) best = i;
    }
    const Probe& chosen = probes[best];
    const std::size_t column = remaining[best];

    TraceRecord rec;
    rec.index = step;
    rec.column = column;
    rec.candidate = design.columns[column].label(design.feature_order);
    rec.p_value = chosen.p;
    rec.std_error = chosen.se;
    detail::fill_metrics(rec, chosen.fit);

    const bool significant = chosen.p < rule.alpha;
    const bool surge = significant && aic_guard(current.aic, chosen.fit.aic, rule);
    if (significant && !surge) {
      rec.action = "add";
      rec.accepted = true;
      result.selected.push_back(column);
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
      current = chosen.fit;
      best_r2 = std::max(best_r2, current.r_squared);
    } else {
      rec.action = "stop";
      result.guard_triggered = surge;
    }
    rec.best_r_squared = best_r2;
    rec.seconds = detail::seconds_since(start);
    result.trace.records.push_back(std::move(rec));
    if (!significant || surge) break;
  }

  result.design = std::move(design);
  detail::finish(result, y, target);
  return result;
}

inline StepwiseResult forward_selection(const DataTable& table, const StoppingRule& rule,
                                        const SearchOptions& options = {}) {
  return forward_selection(build_full_design(table), table.target, table.schema.target, rule,
                           options);
}

/// Greedy column removal from the full design. Each step drops the column
/// with the largest p-value (ties: larger std error, then lower column
/// index) until every p-value is at most alpha. A removal that trips the AIC
/// guard is undone and the search ends there.
inline StepwiseResult backward_elimination(DesignMatrix design, std::span<const double> y,
                                           std::string_view target, const StoppingRule& rule,
                                           const SearchOptions& = {}) {
  rule.validate();
  if (design.p() <= 1) throw Error(ErrorCode::invalid_argument, "design has no candidate columns");
  const ols::ReducedProblem problem(design, y);
  const std::size_t max_steps = rule.max_steps.value_or(static_cast<std::size_t>(design.p()));

  StepwiseResult result;
  for (Eigen::Index c = 1; c < design.p(); ++c) result.selected.push_back(static_cast<std::size_t>(c));
  ols::FitSummary current = problem.fit(detail::with_intercept(result.selected));
  const double full_r2 = current.r_squared;

  for (std::size_t step = 1; step <= max_steps && !result.selected.empty(); ++step) {
    const auto start = std::chrono::steady_clock::now();
    // current.p_values[0] is the intercept; candidates start at position 1.
    std::size_t worst = 0;
    double worst_p = -1.0;
    double worst_se = -1.0;
    for (std::size_t i = 0; i < result.selected.size(); ++i) {
      const double p = current.p_values[i + 1];
      const double se = detail::se_or_inf(current.std_errors[i + 1]);
      if (p > worst_p || (p == worst_p && se > worst_se)) {
        worst = i;
        worst_p = p;
        worst_se = se;
      }
    }
    if (worst_p <= rule.alpha) break;

    const std::size_t column = result.selected[worst];
    auto trial = result.selected;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(worst));
    ols::FitSummary next = problem.fit(detail::with_intercept(trial));

    TraceRecord rec;
    rec.index = step;
    rec.column = column;
    rec.candidate = design.columns[column].label(design.feature_order);
    rec.p_value = worst_p;
    rec.std_error = worst_se;

    if (aic_guard(current.aic, next.aic, rule)) {
      rec.action = "restore";
      detail::fill_metrics(rec, current);
      rec.best_r_squared = full_r2;
      rec.seconds = detail::seconds_since(start);
      result.trace.records.push_back(std::move(rec));
      result.guard_triggered = true;
      result.restored_column = column;
      break;
    }
    rec.action = "remove";
    rec.accepted = true;
    detail::fill_metrics(rec, next);
    rec.best_r_squared = full_r2;
    rec.seconds = detail::seconds_since(start);
    result.trace.records.push_back(std::move(rec));
    result.selected = std::move(trial);
    current = std::move(next);
  }

  result.design = std::move(design);
  detail::finish(result, y, target);
  return result;
}

inline StepwiseResult backward_elimination(const DataTable& table, const StoppingRule& rule,
                                           const SearchOptions& options = {}) {
  return backward_elimination(build_full_design(table), table.target, table.schema.target, rule,
                              options);
}

}  // namespace interlm::search

#endif  // INTERLM_SEARCH_HPP
