#ifndef INTERLM_REPORT_HPP
#define INTERLM_REPORT_HPP

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "interlm/ols.hpp"
#include "interlm/search.hpp"

namespace interlm::report {

// Doubles are written in shortest round-trip form; NaN and infinities become null.

inline nlohmann::json to_json(const ols::FitSummary& fit) {
  return {{"coefficients", fit.coefficients},
          {"std_errors", fit.std_errors},
          {"p_values", fit.p_values},
          {"r_squared", fit.r_squared},
          {"mse", fit.mse},
          {"log_likelihood", fit.log_likelihood},
          {"aic", fit.aic},
          {"ss_res", fit.ss_res},
          {"ss_tot", fit.ss_tot},
          {"n", fit.n},
          {"rank", fit.rank},
          {"aliased", fit.aliased},
          {"inference_defined", fit.inference_defined},
          {"constant_target", fit.constant_target}};
}

inline nlohmann::json to_json(const search::TraceRecord& rec) {
  nlohmann::json j = {{"index", rec.index},
                      {"action", rec.action},
                      {"candidate", rec.candidate},
                      {"r_squared", rec.r_squared},
                      {"aic", rec.aic},
                      {"log_likelihood", rec.log_likelihood},
                      {"mse", rec.mse},
                      {"accepted", rec.accepted},
                      {"best_r_squared", rec.best_r_squared},
                      {"seconds", rec.seconds}};
  if (rec.column) {
    j["column"] = *rec.column;
    j["p_value"] = rec.p_value;
    j["std_error"] = rec.std_error;
  }
  return j;
}

/// One JSON object per line, one line per iteration or step.
inline std::string to_jsonl(const search::SearchTrace& trace) {
  std::string out;
  for (const auto& rec : trace.records) {
    out += to_json(rec).dump();
    out += '\n';
  }
  return out;
}

inline nlohmann::json to_json(const search::PriorConfig& prior) {
  return {{"k_probs", prior.k_probs},
          {"p_base", prior.p_base},
          {"iterations", prior.iterations},
          {"seed", prior.seed}};
}

inline nlohmann::json to_json(const search::StoppingRule& rule, std::size_t resolved_max_steps) {
  return {{"alpha", rule.alpha},
          {"aic_abs_jump", rule.aic_abs_jump},
          {"aic_rel_jump", rule.aic_rel_jump},
          {"max_steps", resolved_max_steps}};
}

/// Table-1 style row: the formula plus headline metrics for one method.
struct MethodRow {
  std::string method;
  std::string formula;
  double r_squared = 0.0;
  double mse = 0.0;
  double aic = 0.0;
  double log_likelihood = 0.0;
  double runtime_seconds = 0.0;
};

inline MethodRow make_row(std::string method, std::string formula, const ols::FitSummary& fit,
                          double runtime_seconds) {
  return {std::move(method), std::move(formula), fit.r_squared,    fit.mse,
          fit.aic,           fit.log_likelihood, runtime_seconds};
}

inline nlohmann::json to_json(const MethodRow& row) {
  return {{"method", row.method},         {"formula", row.formula},
          {"r2", row.r_squared},          {"mse", row.mse},
          {"aic", row.aic},               {"log_likelihood", row.log_likelihood},
          {"runtime_seconds", row.runtime_seconds}};
}

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

/// Aligned text rendering with one column per method.
inline std::string render_table(const std::vector<MethodRow>& rows) {
  std::vector<std::vector<std::string>> cells = {
      {"Algorithm"}, {"Obtained Model"}, {"Runtime (s)"}, {"R^2"}, {"MSE"}, {"AIC"},
      {"Log-Likelihood"}};
  for (const auto& r : rows) {
    char r2[32];
    std::snprintf(r2, sizeof(r2), "%.4f", r.r_squared);
    char rt[32];
    std::snprintf(rt, sizeof(rt), "%.2f", r.runtime_seconds);
    cells[0].push_back(r.method);
    cells[1].push_back(r.formula);
    cells[2].push_back(rt);
    cells[3].push_back(r2);
    cells[4].push_back(sci(r.mse));
    cells[5].push_back(sci(r.aic));
    cells[6].push_back(sci(r.log_likelihood));
  }
  std::vector<std::size_t> width(rows.size() + 1, 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  std::string out;
  for (std::size_t l = 0; l < cells.size(); ++l) {
    for (std::size_t c = 0; c < cells[l].size(); ++c) {
      out += cells[l][c];
      if (c + 1 < cells[l].size()) out += std::string(width[c] - cells[l][c].size() + 2, ' ');
    }
    out += '\n';
    if (l == 0) out += std::string(out.size() - 1, '-') + '\n';
  }
  return out;
}

}  // namespace interlm::report

#endif  // INTERLM_REPORT_HPP
