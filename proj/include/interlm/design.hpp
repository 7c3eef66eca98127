#ifndef INTERLM_DESIGN_HPP
#define INTERLM_DESIGN_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "interlm/error.hpp"
#include "interlm/formula.hpp"
#include "interlm/table.hpp"
#include "interlm/term.hpp"

namespace interlm {

/// One design column: the intercept (no term) or an indicator for one
/// non-reference level of a term. Cross levels read "la:lb" in the term's
/// canonical feature order; label() follows the printed orientation instead.
struct DesignColumn {
  std::optional<Term> term;
  std::string level;
  std::string second_level;  // cross terms only

  bool is_intercept() const { return !term.has_value(); }
  std::string label(std::span<const std::string> feature_order = {}) const {
    if (!term) return "(Intercept)";
    const std::string name = render_term(*term, feature_order);
    if (!term->is_cross()) return name + "[" + level + "]";
    const std::string first_level = level.substr(0, level.size() - second_level.size() - 1);
    const bool flipped = name.rfind(term->first() + "*", 0) != 0;
    return name + "[" + (flipped ? second_level + ":" + first_level : level) + "]";
  }
};

/// Dense one-hot design with column provenance. Column 0 is the intercept;
/// each term owns a contiguous block of columns in term order.
struct DesignMatrix {
  std::vector<DesignColumn> columns;
  Eigen::MatrixXd values;
  std::vector<Term> terms;
  /// [begin, end) column range per entry of `terms`.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> term_ranges;
  std::vector<std::string> feature_order;

  Eigen::Index n() const { return values.rows(); }
  Eigen::Index p() const { return values.cols(); }

  std::optional<std::size_t> term_index(const Term& t) const {
    auto it = std::find(terms.begin(), terms.end(), t);
    if (it == terms.end()) return std::nullopt;
    return static_cast<std::size_t>(it - terms.begin());
  }

  /// Column indices of one term; empty if the term is not in the design.
  std::vector<Eigen::Index> columns_of(const Term& t) const {
    std::vector<Eigen::Index> out;
    if (auto i = term_index(t)) {
      for (auto c = term_ranges[*i].first; c < term_ranges[*i].second; ++c) out.push_back(c);
    }
    return out;
  }
};

/// Level pairs of (a, b) present in the data, sorted by level index.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> observed_pairs(
    const DataTable& table, std::size_t a, std::size_t b) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (const auto& row : table.rows) seen.emplace(row[a], row[b]);
  return {seen.begin(), seen.end()};
}

/// One-hot encodes `terms` in the given order with an intercept column first.
/// Base terms drop their first schema level; cross terms use the observed
/// level pairs and drop the first pair.
inline DesignMatrix build_design(const DataTable& table, std::span<const Term> terms) {
  const Schema& schema = table.schema;
  for (const auto& t : terms) {
    for (const auto& f : t.features()) {
      if (!schema.index_of(f)) {
        throw Error(ErrorCode::schema, "term references unknown feature '" + f + "'");
      }
    }
  }
  {
    std::set<Term> unique(terms.begin(), terms.end());
    if (unique.size() != terms.size()) {
      throw Error(ErrorCode::invalid_argument, "duplicate term in design");
    }
  }

  DesignMatrix dm;
  dm.feature_order = schema.feature_names();
  dm.terms.assign(terms.begin(), terms.end());
  dm.columns.push_back(DesignColumn{std::nullopt, "", ""});

  // Each entry maps a row to its column offset within the term block, or -1
  // for the reference level.
  std::vector<std::vector<int>> row_slots;
  std::vector<std::size_t> block_width;
  for (const auto& t : terms) {
    const auto begin = static_cast<Eigen::Index>(dm.columns.size());
    std::vector<int> slots(table.n(), -1);
    if (!t.is_cross()) {
      const auto fi = *schema.index_of(t.first());
      const auto& levels = schema.features[fi].levels;
      for (std::size_t l = 1; l < levels.size(); ++l) dm.columns.push_back({t, levels[l], ""});
      for (std::size_t r = 0; r < table.n(); ++r) {
        slots[r] = static_cast<int>(table.rows[r][fi]) - 1;
      }
    } else {
      const auto fa = *schema.index_of(t.first());
      const auto fb = *schema.index_of(t.second());
      const auto pairs = observed_pairs(table, fa, fb);
      const auto& la = schema.features[fa].levels;
      const auto& lb = schema.features[fb].levels;
      for (std::size_t k = 1; k < pairs.size(); ++k) {
        dm.columns.push_back(
            {t, la[pairs[k].first] + ":" + lb[pairs[k].second], lb[pairs[k].second]});
      }
      for (std::size_t r = 0; r < table.n(); ++r) {
        const std::pair key{table.rows[r][fa], table.rows[r][fb]};
        const auto it = std::lower_bound(pairs.begin(), pairs.end(), key);
        slots[r] = static_cast<int>(it - pairs.begin()) - 1;
      }
    }
    dm.term_ranges.emplace_back(begin, static_cast<Eigen::Index>(dm.columns.size()));
    row_slots.push_back(std::move(slots));
  }

  if (dm.columns.empty()) {
    throw Error(ErrorCode::invalid_argument, "design has no columns");
  }
  dm.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(table.n()),
                                    static_cast<Eigen::Index>(dm.columns.size()));
  dm.values.col(0).setOnes();
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const auto begin = dm.term_ranges[t].first;
    for (std::size_t r = 0; r < table.n(); ++r) {
      if (row_slots[t][r] >= 0) dm.values(static_cast<Eigen::Index>(r), begin + row_slots[t][r]) = 1.0;
    }
  }
  return dm;
}

inline DesignMatrix build_design(const DataTable& table, const ModelSpec& spec) {
  const auto terms = spec.term_list();
  return build_design(table, std::span<const Term>(terms));
}

/// The design over every base and second-order cross term of the schema.
inline DesignMatrix build_full_design(const DataTable& table) {
  const auto terms = enumerate_terms(table.schema);
  return build_design(table, std::span<const Term>(terms));
}

}  // namespace interlm

#endif  // INTERLM_DESIGN_HPP
