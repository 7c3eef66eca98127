#ifndef INTERLM_TABLE_HPP
#define INTERLM_TABLE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "interlm/error.hpp"

namespace interlm {

/// A categorical column and its ordered level labels.
struct Feature {
  std::string name;
  std::vector<std::string> levels;

  bool operator==(const Feature&) const = default;
};

/// Categorical feature universe plus the name of the numeric target column.
struct Schema {
  std::vector<Feature> features;
  std::string target;

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (features[i].name == name) return i;
    }
    return std::nullopt;
  }

  const Feature& feature(std::string_view name) const {
    if (auto idx = index_of(name)) return features[*idx];
    throw Error(ErrorCode::schema, "unknown feature '" + std::string(name) + "'");
  }

  std::vector<std::string> feature_names() const {
    std::vector<std::string> names;
    names.reserve(features.size());
    for (const auto& f : features) names.push_back(f.name);
    return names;
  }

  bool operator==(const Schema&) const = default;
};

/// Rows of level indices (one per schema feature) with one real target per row.
///
/// Treated as immutable once built; use make_table() to construct a checked
/// instance.
struct DataTable {
  Schema schema;
  std::vector<std::vector<std::uint32_t>> rows;
  std::vector<double> target;

  std::size_t n() const { return rows.size(); }

  bool operator==(const DataTable&) const = default;
};

inline std::vector<std::string> validate_schema(const Schema& schema) {
  std::vector<std::string> out;
  std::set<std::string> names;
  for (std::size_t i = 0; i < schema.features.size(); ++i) {
    const auto& f = schema.features[i];
    if (f.name.empty()) out.push_back("feature " + std::to_string(i) + ": empty name");
    if (!names.insert(f.name).second) out.push_back("feature '" + f.name + "': duplicate name");
    if (f.levels.size() < 2) {
      out.push_back("feature '" + f.name + "': fewer than 2 levels");
    }
    std::set<std::string> labels(f.levels.begin(), f.levels.end());
    if (labels.size() != f.levels.size()) {
      out.push_back("feature '" + f.name + "': duplicate level labels");
    }
  }
  if (names.contains(schema.target)) {
    out.push_back("target '" + schema.target + "' collides with a feature name");
  }
  return out;
}

/// Lists every invariant violation; empty iff the table is well formed.
inline std::vector<std::string> validate(const DataTable& table) {
  std::vector<std::string> out = validate_schema(table.schema);
  if (table.rows.empty()) out.push_back("table is empty (n = 0)");
  if (table.rows.size() != table.target.size()) {
    out.push_back("row count " + std::to_string(table.rows.size()) + " != target count " +
                  std::to_string(table.target.size()));
  }
  const auto& features = table.schema.features;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != features.size()) {
      out.push_back("row " + std::to_string(r) + ": has " + std::to_string(row.size()) +
                    " cells, expected " + std::to_string(features.size()));
      continue;
    }
    for (std::size_t f = 0; f < features.size(); ++f) {
      if (row[f] >= features[f].levels.size()) {
        out.push_back("row " + std::to_string(r) + ", feature '" + features[f].name +
                      "': level index " + std::to_string(row[f]) + " out of range [0, " +
                      std::to_string(features[f].levels.size()) + ")");
      }
    }
  }
  return out;
}

inline DataTable make_table(Schema schema, std::vector<std::vector<std::uint32_t>> rows,
                            std::vector<double> target) {
  DataTable table{std::move(schema), std::move(rows), std::move(target)};
  if (auto problems = validate(table); !problems.empty()) {
    throw Error(ErrorCode::schema, "invalid table: " + problems.front());
  }
  return table;
}

}  // namespace interlm

#endif  // INTERLM_TABLE_HPP
