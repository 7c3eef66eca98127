#ifndef INTERLM_CSV_HPP
#define INTERLM_CSV_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "interlm/error.hpp"
#include "interlm/table.hpp"

namespace interlm {

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

namespace csv {

using Record = std::vector<std::string>;

/// RFC-4180 reader: quoted fields, doubled quotes, CRLF or LF line ends.
/// A trailing newline does not produce an extra record.
inline std::vector<Record> parse(std::string_view text) {
  std::vector<Record> records;
  Record record;
  std::string field;
  bool in_quotes = false;
  bool field_quoted = false;
  bool record_open = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
    record_open = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_quoted) {
          throw Error(ErrorCode::parse,
                      "line " + std::to_string(line) + ": unexpected quote inside field");
        }
        in_quotes = true;
        field_quoted = true;
        record_open = true;
        break;
      case ',':
        end_field();
        record_open = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        break;
      default:
        if (field_quoted) {
          throw Error(ErrorCode::parse,
                      "line " + std::to_string(line) + ": text after closing quote");
        }
        field.push_back(c);
        record_open = true;
    }
  }
  if (in_quotes) throw Error(ErrorCode::parse, "unterminated quoted field");
  if (record_open || !field.empty()) end_record();
  return records;
}

inline std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace csv

/// Parses CSV text into a DataTable. Every non-target column is categorical;
/// its levels are the sorted distinct values, and column order is preserved.
inline DataTable parse_csv(std::string_view text, std::string_view target_column) {
  auto records = csv::parse(text);
  if (records.empty()) throw Error(ErrorCode::parse, "missing header row");
  const csv::Record header = std::move(records.front());
  records.erase(records.begin());

  auto target_it = std::find(header.begin(), header.end(), target_column);
  if (target_it == header.end()) {
    throw Error(ErrorCode::schema, "target column '" + std::string(target_column) + "' not found");
  }
  const auto target_idx = static_cast<std::size_t>(target_it - header.begin());
  if (records.empty()) throw Error(ErrorCode::schema, "table has no data rows");

  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != target_idx) feature_cols.push_back(c);
  }

  std::vector<double> target;
  target.reserve(records.size());
  std::vector<std::map<std::string, std::uint32_t>> level_maps(feature_cols.size());

  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    // Data rows are reported 1-based, not counting the header.
    const std::string where = "row " + std::to_string(r + 1);
    if (rec.size() != header.size()) {
      throw Error(ErrorCode::parse, where + ": expected " + std::to_string(header.size()) +
                                        " fields, got " + std::to_string(rec.size()));
    }
    const std::string& cell = rec[target_idx];
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() ||
        !std::isfinite(value)) {
      throw Error(ErrorCode::parse,
                  where + ": non-numeric target value '" + cell + "' in column '" +
                      std::string(target_column) + "'");
    }
    target.push_back(value);
    for (std::size_t f = 0; f < feature_cols.size(); ++f) {
      const std::string& label = rec[feature_cols[f]];
      if (label.empty()) {
        throw Error(ErrorCode::parse,
                    where + ": missing value in column '" + header[feature_cols[f]] + "'");
      }
      level_maps[f].emplace(label, 0);
    }
  }

  Schema schema;
  schema.target = std::string(target_column);
  for (std::size_t f = 0; f < feature_cols.size(); ++f) {
    Feature feature{header[feature_cols[f]], {}};
    std::uint32_t idx = 0;
    for (auto& [label, code] : level_maps[f]) {
      code = idx++;
      feature.levels.push_back(label);
    }
    schema.features.push_back(std::move(feature));
  }
  if (auto problems = validate_schema(schema); !problems.empty()) {
    throw Error(ErrorCode::schema, problems.front());
  }

  std::vector<std::vector<std::uint32_t>> rows(records.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    rows[r].reserve(feature_cols.size());
    for (std::size_t f = 0; f < feature_cols.size(); ++f) {
      rows[r].push_back(level_maps[f].at(records[r][feature_cols[f]]));
    }
  }
  return make_table(std::move(schema), std::move(rows), std::move(target));
}

inline DataTable load_csv(const std::filesystem::path& path, std::string_view target_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), target_column);
}

/// Features in schema order, target last. Targets use the shortest
/// round-trip representation, so reloading reproduces the table exactly
/// as long as every level occurs and levels are already sorted.
inline std::string to_csv(const DataTable& table) {
  std::string out;
  for (const auto& f : table.schema.features) {
    out += csv::quote(f.name);
    out += ',';
  }
  out += csv::quote(table.schema.target);
  out += '\n';
  for (std::size_t r = 0; r < table.n(); ++r) {
    for (std::size_t f = 0; f < table.schema.features.size(); ++f) {
      out += csv::quote(table.schema.features[f].levels[table.rows[r][f]]);
      out += ',';
    }
    out += format_double(table.target[r]);
    out += '\n';
  }
  return out;
}

inline void write_csv(const DataTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
  out << to_csv(table);
  if (!out) throw Error(ErrorCode::io, "write failed for '" + path.string() + "'");
}

}  // namespace interlm

#endif  // INTERLM_CSV_HPP
