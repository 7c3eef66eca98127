#ifndef INTERLM_TERM_HPP
#define INTERLM_TERM_HPP

#include <algorithm>
#include <compare>
#include <initializer_list>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "interlm/error.hpp"
#include "interlm/table.hpp"

namespace interlm {

/// A base feature or an unordered pair of distinct features.
///
/// Cross terms keep the pair sorted lexicographically, so Cross(M, G) and
/// Cross(G, M) are the same term. Canonical order puts every base term
/// before every cross term, each group lexicographic.
class Term {
 public:
  static Term base(std::string feature) {
    if (feature.empty()) throw Error(ErrorCode::invalid_argument, "term feature name is empty");
    return Term(std::move(feature), {});
  }

  static Term cross(std::string a, std::string b) {
    if (a.empty() || b.empty()) {
      throw Error(ErrorCode::invalid_argument, "term feature name is empty");
    }
    if (a == b) throw Error(ErrorCode::invalid_argument, "cross term of '" + a + "' with itself");
    if (b < a) std::swap(a, b);
    return Term(std::move(a), std::move(b));
  }

  bool is_cross() const { return !second_.empty(); }
  const std::string& first() const { return first_; }
  /// Empty for base terms.
  const std::string& second() const { return second_; }

  bool involves(std::string_view feature) const {
    return first_ == feature || second_ == feature;
  }

  std::vector<std::string> features() const {
    if (is_cross()) return {first_, second_};
    return {first_};
  }

  friend bool operator==(const Term&, const Term&) = default;
  friend std::strong_ordering operator<=>(const Term& l, const Term& r) {
    if (auto c = l.is_cross() <=> r.is_cross(); c != 0) return c;
    if (auto c = l.first_ <=> r.first_; c != 0) return c;
    return l.second_ <=> r.second_;
  }

 private:
  Term(std::string a, std::string b) : first_(std::move(a)), second_(std::move(b)) {}

  std::string first_;
  std::string second_;
};

/// A normalized set of terms: no base term whose feature also appears in a
/// cross term. Only constructible through normalize_spec().
class ModelSpec {
 public:
  ModelSpec() = default;

  const std::set<Term>& terms() const { return terms_; }
  bool include_intercept() const { return true; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  bool contains(const Term& t) const { return terms_.contains(t); }
  std::vector<Term> term_list() const { return {terms_.begin(), terms_.end()}; }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;

 private:
  friend ModelSpec normalize_spec(const std::set<Term>& terms);
  std::set<Term> terms_;
};

/// Drops every Base(f) whose feature takes part in some cross term.
inline ModelSpec normalize_spec(const std::set<Term>& terms) {
  std::set<std::string> crossed;
  for (const auto& t : terms) {
    if (t.is_cross()) {
      crossed.insert(t.first());
      crossed.insert(t.second());
    }
  }
  ModelSpec spec;
  for (const auto& t : terms) {
    if (t.is_cross() || !crossed.contains(t.first())) spec.terms_.insert(t);
  }
  return spec;
}

template <typename Range>
ModelSpec normalize_spec(const Range& terms) {
  return normalize_spec(std::set<Term>(std::begin(terms), std::end(terms)));
}

inline ModelSpec normalize_spec(std::initializer_list<Term> terms) {
  return normalize_spec(std::set<Term>(terms));
}

/// All base terms, then all second-order crosses, in canonical order.
inline std::vector<Term> enumerate_terms(const Schema& schema) {
  auto names = schema.feature_names();
  std::sort(names.begin(), names.end());
  std::vector<Term> terms;
  terms.reserve(names.size() * (names.size() + 1) / 2);
  for (const auto& n : names) terms.push_back(Term::base(n));
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = i + 1; j < names.size(); ++j) {
      terms.push_back(Term::cross(names[i], names[j]));
    }
  }
  return terms;
}

}  // namespace interlm

#endif  // INTERLM_TERM_HPP
