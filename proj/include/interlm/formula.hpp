#ifndef INTERLM_FORMULA_HPP
#define INTERLM_FORMULA_HPP

#include <algorithm>
#include <cctype>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "interlm/error.hpp"
#include "interlm/term.hpp"

namespace interlm {

/// Prints `F` or `A*B`. Cross terms are oriented by position in
/// `feature_order` when both features appear there, otherwise alphabetically.
inline std::string render_term(const Term& term, std::span<const std::string> feature_order = {}) {
  if (!term.is_cross()) return term.first();
  auto pos = [&](const std::string& f) {
    return static_cast<std::size_t>(std::find(feature_order.begin(), feature_order.end(), f) -
                                    feature_order.begin());
  };
  std::string a = term.first();
  std::string b = term.second();
  const auto pa = pos(a);
  const auto pb = pos(b);
  if (pa < feature_order.size() && pb < feature_order.size() && pb < pa) std::swap(a, b);
  return a + "*" + b;
}

/// `TARGET ~ T1 + T2 + ...`, terms sorted by their printed form; `TARGET ~ 1`
/// for the intercept-only model.
inline std::string format_formula(std::string_view target, const ModelSpec& spec,
                                  std::span<const std::string> feature_order = {}) {
  std::vector<std::string> parts;
  for (const auto& t : spec.terms()) parts.push_back(render_term(t, feature_order));
  std::sort(parts.begin(), parts.end());
  std::string out(target);
  out += " ~ ";
  if (parts.empty()) return out + "1";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += " + ";
    out += parts[i];
  }
  return out;
}

struct ParsedFormula {
  std::string target;
  std::vector<Term> terms;  // as written; empty for `~ 1`
};

namespace detail {

class FormulaLexer {
 public:
  explicit FormulaLexer(std::string_view text) : text_(text) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string name() {
    skip_space();
    const auto start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '~' || c == '+' || c == '*' ||
          c == '(' || c == ')' || c == ':' || c == '^') {
        break;
      }
      ++pos_;
    }
    if (pos_ == start) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::parse, "formula column " + std::to_string(pos_ + 1) + ": " + msg);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Accepts `TARGET ~ term (+ term)*` with term = name | name*name, or
/// `TARGET ~ 1`. Higher-order products and any other operators are rejected.
inline ParsedFormula parse_formula(std::string_view text) {
  detail::FormulaLexer lex(text);
  ParsedFormula out;
  out.target = lex.name();
  lex.expect('~');
  lex.skip_space();
  bool intercept_only = false;
  do {
    std::string first = lex.name();
    if (first == "1") {
      intercept_only = true;
      continue;
    }
    if (lex.accept('*')) {
      std::string second = lex.name();
      if (second == first) lex.fail("cross of '" + first + "' with itself");
      out.terms.push_back(Term::cross(first, second));
      if (lex.accept('*')) lex.fail("interactions above second order are not supported");
    } else {
      out.terms.push_back(Term::base(first));
    }
  } while (lex.accept('+'));
  if (!lex.at_end()) lex.fail("unexpected trailing input");
  if (intercept_only && !out.terms.empty()) {
    lex.fail("'1' cannot be combined with other terms");
  }
  return out;
}

}  // namespace interlm

#endif  // INTERLM_FORMULA_HPP
