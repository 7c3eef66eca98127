#include <random>
#include <set>

#include <gtest/gtest.h>

#include "interlm/design.hpp"
#include "interlm/formula.hpp"
#include "interlm/synthgen.hpp"
#include "interlm/term.hpp"
#include "oracles.hpp"

using namespace interlm;

namespace {

Schema schema_of(std::size_t features) {
  Schema s;
  s.target = "Y";
  for (std::size_t i = 0; i < features; ++i) {
    s.features.push_back({std::string(1, static_cast<char>('A' + i)), {"l0", "l1", "l2"}});
  }
  return s;
}

DataTable gm_table(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& rows) {
  Schema s{{{"G", {"F", "M"}}, {"M", {"married", "single"}}}, "S"};
  std::vector<std::vector<std::uint32_t>> r;
  std::vector<double> y;
  for (auto [g, m] : rows) {
    r.push_back({g, m});
    y.push_back(1.0);
  }
  return make_table(s, r, y);
}

}  // namespace

TEST(Term, CanonicalCross) {
  EXPECT_EQ(Term::cross("M", "G"), Term::cross("G", "M"));
  EXPECT_EQ(Term::cross("M", "G").first(), "G");
  EXPECT_THROW(Term::cross("G", "G"), Error);
  EXPECT_LT(Term::base("Z"), Term::cross("A", "B"));
  EXPECT_LT(Term::cross("A", "C"), Term::cross("B", "C"));
}

TEST(EnumerateTerms, Counts) {
  EXPECT_EQ(enumerate_terms(schema_of(8)).size(), 36u);
  const auto one = enumerate_terms(schema_of(1));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_FALSE(one[0].is_cross());
}

TEST(EnumerateTerms, TwoFeaturesInCanonicalOrder) {
  Schema s{{{"B", {"x", "y"}}, {"A", {"x", "y"}}}, "Y"};
  EXPECT_EQ(enumerate_terms(s),
            (std::vector<Term>{Term::base("A"), Term::base("B"), Term::cross("A", "B")}));
}

TEST(EnumerateTerms, AdultSchemaHas36) {
  const auto terms = enumerate_terms(synth::default_ground_truth().schema);
  EXPECT_EQ(terms.size(), 36u);
  EXPECT_TRUE(std::is_sorted(terms.begin(), terms.end()));
}

TEST(NormalizeSpec, RedundancyRule) {
  const auto spec = normalize_spec({Term::base("G"), Term::base("M"), Term::cross("G", "M")});
  EXPECT_EQ(spec.term_list(), (std::vector<Term>{Term::cross("G", "M")}));
  const auto kept = normalize_spec({Term::base("A"), Term::cross("G", "M")});
  EXPECT_EQ(kept.size(), 2u);
  EXPECT_TRUE(kept.contains(Term::base("A")));
}

TEST(NormalizeSpec, IdempotentOnRandomSets) {
  const auto universe = enumerate_terms(schema_of(6));
  std::mt19937_64 rng(5);
  std::bernoulli_distribution coin(0.3);
  for (int trial = 0; trial < 1000; ++trial) {
    std::set<Term> terms;
    for (const auto& t : universe) {
      if (coin(rng)) terms.insert(t);
    }
    const ModelSpec once = normalize_spec(terms);
    EXPECT_EQ(normalize_spec(once.terms()), once);
    for (const auto& t : once.terms()) {
      if (t.is_cross()) continue;
      for (const auto& u : once.terms()) EXPECT_FALSE(u.is_cross() && u.involves(t.first()));
    }
  }
}

TEST(Formula, RendersTableNotation) {
  const std::vector<std::string> order{"A", "W", "E", "C", "R", "M", "G", "O"};
  const auto truth = normalize_spec({Term::base("C"), Term::base("E"), Term::cross("M", "G"),
                                     Term::base("O"), Term::base("W")});
  EXPECT_EQ(format_formula("S", truth, order), "S ~ C + E + M*G + O + W");
  const auto backward = normalize_spec({Term::cross("A", "R"), Term::cross("C", "O"),
                                        Term::base("E"), Term::cross("G", "M"), Term::base("W")});
  EXPECT_EQ(format_formula("S", backward, order), "S ~ A*R + C*O + E + M*G + W");
  EXPECT_EQ(format_formula("S", ModelSpec{}, order), "S ~ 1");
  // Without an order, crosses print alphabetically.
  EXPECT_EQ(format_formula("S", truth), "S ~ C + E + G*M + O + W");
}

TEST(Formula, ParseAcceptsGrammar) {
  const auto f = parse_formula("S ~ C + E + M*G + O + W");
  EXPECT_EQ(f.target, "S");
  ASSERT_EQ(f.terms.size(), 5u);
  EXPECT_EQ(f.terms[2], Term::cross("G", "M"));
  EXPECT_TRUE(parse_formula("S~1").terms.empty());
  EXPECT_EQ(parse_formula("  Salary ~ Age*Work ").terms.front(), Term::cross("Age", "Work"));
}

TEST(Formula, ParseRejectsWithColumn) {
  for (const char* bad : {"S ~ A*B*C", "S C + E", "S ~ A +", "S ~ (A)", "S ~ A:B", "S ~ 1 + A",
                          "S ~ A*A", "~ A"}) {
    try {
      parse_formula(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::parse) << bad;
      EXPECT_NE(std::string(e.what()).find("column"), std::string::npos) << e.what();
    }
  }
}

TEST(Formula, RoundTripThroughParse) {
  const std::vector<std::string> order{"A", "W", "E", "C", "R", "M", "G", "O"};
  const auto spec = normalize_spec({Term::cross("A", "R"), Term::base("E"), Term::cross("G", "M")});
  const std::string text = format_formula("S", spec, order);
  EXPECT_EQ(normalize_spec(parse_formula(text).terms), spec);
}

TEST(BuildDesign, TwoLevelBase) {
  const DataTable t = gm_table({{0, 0}, {1, 0}, {0, 1}});
  const auto dm = build_design(t, normalize_spec({Term::base("G")}));
  ASSERT_EQ(dm.p(), 2);
  Eigen::MatrixXd expected(3, 2);
  expected << 1, 0, 1, 1, 1, 0;
  EXPECT_EQ(dm.values, expected);
  EXPECT_TRUE(dm.columns[0].is_intercept());
  EXPECT_EQ(dm.columns[1].level, "M");
}

TEST(BuildDesign, CrossUsesObservedPairsDroppingFirst) {
  const DataTable t = gm_table({{0, 0}, {0, 1}, {1, 0}, {1, 1}, {1, 1}});
  const auto dm = build_design(t, normalize_spec({Term::cross("M", "G")}));
  ASSERT_EQ(dm.p(), 4);
  EXPECT_EQ(dm.columns[1].level, "F:single");
  EXPECT_EQ(dm.columns[3].level, "M:single");
  EXPECT_EQ(dm.columns[3].label(), "G*M[M:single]");
  const std::vector<std::string> order{"M", "G"};
  EXPECT_EQ(dm.columns[3].label(order), "M*G[single:M]");
  EXPECT_EQ(dm.values.row(0).tail(3).sum(), 0.0);  // reference pair (F, married)
  EXPECT_EQ(dm.values(4, 3), 1.0);

  const DataTable partial = gm_table({{0, 0}, {1, 1}, {1, 1}});
  EXPECT_EQ(build_design(partial, normalize_spec({Term::cross("G", "M")})).p(), 2);
}

TEST(BuildDesign, UnknownFeature) {
  const DataTable t = gm_table({{0, 0}, {1, 1}});
  EXPECT_THROW(build_design(t, normalize_spec({Term::base("Q")})), Error);
}

TEST(BuildDesign, FullAdultDesignMatchesPairCountingOracle) {
  const auto truth = synth::default_ground_truth();
  const DataTable t = synth::generate(truth, 2000, 3);
  const auto terms = enumerate_terms(t.schema);
  const auto dm = build_full_design(t);
  const auto expected = oracle::design_column_count(t, terms);
  EXPECT_EQ(static_cast<std::size_t>(dm.p()), expected);
  // Every level pair shows up at n = 2000, so the count is the closed form
  // 1 + Σ(L−1) + Σ(La·Lb − 1) over the default level counts.
  std::size_t closed = 1;
  const auto& f = t.schema.features;
  for (std::size_t i = 0; i < f.size(); ++i) {
    closed += f[i].levels.size() - 1;
    for (std::size_t j = i + 1; j < f.size(); ++j) {
      closed += f[i].levels.size() * f[j].levels.size() - 1;
    }
  }
  EXPECT_EQ(expected, closed);
  EXPECT_EQ(closed, 472u);
}

TEST(BuildDesign, IndicatorBlocksAreExclusiveAndRemovalIsLocal) {
  const auto truth = synth::default_ground_truth();
  const DataTable t = synth::generate(truth, 300, 9);
  const auto terms = enumerate_terms(t.schema);
  const auto dm = build_design(t, std::span<const Term>(terms));
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto [b, e] = dm.term_ranges[k];
    const Eigen::VectorXd sums = dm.values.middleCols(b, e - b).rowwise().sum();
    EXPECT_LE(sums.maxCoeff(), 1.0);
    EXPECT_GE(sums.minCoeff(), 0.0);
  }
  EXPECT_EQ(build_design(t, std::span<const Term>(terms)).values, dm.values);

  // Dropping one term removes exactly its block.
  std::mt19937 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t drop = rng() % terms.size();
    std::vector<Term> fewer = terms;
    fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(drop));
    const auto smaller = build_design(t, std::span<const Term>(fewer));
    const auto [b, e] = dm.term_ranges[drop];
    ASSERT_EQ(smaller.p(), dm.p() - (e - b));
    EXPECT_EQ(smaller.values.leftCols(b), dm.values.leftCols(b));
    EXPECT_EQ(smaller.values.rightCols(dm.p() - e), dm.values.rightCols(dm.p() - e));
  }
}
