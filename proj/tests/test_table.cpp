#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "interlm/csv.hpp"
#include "interlm/synthgen.hpp"
#include "interlm/table.hpp"

namespace fs = std::filesystem;
using namespace interlm;

namespace {

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / ("interlm_test_" + name);
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

DataTable small_table() {
  Schema s{{{"G", {"F", "M"}}, {"M", {"married", "single"}}}, "S"};
  return make_table(s, {{0, 0}, {1, 1}, {0, 1}}, {1.0, 2.0, 3.0});
}

}  // namespace

TEST(LoadCsv, MinimalIngestion) {
  const auto path = temp_file("min.csv", "G,S\nF,1\nM,2.5\nF,-3\n");
  const DataTable t = load_csv(path, "S");
  ASSERT_EQ(t.schema.features.size(), 1u);
  EXPECT_EQ(t.schema.features[0].name, "G");
  EXPECT_EQ(t.schema.features[0].levels, (std::vector<std::string>{"F", "M"}));
  EXPECT_EQ(t.schema.target, "S");
  EXPECT_EQ(t.n(), 3u);
  EXPECT_EQ(t.rows[1][0], 1u);
  EXPECT_EQ(t.target, (std::vector<double>{1.0, 2.5, -3.0}));
}

TEST(LoadCsv, LevelsSortedAndRowOrderPreserved) {
  const DataTable t = parse_csv("S,Z,A\n1,b,x\n2,a,y\n3,c,x\n", "S");
  ASSERT_EQ(t.schema.features.size(), 2u);
  EXPECT_EQ(t.schema.features[0].name, "Z");
  EXPECT_EQ(t.schema.features[0].levels, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(t.rows[0], (std::vector<std::uint32_t>{1, 0}));
  EXPECT_EQ(t.rows[1], (std::vector<std::uint32_t>{0, 1}));
  EXPECT_EQ(t.target, (std::vector<double>{1, 2, 3}));
}

TEST(LoadCsv, NumericLookingFeaturesStayCategorical) {
  const DataTable t = parse_csv("Age,S\n10,1\n9,2\n", "S");
  // Lexicographic, not numeric.
  EXPECT_EQ(t.schema.features[0].levels, (std::vector<std::string>{"10", "9"}));
}

TEST(LoadCsv, QuotedFieldsAndCrlf) {
  const DataTable t = parse_csv("\"Job, title\",S\r\n\"a \"\"x\"\"\",1\r\nb,2\r\n", "S");
  EXPECT_EQ(t.schema.features[0].name, "Job, title");
  EXPECT_EQ(t.schema.features[0].levels, (std::vector<std::string>{"a \"x\"", "b"}));
}

TEST(LoadCsv, NonNumericTargetNamesRow) {
  try {
    parse_csv("G,S\nF,1\nM,abc\n", "S");
    FAIL() << "expected error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::parse);
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
}

TEST(LoadCsv, Errors) {
  EXPECT_THROW(load_csv("/nonexistent/dir/x.csv", "S"), Error);
  try {
    parse_csv("G,Y\nF,1\nM,2\n", "S");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::schema);
  }
  EXPECT_THROW(parse_csv("G,S\n", "S"), Error);
  EXPECT_THROW(parse_csv("", "S"), Error);
  EXPECT_THROW(parse_csv("G,S\nF,1\n,2\n", "S"), Error);     // missing cell
  EXPECT_THROW(parse_csv("G,S\nF,1\nM\n", "S"), Error);      // ragged row
  EXPECT_THROW(parse_csv("G,S\nF,1\nF,2\n", "S"), Error);    // single level
  EXPECT_THROW(parse_csv("G,S\nF,1\nM,inf\n", "S"), Error);  // non-finite target
}

TEST(LoadCsv, DeterministicForIdenticalBytes) {
  const std::string text = "B,A,S\nx,q,1\ny,p,2\nx,p,3\n";
  EXPECT_EQ(parse_csv(text, "S"), parse_csv(text, "S"));
}

TEST(LoadCsv, GeneratedAdult2RoundTrips) {
  const auto truth = synth::default_ground_truth();
  const DataTable generated = synth::generate(truth, 2000, 11);
  const auto path = fs::temp_directory_path() / "interlm_test_adult2.csv";
  write_csv(generated, path);
  const DataTable loaded = load_csv(path, "S");
  EXPECT_EQ(loaded, generated);
  // Re-serializing the loaded table reproduces the file byte for byte.
  std::ifstream in(path, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(to_csv(loaded), bytes);
}

TEST(Validate, WellFormedTableHasNoViolations) { EXPECT_TRUE(validate(small_table()).empty()); }

TEST(Validate, OutOfRangeLevel) {
  DataTable t = small_table();
  t.rows[2][1] = 2;  // == number of levels
  const auto v = validate(t);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("row 2"), std::string::npos);
  EXPECT_NE(v[0].find("'M'"), std::string::npos);
}

TEST(Validate, EmptyTable) {
  DataTable t = small_table();
  t.rows.clear();
  t.target.clear();
  const auto v = validate(t);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("empty"), std::string::npos);
}

TEST(Validate, SchemaProblems) {
  DataTable t = small_table();
  t.schema.target = "G";
  t.schema.features[1].levels = {"x", "x"};
  EXPECT_EQ(validate(t).size(), 2u);
  t.target.pop_back();
  EXPECT_EQ(validate(t).size(), 3u);
  EXPECT_THROW(make_table(t.schema, t.rows, t.target), Error);
}

TEST(FormatDouble, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789, 30000.0}) {
    const std::string s = format_double(v);
    EXPECT_EQ(std::stod(s), v) << s;
  }
}
