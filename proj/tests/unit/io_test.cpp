#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "evtlearn/config.hpp"
#include "evtlearn/csv.hpp"
#include "evtlearn/model_io.hpp"

namespace evtlearn {
namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

TEST(Csv, WellFormed) {
  std::istringstream in("a,b\n1,2\n3,4.5\n-1e3,+7\n");
  const Dataset d = parse_csv(in);
  EXPECT_EQ(d.n(), 3u);
  EXPECT_EQ(d.d(), 2u);
  EXPECT_EQ(d.x(2, 0), -1000.0);
  EXPECT_EQ(d.x(2, 1), 7.0);
  EXPECT_EQ(d.columns, (std::vector<std::string>{"a", "b"}));
}

TEST(Csv, CrlfAndBlankLines) {
  std::istringstream in("a,b\r\n1,2\r\n\r\n3,4\r\n");
  EXPECT_EQ(parse_csv(in).n(), 2u);
}

TEST(Csv, RaggedRow) {
  std::istringstream in("a,b\n1,2\n3\n");
  EXPECT_NE(error_of([&] { parse_csv(in); }).find("row 2: expected 2 fields"), std::string::npos);
}

TEST(Csv, HeaderOnly) {
  std::istringstream in("a,b\n");
  EXPECT_NE(error_of([&] { parse_csv(in); }).find("no data rows"), std::string::npos);
  std::istringstream empty("");
  EXPECT_THROW(parse_csv(empty), std::exception);
}

TEST(Csv, NonNumericCellNamesRowAndColumn) {
  std::istringstream in("a,b\n1,2\n3,x\n");
  const auto msg = error_of([&] { parse_csv(in); });
  EXPECT_NE(msg.find("row 2"), std::string::npos);
  EXPECT_NE(msg.find("'b'"), std::string::npos);
}

TEST(Csv, TargetLookupIsCaseSensitive) {
  std::istringstream in("Food,Trans\n1,2\n");
  CsvSchema schema;
  schema.target = "Trans";
  const Dataset d = parse_csv(in, schema);
  EXPECT_EQ(d.d(), 1u);
  EXPECT_EQ((*d.target)(0), 2.0);

  std::istringstream lower("Food,trans\n1,2\n");
  EXPECT_NE(error_of([&] { parse_csv(lower, schema); }).find("missing column 'Trans'"), std::string::npos);
}

TEST(Csv, LabelsMustBeSigns) {
  CsvSchema schema;
  schema.label = "y";
  std::istringstream good("a,y\n1,1\n2,-1\n");
  EXPECT_EQ(*parse_csv(good, schema).labels, (std::vector<int>{1, -1}));
  std::istringstream bad("a,y\n1,0\n");
  EXPECT_THROW(parse_csv(bad, schema), std::exception);
}

TEST(Csv, WriteParseRoundTrip) {
  Dataset d;
  d.x.resize(2, 2);
  d.x << 0.1, 1.0 / 3.0, 1e-300, -2.5;
  d.target = Eigen::Vector2d(std::nextafter(1.0, 2.0), 4.0);
  std::ostringstream out;
  write_dataset_csv(out, d);
  EXPECT_EQ(out.str().substr(0, 8), "x1,x2,y\n");
  std::istringstream in(out.str());
  CsvSchema schema;
  schema.target = "y";
  const Dataset back = parse_csv(in, schema);
  EXPECT_EQ(back.x, d.x);
  EXPECT_EQ(*back.target, *d.target);
}

TEST(Csv, ParseDouble) {
  EXPECT_EQ(parse_double("1.5"), 1.5);
  EXPECT_EQ(parse_double("+2"), 2.0);
  EXPECT_FALSE(parse_double("1.5x").has_value());
  EXPECT_FALSE(parse_double("").has_value());
  EXPECT_EQ(format_double(0.1), "0.1");
}

TEST(ModelIo, LinearModelBitExact) {
  AngularLinearModel m;
  m.beta = Eigen::Vector3d(1.0 / 3.0, 0.0, -std::sqrt(2.0));
  m.lambda = 0.0123456789;
  m.k = 77;
  m.norm = NormSpec::linf();
  m.standardization = Standardization::kRank;
  m.converged = true;
  std::stringstream buf;
  save_model(buf, m);
  EXPECT_EQ(peek_model_kind(buf), "xlasso");
  buf.seekg(0);
  const AngularLinearModel back = load_linear_model(buf);
  EXPECT_EQ(back.beta, m.beta);
  EXPECT_EQ(back.lambda, m.lambda);
  EXPECT_EQ(back.k, m.k);
  EXPECT_EQ(back.norm, m.norm);
  EXPECT_EQ(back.standardization, m.standardization);
}

TEST(ModelIo, ClassifierBitExact) {
  AngularClassifier c;
  c.beta = Eigen::Vector2d(0.7, -1e-17);
  c.mode = ClassifierMode::constrained(3.5);
  c.k = 12;
  c.norm = NormSpec(1.5);
  std::stringstream buf;
  save_model(buf, c);
  const AngularClassifier back = load_classifier(buf);
  EXPECT_EQ(back.beta, c.beta);
  EXPECT_EQ(back.mode.kind, c.mode.kind);
  EXPECT_EQ(back.mode.value, c.mode.value);
  EXPECT_EQ(back.norm, c.norm);
}

TEST(ModelIo, MvSetBitExactViaFile) {
  MvSetModel m;
  m.grid = build_grid(3, 2);
  m.cell_masses.assign(m.grid.cell_count(), 0.0);
  m.cell_masses[1] = 0.6;
  m.cell_masses[7] = 0.4;
  m.selected_cells = {1, 7};
  m.alpha = 0.9;
  m.psi = std::sqrt(std::log(10.0) / 500.0);
  m.achieved_mass = 1.0;
  m.k = 500;
  const auto path = std::filesystem::temp_directory_path() / "evtlearn_io_test.model";
  save_model_file(path, m);
  const MvSetModel back = load_mvset_model_file(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.grid, m.grid);
  EXPECT_EQ(back.cell_masses, m.cell_masses);
  EXPECT_EQ(back.selected_cells, m.selected_cells);
  EXPECT_EQ(back.psi, m.psi);
  EXPECT_EQ(back.k, m.k);
}

TEST(ModelIo, WrongKindOrHeader) {
  AngularLinearModel m;
  m.beta = Eigen::Vector2d(1.0, 2.0);
  std::stringstream buf;
  save_model(buf, m);
  EXPECT_THROW(load_classifier(buf), std::exception);
  std::istringstream junk("not a model\n");
  EXPECT_THROW(peek_model_kind(junk), std::exception);
}

Schema test_schema() {
  return {
      {"input", KeyType::kString, std::nullopt, {}, {}},
      {"delta", KeyType::kReal, "0.1", Range::open(0.0, 1.0), {}},
      {"k", KeyType::kCount, "", Range::at_least(1.0), {}},
      {"grid", KeyType::kRealList, "1,2", {}, {}},
      {"method", KeyType::kString, "rank", {}, {"rank", "known-pareto"}},
  };
}

TEST(Config, ParseAndDefaults) {
  std::istringstream in("# comment\ninput = data.csv\n\nk = 40  # trailing\ngrid = 0.5, 2\n");
  const Config c = Config::parse(in, test_schema());
  EXPECT_EQ(c.str("input"), "data.csv");
  EXPECT_EQ(c.count("k"), 40u);
  EXPECT_DOUBLE_EQ(c.real("delta"), 0.1);
  EXPECT_EQ(c.reals("grid"), (std::vector<double>{0.5, 2.0}));
  EXPECT_EQ(c.str("method"), "rank");
}

TEST(Config, RejectsUnknownKey) {
  std::istringstream in("input = a\nlamda = 3\n");
  const auto msg = error_of([&] { Config::parse(in, test_schema()); });
  EXPECT_NE(msg.find("line 2"), std::string::npos);
  EXPECT_NE(msg.find("lamda"), std::string::npos);
}

TEST(Config, RangeAndTypeErrors) {
  Config c(test_schema());
  EXPECT_THROW(c.set("delta", "1"), ConfigError);
  EXPECT_THROW(c.set("delta", "abc"), ConfigError);
  EXPECT_THROW(c.set("k", "0"), ConfigError);
  EXPECT_THROW(c.set("k", "2.5"), ConfigError);
  EXPECT_THROW(c.set("method", "ecdf"), ConfigError);
  EXPECT_THROW(c.require_complete(), ConfigError);
  c.set("input", "x");
  EXPECT_NO_THROW(c.require_complete());
  EXPECT_FALSE(c.has("k"));
}

TEST(Config, LaterSetOverrides) {
  Config c(test_schema());
  c.set("delta", "0.2");
  c.set("delta", "0.3");
  EXPECT_DOUBLE_EQ(c.real("delta"), 0.3);
}

}  // namespace
}  // namespace evtlearn
