#include "catch_amalgamated.hpp"

#include <sstream>

#include "tvfgn/config.hpp"
#include "tvfgn/series.hpp"

using namespace tvfgn;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

SeriesData read(const std::string& text) {
  std::istringstream is(text);
  return read_series_csv(is, "mem");
}

KeyValueConfig conf(const std::string& text) {
  std::istringstream is(text);
  return KeyValueConfig::parse(is, "cfg");
}

}  // namespace

TEST_CASE("read_series_csv: one column, header and comments", "[series]") {
  const auto s = read("# comment\nvalue\n1.5\n-2\n\n3e-1\n");
  CHECK(s.size() == 3);
  CHECK(s.unit_spacing);
  CHECK(s.timestamps == std::vector<double>{1, 2, 3});
  CHECK(s.values == std::vector<double>{1.5, -2.0, 0.3});
  CHECK(s.source == "mem");
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("read_series_csv: two columns and delimiters", "[series]") {
  const auto a = read("time,value\n1850.5, 0.1\n1851.5,0.2\n1853,-0.4\n");
  CHECK_FALSE(a.unit_spacing);
  CHECK(a.timestamps == std::vector<double>{1850.5, 1851.5, 1853});
  CHECK(a.values == std::vector<double>{0.1, 0.2, -0.4});
  const auto b = read("1;4\n2;5\n");
  CHECK(b.values == std::vector<double>{4, 5});
  const auto c = read("1\t4\n2\t5\n");
  CHECK(c.values == std::vector<double>{4, 5});
  const auto d = read("1 4\n2   5\n");
  CHECK(d.timestamps == std::vector<double>{1, 2});
}

TEST_CASE("read_series_csv: errors name the offending row", "[series]") {
  auto fails_with = [](const std::string& text, const std::string& what) {
    INFO(text);
    CHECK_THROWS_WITH(read(text), ContainsSubstring(what));
    CHECK_THROWS_AS(read(text), IngestionError);
  };
  fails_with("time,value\n1,2\n2,abc\n", "row 3");
  fails_with("1,2\n2,NA\n", "row 2: non-finite value");
  fails_with("1,2\n2,inf\n", "non-finite value");
  fails_with("1,2\n1,3\n", "row 2: time not strictly increasing");
  fails_with("2,2\n1,3\n", "not strictly increasing");
  fails_with("1,2,3\n", "row 1: expected one");
  fails_with("1,2\n5\n", "row 2: inconsistent column count");
  fails_with("1,2\n2,\n", "row 2");
  fails_with("value\n", "no data rows");
  fails_with("", "no data rows");
  fails_with("1\nvalue\n", "row 2");
  CHECK_THROWS_AS(read_series_file("/nonexistent/file.csv"), IngestionError);
}

TEST_CASE("SeriesData: standardization round trip and validation", "[series]") {
  auto s = read("2\n4\n6\n8\n");
  const auto z = s.standardized();
  double m = 0.0, v = 0.0;
  for (double x : z.values) m += x;
  m /= 4.0;
  for (double x : z.values) v += (x - m) * (x - m);
  CHECK(m == Approx(0.0).margin(1e-15));
  CHECK(v / 3.0 == Approx(1.0));
  CHECK(z.standardization.mean == Approx(5.0));
  CHECK(z.standardization.sd == Approx(std::sqrt(20.0 / 3.0)));
  for (std::size_t i = 0; i < 4; ++i) CHECK(z.destandardize(z.values[i]) == Approx(s.values[i]));
  CHECK(z.destandardize_scale(1.0) == Approx(z.standardization.sd));
  CHECK_THROWS_AS(read("3\n3\n3\n").standardized(), IngestionError);
  CHECK_THROWS_AS(read("3\n").standardized(), IngestionError);

  s.timestamps[2] = s.timestamps[1];
  CHECK_THROWS_AS(s.validate(), IngestionError);
  s = read("1\n2\n");
  s.values.pop_back();
  CHECK_THROWS_AS(s.validate(), IngestionError);
}

TEST_CASE("write_series_csv: round trip at full precision", "[series]") {
  const std::vector<double> t{0.5, 1.0 / 3.0 + 1.0, 7.0};
  const std::vector<double> v{std::acos(-1.0), -1e-300, 12345.678901234567};
  std::ostringstream os;
  write_series_csv(os, t, v);
  const auto back = read(os.str());
  CHECK(back.timestamps == t);
  CHECK(back.values == v);
  CHECK_THROWS_AS(write_series_csv(os, t, std::vector<double>{1.0}), ArgumentError);
}

TEST_CASE("KeyValueConfig: parsing, typed getters and unused keys", "[config]") {
  const auto c = conf("# header\na = 1.5\nb=  7 # trailing\nflag = yes\nlist = 1, 2,3\nname = grid\n");
  CHECK(c.keys_in_order() == std::vector<std::string>{"a", "b", "flag", "list", "name"});
  CHECK(c.get_double("a", 0.0) == 1.5);
  CHECK(c.get_int("b", 0) == 7);
  CHECK(c.get_bool("flag", false));
  CHECK(c.get_list("list", {}) == std::vector<double>{1, 2, 3});
  CHECK(c.unused_keys() == std::vector<std::string>{"name"});
  CHECK_THROWS_WITH(c.require_all_used(), ContainsSubstring("name"));
  CHECK(c.get_string("name", "") == "grid");
  CHECK_NOTHROW(c.require_all_used());
  CHECK(c.get_double("missing", 2.5) == 2.5);
  CHECK_FALSE(c.get_optional_double("missing2").has_value());

  CHECK_THROWS_AS(c.get_int("a", 0), ArgumentError);
  CHECK_THROWS_AS(conf("x = abc").get_double("x", 0), ArgumentError);
  CHECK_THROWS_AS(conf("x = maybe").get_bool("x", false), ArgumentError);
  CHECK_THROWS_AS(conf("x = 1,,2").get_list("x", {}), ArgumentError);
  CHECK_THROWS_WITH(conf("a = 1\njunk\n"), ContainsSubstring("line 2"));
  CHECK_THROWS_WITH(conf("a = 1\na = 2\n"), ContainsSubstring("duplicate"));
  CHECK_THROWS_AS(conf(" = 2\n"), ArgumentError);

  auto d = conf("a = 1\n");
  d.set("a", "3");
  d.set("z", "4");
  CHECK(d.get_double("a", 0) == 3.0);
  std::ostringstream os;
  d.write(os);
  CHECK(os.str() == "a = 3\nz = 4\n");
}

TEST_CASE("parse_combinations", "[config]") {
  const auto v = parse_combinations("0.6:0.9, 0.8 : 0.8,");
  REQUIRE(v.size() == 2);
  CHECK(v[0].h1 == 0.6);
  CHECK(v[0].h2 == 0.9);
  CHECK(v[1].h1 == 0.8);
  CHECK(parse_combinations("").empty());
  CHECK_THROWS_AS(parse_combinations("0.6-0.9"), ArgumentError);
  CHECK_THROWS_AS(parse_combinations("0.6:x"), ArgumentError);
}

TEST_CASE("experiment_plan: shipped and synthetic configs", "[config]") {
  const auto c = conf(
      "experiment.study = both\nexperiment.lengths = 200, 500\nexperiment.combinations = 0.6:0.9\n"
      "experiment.replicates = 12\nseed = 99\nalpha = 0.1\nbaseline.null_quantile.500 = 0.5\n"
      "inference.draws = 20000\ngrid.design = ccd\nprior.tau_u = 2\nmodel.m = 3\n");
  const auto plan = experiment_plan(c);
  CHECK(plan.study == StudyKind::Both);
  CHECK(plan.config.lengths == std::vector<int>{200, 500});
  CHECK(plan.config.replicates == 12);
  CHECK(plan.config.seed == 99);
  CHECK(plan.config.alpha == 0.1);
  CHECK(plan.config.null_quantiles.size() == 1);
  CHECK(plan.config.null_quantiles.at(500) == 0.5);
  CHECK(plan.config.probability_draws == 20000);
  CHECK(plan.config.exploration.design == Design::Ccd);
  CHECK(plan.config.priors.tau_u == 2.0);
  CHECK(plan.config.m == 3);
  CHECK_NOTHROW(c.require_all_used());

  CHECK_THROWS_AS(experiment_plan(conf("experiment.study = estimation\n")), ArgumentError);
  CHECK_THROWS_AS(experiment_plan(conf("experiment.study = other\n")), ArgumentError);
  CHECK_THROWS_AS(experiment_plan(conf("experiment.study = classification\nexperiment.lengths = 20\n")), ArgumentError);
  CHECK_THROWS_AS(experiment_plan(conf("experiment.study = classification\nexperiment.lengths = 100.5\n")), ArgumentError);
  CHECK_THROWS_AS(experiment_plan(conf("experiment.study = classification\ngrid.design = box\n")), ArgumentError);

  for (const char* name : {"table1_small", "table1_full", "roc_small", "roc_full"}) {
    INFO(name);
    const auto k = KeyValueConfig::load_file(std::string(TVFGN_SOURCE_DIR) + "/configs/" + name + ".cfg");
    CHECK_NOTHROW(experiment_plan(k));
    CHECK_NOTHROW(k.require_all_used());
  }
}

TEST_CASE("fit_options: defaults and overrides", "[config]") {
  const auto d = fit_options(conf(""));
  CHECK_FALSE(d.trend);
  CHECK(d.m == 4);
  CHECK_FALSE(d.grid_step.has_value());
  const auto c = conf("model.trend = true\nmodel.beta = on\nmodel.grid_step = 0.5\nseed = 3\ngrid.step = 0.5\noptimizer.max_iterations = 50\n");
  const auto f = fit_options(c);
  CHECK(f.trend);
  CHECK(f.time_varying_sd);
  CHECK(*f.grid_step == 0.5);
  CHECK(f.seed == 3);
  CHECK(f.exploration.grid_step == 0.5);
  CHECK(f.exploration.bfgs.max_iterations == 50);
  CHECK_NOTHROW(c.require_all_used());
}
