#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "penbench/config_file.hpp"
#include "penbench/errors.hpp"
#include "penbench/harness.hpp"
#include "penbench/secretary_algs.hpp"
#include "support/oracles.hpp"

using namespace penbench;
using doctest::Approx;

namespace {

ExperimentConfig make_config(std::string strategy, std::string instance, std::uint64_t trials,
                             std::optional<std::size_t> n = {}) {
  ExperimentConfig c;
  c.strategy = std::move(strategy);
  c.instance = std::move(instance);
  c.trials = trials;
  c.n = n;
  c.seed = 12345;
  return c;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

std::string temp_file(const std::string& name, const std::string& content) {
  std::string path = "penbench_test_" + name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_CASE("fixed-order example report") {
  auto c = make_config("threshold:2", "values(1,5)", 50);
  c.order = "fixed";
  auto r = run_experiment(c);
  CHECK(r.mean == 3);
  CHECK(r.se == 0);
  CHECK(r.benchmark == 5);
  REQUIRE(r.ratio);
  CHECK(*r.ratio == Approx(5.0 / 3));
  CHECK(r.accept_rate == 1);
  CHECK(r.n == 2);
  CHECK(!r.wall_time);
  auto j = report_to_json(r);
  CHECK(j["schema"] == kReportSchema);
  CHECK(j["success_rate"].is_null());
}

TEST_CASE("reports are deterministic across runs and worker counts") {
  auto c = make_config("iid-mix", "iid(exp(1),{n})", 2000, 64);
  auto a = run_experiment(c);
  auto b = run_experiment(c);
  c.workers = 4;
  auto d = run_experiment(c);
  CHECK(report_to_json(a).dump() == report_to_json(b).dump());
  CHECK(report_to_json(a).dump() == report_to_json(d).dump());
  c.seed = 12346;
  CHECK(run_experiment(c).mean != a.mean);

  auto s = make_config("sec-noinfo", "powers(6)", 2000);
  auto s1 = run_experiment(s);
  s.workers = 3;
  CHECK(report_to_json(s1).dump() == report_to_json(run_experiment(s)).dump());
}

TEST_CASE("prophet benchmark matches the harmonic number") {
  auto c = make_config("iid-mix", "iid(exp(1),{n})", 20000, 1024);
  auto r = run_experiment(c);
  double h = oracle_ref::harmonic_naive(1024).get_d();
  CHECK(std::abs(r.benchmark - h) <= 4 * r.benchmark_se);
  REQUIRE(r.ratio);
  CHECK(*r.ratio <= 2 * std::exp(1.0) * std::log(1024.0));
  REQUIRE(r.conditional_mean);
  CHECK(*r.conditional_mean <= 1 + 3 * *r.conditional_se);
}

TEST_CASE("timing is reported only on request") {
  auto c = make_config("threshold:1", "iid(exp(1),8)", 100);
  c.timing = true;
  auto r = run_experiment(c);
  REQUIRE(r.wall_time);
  CHECK(*r.wall_time >= 0);
}

TEST_CASE("success fraction") {
  auto c = make_config("sec-gap", "powers(8)", 4000);
  c.success_fraction = "gap";
  auto r = run_experiment(c);
  REQUIRE(r.success_fraction);
  CHECK(*r.success_fraction == Approx(1.0 / double(gap_k(511))));
  REQUIRE(r.success_rate);
  CHECK(*r.success_rate >= 1 - std::exp(-1.0) - 0.03);

  c.success_fraction = "0.5";
  CHECK(*run_experiment(c).success_fraction == 0.5);
  c.success_fraction = "half";
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
}

TEST_CASE("information regime firewall") {
  struct Case {
    const char* strategy;
    const char* instance;
  };
  const Case refused[] = {
      {"iid-first", "values(1,2,3)"},   {"iid-mix", "powers(4)"},
      {"general", "values(1,2)"},       {"single-sample", "powers(3)"},
      {"iid-refined", "geomorder(3)"},  {"iid-second", "truncexp-sec(10)"},
      {"sec-full", "iid(exp(1),5)"},    {"sec-opt", "iid(exp(1),5)"},
      {"sec-hint", "iid(exp(1),5)"},    {"sec-arb", "iid(exp(1),5)"},
      {"sec-gap", "iid(exp(1),5)"},     {"iid-mix", "indep(exp(1),uniform(0,1))"},
  };
  for (const auto& c : refused) {
    std::string strategy = c.strategy, instance = c.instance;
    CAPTURE(strategy);
    CAPTURE(instance);
    CHECK_THROWS_AS(run_experiment(make_config(c.strategy, c.instance, 10)), ConfigError);
  }
  const Case allowed[] = {
      {"threshold:1", "values(1,2,3)"}, {"threshold:1", "iid(exp(1),5)"},
      {"sec-noinfo", "iid(exp(1),5)"},  {"sec-hint:2", "iid(exp(1),5)"},
      {"baseline-uniform", "iid(exp(1),5)"}, {"general", "indep(exp(1),uniform(0,1))"},
      {"sec-full", "values(1,2,3)"},    {"threshold:3", "geomorder(3)"},
      {"sec-full", "geomorder(3)"},     {"sec-gap", "geomorder(3)"},
  };
  for (const auto& c : allowed) {
    std::string strategy = c.strategy, instance = c.instance;
    CAPTURE(strategy);
    CAPTURE(instance);
    CHECK_NOTHROW(run_experiment(make_config(c.strategy, c.instance, 10)));
  }
}

TEST_CASE("instance and strategy parse errors") {
  CHECK_THROWS(parse_instance("nosuch(3)"));
  CHECK_THROWS(parse_instance("powers(63)"));
  CHECK_THROWS(parse_instance("geomorder(14)"));
  CHECK_THROWS(parse_instance("geomorder(0)"));
  CHECK_THROWS(parse_instance("truncexp-sec(1)"));
  CHECK_THROWS_AS(parse_instance("iid(exp(1),{n})"), ConfigError);
  CHECK_THROWS_AS(parse_instance("exp(1)"), ConfigError);
  CHECK_THROWS(parse_instance("iid(exp(1),4)", {}, std::string("ascending")));
  CHECK_THROWS(parse_instance("powers(3)", {}, std::string("sideways")));
  CHECK_THROWS(parse_instance("geomorder(3)", {}, std::string("uniform")));
  CHECK_THROWS(parse_instance("file:/nonexistent/penbench.json"));
  CHECK_THROWS_AS(parse_strategy("nope"), ConfigError);
  CHECK_THROWS_AS(parse_strategy("threshold:-1"), ConfigError);
  CHECK_THROWS_AS(parse_strategy("threshold:abc"), ConfigError);

  auto m = parse_instance("exp(1)", 7);
  CHECK(m->n() == 7);
  CHECK(m->family() == InstanceFamily::prophet);
  auto p = parse_instance("powers(3)");
  CHECK(p->n() == 15);
  CHECK(p->family() == InstanceFamily::secretary);
  CHECK(p->order_name() == "uniform");
  CHECK(parse_instance("values(2,3)", {}, std::string("descending"))->order_name() == "descending");
  CHECK(parse_instance("values(2*3)")->n() == 3);
  CHECK(parse_instance("indep(exp(1)*3,uniform(0,1))")->n() == 4);
}

TEST_CASE("arranged orders") {
  auto check_order = [](const char* order, std::vector<double> expected) {
    auto m = parse_instance("values(3,1,4,2,5)", {}, std::string(order));
    CHECK(m->sample_instance(1, 0).values == expected);
  };
  check_order("fixed", {3, 1, 4, 2, 5});
  check_order("ascending", {1, 2, 3, 4, 5});
  check_order("descending", {5, 4, 3, 2, 1});
  check_order("alternating", {1, 5, 2, 4, 3});
}

TEST_CASE("n substitution") {
  CHECK(substitute_n("iid(exp(1),{n})", 5) == "iid(exp(1),5)");
  CHECK(substitute_n("{n}{n}", 12) == "1212");
  CHECK(substitute_n("powers(3)", 9) == "powers(3)");
}

TEST_CASE("pairwise sums and standard errors") {
  std::vector<double> ints(1000);
  for (std::size_t i = 0; i < ints.size(); ++i) ints[i] = double(i);
  CHECK(pairwise_sum(ints) == 499500);
  CHECK(pairwise_sum({}) == 0);
  std::vector<double> tiny(10, 0.1);
  CHECK(pairwise_sum(tiny) == Approx(1.0).epsilon(1e-15));
  std::vector<double> xs{1, 2, 3, 4};
  auto m = mean_and_se(xs);
  CHECK(m.mean == 2.5);
  CHECK(m.se == Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  std::vector<double> one{7};
  CHECK(mean_and_se(one).se == 0);
}

TEST_CASE("csv output") {
  auto c = make_config("threshold:2", "values(1,5)", 10);
  c.order = "fixed";
  auto r = run_experiment(c);
  std::string csv = reports_to_csv({r});
  CHECK(first_line(csv) ==
        "n,mean,se,benchmark,ratio,trials,accept_rate,conditional_mean,success_rate,strategy,instance,order,seed");
  std::string row = csv.substr(csv.find('\n') + 1);
  CHECK(row.rfind("2,3,0,5,", 0) == 0);
}

TEST_CASE("sweeps") {
  auto c = make_config("iid-mix", "iid(exp(1),{n})", 4000);
  c.n_list = {16, 64, 256};
  auto s = sweep(c);
  REQUIRE(s.rows.size() == 3);
  for (const auto& row : s.rows) {
    REQUIRE(row.report);
    CHECK(row.report->n == row.n);
    CHECK(row.error.empty());
  }
  REQUIRE(s.fitted_c);
  CHECK(*s.fitted_c > 0);
  CHECK(*s.fitted_c <= 2 * std::exp(1.0));
  CHECK(first_line(sweep_to_csv(s)) == "n,mean,se,benchmark,ratio,success,error");
  auto j = sweep_to_json(s);
  CHECK(j["schema"] == kSweepSchema);
  CHECK(j["rows"].size() == 3);

  auto g = make_config("sec-gap", "powers({n})", 3000);
  g.success_fraction = "gap";
  g.n_list = {4, 6, 8};
  for (const auto& row : sweep(g).rows) {
    REQUIRE(row.report);
    CHECK(*row.report->success_rate >= 1 - std::exp(-1.0) - 0.03);
  }

  auto bad = make_config("sec-gap", "powers({n})", 10);
  bad.n_list = {4, 63};
  auto b = sweep(bad);
  REQUIRE(b.rows.size() == 2);
  CHECK(b.rows[0].report);
  CHECK(!b.rows[1].report);
  CHECK(!b.rows[1].error.empty());

  bad.n_list = {8, 4};
  CHECK_THROWS_AS(sweep(bad), ConfigError);
  bad.n_list = {};
  CHECK_THROWS_AS(sweep(bad), ConfigError);
}

TEST_CASE("single game with transcript") {
  auto c = make_config("sec-noinfo", "powers(4)", 1);
  auto t = play_single(c, 3);
  CHECK(t.arrived.size() == 31);
  CHECK(!t.game.transcript.empty());
  CHECK(score_from_transcript(t.game, t.arrived) == t.score);
  CHECK(t.benchmark == 4);
  auto again = play_single(c, 3);
  CHECK(again.arrived == t.arrived);
  CHECK(again.score == t.score);
}

TEST_CASE("toml subset") {
  auto doc = parse_toml_subset(
      "# experiment\n"
      "strategy = \"iid-mix\"\n"
      "instance = \"iid(exp(1),{n})\"  # trailing\n"
      "n = 64\n"
      "trials = 500\n"
      "epsilon = 1e-6\n"
      "timing = true\n"
      "n_list = [16, 32, 64]\n"
      "out = \"a\\tb\"\n");
  CHECK(doc["strategy"] == "iid-mix");
  CHECK(doc["n"] == 64);
  CHECK(doc["epsilon"].get<double>() == 1e-6);
  CHECK(doc["timing"] == true);
  CHECK(doc["n_list"].size() == 3);
  CHECK(doc["out"] == "a\tb");

  ExperimentConfig c;
  apply_config(doc, c);
  CHECK(c.strategy == "iid-mix");
  CHECK(c.n == 64u);
  CHECK(c.trials == 500);
  CHECK(c.timing);
  CHECK(c.n_list == std::vector<std::size_t>{16, 32, 64});

  auto error_at = [](const char* text) -> std::pair<std::size_t, std::size_t> {
    try {
      parse_toml_subset(text);
    } catch (const ConfigError& e) {
      return {e.line(), e.column()};
    }
    return {0, 0};
  };
  CHECK(error_at("a = 1\nb = [1, \"x\"]\n").first == 2);
  CHECK(error_at("a = 1\na = 2\n").first == 2);
  CHECK(error_at("[table]\n").first == 1);
  CHECK(error_at("a = \"open\n").first == 1);
  CHECK(error_at("novalue\n").first == 1);
  CHECK(error_at("x = 1\ny = 2\n  z = @\n") == std::pair<std::size_t, std::size_t>{3, 7});
}

TEST_CASE("config files and keys") {
  std::string json_path = temp_file("config.json", "{\"strategy\": \"sec-gap\", \"instance\": \"powers(5)\", \"workers\": 2}");
  auto doc = load_config_file(json_path);
  ExperimentConfig c;
  apply_config(doc, c);
  CHECK(c.strategy == "sec-gap");
  CHECK(c.workers == 2);
  std::remove(json_path.c_str());

  std::string broken = temp_file("broken.json", "{\n  \"strategy\": ,\n}");
  try {
    load_config_file(broken);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 2);
  }
  std::remove(broken.c_str());

  std::string toml_path = temp_file("config.toml", "strategy = \"sec-opt\"\nseed = 9\n");
  ExperimentConfig t;
  apply_config(load_config_file(toml_path), t);
  CHECK(t.strategy == "sec-opt");
  CHECK(t.seed == 9);
  std::remove(toml_path.c_str());

  CHECK_THROWS_AS(load_config_file("/nonexistent/penbench.toml"), ConfigError);
  ExperimentConfig x;
  CHECK_THROWS_AS(apply_config(nlohmann::json{{"colour", 1}}, x), ConfigError);
  CHECK_THROWS_AS(apply_config(nlohmann::json{{"workers", 0}}, x), ConfigError);
  CHECK_THROWS_AS(apply_config(nlohmann::json{{"trials", "many"}}, x), ConfigError);
  CHECK_THROWS_AS(apply_config(nlohmann::json{{"format", "xml"}}, x), ConfigError);
  apply_config(nlohmann::json{{"success_fraction", 0.25}}, x);
  CHECK(x.success_fraction);
}
