#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "uwoc/scenario.hpp"

#ifndef UWOC_DATA_DIR
#define UWOC_DATA_DIR "data"
#endif

using uwoc::scenario::Metric;
using uwoc::scenario::MuGrid;
using uwoc::scenario::Scenario;
using uwoc::scenario::ScenarioError;
using uwoc::scenario::SweepOptions;
using uwoc::scenario::SweepResult;

namespace {

std::string data_path(const std::string& rel) {
  return std::string(UWOC_DATA_DIR) + "/" + rel;
}

// Writes throwaway scenario content under the system temp directory.
std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  out.close();
  return path.string();
}

bool any_diagnostic_contains(const std::vector<std::string>& diags, const std::string& needle) {
  for (const auto& d : diags) {
    if (d.find(needle) != std::string::npos) return true;
  }
  return false;
}

const char* kValidBody = R"({
  "layers": [
    {"omega": 0.21, "lambda": 0.33, "a": 1.43, "b": 1.18, "c": 3.2},
    {"omega": 0.45, "lambda": 0.45, "a": 1.05, "b": 1.55, "c": 2.1}
  ],
  "r": 2,
  "mu_r_db": {"start": 0, "stop": 30, "step": 10},
  "modulations": [
    {"name": "OOK", "delta": 1.0, "p": 0.5, "q_list": [0.25], "detection": "im-dd"}
  ],
  "mc": {"samples": 20000, "seed": 3, "streams": 2}
})";

}  // namespace

TEST_CASE("shipped scenario files load and validate") {
  for (const char* name : {"scenarios/template.json", "scenarios/two_layer_bubbles.json",
                           "scenarios/three_layer_gradient.json",
                           "scenarios/single_layer_fresh.json"}) {
    CAPTURE(name);
    const auto report = uwoc::scenario::validate_scenario(data_path(name));
    for (const auto& d : report.diagnostics) CAPTURE(d);
    CHECK(report.ok);
  }

  const Scenario two = uwoc::scenario::load_scenario(data_path("scenarios/two_layer_bubbles.json"));
  CHECK(two.layers.size() == 2);
  CHECK(two.r == 2);
  CHECK(two.modulations.size() == 4);  // resolved from the referenced file
  CHECK(two.modulations[0].name == "OOK");
  CHECK(two.layer_labels[0] == "[2.4, 0.05]");
  CHECK(two.gamma_th_db == 10.0);
  CHECK(two.mc.rng.streams == 4);
  CHECK(uwoc::scenario::grid_points_db(two.grid).size() == 13);

  const Scenario tpl = uwoc::scenario::load_scenario(data_path("scenarios/template.json"));
  CHECK(tpl.layers.size() == 2);  // resolved from the referenced layer file
}

TEST_CASE("grid points are inclusive and evenly spaced") {
  const auto pts = uwoc::scenario::grid_points_db({0.0, 60.0, 5.0});
  REQUIRE(pts.size() == 13);
  CHECK(pts.front() == 0.0);
  CHECK(pts.back() == 60.0);

  const auto ragged = uwoc::scenario::grid_points_db({0.0, 60.0, 7.0});
  REQUIRE(ragged.size() == 9);
  CHECK(ragged.back() == doctest::Approx(56.0));

  const auto single = uwoc::scenario::grid_points_db({10.0, 10.0, 5.0});
  CHECK(single.size() == 1);

  CHECK_THROWS_AS((void)uwoc::scenario::grid_points_db({0.0, 60.0, 0.0}), ScenarioError);
  CHECK_THROWS_AS((void)uwoc::scenario::grid_points_db({0.0, 60.0, -1.0}), ScenarioError);
  CHECK_THROWS_AS((void)uwoc::scenario::grid_points_db({60.0, 0.0, 5.0}), ScenarioError);
}

TEST_CASE("invalid scenarios are rejected with field paths") {
  // Out-of-range mixture weight.
  std::string body = kValidBody;
  body.replace(body.find("0.21"), 4, "1.20");
  auto report = uwoc::scenario::validate_scenario(write_temp("bad_omega.json", body));
  CHECK_FALSE(report.ok);
  CHECK(any_diagnostic_contains(report.diagnostics, "layers[0].omega"));

  // Too many layers.
  std::string many = R"({"layers": [)";
  for (int i = 0; i < 25; ++i) {
    if (i > 0) many += ",";
    many += R"({"omega": 0.5, "lambda": 1.0, "a": 1.0, "b": 1.0, "c": 1.0})";
  }
  many += R"(], "r": 1, "mu_r_db": {"start": 0, "stop": 10, "step": 5},
             "modulations": [{"name": "OOK", "delta": 1.0, "p": 0.5, "q_list": [0.25],
                              "detection": "im-dd"}]})";
  report = uwoc::scenario::validate_scenario(write_temp("too_many_layers.json", many));
  CHECK_FALSE(report.ok);
  CHECK(any_diagnostic_contains(report.diagnostics, "between 1 and 20"));

  // Missing required field.
  body = kValidBody;
  body.replace(body.find("\"r\": 2,"), 8, "");
  report = uwoc::scenario::validate_scenario(write_temp("missing_r.json", body));
  CHECK_FALSE(report.ok);
  CHECK(any_diagnostic_contains(report.diagnostics, "r: required field missing"));

  // Unknown key (typo safety).
  body = kValidBody;
  body.replace(body.find("\"mu_r_db\""), 9, "\"mu_db\"");
  report = uwoc::scenario::validate_scenario(write_temp("typo_grid.json", body));
  CHECK_FALSE(report.ok);
  CHECK(any_diagnostic_contains(report.diagnostics, "mu_db"));
  CHECK(any_diagnostic_contains(report.diagnostics, "mu_r_db: required field missing"));

  // Undersized Monte Carlo budget.
  body = kValidBody;
  body.replace(body.find("20000"), 5, "10");
  report = uwoc::scenario::validate_scenario(write_temp("small_budget.json", body));
  CHECK_FALSE(report.ok);
  CHECK(any_diagnostic_contains(report.diagnostics, "mc.samples"));

  // Unparsable JSON reports position context.
  report = uwoc::scenario::validate_scenario(write_temp("broken.json", "{\"layers\": [,]}"));
  CHECK_FALSE(report.ok);
  CHECK(any_diagnostic_contains(report.diagnostics, "parse error"));

  // Missing file.
  report = uwoc::scenario::validate_scenario("/nonexistent/path/scenario.json");
  CHECK_FALSE(report.ok);
  CHECK(any_diagnostic_contains(report.diagnostics, "cannot open"));

  // load_scenario throws with the path in the message.
  const std::string bad = write_temp("bad_omega.json", [] {
    std::string b = kValidBody;
    b.replace(b.find("0.21"), 4, "1.20");
    return b;
  }());
  CHECK_THROWS_WITH_AS((void)uwoc::scenario::load_scenario(bad),
                       doctest::Contains("layers[0].omega"), ScenarioError);

  CHECK_THROWS_AS((void)uwoc::scenario::parse_metric("throughput"), ScenarioError);
  CHECK(uwoc::scenario::parse_metric("ber") == Metric::ber);
  CHECK(uwoc::scenario::metric_name(Metric::capacity) == "capacity");
}

TEST_CASE("in-memory scenario validation mirrors file validation") {
  Scenario s = uwoc::scenario::load_scenario(write_temp("valid.json", kValidBody));
  CHECK_NOTHROW(uwoc::scenario::validate_scenario(s));
  s.r = 3;
  CHECK_THROWS_WITH_AS(uwoc::scenario::validate_scenario(s), doctest::Contains("r: must be 1 or 2"),
                       ScenarioError);
  s.r = 1;
  s.modulations[0].q_list = {-1.0};
  CHECK_THROWS_WITH_AS(uwoc::scenario::validate_scenario(s),
                       doctest::Contains("modulations[0].q_list[0]"), ScenarioError);
}

TEST_CASE("error-rate sweep is monotone, complete, and byte-deterministic") {
  Scenario s = uwoc::scenario::load_scenario(data_path("scenarios/two_layer_bubbles.json"));
  s.mc.samples = 20000;  // keep the unit test quick; acceptance runs the big budgets

  SweepOptions opts;
  opts.threads = 1;
  const SweepResult serial = uwoc::scenario::run_sweep(s, Metric::ber, opts);
  REQUIRE(serial.points.size() == 13);
  CHECK(serial.modulation == "OOK");
  for (std::size_t i = 0; i < serial.points.size(); ++i) {
    CAPTURE(i);
    CHECK(serial.points[i].error.empty());
    CHECK(std::isfinite(serial.points[i].exact));
    CHECK(std::isfinite(serial.points[i].asymptotic));  // two layers: closed form applies
    CHECK(std::isfinite(serial.points[i].mc_value));
    CHECK(serial.points[i].mc_stderr > 0.0);
    if (i > 0) CHECK(serial.points[i].exact < serial.points[i - 1].exact);
  }
  // Kernel-averaged Monte Carlo tracks the closed form point by point.
  for (const auto& p : serial.points) {
    CHECK(std::abs(p.mc_value - p.exact) < 3.0 * p.mc_stderr);
  }

  opts.threads = 4;
  const SweepResult parallel = uwoc::scenario::run_sweep(s, Metric::ber, opts);
  CHECK(uwoc::scenario::to_csv(serial) == uwoc::scenario::to_csv(parallel));

  // Repeat runs are byte-identical too.
  const SweepResult again = uwoc::scenario::run_sweep(s, Metric::ber, opts);
  CHECK(uwoc::scenario::to_csv(parallel) == uwoc::scenario::to_csv(again));

  opts.modulation_index = 5;
  CHECK_THROWS_AS((void)uwoc::scenario::run_sweep(s, Metric::ber, opts), ScenarioError);
}

TEST_CASE("capacity sweep approaches its asymptote and supports bit units") {
  Scenario s = uwoc::scenario::load_scenario(data_path("scenarios/three_layer_gradient.json"));
  s.grid = {60.0, 80.0, 10.0};
  s.mc.samples = 20000;

  SweepOptions opts;
  opts.threads = 2;
  const SweepResult nats = uwoc::scenario::run_sweep(s, Metric::capacity, opts);
  REQUIRE(nats.points.size() == 3);
  for (const auto& p : nats.points) {
    CAPTURE(p.mu_r_db);
    CHECK(p.error.empty());
    CHECK(std::abs(p.exact - p.asymptotic) < 0.01);  // high-SNR agreement in nats
    CHECK(std::abs(p.mc_value - p.exact) < 3.0 * p.mc_stderr);
  }

  opts.bits = true;
  opts.with_mc = false;
  const SweepResult bits = uwoc::scenario::run_sweep(s, Metric::capacity, opts);
  const double ln2 = std::log(2.0);
  for (std::size_t i = 0; i < bits.points.size(); ++i) {
    CHECK(bits.points[i].exact == doctest::Approx(nats.points[i].exact / ln2).epsilon(1e-12));
    CHECK(std::isnan(bits.points[i].mc_value));  // Monte Carlo disabled
  }
  const std::string csv = uwoc::scenario::to_csv(bits);
  CHECK(csv.find(",,\n") != std::string::npos);  // empty mc cells render empty
}

TEST_CASE("outage sweep matches Monte Carlo at the shipped threshold") {
  Scenario s = uwoc::scenario::load_scenario(data_path("scenarios/single_layer_fresh.json"));
  s.grid = {10.0, 30.0, 10.0};
  s.mc.samples = 50000;

  const SweepResult res = uwoc::scenario::run_sweep(s, Metric::outage, {});
  REQUIRE(res.points.size() == 3);
  CHECK(res.gamma_th_db == 10.0);
  for (const auto& p : res.points) {
    CAPTURE(p.mu_r_db);
    CHECK(p.error.empty());
    CHECK(std::isnan(p.asymptotic));  // no closed-form asymptote column for outage
    CHECK(std::abs(p.mc_value - p.exact) < 3.0 * p.mc_stderr);
    CHECK(p.exact >= 0.0);
    CHECK(p.exact <= 1.0);
  }
}

TEST_CASE("per-point failures are recorded while the run continues") {
  Scenario s = uwoc::scenario::load_scenario(write_temp("valid.json", kValidBody));
  // First grid point drives the transform argument far beyond the evaluator's
  // admissible range; the second is routine.
  s.grid = {-240.0, 40.0, 280.0};
  SweepOptions opts;
  opts.with_mc = false;
  const SweepResult res = uwoc::scenario::run_sweep(s, Metric::ber, opts);
  REQUIRE(res.points.size() == 2);
  CHECK_FALSE(res.points[0].error.empty());
  CHECK(std::isnan(res.points[0].exact));
  CHECK(res.points[1].error.empty());
  CHECK(std::isfinite(res.points[1].exact));

  const std::string csv = uwoc::scenario::to_csv(res);
  CHECK(csv.find(res.points[0].error.substr(0, 20)) != std::string::npos);
}

TEST_CASE("csv uses 17-digit floats, empty cells, and quoted error text") {
  SweepResult r;
  r.metric = Metric::ber;
  uwoc::scenario::SweepPoint p;
  p.mu_r_db = 10.0;
  p.exact = 1.0 / 3.0;
  p.asymptotic = std::numeric_limits<double>::quiet_NaN();
  p.mc_value = 0.5;
  p.mc_stderr = 0.25;
  p.error = "bad, \"cell\"";
  r.points.push_back(p);

  const std::string csv = uwoc::scenario::to_csv(r);
  CHECK(csv == "mu_r_db,exact,asymptotic,mc,mc_stderr,error\n"
               "10,0.33333333333333331,,0.5,0.25,\"bad, \"\"cell\"\"\"\n");
}
