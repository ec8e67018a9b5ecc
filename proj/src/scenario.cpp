#include "uwoc/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <thread>

#include "uwoc/fox_h.hpp"

namespace uwoc::scenario {

namespace {

using nlohmann::json;

constexpr std::uint64_t kSeedStride = 0x9E3779B97F4A7C15ull;
constexpr std::size_t kMaxGridPoints = 100000;
constexpr int kMaxStreams = 1024;

void add(std::vector<std::string>& diags, std::string msg) {
  diags.push_back(std::move(msg));
}

// ---- structural JSON helpers -----------------------------------------------

json read_json_file(const std::filesystem::path& p, const std::string& field,
                    std::vector<std::string>& diags) {
  std::ifstream in(p);
  if (!in) {
    add(diags, field + ": cannot open file " + p.string());
    return json();
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    add(diags, field + ": " + p.string() + ": " + e.what());
    return json();
  }
}

bool take_number(const json& obj, const std::string& owner, const char* key, double& out,
                 std::vector<std::string>& diags) {
  const std::string fp = owner + "." + key;
  if (!obj.contains(key)) {
    add(diags, fp + ": required field missing");
    return false;
  }
  const json& v = obj.at(key);
  if (!v.is_number()) {
    add(diags, fp + ": expected number");
    return false;
  }
  out = v.get<double>();
  return true;
}

void flag_unknown_keys(const json& obj, const std::string& owner,
                       std::initializer_list<const char*> known,
                       std::vector<std::string>& diags) {
  for (const auto& item : obj.items()) {
    bool found = false;
    for (const char* k : known) {
      if (item.key() == k) {
        found = true;
        break;
      }
    }
    if (!found) {
      add(diags, owner + "." + item.key() + ": unknown field");
    }
  }
}

// Inline array or string reference to a JSON file next to the scenario.
json resolve_array(const json& root, const char* key, const std::filesystem::path& base,
                   std::vector<std::string>& diags) {
  if (!root.contains(key)) {
    add(diags, std::string(key) + ": required field missing");
    return json();
  }
  json value = root.at(key);
  if (value.is_string()) {
    value = read_json_file(base / value.get<std::string>(), key, diags);
    if (value.is_null()) return json();
  }
  if (!value.is_array()) {
    add(diags, std::string(key) + ": expected array or file reference");
    return json();
  }
  return value;
}

void parse_layers(const json& arr, Scenario& s, std::vector<std::string>& diags) {
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string fp = "layers[" + std::to_string(i) + "]";
    const json& el = arr[i];
    if (!el.is_object()) {
      add(diags, fp + ": expected object");
      continue;
    }
    flag_unknown_keys(el, fp, {"omega", "lambda", "a", "b", "c", "label"}, diags);
    channel::EggLayer layer{};
    take_number(el, fp, "omega", layer.omega, diags);
    take_number(el, fp, "lambda", layer.lambda, diags);
    take_number(el, fp, "a", layer.a, diags);
    take_number(el, fp, "b", layer.b, diags);
    take_number(el, fp, "c", layer.c, diags);
    std::string label;
    if (el.contains("label")) {
      if (el.at("label").is_string()) {
        label = el.at("label").get<std::string>();
      } else {
        add(diags, fp + ".label: expected string");
      }
    }
    s.layers.push_back(layer);
    s.layer_labels.push_back(label);
  }
}

void parse_modulations(const json& arr, Scenario& s, std::vector<std::string>& diags) {
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string fp = "modulations[" + std::to_string(i) + "]";
    const json& el = arr[i];
    if (!el.is_object()) {
      add(diags, fp + ": expected object");
      continue;
    }
    flag_unknown_keys(el, fp, {"name", "delta", "p", "q_list", "detection"}, diags);
    metrics::Modulation mod;
    if (!el.contains("name") || !el.at("name").is_string() ||
        el.at("name").get<std::string>().empty()) {
      add(diags, fp + ".name: required non-empty string");
    } else {
      mod.name = el.at("name").get<std::string>();
    }
    take_number(el, fp, "delta", mod.delta, diags);
    take_number(el, fp, "p", mod.p, diags);
    if (!el.contains("q_list") || !el.at("q_list").is_array() || el.at("q_list").empty()) {
      add(diags, fp + ".q_list: required non-empty array of numbers");
    } else {
      mod.q_list.clear();
      const json& qs = el.at("q_list");
      for (std::size_t k = 0; k < qs.size(); ++k) {
        if (!qs[k].is_number()) {
          add(diags, fp + ".q_list[" + std::to_string(k) + "]: expected number");
        } else {
          mod.q_list.push_back(qs[k].get<double>());
        }
      }
    }
    if (!el.contains("detection") || !el.at("detection").is_string()) {
      add(diags, fp + ".detection: required string");
    } else {
      mod.detection = el.at("detection").get<std::string>();
    }
    s.modulations.push_back(mod);
  }
}

void parse_mc(const json& obj, Scenario& s, std::vector<std::string>& diags) {
  if (!obj.is_object()) {
    add(diags, "mc: expected object");
    return;
  }
  flag_unknown_keys(obj, "mc", {"samples", "seed", "streams"}, diags);
  if (obj.contains("samples")) {
    if (!obj.at("samples").is_number_integer()) {
      add(diags, "mc.samples: expected integer");
    } else {
      s.mc.samples = obj.at("samples").get<std::int64_t>();
    }
  }
  if (obj.contains("seed")) {
    if (!obj.at("seed").is_number_unsigned() && !obj.at("seed").is_number_integer()) {
      add(diags, "mc.seed: expected non-negative integer");
    } else if (obj.at("seed").is_number_integer() && !obj.at("seed").is_number_unsigned() &&
               obj.at("seed").get<std::int64_t>() < 0) {
      add(diags, "mc.seed: expected non-negative integer");
    } else {
      s.mc.rng.seed = obj.at("seed").get<std::uint64_t>();
    }
  }
  if (obj.contains("streams")) {
    if (!obj.at("streams").is_number_integer()) {
      add(diags, "mc.streams: expected integer");
    } else {
      s.mc.rng.streams = obj.at("streams").get<int>();
    }
  }
}

// ---- semantic checks (shared by file and in-memory validation) -------------

void check_semantics(const Scenario& s, std::vector<std::string>& diags) {
  if (s.layers.empty() || s.layers.size() > static_cast<std::size_t>(channel::kMaxLayers)) {
    add(diags, "layers: expected between 1 and " + std::to_string(channel::kMaxLayers) +
                   " layers, got " + std::to_string(s.layers.size()));
  }
  for (std::size_t i = 0; i < s.layers.size(); ++i) {
    const std::string fp = "layers[" + std::to_string(i) + "]";
    const auto& l = s.layers[i];
    if (!(l.omega >= 0.0 && l.omega <= 1.0)) add(diags, fp + ".omega: must lie in [0, 1]");
    if (!(l.lambda > 0.0) || !std::isfinite(l.lambda)) add(diags, fp + ".lambda: must be positive");
    if (!(l.a > 0.0) || !std::isfinite(l.a)) add(diags, fp + ".a: must be positive");
    if (!(l.b > 0.0) || !std::isfinite(l.b)) add(diags, fp + ".b: must be positive");
    if (!(l.c > 0.0) || !std::isfinite(l.c)) add(diags, fp + ".c: must be positive");
  }
  if (s.r != 1 && s.r != 2) add(diags, "r: must be 1 or 2");
  if (!std::isfinite(s.grid.start_db) || !std::isfinite(s.grid.stop_db)) {
    add(diags, "mu_r_db: start and stop must be finite");
  } else if (!(s.grid.step_db > 0.0) || !std::isfinite(s.grid.step_db)) {
    add(diags, "mu_r_db.step: must be positive");
  } else if (s.grid.stop_db < s.grid.start_db) {
    add(diags, "mu_r_db: stop must be >= start");
  } else {
    const double count = std::floor((s.grid.stop_db - s.grid.start_db) / s.grid.step_db + 1e-9) + 1;
    if (count > static_cast<double>(kMaxGridPoints)) {
      add(diags, "mu_r_db: grid has more than " + std::to_string(kMaxGridPoints) + " points");
    }
  }
  if (s.modulations.empty()) add(diags, "modulations: at least one entry required");
  for (std::size_t i = 0; i < s.modulations.size(); ++i) {
    const std::string fp = "modulations[" + std::to_string(i) + "]";
    const auto& m = s.modulations[i];
    if (m.name.empty()) add(diags, fp + ".name: required non-empty string");
    if (!(m.delta > 0.0) || !std::isfinite(m.delta)) add(diags, fp + ".delta: must be positive");
    if (!(m.p > 0.0) || !std::isfinite(m.p)) add(diags, fp + ".p: must be positive");
    if (m.q_list.empty()) add(diags, fp + ".q_list: required non-empty array of numbers");
    for (std::size_t k = 0; k < m.q_list.size(); ++k) {
      if (!(m.q_list[k] > 0.0) || !std::isfinite(m.q_list[k])) {
        add(diags, fp + ".q_list[" + std::to_string(k) + "]: must be positive");
      }
    }
  }
  if (!std::isfinite(s.gamma_th_db)) add(diags, "gamma_th_db: must be finite");
  if (s.mc.samples < 1000) add(diags, "mc.samples: at least 1000 required");
  if (s.mc.rng.streams < 1 || s.mc.rng.streams > kMaxStreams) {
    add(diags, "mc.streams: must be between 1 and " + std::to_string(kMaxStreams));
  }
  if (!diags.empty()) return;

  // Contour pre-flight: every mixture term of every metric form must admit a
  // pole-separating contour before a sweep is attempted.
  try {
    const channel::CascadeChannel probe{s.layers, s.r, 1.0};
    const auto terms = channel::enumerate_terms(probe, channel::Domain::snr);
    const double r = static_cast<double>(s.r);
    for (std::size_t ti = 0; ti < terms.size(); ++ti) {
      const auto& t = terms[ti];
      try {
        (void)foxh::ContourSpec::for_params(t.h, 1.0);
        for (const auto& mod : s.modulations) {
          foxh::HParams ber_h;
          ber_h.m = static_cast<int>(s.layers.size());
          ber_h.n = 2;
          ber_h.upper = {{1.0, 1.0}, {1.0 - mod.p, 1.0}};
          ber_h.lower = t.h.lower;
          ber_h.lower.push_back({0.0, 1.0});
          (void)foxh::ContourSpec::for_params(ber_h, 1.0);
        }
        foxh::HParams cap_h;
        cap_h.m = static_cast<int>(s.layers.size()) + 2;
        cap_h.n = 1;
        cap_h.upper = {{0.0, 1.0}, {1.0, r}};
        cap_h.lower = t.h.lower;
        cap_h.lower.push_back({0.0, 1.0});
        cap_h.lower.push_back({0.0, r});
        (void)foxh::ContourSpec::for_params(cap_h, 1.0);
      } catch (const std::exception& e) {
        add(diags, "layers: mixture term " + std::to_string(ti) +
                       ": contour pre-flight failed: " + e.what());
      }
    }
  } catch (const std::exception& e) {
    add(diags, std::string("layers: ") + e.what());
  }
}

Scenario parse_scenario(const std::string& path, std::vector<std::string>& diags) {
  Scenario s;
  const std::filesystem::path file(path);
  const json root = read_json_file(file, "scenario", diags);
  if (!diags.empty()) return s;
  if (!root.is_object()) {
    add(diags, "scenario: top level must be a JSON object");
    return s;
  }
  const std::filesystem::path base = file.has_parent_path() ? file.parent_path()
                                                            : std::filesystem::path(".");
  flag_unknown_keys(root, "scenario",
                    {"metadata", "layers", "r", "mu_r_db", "modulations", "gamma_th_db", "mc"},
                    diags);

  if (root.contains("metadata")) {
    if (root.at("metadata").is_string()) {
      s.metadata = root.at("metadata").get<std::string>();
    } else {
      add(diags, "metadata: expected string");
    }
  }

  const json layers = resolve_array(root, "layers", base, diags);
  if (layers.is_array()) parse_layers(layers, s, diags);

  if (!root.contains("r")) {
    add(diags, "r: required field missing");
  } else if (!root.at("r").is_number_integer()) {
    add(diags, "r: expected integer (1 or 2)");
  } else {
    s.r = root.at("r").get<int>();
  }

  if (!root.contains("mu_r_db")) {
    add(diags, "mu_r_db: required field missing");
  } else if (!root.at("mu_r_db").is_object()) {
    add(diags, "mu_r_db: expected object with start, stop, step");
  } else {
    const json& g = root.at("mu_r_db");
    flag_unknown_keys(g, "mu_r_db", {"start", "stop", "step"}, diags);
    take_number(g, "mu_r_db", "start", s.grid.start_db, diags);
    take_number(g, "mu_r_db", "stop", s.grid.stop_db, diags);
    take_number(g, "mu_r_db", "step", s.grid.step_db, diags);
  }

  const json mods = resolve_array(root, "modulations", base, diags);
  if (mods.is_array()) parse_modulations(mods, s, diags);

  if (root.contains("gamma_th_db")) {
    if (!root.at("gamma_th_db").is_number()) {
      add(diags, "gamma_th_db: expected number");
    } else {
      s.gamma_th_db = root.at("gamma_th_db").get<double>();
    }
  }

  if (root.contains("mc")) parse_mc(root.at("mc"), s, diags);

  if (diags.empty()) check_semantics(s, diags);
  return s;
}

// ---- CSV helpers ------------------------------------------------------------

std::string format_cell(double v) {
  if (std::isnan(v)) return {};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::vector<double> grid_points_db(const MuGrid& grid) {
  if (!std::isfinite(grid.start_db) || !std::isfinite(grid.stop_db) ||
      !(grid.step_db > 0.0) || !std::isfinite(grid.step_db) || grid.stop_db < grid.start_db) {
    throw ScenarioError("mu_r_db: grid must be non-empty and increasing (step > 0, stop >= start)");
  }
  const auto count =
      static_cast<std::size_t>(std::floor((grid.stop_db - grid.start_db) / grid.step_db + 1e-9)) +
      1;
  if (count > kMaxGridPoints) {
    throw ScenarioError("mu_r_db: grid has more than " + std::to_string(kMaxGridPoints) +
                        " points");
  }
  std::vector<double> pts(count);
  for (std::size_t i = 0; i < count; ++i) {
    pts[i] = grid.start_db + static_cast<double>(i) * grid.step_db;
  }
  return pts;
}

Scenario load_scenario(const std::string& path) {
  std::vector<std::string> diags;
  Scenario s = parse_scenario(path, diags);
  if (!diags.empty()) {
    std::string msg = path + ": " + diags.front();
    if (diags.size() > 1) {
      msg += " (and " + std::to_string(diags.size() - 1) + " more problem(s))";
    }
    throw ScenarioError(msg);
  }
  return s;
}

ValidationReport validate_scenario(const std::string& path) {
  ValidationReport report;
  (void)parse_scenario(path, report.diagnostics);
  report.ok = report.diagnostics.empty();
  return report;
}

void validate_scenario(const Scenario& s) {
  std::vector<std::string> diags;
  check_semantics(s, diags);
  if (!diags.empty()) throw ScenarioError(diags.front());
}

Metric parse_metric(const std::string& name) {
  if (name == "ber") return Metric::ber;
  if (name == "capacity") return Metric::capacity;
  if (name == "outage") return Metric::outage;
  throw ScenarioError("unknown metric '" + name + "' (expected ber, capacity, or outage)");
}

std::string metric_name(Metric metric) {
  switch (metric) {
    case Metric::ber: return "ber";
    case Metric::capacity: return "capacity";
    case Metric::outage: return "outage";
  }
  return "unknown";
}

SweepResult run_sweep(const Scenario& s, Metric metric, const SweepOptions& opts) {
  validate_scenario(s);
  const metrics::Modulation* mod = nullptr;
  if (metric == Metric::ber) {
    if (opts.modulation_index < 0 ||
        opts.modulation_index >= static_cast<int>(s.modulations.size())) {
      throw ScenarioError("modulation index " + std::to_string(opts.modulation_index) +
                          " out of range (scenario has " + std::to_string(s.modulations.size()) +
                          " modulations)");
    }
    mod = &s.modulations[static_cast<std::size_t>(opts.modulation_index)];
  }

  const std::vector<double> pts_db = grid_points_db(s.grid);
  SweepResult result;
  result.metric = metric;
  if (mod != nullptr) result.modulation = mod->name;
  result.gamma_th_db = s.gamma_th_db;
  result.points.resize(pts_db.size());

  const double gamma_th = std::pow(10.0, s.gamma_th_db / 10.0);
  const std::int64_t samples = opts.samples_override > 0 ? opts.samples_override : s.mc.samples;
  const std::uint64_t base_seed = opts.has_seed_override ? opts.seed_override : s.mc.rng.seed;
  const double unit = opts.bits ? 1.0 / std::log(2.0) : 1.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  auto eval_point = [&](std::size_t i) {
    SweepPoint& p = result.points[i];
    p.mu_r_db = pts_db[i];
    p.exact = p.asymptotic = p.mc_value = p.mc_stderr = nan;
    try {
      const channel::CascadeChannel ch{s.layers, s.r, std::pow(10.0, pts_db[i] / 10.0)};
      // Seeds stride with the point index, so estimates are point-independent
      // and identical no matter how points are scheduled across threads.
      const mc::RngSpec rng{base_seed + kSeedStride * static_cast<std::uint64_t>(i),
                            s.mc.rng.streams};
      switch (metric) {
        case Metric::ber: {
          p.exact = metrics::avg_ber_exact(ch, *mod, opts.rel_tol);
          if (s.layers.size() == 2) {
            p.asymptotic = metrics::avg_ber_asymptotic(ch, *mod).value;
          }
          if (opts.with_mc) {
            const mc::Estimate e = mc::estimate_ber(ch, *mod, samples, rng);
            p.mc_value = e.value;
            p.mc_stderr = e.standard_error;
          }
          break;
        }
        case Metric::capacity: {
          p.exact = unit * metrics::ergodic_capacity_exact(ch, opts.rel_tol);
          p.asymptotic = unit * metrics::ergodic_capacity_asymptotic(ch);
          if (opts.with_mc) {
            const mc::Estimate e = mc::estimate_capacity(ch, samples, rng);
            p.mc_value = unit * e.value;
            p.mc_stderr = unit * e.standard_error;
          }
          break;
        }
        case Metric::outage: {
          p.exact = metrics::outage_probability(ch, gamma_th, opts.rel_tol);
          if (opts.with_mc) {
            const mc::Estimate e = mc::estimate_outage(ch, gamma_th, samples, rng);
            p.mc_value = e.value;
            p.mc_stderr = e.standard_error;
          }
          break;
        }
      }
    } catch (const std::exception& e) {
      p.error = e.what();
    }
  };

  int threads = opts.threads > 0 ? opts.threads
                                 : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(pts_db.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < pts_db.size(); ++i) eval_point(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= pts_db.size()) return;
          eval_point(i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return result;
}

std::string to_csv(const SweepResult& result) {
  std::string out = "mu_r_db,exact,asymptotic,mc,mc_stderr,error\n";
  for (const auto& p : result.points) {
    out += format_cell(p.mu_r_db);
    out += ',';
    out += format_cell(p.exact);
    out += ',';
    out += format_cell(p.asymptotic);
    out += ',';
    out += format_cell(p.mc_value);
    out += ',';
    out += format_cell(p.mc_stderr);
    out += ',';
    out += quote_csv(p.error);
    out += '\n';
  }
  return out;
}

}  // namespace uwoc::scenario
