// Scenario ingestion, metric sweeps over an average-SNR grid, and CSV
// emission.  A scenario file is the single source of truth for a sweep:
// channel layers, SNR exponent, dB grid, modulation set, Monte Carlo
// settings, and an outage threshold.  Sweeps evaluate grid points
// concurrently and are byte-deterministic: a fixed scenario yields identical
// CSV bytes regardless of thread count.
#ifndef UWOC_SCENARIO_HPP
#define UWOC_SCENARIO_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "uwoc/channel.hpp"
#include "uwoc/metrics.hpp"
#include "uwoc/montecarlo.hpp"

namespace uwoc::scenario {

// Inclusive dB grid: start, start + step, ..., up to stop.
struct MuGrid {
  double start_db = 0.0;
  double stop_db = 60.0;
  double step_db = 5.0;
};

std::vector<double> grid_points_db(const MuGrid& grid);

struct McSettings {
  std::int64_t samples = 100000;
  mc::RngSpec rng{};
};

struct Scenario {
  std::string metadata;                    // free text carried through
  std::vector<channel::EggLayer> layers;   // 1..20 entries
  std::vector<std::string> layer_labels;   // parallel to layers; may be empty
  int r = 1;                               // detection exponent (1 or 2)
  MuGrid grid;
  std::vector<metrics::Modulation> modulations;
  double gamma_th_db = 10.0;               // outage threshold (dB)
  McSettings mc;
};

// Raised on unreadable, unparsable, or invariant-violating scenario input.
// Messages carry a field path, e.g. "layers[0].omega: must lie in [0, 1]".
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses a scenario JSON file; throws ScenarioError on the first problem.
// `layers` and `modulations` may be inline arrays or string references to
// JSON files resolved relative to the scenario file's directory.
Scenario load_scenario(const std::string& path);

struct ValidationReport {
  bool ok = false;
  std::vector<std::string> diagnostics;  // one line per problem, field paths included
};

// Parse + invariant report for a scenario file.  Collects every diagnostic
// instead of stopping at the first, and pre-flights contour construction for
// all mixture terms of every metric form so pole collisions surface before a
// sweep starts.
ValidationReport validate_scenario(const std::string& path);

// Same checks for an in-memory scenario; throws ScenarioError on the first
// violation.
void validate_scenario(const Scenario& s);

enum class Metric { ber, capacity, outage };

Metric parse_metric(const std::string& name);  // "ber" | "capacity" | "outage"
std::string metric_name(Metric metric);

struct SweepOptions {
  int modulation_index = 0;  // error-rate sweeps pick one modulation
  int threads = 0;           // concurrent grid points; 0 = hardware default
  bool with_mc = true;       // include Monte Carlo columns
  bool bits = false;         // capacity in bits instead of nats
  double rel_tol = 1e-6;     // tolerance for the exact-metric evaluations
  std::int64_t samples_override = 0;   // 0 = use the scenario's sample budget
  bool has_seed_override = false;
  std::uint64_t seed_override = 0;
};

struct SweepPoint {
  double mu_r_db = 0.0;
  double exact = 0.0;        // NaN = unavailable (empty CSV cell)
  double asymptotic = 0.0;   // NaN where no closed form applies
  double mc_value = 0.0;
  double mc_stderr = 0.0;
  std::string error;         // empty = point evaluated cleanly
};

struct SweepResult {
  Metric metric = Metric::ber;
  std::string modulation;    // name, error-rate sweeps only
  double gamma_th_db = 0.0;  // outage sweeps only
  std::vector<SweepPoint> points;
};

// Evaluates the metric across the scenario grid.  Per-point failures land in
// the point's `error` field and the run continues.  Monte Carlo seeds derive
// deterministically from the scenario seed and the point index, so results
// do not depend on scheduling.
SweepResult run_sweep(const Scenario& s, Metric metric, const SweepOptions& opts = {});

// Renders one sweep table as CSV: header
// `mu_r_db,exact,asymptotic,mc,mc_stderr,error`, floats with 17 significant
// digits, NaN as an empty cell, RFC-4180 quoting for the error column.
std::string to_csv(const SweepResult& result);

}  // namespace uwoc::scenario

#endif  // UWOC_SCENARIO_HPP
