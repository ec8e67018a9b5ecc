#pragma once

// Physical-channel sampler and empirical estimators: the independent oracle
// for every closed-form metric.  Estimates are bit-identical for a fixed
// (seed, stream count) pair regardless of how streams are scheduled.

#include <cstdint>
#include <random>

#include "uwoc/channel.hpp"
#include "uwoc/metrics.hpp"

namespace uwoc::mc {

struct RngSpec {
  std::uint64_t seed = 1;
  int streams = 1;  // positive
};

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::int64_t sample_count = 0;
};

// One independent random stream.  Stream k of a given seed is reproducible
// in isolation: its state depends only on (seed, k), never on scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, int stream = 0);

  double uniform();                  // (0, 1]
  double normal();                   // standard normal, polar method
  double exponential(double mean);   // mean > 0
  double gamma(double shape);        // unit scale, shape > 0

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// One irradiance draw from a single mixture layer: the exponential branch
// with probability omega, otherwise b * G^{1/c} with G ~ Gamma(a, 1).
double sample_layer(const channel::EggLayer& layer, Rng& rng);

// Product of per-layer draws.
double sample_irradiance(const channel::CascadeChannel& ch, Rng& rng);

// mu_r * (I / E[I])^r for one cascade draw.
double sample_snr(const channel::CascadeChannel& ch, Rng& rng);

// Kernel-averaging estimators.  Each averages a conditional metric over SNR
// draws, which keeps the variance far below event counting at small values.
// Preconditions: samples >= 1000; spec.streams >= 1.  The sample budget is
// split across streams deterministically and reduced in stream order.
Estimate estimate_ber(const channel::CascadeChannel& ch, const metrics::Modulation& mod,
                      std::int64_t samples, const RngSpec& spec);

// Average of ln(1 + tau * snr) in nats.
Estimate estimate_capacity(const channel::CascadeChannel& ch, std::int64_t samples,
                           const RngSpec& spec);

// Frequency of snr <= gamma_th with a binomial standard error.
Estimate estimate_outage(const channel::CascadeChannel& ch, double gamma_th,
                         std::int64_t samples, const RngSpec& spec);

}  // namespace uwoc::mc
