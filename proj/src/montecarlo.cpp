#include "uwoc/montecarlo.hpp"

#include <cmath>
#include <future>
#include <stdexcept>
#include <vector>

#include "uwoc/special.hpp"

namespace uwoc::mc {

namespace {

// SplitMix64 finalizer: decorrelates consecutive counters into seeds.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

void check_spec(std::int64_t samples, const RngSpec& spec) {
  if (samples < 1000) {
    throw std::invalid_argument("montecarlo: at least 1000 samples required");
  }
  if (spec.streams < 1) {
    throw std::invalid_argument("montecarlo: stream count must be positive");
  }
}

struct StreamSums {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t n = 0;
};

// Runs `kernel(stream_rng)` for this stream's share of the budget.  Stream k
// always receives the same share and the same generator state, so the
// per-stream sums are reproducible regardless of scheduling.
template <typename Kernel>
StreamSums run_stream(std::uint64_t seed, int stream, std::int64_t n, Kernel kernel) {
  Rng rng(seed, stream);
  StreamSums s;
  s.n = n;
  for (std::int64_t i = 0; i < n; ++i) {
    const double v = kernel(rng);
    s.sum += v;
    s.sum_sq += v * v;
  }
  return s;
}

template <typename Kernel>
Estimate reduce_streams(std::int64_t samples, const RngSpec& spec, Kernel kernel) {
  const auto streams = static_cast<std::int64_t>(spec.streams);
  std::vector<std::future<StreamSums>> parts;
  parts.reserve(spec.streams);
  for (std::int64_t k = 0; k < streams; ++k) {
    const std::int64_t share = samples / streams + (k < samples % streams ? 1 : 0);
    parts.push_back(std::async(std::launch::async, [=] {
      return run_stream(spec.seed, static_cast<int>(k), share, kernel);
    }));
  }
  // Deterministic reduction: stream order, independent of completion order.
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t n = 0;
  for (auto& p : parts) {
    const StreamSums s = p.get();
    sum += s.sum;
    sum_sq += s.sum_sq;
    n += s.n;
  }
  Estimate e;
  e.sample_count = n;
  e.value = sum / static_cast<double>(n);
  const double var =
      std::max(0.0, (sum_sq - sum * sum / static_cast<double>(n)) / static_cast<double>(n - 1));
  e.standard_error = std::sqrt(var / static_cast<double>(n));
  return e;
}

}  // namespace

Rng::Rng(std::uint64_t seed, int stream)
    : engine_(mix64(seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(stream))) {}

double Rng::uniform() {
  // 53-bit mantissa draw shifted into (0, 1].
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u;
  double v;
  double s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

double Rng::exponential(double mean) {
  if (!(mean > 0.0)) {
    throw std::invalid_argument("rng: exponential mean must be positive");
  }
  return -mean * std::log(uniform());
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) {
    throw std::invalid_argument("rng: gamma shape must be positive");
  }
  if (shape < 1.0) {
    // Boost a Gamma(shape + 1) draw down with a uniform power.
    return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze method.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) {
      return d * v;
    }
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

namespace {

double draw_layer(const channel::EggLayer& layer, Rng& rng) {
  if (rng.uniform() <= layer.omega) {
    return rng.exponential(layer.lambda);
  }
  return layer.b * std::pow(rng.gamma(layer.a), 1.0 / layer.c);
}

double draw_irradiance(const channel::CascadeChannel& ch, Rng& rng) {
  double prod = 1.0;
  for (const auto& l : ch.layers) {
    prod *= draw_layer(l, rng);
  }
  return prod;
}

// mean = E[irradiance], hoisted by the caller so hot loops skip recomputing it.
double draw_snr(const channel::CascadeChannel& ch, double mean, Rng& rng) {
  double x = draw_irradiance(ch, rng) / mean;
  if (ch.r == 2) x *= x;
  return ch.mu_r * x;
}

}  // namespace

double sample_layer(const channel::EggLayer& layer, Rng& rng) {
  channel::validate(layer);
  return draw_layer(layer, rng);
}

double sample_irradiance(const channel::CascadeChannel& ch, Rng& rng) {
  channel::validate(ch);
  return draw_irradiance(ch, rng);
}

double sample_snr(const channel::CascadeChannel& ch, Rng& rng) {
  channel::validate(ch);
  return draw_snr(ch, channel::mean_irradiance(ch), rng);
}

Estimate estimate_ber(const channel::CascadeChannel& ch, const metrics::Modulation& mod,
                      std::int64_t samples, const RngSpec& spec) {
  channel::validate(ch);
  metrics::validate(mod);
  check_spec(samples, spec);
  const double mean = channel::mean_irradiance(ch);
  const double norm = mod.delta / (2.0 * std::tgamma(mod.p));
  return reduce_streams(samples, spec, [&, mean, norm](Rng& rng) {
    const double snr = draw_snr(ch, mean, rng);
    double sum = 0.0;
    for (double q : mod.q_list) {
      sum += specfn::upper_incomplete_gamma(mod.p, q * snr);
    }
    return norm * sum;
  });
}

Estimate estimate_capacity(const channel::CascadeChannel& ch, std::int64_t samples,
                           const RngSpec& spec) {
  channel::validate(ch);
  check_spec(samples, spec);
  const double mean = channel::mean_irradiance(ch);
  return reduce_streams(samples, spec, [&, mean](Rng& rng) {
    return std::log1p(metrics::kTau * draw_snr(ch, mean, rng));
  });
}

Estimate estimate_outage(const channel::CascadeChannel& ch, double gamma_th,
                         std::int64_t samples, const RngSpec& spec) {
  channel::validate(ch);
  if (!(gamma_th > 0.0) || !std::isfinite(gamma_th)) {
    throw std::domain_error("estimate_outage: threshold must be positive and finite");
  }
  check_spec(samples, spec);
  const double mean = channel::mean_irradiance(ch);
  Estimate e = reduce_streams(samples, spec, [&, mean](Rng& rng) {
    return draw_snr(ch, mean, rng) <= gamma_th ? 1.0 : 0.0;
  });
  // Indicator kernel: report the exact binomial standard error.
  const double p = e.value;
  e.standard_error = std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(e.sample_count));
  return e;
}

}  // namespace uwoc::mc
