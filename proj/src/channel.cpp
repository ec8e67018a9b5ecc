#include "uwoc/channel.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace uwoc::channel {

namespace {

double pow_int(double x, int e) {
  double out = 1.0;
  for (int i = 0; i < e; ++i) out *= x;
  return out;
}

// CDF parameter set of a pdf mixture term: prepend upper (1,1), append lower
// (0,1); the new lower pair stays outside the first m, i.e. in the denominator.
foxh::HParams cdf_params(const foxh::HParams& pdf) {
  foxh::HParams h;
  h.m = pdf.m;
  h.n = 1;
  h.upper = {{1.0, 1.0}};
  h.lower = pdf.lower;
  h.lower.push_back({0.0, 1.0});
  return h;
}

}  // namespace

void validate(const EggLayer& layer) {
  auto bad = [](const char* what) {
    throw std::invalid_argument(std::string("channel: layer ") + what);
  };
  if (!(layer.omega >= 0.0 && layer.omega <= 1.0)) bad("omega must be in [0, 1]");
  if (!(layer.lambda > 0.0) || !std::isfinite(layer.lambda)) bad("lambda must be positive");
  if (!(layer.a > 0.0) || !std::isfinite(layer.a)) bad("a must be positive");
  if (!(layer.b > 0.0) || !std::isfinite(layer.b)) bad("b must be positive");
  if (!(layer.c > 0.0) || !std::isfinite(layer.c)) bad("c must be positive");
}

void validate(const CascadeChannel& ch) {
  if (ch.layers.empty()) {
    throw std::invalid_argument("channel: at least one layer required");
  }
  if (static_cast<int>(ch.layers.size()) > kMaxLayers) {
    throw std::invalid_argument("channel: more than " + std::to_string(kMaxLayers) +
                                " layers (mixture expansion would need 2^N terms)");
  }
  if (ch.r != 1 && ch.r != 2) {
    throw std::invalid_argument("channel: detection exponent r must be 1 or 2");
  }
  if (!(ch.mu_r > 0.0) || !std::isfinite(ch.mu_r)) {
    throw std::invalid_argument("channel: mu_r must be positive");
  }
  for (const auto& l : ch.layers) validate(l);
}

double mean_irradiance(const CascadeChannel& ch) {
  validate(ch);
  double prod = 1.0;
  for (const auto& l : ch.layers) {
    double gg = 0.0;
    if (l.omega < 1.0) {
      gg = l.b * std::tgamma(l.a + 1.0 / l.c) / std::tgamma(l.a);
    }
    prod *= l.omega * l.lambda + (1.0 - l.omega) * gg;
  }
  return prod;
}

std::vector<MixtureTerm> enumerate_terms(const CascadeChannel& ch, Domain domain) {
  validate(ch);
  const int N = static_cast<int>(ch.layers.size());
  const double r = static_cast<double>(ch.r);
  const double snr_base =
      domain == Domain::snr ? pow_int(mean_irradiance(ch), ch.r) / ch.mu_r : 1.0;

  std::vector<MixtureTerm> terms;
  terms.reserve(std::size_t{1} << N);
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << N); ++mask) {
    MixtureTerm t;
    t.index.resize(N);
    t.weight = 1.0;
    t.h_argument_scale = snr_base;
    t.h.m = N;
    t.h.n = 0;
    t.h.lower.reserve(N);
    for (int n = 0; n < N; ++n) {
      const EggLayer& l = ch.layers[n];
      const int i = (mask >> n) & 1u;
      t.index[n] = i;
      if (i == 0) {
        t.weight *= l.omega;
        t.h_argument_scale *=
            domain == Domain::snr ? pow_int(1.0 / l.lambda, ch.r) : 1.0 / l.lambda;
        t.h.lower.push_back({1.0, domain == Domain::snr ? r : 1.0});
      } else {
        t.weight *= (1.0 - l.omega) / std::tgamma(l.a);
        t.h_argument_scale *= domain == Domain::snr ? pow_int(1.0 / l.b, ch.r) : 1.0 / l.b;
        t.h.lower.push_back({l.a, domain == Domain::snr ? r / l.c : 1.0 / l.c});
      }
    }
    terms.push_back(std::move(t));
  }
  return terms;
}

double layer_pdf_direct(const EggLayer& layer, double x) {
  validate(layer);
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("channel: density argument must be positive");
  }
  double pdf = 0.0;
  if (layer.omega > 0.0) {
    pdf += layer.omega / layer.lambda * std::exp(-x / layer.lambda);
  }
  if (layer.omega < 1.0) {
    const double ac = layer.a * layer.c;
    pdf += (1.0 - layer.omega) * layer.c / (std::tgamma(layer.a) * x) *
           std::exp(ac * std::log(x / layer.b) - std::pow(x / layer.b, layer.c));
  }
  return pdf;
}

double layer_pdf_h(const EggLayer& layer, double x, double rel_tol) {
  validate(layer);
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("channel: density argument must be positive");
  }
  double pdf = 0.0;
  if (layer.omega > 0.0) {
    foxh::HParams h;
    h.m = 1;
    h.lower = {{0.0, 1.0}};
    pdf += layer.omega / layer.lambda * foxh::evaluate(h, x / layer.lambda, rel_tol).value;
  }
  if (layer.omega < 1.0) {
    foxh::HParams h;
    h.m = 1;
    h.lower = {{layer.a, 1.0}};
    const double z = std::pow(x / layer.b, layer.c);
    pdf += (1.0 - layer.omega) * layer.c / (std::tgamma(layer.a) * x) *
           foxh::evaluate(h, z, rel_tol).value;
  }
  return pdf;
}

namespace {

double mixture_value(const CascadeChannel& ch, Domain domain, double x, double rel_tol,
                     bool cdf) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("channel: argument must be positive");
  }
  double sum = 0.0;
  for (const auto& t : enumerate_terms(ch, domain)) {
    if (t.weight == 0.0) continue;  // degenerate omega in {0,1}: skip dead branch
    const foxh::HParams h = cdf ? cdf_params(t.h) : t.h;
    sum += t.weight * foxh::evaluate(h, t.h_argument_scale * x, rel_tol).value;
  }
  return cdf ? sum : sum / x;
}

}  // namespace

double cascade_irradiance_pdf(const CascadeChannel& ch, double x, double rel_tol) {
  return mixture_value(ch, Domain::irradiance, x, rel_tol, false);
}

double cascade_irradiance_cdf(const CascadeChannel& ch, double x, double rel_tol) {
  return mixture_value(ch, Domain::irradiance, x, rel_tol, true);
}

double cascade_snr_pdf(const CascadeChannel& ch, double snr, double rel_tol) {
  return mixture_value(ch, Domain::snr, snr, rel_tol, false);
}

double cascade_snr_cdf(const CascadeChannel& ch, double snr, double rel_tol) {
  return mixture_value(ch, Domain::snr, snr, rel_tol, true);
}

}  // namespace uwoc::channel
