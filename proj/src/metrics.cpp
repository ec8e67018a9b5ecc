#include "uwoc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uwoc/fox_h.hpp"
#include "uwoc/special.hpp"

namespace uwoc::metrics {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// H arguments above this are outside the meaningful range of the high-SNR
// residue expansion; the Asymptote flag reports it.
constexpr double kAsymptoticRegime = 1e-2;

}  // namespace

void validate(const Modulation& mod) {
  if (!(mod.delta > 0.0) || !std::isfinite(mod.delta)) {
    throw std::invalid_argument("modulation: delta must be positive");
  }
  if (!(mod.p > 0.0) || !std::isfinite(mod.p)) {
    throw std::invalid_argument("modulation: p must be positive");
  }
  if (mod.q_list.empty()) {
    throw std::invalid_argument("modulation: q_list must be non-empty");
  }
  for (double q : mod.q_list) {
    if (!(q > 0.0) || !std::isfinite(q)) {
      throw std::invalid_argument("modulation: every q must be positive");
    }
  }
}

double conditional_ber(const Modulation& mod, double snr) {
  validate(mod);
  if (!(snr >= 0.0) || !std::isfinite(snr)) {
    throw std::domain_error("conditional_ber: snr must be >= 0 and finite");
  }
  double sum = 0.0;
  for (double q : mod.q_list) {
    sum += specfn::upper_incomplete_gamma(mod.p, q * snr);
  }
  return mod.delta / (2.0 * std::tgamma(mod.p)) * sum;
}

double avg_ber_exact(const channel::CascadeChannel& ch, const Modulation& mod,
                     double rel_tol) {
  channel::validate(ch);
  validate(mod);
  const auto terms = channel::enumerate_terms(ch, channel::Domain::snr);
  const int N = static_cast<int>(ch.layers.size());

  double total = 0.0;
  for (double q : mod.q_list) {
    for (const auto& t : terms) {
      if (t.weight == 0.0) continue;
      foxh::HParams h;
      h.m = N;
      h.n = 2;
      h.upper = {{1.0, 1.0}, {1.0 - mod.p, 1.0}};
      h.lower = t.h.lower;
      h.lower.push_back({0.0, 1.0});
      total += t.weight * foxh::evaluate(h, t.h_argument_scale / q, rel_tol).value;
    }
  }
  return mod.delta / (2.0 * std::tgamma(mod.p)) * total;
}

Asymptote avg_ber_asymptotic(const channel::CascadeChannel& ch, const Modulation& mod) {
  channel::validate(ch);
  validate(mod);
  if (ch.layers.size() != 2) {
    throw std::invalid_argument("avg_ber_asymptotic: derived for two-layer cascades only");
  }
  const auto terms = channel::enumerate_terms(ch, channel::Domain::snr);
  const double r = static_cast<double>(ch.r);
  const double p = mod.p;
  const auto& l1 = ch.layers[0];
  const auto& l2 = ch.layers[1];

  Asymptote out;
  out.in_regime = true;
  double total = 0.0;
  for (double q : mod.q_list) {
    for (const auto& t : terms) {
      if (t.weight == 0.0) continue;
      const double z = t.h_argument_scale / q;
      if (!(z < kAsymptoticRegime)) out.in_regime = false;
      const bool gg1 = t.index[0] == 1;
      const bool gg2 = t.index[1] == 1;
      double piece = 0.0;
      if (!gg1 && !gg2) {
        // Coinciding simple poles of the two exponential components merge
        // into a double pole, whose residue carries the log factor.
        piece = -std::tgamma(p + 1.0 / r) * std::log(z) * std::pow(z, 1.0 / r) / r;
      } else if (gg1 != gg2) {
        const double a = gg1 ? l1.a : l2.a;
        const double c = gg1 ? l1.c : l2.c;
        piece = std::tgamma(p + 1.0 / r) * std::tgamma(a - 1.0 / c) * std::pow(z, 1.0 / r) -
                std::tgamma(-a * c) * std::tgamma(p + a * c / r) * c * std::pow(z, a * c / r);
      } else {
        const double e1 = l1.a * l1.c;
        const double e2 = l2.a * l2.c;
        piece = std::tgamma(p + e1 / r) * std::tgamma(l2.a - e1 / l2.c) / l1.a *
                    std::pow(z, e1 / r) +
                std::tgamma(p + e2 / r) * std::tgamma(l1.a - e2 / l1.c) / l2.a *
                    std::pow(z, e2 / r);
      }
      total += t.weight * piece;
    }
  }
  out.value = mod.delta / (2.0 * std::tgamma(p)) * total;
  return out;
}

double diversity_order(const channel::CascadeChannel& ch) {
  channel::validate(ch);
  double order = 1.0 / ch.r;
  for (const auto& l : ch.layers) {
    order = std::min(order, l.a * l.c / ch.r);
  }
  return order;
}

double ergodic_capacity_exact(const channel::CascadeChannel& ch, double rel_tol) {
  channel::validate(ch);
  const auto terms = channel::enumerate_terms(ch, channel::Domain::snr);
  const int N = static_cast<int>(ch.layers.size());
  const double r = static_cast<double>(ch.r);

  double total = 0.0;
  for (const auto& t : terms) {
    if (t.weight == 0.0) continue;
    foxh::HParams h;
    h.m = N + 2;
    h.n = 1;
    h.upper = {{0.0, 1.0}, {1.0, r}};
    h.lower = t.h.lower;
    h.lower.push_back({0.0, 1.0});
    h.lower.push_back({0.0, r});
    total += t.weight * foxh::evaluate(h, t.h_argument_scale / kTau, rel_tol).value;
  }
  return r * total;
}

double ergodic_capacity_asymptotic(const channel::CascadeChannel& ch) {
  channel::validate(ch);
  const double r = static_cast<double>(ch.r);
  double mean_log = 0.0;  // E[ln I_n] summed over layers
  for (const auto& l : ch.layers) {
    double layer = 0.0;
    if (l.omega > 0.0) layer += l.omega * (std::log(l.lambda) - kEulerGamma);
    if (l.omega < 1.0) {
      layer += (1.0 - l.omega) * (std::log(l.b) + specfn::digamma(l.a) / l.c);
    }
    mean_log += layer;
  }
  const double mean = channel::mean_irradiance(ch);
  return std::log(kTau * ch.mu_r) + r * (mean_log - std::log(mean));
}

double outage_probability(const channel::CascadeChannel& ch, double gamma_th,
                          double rel_tol) {
  const double cdf = channel::cascade_snr_cdf(ch, gamma_th, rel_tol);
  return std::clamp(cdf, 0.0, 1.0);
}

}  // namespace uwoc::metrics
