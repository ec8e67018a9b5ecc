#pragma once

// Link-level performance metrics for cascaded mixture channels: average
// bit-error rate (exact closed form and high-SNR asymptote), ergodic
// capacity (exact and asymptotic, in nats), outage probability, and the
// diversity order implied by the high-SNR slope.

#include <string>
#include <vector>

#include "uwoc/channel.hpp"

namespace uwoc::metrics {

// Capacity prefactor inside log(1 + tau * snr): e / (2 pi).
inline constexpr double kTau = 0.4326279897161325436088873948230448087144;

// Modulation family for the conditional-BER kernel
//   BER(snr) = delta / (2 Gamma(p)) * sum_k GammaUpper(p, q_k * snr).
// The (delta, p, q_list) triple is data-driven; `detection` is a free-form
// label ("im-dd", "heterodyne") carried through for reporting.
struct Modulation {
  std::string name;
  double delta = 1.0;
  double p = 0.5;
  std::vector<double> q_list;
  std::string detection;
};

// Throws std::invalid_argument unless delta > 0, p > 0, and q_list is a
// non-empty list of positive reals.
void validate(const Modulation& mod);

// Instantaneous bit-error probability at a given SNR.
double conditional_ber(const Modulation& mod, double snr);

// Exact average BER over the cascade SNR distribution, via one H-function
// evaluation per (mixture term, q_k) pair.  Result lies in (0, 0.5].
// Propagates evaluator errors.
double avg_ber_exact(const channel::CascadeChannel& ch, const Modulation& mod,
                     double rel_tol = 1e-8);

// Asymptotic value together with a regime flag: `in_regime` is true when
// every underlying H-function argument is below 1e-2, the range where the
// expansion is meaningful.
struct Asymptote {
  double value = 0.0;
  bool in_regime = false;
};

// High-SNR average BER for two-layer cascades: the residue expansion of the
// exact expression, with one log-weighted term from the double pole of the
// exponential/exponential mixture component.  Throws std::invalid_argument
// for N != 2.
Asymptote avg_ber_asymptotic(const channel::CascadeChannel& ch, const Modulation& mod);

// High-SNR slope of the BER curve: min{1/r, a_n c_n / r over layers}.
double diversity_order(const channel::CascadeChannel& ch);

// Ergodic capacity E[ln(1 + tau * snr)] in nats per channel use, via one
// H-function evaluation per mixture term.
double ergodic_capacity_exact(const channel::CascadeChannel& ch, double rel_tol = 1e-8);

// High-SNR affine form ln(tau mu_r) + r E[ln(I/E[I])]; the gap to the exact
// capacity vanishes as mu_r grows.
double ergodic_capacity_asymptotic(const channel::CascadeChannel& ch);

// P(snr <= gamma_th), clamped to [0, 1].
double outage_probability(const channel::CascadeChannel& ch, double gamma_th,
                          double rel_tol = 1e-8);

}  // namespace uwoc::metrics
