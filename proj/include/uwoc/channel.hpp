#pragma once

#include <vector>

#include "uwoc/fox_h.hpp"

// Cascaded mixture exponential / generalized-gamma fading statistics.
//
// A layer's irradiance is exponential (mean lambda) with probability omega,
// otherwise generalized-gamma (density ~ x^{ac-1} exp(-(x/b)^c)). The
// end-to-end irradiance of a cascade is the product of independent layers,
// and the electrical SNR is gamma = mu_r * (I / E[I])^r with r in {1, 2}, so
// mu_r is the true average electrical SNR. Expanding the mixture product
// yields 2^N components whose Mellin transforms are gamma-function products,
// i.e. each component is a single H-function.

namespace uwoc::channel {

// Cascade depth cap: the mixture expansion enumerates 2^N terms.
inline constexpr int kMaxLayers = 20;

struct EggLayer {
  double omega = 0.0;   // exponential-branch weight, in [0, 1]
  double lambda = 1.0;  // exponential mean, > 0
  double a = 1.0;       // generalized-gamma shape, > 0
  double b = 1.0;       // generalized-gamma scale, > 0
  double c = 1.0;       // generalized-gamma exponent, > 0
};

void validate(const EggLayer& layer);

struct CascadeChannel {
  std::vector<EggLayer> layers;  // 1 <= N <= 20
  int r = 1;                     // detection exponent, 1 or 2
  double mu_r = 1.0;             // average electrical SNR, > 0
};

void validate(const CascadeChannel& ch);

enum class Domain { irradiance, snr };

// One of the 2^N product-mixture components; index[n] selects the exponential
// (0) or generalized-gamma (1) branch of layer n. The density contribution of
// a term is (weight / x) * H[h_argument_scale * x] with the stored H^{N,0}_{0,N}
// parameters.
struct MixtureTerm {
  std::vector<int> index;
  double weight = 1.0;
  double h_argument_scale = 1.0;
  foxh::HParams h;
};

std::vector<MixtureTerm> enumerate_terms(const CascadeChannel& ch, Domain domain);

// E[I] = prod_n [ omega_n lambda_n + (1-omega_n) b_n Gamma(a_n + 1/c_n)/Gamma(a_n) ].
double mean_irradiance(const CascadeChannel& ch);

// Single-layer density: elementary mixture form.
double layer_pdf_direct(const EggLayer& layer, double x);

// Same density assembled from two H^{1,0}_{0,1} evaluations.
double layer_pdf_h(const EggLayer& layer, double x, double rel_tol = 1e-8);

// Cascade densities and CDFs. Each CDF term integrates the Mellin-Barnes
// representation in closed form, turning H^{N,0}_{0,N} into H^{N,1}_{1,N+1}
// with an extra upper (1,1) pair and lower (0,1) pair.
double cascade_irradiance_pdf(const CascadeChannel& ch, double x, double rel_tol = 1e-8);
double cascade_irradiance_cdf(const CascadeChannel& ch, double x, double rel_tol = 1e-8);
double cascade_snr_pdf(const CascadeChannel& ch, double snr, double rel_tol = 1e-8);
double cascade_snr_cdf(const CascadeChannel& ch, double snr, double rel_tol = 1e-8);

}  // namespace uwoc::channel
