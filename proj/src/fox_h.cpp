#include "uwoc/fox_h.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "uwoc/special.hpp"

namespace uwoc::foxh {

namespace {

using cplx = std::complex<double>;

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr int kPoleScanDepth = 64;    // offsets checked for left/right collisions
constexpr double kPoleTieTol = 1e-9;  // pole positions closer than this coincide
constexpr double kMaxArgument = 1e6;  // evaluator validated for z <= this
constexpr long kMaxEvals = 6'000'000;

cplx lg(cplx z) { return specfn::detail::lgamma_core(z); }

// log of Theta(s) * z^{-s}.
cplx log_integrand(const HParams& h, cplx s, double logz) {
  cplx sum = -s * logz;
  for (int j = 0; j < h.m; ++j) {
    sum += lg(h.lower[j].a + h.lower[j].alpha * s);
  }
  for (int i = 0; i < h.n; ++i) {
    sum += lg(1.0 - h.upper[i].a - h.upper[i].alpha * s);
  }
  for (int i = h.n; i < h.p(); ++i) {
    sum -= lg(h.upper[i].a + h.upper[i].alpha * s);
  }
  for (int j = h.m; j < h.q(); ++j) {
    sum -= lg(1.0 - h.lower[j].a - h.lower[j].alpha * s);
  }
  return sum;
}

// Real-valued integrand along the (possibly bent) upward path, after folding
// the conjugate half: value(t) = Re phi + sigma * Im phi, phi normalized by
// exp(-L0) with L0 = Re log phi at t = 0.
struct Integrand {
  const HParams& h;
  double logz;
  double c;
  double sigma;
  double L0;

  double operator()(double t) const {
    const cplx s(c + sigma * t, t);
    const cplx lp = log_integrand(h, s, logz) - L0;
    if (!std::isfinite(lp.real())) {
      // -inf: a denominator gamma pole, where the integrand vanishes. NaN can
      // only arise from conflicting infinities at isolated points; both are
      // measure-zero and treated as the limiting value 0.
      return 0.0;
    }
    if (lp.real() > 700.0) {
      throw ConvergenceError("fox_h: integrand overflow on the contour");
    }
    const cplx v = std::exp(lp);
    return v.real() + sigma * v.imag();
  }
};

struct SegmentResult {
  double integral = 0.0;
  double err = 0.0;
  double fmax = 0.0;
};

// Tanh-sinh quadrature over [a, b] with level doubling. abs_tol and rel_tol
// bound the accepted last-level correction.
template <typename F>
SegmentResult ts_segment(const F& f, double a, double b, double abs_tol, double rel_tol,
                         long& evals) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  constexpr double kUmax = 4.0;

  SegmentResult res;
  auto g = [&](double u) {
    const double sh = 0.5 * kPi * std::sinh(u);
    const double ch = std::cosh(sh);
    const double x = mid + half * std::tanh(sh);
    const double w = half * 0.5 * kPi * std::cosh(u) / (ch * ch);
    const double v = f(x);
    res.fmax = std::max(res.fmax, std::abs(v));
    if (++evals > kMaxEvals) {
      throw ConvergenceError("fox_h: quadrature evaluation budget exhausted");
    }
    return w * v;
  };

  double sum = g(0.0);
  for (double u = 1.0; u <= kUmax; u += 1.0) {
    sum += g(u) + g(-u);
  }
  double h = 1.0;
  double prev = h * sum;
  for (int level = 1; level <= 10; ++level) {
    h *= 0.5;
    for (double u = h; u <= kUmax; u += 2.0 * h) {
      sum += g(u) + g(-u);
    }
    const double cur = h * sum;
    res.err = std::abs(cur - prev);
    prev = cur;
    if (level >= 3 && res.err <= std::max(abs_tol, rel_tol * std::abs(cur))) {
      break;
    }
  }
  res.integral = prev;
  return res;
}

double psi_any(double x) {
  if (x > 0.0) {
    return specfn::digamma(x);
  }
  // Reflection: psi(x) = psi(1 - x) - pi / tan(pi x); infinite at the poles.
  return specfn::digamma(1.0 - x) - kPi / std::tan(kPi * x);
}

bool near_nonpositive_integer(double x) {
  if (x > 0.5) return false;
  const double n = std::round(x);
  return n <= 0.0 && std::abs(x - n) < 1e-12;
}

// 1/Gamma(x) for real x; exactly 0 at the poles of Gamma.
double inv_gamma(double x) {
  if (near_nonpositive_integer(x)) return 0.0;
  return 1.0 / std::tgamma(x);
}

// Theta(s0) with the gamma factors of lower families j in `skip` removed.
// Denominator gammas at poles contribute a factor 0 (their reciprocal).
double theta_reduced(const HParams& h, double s0, int skip1, int skip2) {
  double prod = 1.0;
  for (int j = 0; j < h.m; ++j) {
    if (j == skip1 || j == skip2) continue;
    prod *= std::tgamma(h.lower[j].a + h.lower[j].alpha * s0);
  }
  for (int i = 0; i < h.n; ++i) {
    prod *= std::tgamma(1.0 - h.upper[i].a - h.upper[i].alpha * s0);
  }
  for (int i = h.n; i < h.p(); ++i) {
    prod *= inv_gamma(h.upper[i].a + h.upper[i].alpha * s0);
  }
  for (int j = h.m; j < h.q(); ++j) {
    prod *= inv_gamma(1.0 - h.lower[j].a - h.lower[j].alpha * s0);
  }
  return prod;
}

// d/ds log of theta_reduced at real s0 (digamma sums; infinite only where the
// reduced product itself is singular, which valid parameters exclude).
double theta_reduced_log_deriv(const HParams& h, double s0, int skip1, int skip2) {
  double sum = 0.0;
  for (int j = 0; j < h.m; ++j) {
    if (j == skip1 || j == skip2) continue;
    sum += h.lower[j].alpha * psi_any(h.lower[j].a + h.lower[j].alpha * s0);
  }
  for (int i = 0; i < h.n; ++i) {
    sum -= h.upper[i].alpha * psi_any(1.0 - h.upper[i].a - h.upper[i].alpha * s0);
  }
  for (int i = h.n; i < h.p(); ++i) {
    sum -= h.upper[i].alpha * psi_any(h.upper[i].a + h.upper[i].alpha * s0);
  }
  for (int j = h.m; j < h.q(); ++j) {
    sum += h.lower[j].alpha * psi_any(1.0 - h.lower[j].a - h.lower[j].alpha * s0);
  }
  return sum;
}

std::string collision_message(int j, int l, int i, int k, double where) {
  std::ostringstream os;
  os << "fox_h: left pole family j=" << j << " offset l=" << l
     << " collides with right pole family i=" << i << " offset k=" << k << " at s=" << where;
  return os.str();
}

}  // namespace

PoleCollisionError::PoleCollisionError(int lower_index_, int lower_offset_, int upper_index_,
                                       int upper_offset_, double location_)
    : std::runtime_error(
          collision_message(lower_index_, lower_offset_, upper_index_, upper_offset_, location_)),
      lower_index(lower_index_),
      lower_offset(lower_offset_),
      upper_index(upper_index_),
      upper_offset(upper_offset_),
      location(location_) {}

const HParams& validate(const HParams& h) {
  if (h.m < 0 || h.m > h.q() || h.n < 0 || h.n > h.p()) {
    throw std::invalid_argument("fox_h: require 0 <= m <= q and 0 <= n <= p");
  }
  if (h.m == 0 && h.n == 0) {
    throw std::invalid_argument("fox_h: m = n = 0 (no numerator gammas) is not supported");
  }
  for (const auto& pr : h.upper) {
    if (!std::isfinite(pr.a) || !std::isfinite(pr.alpha) || pr.alpha <= 0.0) {
      throw std::invalid_argument("fox_h: upper pair requires finite a and alpha > 0");
    }
  }
  for (const auto& pr : h.lower) {
    if (!std::isfinite(pr.a) || !std::isfinite(pr.alpha) || pr.alpha <= 0.0) {
      throw std::invalid_argument("fox_h: lower pair requires finite b and beta > 0");
    }
  }
  for (int j = 0; j < h.m; ++j) {
    for (int l = 0; l <= kPoleScanDepth; ++l) {
      const double sL = -(h.lower[j].a + l) / h.lower[j].alpha;
      for (int i = 0; i < h.n; ++i) {
        const double k_real = sL * h.upper[i].alpha - 1.0 + h.upper[i].a;
        const long k = std::lround(k_real);
        if (k < 0 || k > kPoleScanDepth) continue;
        const double sR = (1.0 - h.upper[i].a + static_cast<double>(k)) / h.upper[i].alpha;
        if (std::abs(sL - sR) < kPoleTieTol) {
          throw PoleCollisionError(j, l, i, static_cast<int>(k), sL);
        }
      }
    }
  }
  return h;
}

double max_left_pole(const HParams& h) {
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < h.m; ++j) {
    best = std::max(best, -h.lower[j].a / h.lower[j].alpha);
  }
  return best;
}

double min_right_pole(const HParams& h) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < h.n; ++i) {
    best = std::min(best, (1.0 - h.upper[i].a) / h.upper[i].alpha);
  }
  return best;
}

ContourSpec ContourSpec::for_params(const HParams& h, double z, double rel_tol) {
  validate(h);
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw std::domain_error("fox_h: argument must be a positive real");
  }
  const double maxL = max_left_pole(h);
  const double minR = min_right_pole(h);
  double c = 0.0;
  double scale_hint = 1.0;
  if (h.m > 0 && h.n > 0) {
    if (!(maxL < minR)) {
      throw std::invalid_argument("fox_h: pole families overlap; no separating vertical contour");
    }
    c = 0.5 * (maxL + minR);
  } else if (h.m > 0) {
    c = maxL + 1.0;
    if (h.p() == 0) {
      // Real saddle of Theta(s) z^{-s}: sum_j B_j psi(b_j + B_j c) = log z.
      // The left side increases monotonically from -inf (just right of the
      // rightmost integrand pole) to +inf, so a unique saddle exists for
      // every z.  Placing the contour there keeps the normalized integrand
      // O(1) relative to the result for very small and very large z alike.
      const double logz = std::log(z);
      auto g = [&](double cc) {
        double s = 0.0;
        for (int j = 0; j < h.m; ++j) {
          s += h.lower[j].alpha * specfn::digamma(h.lower[j].a + h.lower[j].alpha * cc);
        }
        return s - logz;
      };
      double lo;
      double hi;
      if (g(c) < 0.0) {
        lo = c;
        hi = c + 1.0;
        double step = 1.0;
        while (g(hi) < 0.0 && hi < 1e7) {
          lo = hi;
          step *= 2.0;
          hi += step;
        }
      } else {
        // Saddle sits between the rightmost pole and the default abscissa;
        // g -> -inf at the pole, so this always brackets.
        lo = maxL + 1e-10;
        hi = c;
      }
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
      }
      c = 0.5 * (lo + hi);
      // Curvature of the log-integrand at the saddle sets the natural width
      // of the quadrature panels: 1/sqrt(g'(c)), via a centered difference
      // of the digamma sum (kept clear of the pole at maxL).
      const double step = std::min(1e-3 * (1.0 + std::abs(c)), 0.5 * (c - maxL));
      if (step > 0.0) {
        const double gp = (g(c + step) - g(c - step)) / (2.0 * step);
        if (gp > 0.0 && std::isfinite(gp)) {
          scale_hint = std::max(1.0, 1.0 / std::sqrt(gp));
        }
      }
    }
  } else {
    c = minR - 1.0;
  }
  ContourSpec spec;
  spec.kind = Kind::vertical_line;
  spec.abscissa = c;
  spec.rel_tol = rel_tol;
  spec.segment_scale = scale_hint;
  return spec;
}

HEval evaluate(const HParams& h, double z, const ContourSpec& contour) {
  validate(h);
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw std::domain_error("fox_h: argument must be a positive real");
  }
  if (z > kMaxArgument) {
    throw std::overflow_error("fox_h: argument exceeds 1e6, outside the validated range");
  }
  const double tol = contour.rel_tol > 0.0 ? contour.rel_tol : 1e-8;
  const double logz = std::log(z);

  double beta_m = 0.0;  // sum of numerator-lower scales
  double alpha_n = 0.0; // sum of numerator-upper scales
  for (int j = 0; j < h.m; ++j) beta_m += h.lower[j].alpha;
  for (int i = 0; i < h.n; ++i) alpha_n += h.upper[i].alpha;

  double sigma = 0.0;
  if (contour.kind == ContourSpec::Kind::bent_line) {
    if (beta_m <= alpha_n + 1e-12) {
      throw std::invalid_argument(
          "fox_h: bent contour requires the numerator-lower scales to dominate "
          "(sum B(m) > sum A(n))");
    }
    sigma = -0.5;
  }

  // Vertical-path decay exponent of |integrand|: exp(-rate * t) up to an
  // algebraic factor.
  double rate = beta_m + alpha_n;
  for (int i = h.n; i < h.p(); ++i) rate -= h.upper[i].alpha;
  for (int j = h.m; j < h.q(); ++j) rate -= h.lower[j].alpha;
  rate *= 0.5 * kPi;
  if (sigma == 0.0 && rate <= 1e-12) {
    throw ConvergenceError(
        "fox_h: integrand does not decay on a vertical contour (sum of scales <= 0)");
  }

  const double c = contour.abscissa;
  const cplx at0 = log_integrand(h, cplx(c, 0.0), logz);
  // The on-axis magnitude bounds the whole contour integral up to a modest
  // envelope factor; far below the double-precision floor the result is an
  // exact zero and the quadrature can be skipped.
  if (std::isfinite(at0.real()) && at0.real() < -900.0) {
    return {0.0, 1e-15};
  }
  const double L0 = std::isfinite(at0.real()) ? at0.real() : 0.0;
  const Integrand f{h, logz, c, sigma, L0};

  const double seg = 2.0 * std::max(1.0, contour.segment_scale);
  long evals = 0;
  double total = 0.0;
  double err_acc = 0.0;
  double t0 = 0.0;
  double fmax_prev = -1.0;
  double tail = std::numeric_limits<double>::infinity();
  bool converged = false;

  while (t0 < kMaxArgument) {
    const double scale = std::max({std::abs(total), 1e-3});
    const SegmentResult r = ts_segment(f, t0, t0 + seg, 0.02 * tol * scale, 0.02 * tol, evals);
    total += r.integral;
    err_acc += r.err;
    t0 += seg;

    if (t0 + 1e-9 >= std::min(contour.half_height, 8.0) || r.fmax == 0.0) {
      // Tail bound: the largest magnitude seen in the last segment, decaying
      // at the analytic rate (empirical rate when it is steeper, e.g. on a
      // bent path where the decay is superexponential).
      double eff = sigma == 0.0 ? rate : std::max(rate, 1e-3);
      if (fmax_prev > 0.0 && r.fmax > 0.0 && r.fmax < fmax_prev) {
        eff = std::max(eff, 0.8 * std::log(fmax_prev / r.fmax) / seg);
      }
      tail = r.fmax == 0.0 ? 0.0 : 2.0 * r.fmax / std::max(eff, 1e-6);
      const double goal = 0.1 * tol * std::max(std::abs(total), 1e-300);
      if (tail <= goal) {
        converged = true;
        break;
      }
    }
    fmax_prev = r.fmax;
  }
  if (!converged) {
    throw ConvergenceError("fox_h: tail estimate never fell below tolerance/10");
  }

  const double denom = std::max(std::abs(total), 1e-300);
  double rel = (err_acc + tail) / denom;
  rel = std::min(1.0, std::max(rel, 1e-16));
  return {std::exp(L0) * total / kPi, rel};
}

HEval evaluate(const HParams& h, double z, double rel_tol) {
  return evaluate(h, z, ContourSpec::for_params(h, z, rel_tol));
}

std::vector<ResidueTerm> leading_residues(const HParams& h, int count) {
  validate(h);
  if (count <= 0) return {};
  if (h.m == 0) {
    throw std::invalid_argument("fox_h: small-z expansion requires left pole families (m > 0)");
  }

  struct Cand {
    int j;
    int l;
    double exponent;  // (b_j + l)/B_j = -s0
  };
  std::vector<Cand> cands;
  constexpr int kDepth = 256;
  for (int j = 0; j < h.m; ++j) {
    for (int l = 0; l <= kDepth; ++l) {
      cands.push_back({j, l, (h.lower[j].a + l) / h.lower[j].alpha});
    }
  }
  std::sort(cands.begin(), cands.end(),
            [](const Cand& x, const Cand& y) { return x.exponent < y.exponent; });

  std::vector<ResidueTerm> terms;
  std::size_t idx = 0;
  while (idx < cands.size() && static_cast<int>(terms.size()) < count) {
    std::size_t end = idx + 1;
    while (end < cands.size() && cands[end].exponent - cands[idx].exponent < kPoleTieTol) {
      ++end;
    }
    const std::size_t order = end - idx;
    const double s0 = -cands[idx].exponent;
    if (order == 1) {
      const Cand& cd = cands[idx];
      const double beta = h.lower[cd.j].alpha;
      const double g = (cd.l % 2 == 0 ? 1.0 : -1.0) / (std::tgamma(cd.l + 1.0) * beta);
      const double coeff = g * theta_reduced(h, s0, cd.j, -1);
      terms.push_back({cands[idx].exponent, false, coeff});
    } else if (order == 2) {
      const Cand& c1 = cands[idx];
      const Cand& c2 = cands[idx + 1];
      if (c1.j == c2.j) {
        // One family cannot collide with itself (offsets differ by >= 1/B).
        throw std::runtime_error("fox_h: inconsistent pole grouping");
      }
      const double b1 = h.lower[c1.j].alpha;
      const double b2 = h.lower[c2.j].alpha;
      const double g1 = (c1.l % 2 == 0 ? 1.0 : -1.0) / (std::tgamma(c1.l + 1.0) * b1);
      const double g2 = (c2.l % 2 == 0 ? 1.0 : -1.0) / (std::tgamma(c2.l + 1.0) * b2);
      const double R = theta_reduced(h, s0, c1.j, c2.j);
      const double A = g1 * g2 * R;
      const double Ad = A * (b1 * specfn::digamma(c1.l + 1.0) + b2 * specfn::digamma(c2.l + 1.0) +
                             theta_reduced_log_deriv(h, s0, c1.j, c2.j));
      // Residue of A(s) z^{-s} at the order-2 pole: A'(s0) - A(s0) log z.
      terms.push_back({cands[idx].exponent, true, -A});
      terms.push_back({cands[idx].exponent, false, Ad});
    } else {
      throw std::runtime_error("fox_h: pole of order > 2 in the small-z expansion");
    }
    idx = end;
  }
  return terms;
}

double residue_sum(const std::vector<ResidueTerm>& terms, double z) {
  if (!(z > 0.0)) {
    throw std::domain_error("fox_h: residue_sum requires z > 0");
  }
  const double lz = std::log(z);
  double sum = 0.0;
  for (const auto& t : terms) {
    sum += t.coefficient * std::pow(z, t.exponent) * (t.log_factor ? lz : 1.0);
  }
  return sum;
}

}  // namespace uwoc::foxh
