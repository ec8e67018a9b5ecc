#pragma once

#include <stdexcept>
#include <string>
#include <vector>

// Fox H-function evaluation by numerical Mellin-Barnes contour integration.
//
//   H^{m,n}_{p,q}[z | (a_1,A_1)..(a_p,A_p); (b_1,B_1)..(b_q,B_q)]
//     = (1/(2 pi i)) * Int Theta(s) z^{-s} ds,
//   Theta(s) =  prod_{j<=m} Gamma(b_j + B_j s) * prod_{i<=n} Gamma(1 - a_i - A_i s)
//            / (prod_{i>n} Gamma(a_i + A_i s)  * prod_{j>m} Gamma(1 - b_j - B_j s)),
//
// integrated upward along a path separating the left pole families
// s = -(b_j + l)/B_j (j <= m, l = 0,1,...) from the right families
// s = (1 - a_i + k)/A_i (i <= n, k = 0,1,...). Arguments are positive reals.
// Conjugate symmetry of Theta on such paths reduces the integral to
// (1/pi) * Int_0^inf Re[...] dt, which is what the evaluator computes, in
// log-space with the t = 0 magnitude normalized out.

namespace uwoc::foxh {

struct HPair {
  double a = 0.0;      // location parameter (a_i or b_j)
  double alpha = 1.0;  // positive scale (A_i or B_j)
};

struct HParams {
  int m = 0;
  int n = 0;
  std::vector<HPair> upper;  // (a_i, A_i), i = 1..p
  std::vector<HPair> lower;  // (b_j, B_j), j = 1..q

  int p() const { return static_cast<int>(upper.size()); }
  int q() const { return static_cast<int>(lower.size()); }
};

// Thrown when a left pole family collides with a right pole family, so no
// separating contour exists. Carries the colliding indices (0-based).
class PoleCollisionError : public std::runtime_error {
 public:
  PoleCollisionError(int lower_index, int lower_offset, int upper_index, int upper_offset,
                     double location);
  int lower_index;
  int lower_offset;
  int upper_index;
  int upper_offset;
  double location;  // shared pole position on the real axis
};

// Thrown when the contour quadrature cannot reach the requested tolerance
// within its evaluation budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ContourSpec {
  enum class Kind {
    vertical_line,  // s = c + i t
    bent_line,      // s = c - 0.5|t| + i t; valid when sum B(m) > sum A(n)
  };
  Kind kind = Kind::vertical_line;
  double abscissa = 0.0;       // c = Re s at t = 0
  double half_height = 16.0;   // first tail-check horizon; extended as needed
  double rel_tol = 1e-8;
  double segment_scale = 1.0;  // quadrature panel width multiplier (>= 1)

  // Abscissa choice: midpoint of the pole gap when both pole families exist;
  // the real saddle point of the integrand when there are no upper pairs
  // (p = 0), which conditions the quadrature uniformly in z; (min right
  // pole) - 1 when there are no lower numerator pairs.  For saddles far to
  // the right (large z) the integrand's natural width grows like the square
  // root of the saddle location, and segment_scale widens the panels to
  // match.
  static ContourSpec for_params(const HParams& h, double z, double rel_tol = 1e-8);
};

// Structural and pole-separation validation (families checked to offset 64,
// tie tolerance 1e-9). Throws std::invalid_argument or PoleCollisionError.
// Returns its argument for chaining.
const HParams& validate(const HParams& h);

double max_left_pole(const HParams& h);   // -infinity when m = 0
double min_right_pole(const HParams& h);  // +infinity when n = 0

struct HEval {
  double value = 0.0;
  double rel_err = 0.0;  // estimated achieved relative error
};

// Evaluates H at positive real z. Throws std::domain_error for z <= 0,
// std::overflow_error for z > 1e6 (outside the validated range), and
// ConvergenceError if the quadrature stalls.
HEval evaluate(const HParams& h, double z, const ContourSpec& contour);
HEval evaluate(const HParams& h, double z, double rel_tol = 1e-8);

// One term of the small-z expansion: coefficient * z^exponent * (optionally log z).
struct ResidueTerm {
  double exponent = 0.0;
  bool log_factor = false;
  double coefficient = 0.0;
};

// At least `count` leading terms (ascending exponent) of the z -> 0 expansion
// from residues at the left poles. A simple pole yields one term; a pole of
// order 2 (two families colliding within 1e-9) yields a log term plus a
// constant term; order > 2 throws std::runtime_error.
std::vector<ResidueTerm> leading_residues(const HParams& h, int count);

// sum_k coeff_k * z^{e_k} * (log z if flagged), for z > 0.
double residue_sum(const std::vector<ResidueTerm>& terms, double z);

}  // namespace uwoc::foxh
