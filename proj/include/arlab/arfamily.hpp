#pragma once

// The general Ahern-Rudin class g(z, w) = (z, w, P) with
//   P = (zb d/dw - wb d/dz) sum_j Q_j / (p_j (q_j + 1)),
// Q_j the (p_j, q_j)-bihomogeneous parts of a harmonic Q, and the
// holomorphic extension G of its push-forward to C^4.

#include <map>
#include <stdexcept>
#include <utility>

#include "arlab/armap.hpp"
#include "arlab/poly.hpp"

namespace arlab {

class ArFamilyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Bidegree = std::pair<int, int>;

/// p = a + c (degree in z, w), q = b + d (degree in zb, wb).
Bidegree bidegree(const Exponents& e);

/// Exact decomposition into bihomogeneous parts.
std::map<Bidegree, HarmonicPoly> bidegree_parts(const HarmonicPoly& p);

/// 4 (d^2/dz dzb + d^2/dw dwb), the Euclidean Laplacian of R^4 = C^2.
HarmonicPoly laplacian(const HarmonicPoly& p);
bool is_harmonic(const HarmonicPoly& p);

/// zb d/dw - wb d/dz.
HarmonicPoly rotation_operator(const HarmonicPoly& p);

/// Weights each bihomogeneous part Q_j by 1/(p_j (q_j + 1)) and applies
/// zb d/dw - wb d/dz. Throws ArFamilyError naming a part with p_j = 0.
HarmonicPoly ar_operator(const HarmonicPoly& q);

/// z -> w1, zb -> w2, w -> w3, wb -> w4.
HolomorphicPoly polarize(const HarmonicPoly& p);

/// Replaces the term c * m (m the monomial with exponents `e`) by
/// c * m * (|z|^2 + |w|^2). The two agree on S^3. Throws if the term is absent.
HarmonicPoly lift_term_by_sphere_factor(const HarmonicPoly& p, const Exponents& e);

/// The harmonic Q = |z|^4 - 4|z|^2|w|^2 + |w|^4 + i(|w|^2 - |z|^2) whose image
/// under ar_operator is w zb wb^2 - z zb^2 wb + i zb wb.
HarmonicPoly ahern_rudin_generating_q();

/// w zb wb^2 + i z zb^2 wb, the third component of f, obtained from
/// ar_operator(ahern_rudin_generating_q()) by lifting the i zb wb term and
/// dividing by 1 + i.
HarmonicPoly ahern_rudin_third_component();

/// G(w1, w2, w3, w4) = (w1, w3, polarize(P)(w)).
class PolarizedMap {
 public:
  explicit PolarizedMap(HolomorphicPoly third) : third_(std::move(third)) {}

  const HolomorphicPoly& third() const { return third_; }
  MapValue operator()(const Vec4c& w) const;

  /// Restricted Jacobian on Q^3 by central differences along the chart
  /// direction (PHI if |w1| >= |w3|, else PSI), normalized as in armap.
  ChartJacobian restricted_jacobian_fd(const Vec4c& w, double step = 1e-6) const;

 private:
  HolomorphicPoly third_;
};

PolarizedMap build_G(const HarmonicPoly& q);
PolarizedMap build_G_from_P(const HarmonicPoly& p);

/// The f-map as a member of the family: G equals eval_F identically.
PolarizedMap ahern_rudin_G();

/// True iff every monomial of ar_operator(q) carries zb and wb. Requires q
/// to be a polynomial in |z|^2, |w|^2 (a = b, c = d in every monomial);
/// otherwise throws ArFamilyError.
bool divisibility_check(const HarmonicPoly& q);

struct NonvanishingResult {
  double min_abs = 0.0;
  Complex z;
  Complex w;
};

/// Heuristic: sampled S^3 minimum of |q| refined by local descent. A positive
/// value is evidence, not proof.
NonvanishingResult q_nonvanishing_check(const HarmonicPoly& q, int samples, std::uint64_t seed);

}  // namespace arlab
