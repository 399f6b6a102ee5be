#ifndef MTVE_QUADRATURE_HPP
#define MTVE_QUADRATURE_HPP

#include <array>
#include <vector>

// Quadrature rules for the operator integrals: cone-restricted Volterra
// rules, product-integration rules for the 1/r and 1/sqrt((d eta)^2 - r^2)
// weights, and deterministic node sets on S^2, S^3 and truncated H^3 balls.

namespace mtve::quad {

// ---------------------------------------------------------------------------
// Cone rule for the d=1 triangle {(eta', z') : 0 <= eta' <= eta - |z - z'|}.
// Entries reference grid nodes; weights are positive and every entry
// satisfies the cone inequality exactly.
struct ConeRuleEntry {
  int time_idx;
  int space_idx;
  double w;
};

struct ConeRule {
  std::vector<ConeRuleEntry> entries;
};

// Weights of the clipped trapezoid rule for integrating over [0, c] on a
// uniform axis starting at 0; exact for piecewise-linear integrands, uses
// only nodes with axis[b] <= c.
std::vector<std::pair<int, double>> clipped_trapezoid(
    const std::vector<double>& axis, double c);

ConeRule volterra_rule_1d(const std::vector<double>& eta_axis,
                          const std::vector<double>& z_axis, int eta_index,
                          int z_index);

// Same triangle rule but for an off-grid observation point (test use).
ConeRule volterra_rule_1d_at(const std::vector<double>& eta_axis,
                             const std::vector<double>& z_axis, double eta,
                             double z);

// ---------------------------------------------------------------------------
// Ball rule for integrals  Int_{|x'-c|<=R} f(x') / |x'-c| d^3x'.
// The 1/r weight times the r^2 Jacobian is integrated exactly per shell,
// angular directions come from the deterministic spiral set.
struct BallNode3 {
  double r;
  std::array<double, 3> pos;  // absolute position
  double w;                   // includes the 1/r-weighted measure
};

struct BallRule3D {
  std::vector<BallNode3> nodes;
};

BallRule3D ball_rule_3d(const std::array<double, 3>& center, double radius,
                        int n_radial, int n_angular);

// Shell/angle counts used for a grid of spacing h; the solver and the
// oracle both derive rule sizes from these recipes.
int ball_radial_count(double radius, double h_space);
inline constexpr int kBallAngularCount = 32;

// ---------------------------------------------------------------------------
// Cone rule with the weight 1/sqrt((Delta eta)^2 - r^2) for d=2: per time
// slice the radial integral is product-integrated exactly for piecewise
// linear integrands (arcsine antiderivatives), composed with an angular
// trapezoid.  Node weights include the time-trapezoid factor.
struct ConeSqrtNode2 {
  int time_idx;
  double r;                   // radius within the slice disk
  std::array<double, 2> pos;  // absolute position
  double w;
};

struct ConeSqrtRule2D {
  std::vector<ConeSqrtNode2> nodes;
};

ConeSqrtRule2D cone_sqrt_rule_2d(const std::vector<double>& eta_axis,
                                 int eta_index, const std::array<double, 2>& x,
                                 double h_space);

// ---------------------------------------------------------------------------
// Deterministic node sets.

// Fibonacci spiral points on the unit 2-sphere.
std::vector<std::array<double, 3>> sphere_nodes(int n);

// Low-discrepancy, antipodally symmetric points on S^3 (n must be even);
// node i + n/2 is the antipode of node i.  Equal weights 2 pi^2 / n.
std::vector<std::array<double, 4>> s3_nodes(int n);

// Nodes and weights covering the geodesic ball of radius L in H^3:
// radial bands (sinh^2 measure integrated exactly) times spiral directions.
struct H3Node {
  std::array<double, 4> x;  // hyperboloid embedding
  double w;
};

std::vector<H3Node> h3_ball_nodes(double L, int n_shells, int n_angular);

// ---------------------------------------------------------------------------
// Pair quadrature over S^3 x S^3 with removal of the sin^{-p} singular
// neighborhoods and analytic add-back of the removed mass.
enum class S3Weight { One, InvSin, InvSin2 };

// Int_{s < eps} weight(s) dOmega_3 around a fixed point (equals the
// integral over s > pi - eps by symmetry).
double s3_cap_integral(S3Weight w, double eps);

// Int_{s < eps} (1/sinh s) sinh^2(s) ds dOmega_2 = 4 pi (cosh(eps) - 1).
double h3_cap_integral(double eps);

// Exclusion radius recipe: max(2 * node spacing, 1e-3).
double exclusion_from_spacing(double spacing);
double default_s3_exclusion(int n_nodes);

struct S3PairRule {
  std::vector<std::array<double, 4>> nodes;
  double node_weight = 0.0;  // 2 pi^2 / n
  double eps = 0.0;

  // Integral of the pure singular weight over S^3 x S^3.
  double integrate_pure(S3Weight w) const;
};

S3PairRule s3_pair_rule(int n_nodes, double exclusion_radius);

// ---------------------------------------------------------------------------
// Linear interpolation stencil on a uniform axis: two (index, weight)
// entries; t is clamped to the axis range.
struct InterpStencil {
  int i0 = 0, i1 = 0;
  double w0 = 1.0, w1 = 0.0;
};

InterpStencil interp_stencil(const std::vector<double>& axis, double t);

}  // namespace mtve::quad

#endif
