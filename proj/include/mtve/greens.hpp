#ifndef MTVE_GREENS_HPP
#define MTVE_GREENS_HPP

#include <vector>

#include "mtve/geometry.hpp"

// Green's functions of the Klein-Gordon equation: massive families on the
// Minkowski half-space, massless conformally-coupled families on flat, open
// and closed FLRW universes.  Distributional pieces (light-cone deltas,
// winding deltas) are represented structurally and never sampled pointwise.

namespace mtve::greens {

enum class Support { Retarded, Advanced, Symmetric };

// Symbolic record of the singular prefactor [a(eta) a(eta')]^exponent.
// The factors are combined with matching positive powers from volume
// elements before anything is evaluated numerically.
struct ScalePrefactor {
  double exponent = 0.0;
  double a1 = 1.0;  // a(eta)
  double a2 = 1.0;  // a(eta')

  bool singular() const {
    return exponent < 0.0 && (a1 == 0.0 || a2 == 0.0);
  }
  double value() const;  // throws std::domain_error when singular()
};

struct GreensValue {
  double regular = 0.0;               // function part, prefactor excluded
  double lightcone_delta_coeff = 0.0; // delta coefficient, prefactor excluded
  Support support = Support::Symmetric;
  ScalePrefactor prefactor;

  bool prefactor_singular() const { return prefactor.singular(); }
  // Prefactor folded in; throws rather than returning an infinity.
  double folded_regular() const { return regular * prefactor.value(); }
  double folded_delta_coeff() const {
    return lightcone_delta_coeff * prefactor.value();
  }
};

// One winding image of the closed-universe symmetric Green's function,
// supported on (eta-eta')^2 = radius^2 with radius = |s + 2 pi n|.
struct WindingTerm {
  int n = 0;
  double radius = 0.0;
  double sign = 0.0;            // sgn(s + 2 pi n)
  double inv_sin_amplitude = 0.0;  // 1 / sin(s)
};

struct WindingSum {
  double s = 0.0;  // geodesic distance of the spatial points
  std::vector<WindingTerm> terms;
  ScalePrefactor prefactor;  // [a(eta) a(eta')]^{-1}
  bool singular_amplitude = false;  // sin(s) = 0 at coincident/antipodal points

  // -(1/4pi) (s + 2 pi n)/sin(s), prefactor excluded.
  double term_amplitude(std::size_t i) const;
};

// Bessel functions of the first kind, |rel or envelope error| validated
// against a high-precision table in the tests.  Power series below the
// split point, Hankel asymptotic expansion above it.
double bessel_j0(double x);
double bessel_j1(double x);

// Table-1 symmetric Green's function at displacement (dt, dr), dr = |dx|.
GreensValue minkowski_gsym(int d, double m, double dt, double dr);
// Retarded variant: additional H(dt) support factor.
GreensValue minkowski_gret(int d, double m, double dt, double dr);

// Massless symmetric Green's function on a flat FLRW universe.
GreensValue flat_flrw_gsym(int d, const geometry::ScaleFactorModel& model,
                           const geometry::SpacetimePoint& x,
                           const geometry::SpacetimePoint& xp);

// Massless retarded Green's function on the open FLRW universe; the value
// is the coefficient of delta(eta - eta' - s).
GreensValue open_flrw_gret(const geometry::ScaleFactorModel& model,
                           const geometry::SpacetimePoint& x,
                           const geometry::SpacetimePoint& xp);

// Winding-image sum of the closed-universe symmetric Green's function;
// only images with radius reachable within [0, T] are retained.
WindingSum closed_flrw_gsym(const geometry::ScaleFactorModel& model,
                            const geometry::SpacetimePoint& x,
                            const geometry::SpacetimePoint& xp);

// G~(x,x') = Omega(x)^{-(d-1)/2} Omega(x')^{-(d-1)/2} G(x,x').
GreensValue conformal_transform_greens(const GreensValue& g, double omega_x,
                                       double omega_xp, int d);

// m~ = m / Omega, independently of d.
double transform_mass(double m, double omega);

}  // namespace mtve::greens

#endif
