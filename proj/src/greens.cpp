#include "mtve/greens.hpp"

#include <cmath>
#include <stdexcept>

namespace mtve::greens {

double ScalePrefactor::value() const {
  if (singular())
    throw std::domain_error("ScalePrefactor: singular at a scale-factor root");
  if (exponent == 0.0) return 1.0;
  return std::pow(a1, exponent) * std::pow(a2, exponent);
}

double WindingSum::term_amplitude(std::size_t i) const {
  if (singular_amplitude)
    throw std::domain_error("WindingSum: amplitude singular (sin s = 0)");
  const WindingTerm& t = terms.at(i);
  double shifted = s + 2.0 * M_PI * t.n;
  return -(1.0 / (4.0 * M_PI)) * shifted * t.inv_sin_amplitude;
}

namespace {

// Series/asymptotic split point; below it the long-double power series
// carries ~1e-15 absolute error, above it the optimally truncated Hankel
// expansion reaches the same level.
constexpr double kBesselSplit = 16.0;

long double bessel_series(int nu, long double x) {
  long double half = x / 2.0L;
  long double term = 1.0L;
  for (int j = 1; j <= nu; ++j) term *= half / j;  // (x/2)^nu / nu!
  long double sum = term;
  long double x2 = -half * half;
  for (int k = 1; k < 200; ++k) {
    term *= x2 / (static_cast<long double>(k) * (k + nu));
    sum += term;
    if (std::abs(term) < 1e-22L * std::abs(sum) + 1e-320L) break;
  }
  return sum;
}

// Hankel large-argument expansion with optimal truncation,
//   J_nu(x) = sqrt(2/(pi x)) [P cos(omega) - Q sin(omega)],
//   omega = x - nu pi/2 - pi/4.
long double bessel_asymptotic(int nu, long double x) {
  long double mu = 4.0L * nu * nu;
  long double p = 1.0L, q = 0.0L;
  long double c = 1.0L;
  long double prev = 1e400L;
  for (int m = 1; m < 40; ++m) {
    c *= (mu - (2.0L * m - 1.0L) * (2.0L * m - 1.0L)) / (8.0L * m * x);
    if (std::abs(c) >= prev) break;  // asymptotic tail started growing
    prev = std::abs(c);
    int r = m % 4;
    if (r == 0)
      p += c;
    else if (r == 1)
      q += c;
    else if (r == 2)
      p -= c;
    else
      q -= c;
  }
  long double omega = x - nu * (M_PIl / 2.0L) - M_PIl / 4.0L;
  return std::sqrt(2.0L / (M_PIl * x)) *
         (p * std::cos(omega) - q * std::sin(omega));
}

double bessel_j(int nu, double x) {
  double sign = 1.0;
  if (x < 0.0) {
    x = -x;
    if (nu == 1) sign = -1.0;  // J1 odd, J0 even
  }
  if (x <= kBesselSplit)
    return sign * static_cast<double>(bessel_series(nu, x));
  return sign * static_cast<double>(bessel_asymptotic(nu, x));
}

// Relative on-cone test for the light-cone delta coefficient.
bool on_lightcone(double x2, double dt, double dr) {
  double scale = dt * dt + dr * dr;
  return std::abs(x2) <= 1e-12 * std::max(scale, 1e-300);
}

void check_dim(int d) {
  if (d < 1 || d > 3) throw std::domain_error("greens: d must be 1, 2 or 3");
}

}  // namespace

double bessel_j0(double x) { return bessel_j(0, x); }
double bessel_j1(double x) { return bessel_j(1, x); }

GreensValue minkowski_gsym(int d, double m, double dt, double dr) {
  check_dim(d);
  GreensValue g;
  g.support = Support::Symmetric;
  double x2 = dt * dt - dr * dr;
  switch (d) {
    case 1:
      if (x2 >= 0.0) g.regular = 0.5 * bessel_j0(m * std::sqrt(x2));
      break;
    case 2:
      if (x2 > 0.0) {
        double r = std::sqrt(x2);
        g.regular = std::cos(m * r) / (2.0 * M_PI * r);
      }
      break;
    case 3:
      if (on_lightcone(x2, dt, dr)) g.lightcone_delta_coeff = 1.0 / (2.0 * M_PI);
      if (x2 > 0.0 && m != 0.0) {
        double r = std::sqrt(x2);
        g.regular = -m / (4.0 * M_PI * r) * bessel_j1(m * r);
      }
      break;
  }
  return g;
}

GreensValue minkowski_gret(int d, double m, double dt, double dr) {
  GreensValue g = minkowski_gsym(d, m, dt, dr);
  g.support = Support::Retarded;
  if (dt < 0.0) {
    g.regular = 0.0;
    g.lightcone_delta_coeff = 0.0;
  }
  return g;
}

GreensValue flat_flrw_gsym(int d, const geometry::ScaleFactorModel& model,
                           const geometry::SpacetimePoint& x,
                           const geometry::SpacetimePoint& xp) {
  check_dim(d);
  const auto* p = std::get_if<geometry::FlatPoint>(&x.spatial);
  const auto* pp = std::get_if<geometry::FlatPoint>(&xp.spatial);
  if (!p || !pp)
    throw std::domain_error("flat_flrw_gsym: flat spatial points required");
  double dt = x.eta - xp.eta;
  double dr = geometry::flat_spatial_distance(*p, *pp);
  double x2 = dt * dt - dr * dr;

  GreensValue g;
  g.support = Support::Symmetric;
  if (d >= 2) {
    g.prefactor.exponent = (d == 2) ? -0.5 : -1.0;
    g.prefactor.a1 = model(x.eta);
    g.prefactor.a2 = model(xp.eta);
  }
  switch (d) {
    case 1:
      if (x2 >= 0.0) g.regular = 0.5;
      break;
    case 2:
      if (x2 > 0.0) g.regular = 1.0 / (2.0 * M_PI * std::sqrt(x2));
      break;
    case 3:
      if (on_lightcone(x2, dt, dr)) g.lightcone_delta_coeff = 1.0 / (2.0 * M_PI);
      break;
  }
  return g;
}

GreensValue open_flrw_gret(const geometry::ScaleFactorModel& model,
                           const geometry::SpacetimePoint& x,
                           const geometry::SpacetimePoint& xp) {
  const auto* h = std::get_if<geometry::HyperboloidPoint>(&x.spatial);
  const auto* hp = std::get_if<geometry::HyperboloidPoint>(&xp.spatial);
  if (!h || !hp)
    throw std::domain_error("open_flrw_gret: hyperboloid points required");
  double s = geometry::geodesic_distance_h3(*h, *hp);
  if (s == 0.0)
    throw std::domain_error(
        "open_flrw_gret: coincidence limit s = 0 (delta at the same point)");
  GreensValue g;
  g.support = Support::Retarded;
  g.lightcone_delta_coeff = 1.0 / (4.0 * M_PI * std::sinh(s));
  g.prefactor = {-1.0, model(x.eta), model(xp.eta)};
  return g;
}

WindingSum closed_flrw_gsym(const geometry::ScaleFactorModel& model,
                            const geometry::SpacetimePoint& x,
                            const geometry::SpacetimePoint& xp) {
  const auto* q = std::get_if<geometry::SpherePoint>(&x.spatial);
  const auto* qp = std::get_if<geometry::SpherePoint>(&xp.spatial);
  if (!q || !qp)
    throw std::domain_error("closed_flrw_gsym: sphere points required");
  double T = model.T();
  WindingSum w;
  w.s = geometry::geodesic_distance_s3(*q, *qp);
  w.prefactor = {-1.0, model(x.eta), model(xp.eta)};
  double sin_s = std::sin(w.s);
  w.singular_amplitude = (sin_s == 0.0 || w.s == 0.0 || w.s == M_PI);
  // |eta - eta'| stays within [0, T], so only images with |s + 2 pi n| <= T
  // can be reached.
  int n_min = static_cast<int>(std::floor((-T - w.s) / (2.0 * M_PI)));
  int n_max = static_cast<int>(std::ceil((T - w.s) / (2.0 * M_PI)));
  for (int n = n_min; n <= n_max; ++n) {
    double shifted = w.s + 2.0 * M_PI * n;
    double radius = std::abs(shifted);
    if (radius > T) continue;
    WindingTerm t;
    t.n = n;
    t.radius = radius;
    t.sign = (shifted > 0.0) ? 1.0 : (shifted < 0.0 ? -1.0 : 0.0);
    t.inv_sin_amplitude = w.singular_amplitude ? 0.0 : 1.0 / sin_s;
    w.terms.push_back(t);
  }
  return w;
}

GreensValue conformal_transform_greens(const GreensValue& g, double omega_x,
                                       double omega_xp, int d) {
  check_dim(d);
  if (omega_x <= 0.0 || omega_xp <= 0.0)
    throw std::domain_error("conformal_transform_greens: Omega must be > 0");
  GreensValue out = g;
  if (d == 1) return out;
  double p = -0.5 * (d - 1);
  double factor = std::pow(omega_x, p) * std::pow(omega_xp, p);
  out.regular *= factor;
  out.lightcone_delta_coeff *= factor;
  return out;
}

double transform_mass(double m, double omega) {
  if (omega <= 0.0) throw std::domain_error("transform_mass: Omega must be > 0");
  return m / omega;
}

}  // namespace mtve::greens
