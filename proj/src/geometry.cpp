#include "mtve/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace mtve::geometry {

SpacetimeKind SpacetimeKind::minkowski(int d) {
  if (d < 1 || d > 3) throw std::domain_error("minkowski: d must be 1, 2 or 3");
  return {SpaceKind::MinkowskiHalfSpace, d};
}

SpacetimeKind SpacetimeKind::flat_flrw(int d) {
  if (d < 1 || d > 3) throw std::domain_error("flat_flrw: d must be 1, 2 or 3");
  return {SpaceKind::FlatFLRW, d};
}

SpacetimeKind SpacetimeKind::open_flrw3() { return {SpaceKind::OpenFLRW3, 3}; }

SpacetimeKind SpacetimeKind::closed_flrw3() {
  return {SpaceKind::ClosedFLRW3, 3};
}

std::string SpacetimeKind::name() const {
  switch (kind) {
    case SpaceKind::MinkowskiHalfSpace:
      return "minkowski" + std::to_string(d) + "d";
    case SpaceKind::FlatFLRW:
      return "flat_flrw" + std::to_string(d) + "d";
    case SpaceKind::OpenFLRW3:
      return "open_flrw3d";
    case SpaceKind::ClosedFLRW3:
      return "closed_flrw3d";
  }
  return "?";
}

namespace {

double catalogue_a(MatterKind matter, int k, double eta) {
  switch (matter) {
    case MatterKind::Dust:
      if (k == 1) return 1.0 - std::cos(eta);
      if (k == 0) return eta * eta;
      return std::cosh(eta) - 1.0;
    case MatterKind::Radiation:
      if (k == 1) return std::sin(eta);
      if (k == 0) return std::abs(eta);
      return std::sinh(eta);
    case MatterKind::Custom:
      break;
  }
  throw std::logic_error("catalogue_a: custom model has no catalogue form");
}

}  // namespace

ScaleFactorModel ScaleFactorModel::dust(int k, double T) {
  if (k < -1 || k > 1) throw std::domain_error("dust: k must be -1, 0 or 1");
  ScaleFactorModel m;
  m.matter_ = MatterKind::Dust;
  m.k_ = k;
  m.horizon_ = (k == 1) ? 2.0 * M_PI : T;
  if (k == 1 && T > 0.0) m.horizon_ = T;
  if (m.horizon_ <= 0.0) throw std::domain_error("dust: horizon T must be > 0");
  m.name_ = "dust_k" + std::to_string(k);
  return m;
}

ScaleFactorModel ScaleFactorModel::radiation(int k, double T) {
  if (k < -1 || k > 1)
    throw std::domain_error("radiation: k must be -1, 0 or 1");
  ScaleFactorModel m;
  m.matter_ = MatterKind::Radiation;
  m.k_ = k;
  m.horizon_ = (k == 1) ? M_PI : T;
  if (k == 1 && T > 0.0) m.horizon_ = T;
  if (m.horizon_ <= 0.0)
    throw std::domain_error("radiation: horizon T must be > 0");
  m.name_ = "radiation_k" + std::to_string(k);
  return m;
}

ScaleFactorModel ScaleFactorModel::custom(std::function<double(double)> fn,
                                          double T, std::string name) {
  if (!fn) throw std::invalid_argument("custom: null scale callback");
  if (T <= 0.0) throw std::domain_error("custom: horizon T must be > 0");
  ScaleFactorModel m;
  m.matter_ = MatterKind::Custom;
  m.horizon_ = T;
  m.fn_ = std::move(fn);
  m.name_ = std::move(name);
  return m;
}

double ScaleFactorModel::operator()(double eta) const {
  if (eta < 0.0 || eta > horizon_ * (1.0 + 1e-12) + 1e-300)
    throw std::domain_error("scale_factor: eta outside [0, T]");
  eta = std::min(eta, horizon_);
  if (matter_ == MatterKind::Custom) return fn_(eta);
  return catalogue_a(matter_, k_, eta);
}

double ScaleFactorModel::sup(int n_samples) const {
  double s = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    double eta = horizon_ * static_cast<double>(i) / (n_samples - 1);
    s = std::max(s, (*this)(eta));
  }
  return s;
}

bool ScaleFactorModel::vanishes_at_horizon(double tol) const {
  return std::abs((*this)(horizon_)) <= tol * std::max(1.0, sup(256));
}

SpacetimePoint SpacetimePoint::flat1d(double eta, double z) {
  return {eta, FlatPoint{{z, 0.0, 0.0}, 1}};
}

SpacetimePoint SpacetimePoint::flat(double eta, std::array<double, 3> x,
                                    int d) {
  if (d < 1 || d > 3) throw std::domain_error("flat point: d must be 1..3");
  return {eta, FlatPoint{x, d}};
}

SpacetimePoint SpacetimePoint::sphere(double eta, std::array<double, 4> q) {
  return {eta, make_sphere_point(q)};
}

SpacetimePoint SpacetimePoint::hyperboloid(double eta,
                                           std::array<double, 4> x) {
  return {eta, make_hyperboloid_point(x)};
}

double dot4(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

double minkowski_dot4(const std::array<double, 4>& a,
                      const std::array<double, 4>& b) {
  return a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
}

SpherePoint make_sphere_point(std::array<double, 4> q) {
  double n2 = dot4(q, q);
  if (std::abs(n2 - 1.0) > 2.0 * kPointTol)
    throw std::domain_error("sphere point: not a unit 4-vector");
  return SpherePoint{q};
}

HyperboloidPoint make_hyperboloid_point(std::array<double, 4> x) {
  double n2 = minkowski_dot4(x, x);
  if (std::abs(n2 - 1.0) > 2.0 * kPointTol || x[0] <= 0.0)
    throw std::domain_error("hyperboloid point: not on the unit hyperboloid");
  return HyperboloidPoint{x};
}

double geodesic_distance_s3(const SpherePoint& q, const SpherePoint& qp) {
  if (std::abs(dot4(q.q, q.q) - 1.0) > 2.0 * kPointTol ||
      std::abs(dot4(qp.q, qp.q) - 1.0) > 2.0 * kPointTol)
    throw std::domain_error("geodesic_distance_s3: inputs not unit vectors");
  double c = std::clamp(dot4(q.q, qp.q), -1.0, 1.0);
  return std::acos(c);
}

double geodesic_distance_h3(const HyperboloidPoint& x,
                            const HyperboloidPoint& xp) {
  if (std::abs(minkowski_dot4(x.x, x.x) - 1.0) > 2.0 * kPointTol ||
      std::abs(minkowski_dot4(xp.x, xp.x) - 1.0) > 2.0 * kPointTol)
    throw std::domain_error("geodesic_distance_h3: inputs off the hyperboloid");
  double c = std::max(minkowski_dot4(x.x, xp.x), 1.0);
  return std::acosh(c);
}

double flat_spatial_distance(const FlatPoint& a, const FlatPoint& b) {
  double s = 0.0;
  int d = std::max(a.d, b.d);
  for (int i = 0; i < d; ++i) {
    double delta = a.x[i] - b.x[i];
    s += delta * delta;
  }
  return std::sqrt(s);
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa,
               double b, double fb, double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a,
                     double fa, double b, double fb, double m, double fm,
                     double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(f, a, fa, m, fm, lm, flm);
  double right = simpson(f, m, fm, b, fb, rm, frm);
  if (depth <= 0 || std::abs(left + right - whole) <=
                        15.0 * tol * (std::abs(left + right) + 1e-300))
    return left + right + (left + right - whole) / 15.0;
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol) {
  double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
  double whole = simpson(f, a, fa, b, fb, m, fm);
  return adaptive_step(f, a, fa, b, fb, m, fm, whole, rel_tol, 48);
}

std::optional<double> timelike_distance(const SpacetimePoint& x1,
                                        const SpacetimePoint& x2,
                                        const ScaleFactorModel& model) {
  const auto* p1 = std::get_if<FlatPoint>(&x1.spatial);
  const auto* p2 = std::get_if<FlatPoint>(&x2.spatial);
  if (!p1 || !p2)
    throw std::domain_error("timelike_distance: flat FLRW points required");
  double dt = std::abs(x1.eta - x2.eta);
  double dx = flat_spatial_distance(*p1, *p2);
  if (dt <= dx) {
    if (dt == dx && dx == 0.0) return 0.0;  // coincident points
    return std::nullopt;
  }
  double integral = adaptive_simpson(
      [&](double tau) {
        return model(tau * x1.eta + (1.0 - tau) * x2.eta);
      },
      0.0, 1.0, 1e-10);
  return (dt - dx) * integral;
}

double conformal_weight(int d, double eta1, double eta2,
                        const ScaleFactorModel& model) {
  if (d == 1) return 1.0;
  double p = 0.5 * (d - 1);
  return std::pow(model(eta1), p) * std::pow(model(eta2), p);
}

}  // namespace mtve::geometry
