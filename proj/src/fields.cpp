#include "mtve/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mtve/threading.hpp"

namespace mtve::fields {

SpatialDiscretization SpatialDiscretization::flat_box(int d, double L,
                                                      int n_per_axis) {
  if (d < 1 || d > 3) throw std::domain_error("flat_box: d must be 1..3");
  if (L <= 0.0 || n_per_axis < 2)
    throw std::domain_error("flat_box: need L > 0 and >= 2 nodes per axis");
  SpatialDiscretization s;
  s.kind = Kind::FlatBox;
  s.dim = d;
  s.box_halfwidth = L;
  s.axis.resize(n_per_axis);
  s.axis_weights.assign(n_per_axis, 0.0);
  double h = 2.0 * L / (n_per_axis - 1);
  for (int i = 0; i < n_per_axis; ++i) {
    s.axis[i] = -L + h * i;
    s.axis_weights[i] = (i == 0 || i == n_per_axis - 1) ? 0.5 * h : h;
  }
  return s;
}

SpatialDiscretization SpatialDiscretization::sphere3(int n_nodes) {
  SpatialDiscretization s;
  s.kind = Kind::Sphere3;
  s.dim = 3;
  s.n_nodes_param = n_nodes;
  s.nodes = quad::s3_nodes(n_nodes);
  s.node_weights.assign(s.nodes.size(),
                        2.0 * M_PI * M_PI / static_cast<double>(s.nodes.size()));
  return s;
}

SpatialDiscretization SpatialDiscretization::hyperbolic3(double L,
                                                         int n_shells,
                                                         int n_angular) {
  SpatialDiscretization s;
  s.kind = Kind::Hyperbolic3;
  s.dim = 3;
  s.ball_radius = L;
  s.n_shells = n_shells;
  s.n_angular = n_angular;
  for (auto& n : quad::h3_ball_nodes(L, n_shells, n_angular)) {
    s.nodes.push_back(n.x);
    s.node_weights.push_back(n.w);
  }
  return s;
}

std::size_t SpatialDiscretization::count() const {
  if (kind == Kind::FlatBox) {
    std::size_t n = axis.size();
    std::size_t c = 1;
    for (int i = 0; i < dim; ++i) c *= n;
    return c;
  }
  return nodes.size();
}

double SpatialDiscretization::weight(std::size_t i) const {
  if (kind == Kind::FlatBox) {
    std::size_t n = axis.size();
    double w = 1.0;
    for (int k = dim - 1; k >= 0; --k) {
      w *= axis_weights[i % n];
      i /= n;
    }
    return w;
  }
  return node_weights[i];
}

geometry::SpatialPoint SpatialDiscretization::point(std::size_t i) const {
  if (kind == Kind::FlatBox) {
    std::size_t n = axis.size();
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int k = dim - 1; k >= 0; --k) {
      x[k] = axis[i % n];
      i /= n;
    }
    return geometry::FlatPoint{x, dim};
  }
  if (kind == Kind::Sphere3) return geometry::SpherePoint{nodes[i]};
  return geometry::HyperboloidPoint{nodes[i]};
}

geometry::SpacetimePoint SpatialDiscretization::at(double eta,
                                                   std::size_t i) const {
  return geometry::SpacetimePoint{eta, point(i)};
}

double SpatialDiscretization::spacing() const {
  if (kind == Kind::FlatBox) return axis[1] - axis[0];
  if (kind == Kind::Sphere3)
    return std::cbrt(2.0 * M_PI * M_PI / static_cast<double>(nodes.size()));
  return ball_radius / n_shells;
}

bool SpatialDiscretization::operator==(const SpatialDiscretization& o) const {
  return kind == o.kind && dim == o.dim && axis == o.axis &&
         nodes == o.nodes && box_halfwidth == o.box_halfwidth &&
         ball_radius == o.ball_radius;
}

bool MultiTimeGrid::operator==(const MultiTimeGrid& o) const {
  return eta1 == o.eta1 && eta2 == o.eta2 && space1 == o.space1 &&
         space2 == o.space2;
}

namespace {

std::vector<double> uniform_axis(double T, int n_t) {
  if (T <= 0.0 || n_t < 2)
    throw std::domain_error("time axis: need T > 0 and >= 2 nodes");
  std::vector<double> axis(n_t);
  for (int i = 0; i < n_t; ++i) axis[i] = T * static_cast<double>(i) / (n_t - 1);
  return axis;
}

}  // namespace

GridPtr make_flat_grid(int d, double T, int n_t, double L, int n_per_axis) {
  auto g = std::make_shared<MultiTimeGrid>();
  g->T = T;
  g->eta1 = uniform_axis(T, n_t);
  g->eta2 = g->eta1;
  g->space1 = SpatialDiscretization::flat_box(d, L, n_per_axis);
  g->space2 = g->space1;
  return g;
}

GridPtr make_closed_grid(double T, int n_t, int n_s3) {
  auto g = std::make_shared<MultiTimeGrid>();
  g->T = T;
  g->eta1 = uniform_axis(T, n_t);
  g->eta2 = g->eta1;
  g->space1 = SpatialDiscretization::sphere3(n_s3);
  g->space2 = g->space1;
  return g;
}

GridPtr make_open_grid(double T, int n_t, double L, int n_shells,
                       int n_angular) {
  auto g = std::make_shared<MultiTimeGrid>();
  g->T = T;
  g->eta1 = uniform_axis(T, n_t);
  g->eta2 = g->eta1;
  g->space1 = SpatialDiscretization::hyperbolic3(L, n_shells, n_angular);
  g->space2 = g->space1;
  return g;
}

MultiTimeField zero_field(GridPtr grid) {
  MultiTimeField f;
  f.grid = std::move(grid);
  f.values.assign(f.grid->size(), Complex(0.0, 0.0));
  return f;
}

double slice_l2(const MultiTimeField& field, std::size_t a1, std::size_t a2) {
  const auto& g = *field.grid;
  std::size_t s1 = g.space1.count(), s2 = g.space2.count();
  std::vector<double> terms;
  terms.reserve(s1 * s2);
  for (std::size_t i1 = 0; i1 < s1; ++i1) {
    double w1 = g.space1.weight(i1);
    for (std::size_t i2 = 0; i2 < s2; ++i2) {
      double w2 = g.space2.weight(i2);
      Complex v = field.at(a1, i1, a2, i2);
      terms.push_back(w1 * w2 * std::norm(v));
    }
  }
  return std::sqrt(threading::pairwise_sum(terms));
}

double bnorm(const MultiTimeField& field) {
  const auto& g = *field.grid;
  double best = 0.0;
  for (std::size_t a1 = 0; a1 < g.eta1.size(); ++a1)
    for (std::size_t a2 = 0; a2 < g.eta2.size(); ++a2)
      best = std::max(best, slice_l2(field, a1, a2));
  return best;
}

MultiTimeField lincomb(Complex alpha, const MultiTimeField& x, Complex beta,
                       const MultiTimeField& y) {
  if (!(*x.grid == *y.grid) || x.a_exp1 != y.a_exp1 || x.a_exp2 != y.a_exp2)
    throw std::invalid_argument("lincomb: grid or weight-exponent mismatch");
  MultiTimeField out;
  out.grid = x.grid;
  out.a_exp1 = x.a_exp1;
  out.a_exp2 = x.a_exp2;
  out.values.resize(x.values.size());
  for (std::size_t i = 0; i < x.values.size(); ++i)
    out.values[i] = alpha * x.values[i] + beta * y.values[i];
  return out;
}

double bnorm_diff(const MultiTimeField& x, const MultiTimeField& y) {
  return bnorm(lincomb(1.0, x, -1.0, y));
}

SingleParticleField dalembert_free_1d(const Profile& f, const Profile& g,
                                      const std::vector<double>& eta_axis,
                                      const SpatialDiscretization& space) {
  if (space.kind != SpatialDiscretization::Kind::FlatBox || space.dim != 1)
    throw std::domain_error("dalembert_free_1d: d=1 flat grid required");
  SingleParticleField phi;
  phi.eta = eta_axis;
  phi.space = space;
  phi.values.resize(eta_axis.size() * space.count());
  for (std::size_t a = 0; a < eta_axis.size(); ++a)
    for (std::size_t i = 0; i < space.count(); ++i) {
      double z = space.axis[i];
      Complex v(0.0, 0.0);
      if (f) v += f(eta_axis[a] - z);
      if (g) v += g(eta_axis[a] + z);
      phi.at(a, i) = v;
    }
  return phi;
}

SingleParticleField plane_wave_free(const std::array<double, 3>& k, int d,
                                    const std::vector<double>& eta_axis,
                                    const SpatialDiscretization& space) {
  if (space.kind != SpatialDiscretization::Kind::FlatBox || space.dim != d)
    throw std::domain_error("plane_wave_free: flat grid of dimension d required");
  double kn = 0.0;
  for (int i = 0; i < d; ++i) kn += k[i] * k[i];
  kn = std::sqrt(kn);
  SingleParticleField phi;
  phi.eta = eta_axis;
  phi.space = space;
  phi.values.resize(eta_axis.size() * space.count());
  for (std::size_t a = 0; a < eta_axis.size(); ++a)
    for (std::size_t i = 0; i < space.count(); ++i) {
      auto p = std::get<geometry::FlatPoint>(space.point(i));
      double kx = 0.0;
      for (int c = 0; c < d; ++c) kx += k[c] * p.x[c];
      double phase = -(kn * eta_axis[a] - kx);
      phi.at(a, i) = Complex(std::cos(phase), std::sin(phase));
    }
  return phi;
}

SingleParticleField flrw_free_from_minkowski(
    SingleParticleField phi, const geometry::ScaleFactorModel& model, int d) {
  (void)model;  // the weight stays symbolic; a enters only via the exponent
  phi.a_exp -= 0.5 * (d - 1);
  return phi;
}

MultiTimeField product_free(const SingleParticleField& phi1,
                            const SingleParticleField& phi2) {
  if (phi1.eta.empty() || phi2.eta.empty() ||
      std::abs(phi1.eta.back() - phi2.eta.back()) > 1e-12)
    throw std::invalid_argument("product_free: time horizons do not match");
  auto g = std::make_shared<MultiTimeGrid>();
  g->T = phi1.eta.back();
  g->eta1 = phi1.eta;
  g->eta2 = phi2.eta;
  g->space1 = phi1.space;
  g->space2 = phi2.space;
  MultiTimeField out;
  out.grid = g;
  out.a_exp1 = phi1.a_exp;
  out.a_exp2 = phi2.a_exp;
  out.values.resize(g->size());
  std::size_t s1 = g->space1.count(), s2 = g->space2.count();
  for (std::size_t a1 = 0; a1 < g->eta1.size(); ++a1)
    for (std::size_t i1 = 0; i1 < s1; ++i1) {
      Complex v1 = phi1.at(a1, i1);
      for (std::size_t a2 = 0; a2 < g->eta2.size(); ++a2)
        for (std::size_t i2 = 0; i2 < s2; ++i2)
          out.at(a1, i1, a2, i2) = v1 * phi2.at(a2, i2);
    }
  return out;
}

double zonal_harmonic_s3(int n, const std::array<double, 4>& axis,
                         const std::array<double, 4>& q) {
  if (n < 0) throw std::domain_error("zonal_harmonic_s3: n must be >= 0");
  double c = std::clamp(geometry::dot4(axis, q), -1.0, 1.0);
  double alpha = std::acos(c);
  double sa = std::sin(alpha);
  if (sa < 1e-8) {
    // sin((n+1)a)/((n+1) sin a) -> cos-parity limit at the poles
    double sgn = (c > 0.0) ? 1.0 : ((n % 2 == 0) ? 1.0 : -1.0);
    return sgn;
  }
  return std::sin((n + 1) * alpha) / ((n + 1) * sa);
}

double esu_zonal_eigenvalue_fd(int n, int n_alpha) {
  // -Laplacian on zonal functions: -(y'' + 2 cot(alpha) y'); Rayleigh
  // estimate over interior nodes away from the poles.
  double h = M_PI / (n_alpha + 1);
  auto y = [&](double a) {
    double sa = std::sin(a);
    return std::sin((n + 1) * a) / ((n + 1) * sa);
  };
  double num = 0.0, den = 0.0;
  for (int i = 1; i <= n_alpha; ++i) {
    double a = i * h;
    if (a < 0.3 || a > M_PI - 0.3) continue;
    double y0 = y(a);
    double lap = (y(a + h) - 2.0 * y0 + y(a - h)) / (h * h) +
                 2.0 * (std::cos(a) / std::sin(a)) * (y(a + h) - y(a - h)) /
                     (2.0 * h);
    num += -lap * y0;
    den += y0 * y0;
  }
  if (den == 0.0) throw std::runtime_error("esu_zonal_eigenvalue_fd: empty");
  return num / den;
}

double esu_mode_frequency(int n, double dt) {
  // Discrete residual of e^{-i omega eta}: |(2 cos(omega dt) - 2)/dt^2 + mu|
  // with mu = (FD spatial eigenvalue) + 1 from the conformal coupling on
  // the static S^3 universe.  Golden-section scan over [0, pi/dt].
  double mu = esu_zonal_eigenvalue_fd(n) + 1.0;
  auto resid = [&](double w) {
    return std::abs((2.0 * std::cos(w * dt) - 2.0) / (dt * dt) + mu);
  };
  double lo = 0.0, hi = M_PI / dt;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = resid(c), fd = resid(d);
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * (1.0 + hi); ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = resid(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = resid(d);
    }
  }
  return 0.5 * (lo + hi);
}

SingleParticleField esu_mode_closed(int n, int axis_index,
                                    const std::vector<double>& eta_axis,
                                    const SpatialDiscretization& space,
                                    const geometry::ScaleFactorModel& model) {
  (void)model;
  if (space.kind != SpatialDiscretization::Kind::Sphere3)
    throw std::domain_error("esu_mode_closed: S^3 grid required");
  if (axis_index < 0 || axis_index > 3)
    throw std::domain_error("esu_mode_closed: unsupported harmonic label");
  std::array<double, 4> axis{0.0, 0.0, 0.0, 0.0};
  axis[axis_index] = 1.0;
  double dt = eta_axis[1] - eta_axis[0];
  double omega = esu_mode_frequency(n, dt);
  SingleParticleField phi;
  phi.eta = eta_axis;
  phi.space = space;
  phi.a_exp = -1.0;
  phi.values.resize(eta_axis.size() * space.count());
  for (std::size_t a = 0; a < eta_axis.size(); ++a) {
    Complex osc(std::cos(omega * eta_axis[a]), -std::sin(omega * eta_axis[a]));
    for (std::size_t i = 0; i < space.count(); ++i)
      phi.at(a, i) = osc * zonal_harmonic_s3(n, axis, space.nodes[i]);
  }
  return phi;
}

}  // namespace mtve::fields
