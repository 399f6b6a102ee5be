#include "mtve/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mtve::quad {

namespace {

double axis_step(const std::vector<double>& axis) {
  if (axis.size() < 2) throw std::invalid_argument("axis needs >= 2 nodes");
  return axis[1] - axis[0];
}

}  // namespace

std::vector<std::pair<int, double>> clipped_trapezoid(
    const std::vector<double>& axis, double c) {
  std::vector<std::pair<int, double>> w;
  if (c <= axis.front()) return w;
  double h = axis_step(axis);
  c = std::min(c, axis.back());
  int last = static_cast<int>(std::floor((c - axis.front()) / h + 1e-12));
  last = std::min<int>(last, static_cast<int>(axis.size()) - 1);
  double delta = c - axis[last];
  if (delta < 0.0) delta = 0.0;

  std::vector<double> wf(last + 1, 0.0);
  for (int b = 0; b <= last; ++b) wf[b] = h;
  wf[0] = 0.5 * h;
  wf[last] = (last == 0) ? 0.0 : 0.5 * h;
  // Partial cell [axis[last], c] via linear extrapolation from the last
  // two inside nodes; keeps every node on the causal side.
  if (delta > 0.0) {
    if (last == 0) {
      wf[0] += delta;
    } else {
      wf[last] += delta + delta * delta / (2.0 * h);
      wf[last - 1] -= delta * delta / (2.0 * h);
    }
  }
  for (int b = 0; b <= last; ++b)
    if (wf[b] != 0.0) w.emplace_back(b, wf[b]);
  return w;
}

ConeRule volterra_rule_1d_at(const std::vector<double>& eta_axis,
                             const std::vector<double>& z_axis, double eta,
                             double z) {
  ConeRule rule;
  if (eta <= eta_axis.front()) return rule;
  double hz = axis_step(z_axis);
  for (int j = 0; j < static_cast<int>(z_axis.size()); ++j) {
    double height = eta - std::abs(z - z_axis[j]);
    if (height <= eta_axis.front()) continue;
    for (auto& [b, wt] : clipped_trapezoid(eta_axis, height))
      rule.entries.push_back({b, j, wt * hz});
  }
  return rule;
}

ConeRule volterra_rule_1d(const std::vector<double>& eta_axis,
                          const std::vector<double>& z_axis, int eta_index,
                          int z_index) {
  return volterra_rule_1d_at(eta_axis, z_axis, eta_axis.at(eta_index),
                             z_axis.at(z_index));
}

BallRule3D ball_rule_3d(const std::array<double, 3>& center, double radius,
                        int n_radial, int n_angular) {
  BallRule3D rule;
  if (radius <= 0.0) return rule;
  if (n_radial < 1 || n_angular < 1)
    throw std::invalid_argument("ball_rule_3d: counts must be >= 1");
  auto dirs = sphere_nodes(n_angular);
  double ang_w = 4.0 * M_PI / n_angular;
  double dr = radius / n_radial;
  for (int m = 0; m < n_radial; ++m) {
    double r_lo = m * dr, r_hi = (m + 1) * dr;
    double r = 0.5 * (r_lo + r_hi);
    double radial_w = 0.5 * (r_hi * r_hi - r_lo * r_lo);  // Int r dr
    for (auto& n : dirs) {
      BallNode3 node;
      node.r = r;
      node.pos = {center[0] + r * n[0], center[1] + r * n[1],
                  center[2] + r * n[2]};
      node.w = radial_w * ang_w;
      rule.nodes.push_back(node);
    }
  }
  return rule;
}

int ball_radial_count(double radius, double h_space) {
  if (radius <= 0.0) return 0;
  return std::max(1, static_cast<int>(std::ceil(radius / h_space)));
}

ConeSqrtRule2D cone_sqrt_rule_2d(const std::vector<double>& eta_axis,
                                 int eta_index, const std::array<double, 2>& x,
                                 double h_space) {
  ConeSqrtRule2D rule;
  double eta = eta_axis.at(eta_index);
  if (eta <= eta_axis.front()) return rule;
  double ht = axis_step(eta_axis);

  for (int b = 0; b <= eta_index; ++b) {
    double tw = (b == 0 || b == eta_index) ? 0.5 * ht : ht;
    double D = eta - eta_axis[b];
    if (D <= 0.0) continue;

    // Radial product integration on [0, D] against r / sqrt(D^2 - r^2):
    // piecewise-linear hat weights from the exact moments
    //   mu0 = Int r/sqrt(D^2-r^2) dr,  mu1 = Int r^2/sqrt(D^2-r^2) dr.
    int M = std::max(1, static_cast<int>(std::ceil(D / h_space)));
    double dr = D / M;
    std::vector<double> radial_w(M + 1, 0.0);
    auto mu0 = [&](double a2, double b2) {
      return std::sqrt(std::max(0.0, D * D - a2 * a2)) -
             std::sqrt(std::max(0.0, D * D - b2 * b2));
    };
    auto mu1 = [&](double a2, double b2) {
      auto F = [&](double r) {
        double root = std::sqrt(std::max(0.0, D * D - r * r));
        return 0.5 * (D * D * std::asin(std::clamp(r / D, -1.0, 1.0)) -
                      r * root);
      };
      return F(b2) - F(a2);
    };
    for (int m = 0; m < M; ++m) {
      double a = m * dr, bb = (m + 1) * dr;
      double m0 = mu0(a, bb), m1 = mu1(a, bb);
      radial_w[m] += (bb * m0 - m1) / dr;
      radial_w[m + 1] += (m1 - a * m0) / dr;
    }

    for (int m = 0; m <= M; ++m) {
      double r = m * dr;
      if (radial_w[m] == 0.0) continue;
      int n_theta =
          (m == 0) ? 1
                   : std::max(6, static_cast<int>(std::ceil(
                                     2.0 * M_PI * r / h_space)));
      double aw = 2.0 * M_PI / n_theta;
      for (int t = 0; t < n_theta; ++t) {
        double theta = (2.0 * M_PI * t) / n_theta;
        ConeSqrtNode2 node;
        node.time_idx = b;
        node.r = r;
        node.pos = {x[0] + r * std::cos(theta), x[1] + r * std::sin(theta)};
        node.w = tw * radial_w[m] * aw;
        rule.nodes.push_back(node);
      }
    }
  }
  return rule;
}

std::vector<std::array<double, 3>> sphere_nodes(int n) {
  if (n < 1) throw std::invalid_argument("sphere_nodes: n must be >= 1");
  std::vector<std::array<double, 3>> pts;
  pts.reserve(n);
  double dz = 2.0 / n;
  double z = -1.0 + 0.5 * dz;
  double dtheta = M_PI * (std::sqrt(5.0) + 1.0);
  double theta = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    pts.push_back({r * std::cos(theta), r * std::sin(theta), z});
    z += dz;
    theta += dtheta;
  }
  return pts;
}

namespace {

// Invert the zonal CDF (alpha - sin(alpha) cos(alpha)) / pi = u on [0, pi].
double invert_alpha_cdf(double u) {
  double lo = 0.0, hi = M_PI;
  double a = M_PI * u;
  for (int it = 0; it < 100; ++it) {
    double f = (a - std::sin(a) * std::cos(a)) / M_PI - u;
    if (f > 0.0)
      hi = a;
    else
      lo = a;
    double df = 2.0 * std::sin(a) * std::sin(a) / M_PI;
    double step = (df > 1e-14) ? f / df : 0.0;
    double next = a - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - a) < 1e-15) {
      a = next;
      break;
    }
    a = next;
  }
  return a;
}

}  // namespace

std::vector<std::array<double, 4>> s3_nodes(int n) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("s3_nodes: n must be even and >= 2");
  int half = n / 2;
  std::vector<std::array<double, 4>> pts(n);
  // Kronecker sequence with the plastic-number generator, mapped through
  // the hyperspherical inverse CDFs; antipodes fill the second half.
  const double g = 1.2207440846057595;  // root of x^3 = x + 1
  const double a1 = 1.0 / g;
  const double a2 = 1.0 / (g * g);
  const double a3 = 1.0 / (g * g * g);
  for (int i = 0; i < half; ++i) {
    double u1 = std::fmod(0.5 + a1 * (i + 1), 1.0);
    double u2 = std::fmod(0.5 + a2 * (i + 1), 1.0);
    double u3 = std::fmod(0.5 + a3 * (i + 1), 1.0);
    double alpha = invert_alpha_cdf(u1);
    double beta = std::acos(1.0 - 2.0 * u2);
    double phi = 2.0 * M_PI * u3;
    pts[i] = {std::cos(alpha), std::sin(alpha) * std::cos(beta),
              std::sin(alpha) * std::sin(beta) * std::cos(phi),
              std::sin(alpha) * std::sin(beta) * std::sin(phi)};
    pts[i + half] = {-pts[i][0], -pts[i][1], -pts[i][2], -pts[i][3]};
  }
  return pts;
}

std::vector<H3Node> h3_ball_nodes(double L, int n_shells, int n_angular) {
  if (L <= 0.0 || n_shells < 1 || n_angular < 1)
    throw std::invalid_argument("h3_ball_nodes: bad parameters");
  auto dirs = sphere_nodes(n_angular);
  std::vector<H3Node> nodes;
  nodes.reserve(static_cast<std::size_t>(n_shells) * n_angular);
  double ds = L / n_shells;
  auto band = [](double a, double b) {
    // Int_a^b sinh^2(s) ds
    auto F = [](double s) { return 0.5 * (std::sinh(s) * std::cosh(s) - s); };
    return F(b) - F(a);
  };
  for (int k = 0; k < n_shells; ++k) {
    double s_lo = k * ds, s_hi = (k + 1) * ds;
    double s = 0.5 * (s_lo + s_hi);
    double rw = band(s_lo, s_hi);
    double ch = std::cosh(s), sh = std::sinh(s);
    for (auto& d : dirs) {
      H3Node node;
      node.x = {ch, sh * d[0], sh * d[1], sh * d[2]};
      node.w = rw * (4.0 * M_PI / n_angular);
      nodes.push_back(node);
    }
  }
  return nodes;
}

double s3_cap_integral(S3Weight w, double eps) {
  // Int_{s<eps} weight dOmega_3 = 4 pi Int_0^eps weight(a) sin^2(a) da.
  switch (w) {
    case S3Weight::One:
      return 2.0 * M_PI * (eps - std::sin(eps) * std::cos(eps));
    case S3Weight::InvSin:
      return 4.0 * M_PI * (1.0 - std::cos(eps));
    case S3Weight::InvSin2:
      return 4.0 * M_PI * eps;
  }
  return 0.0;
}

double h3_cap_integral(double eps) {
  return 4.0 * M_PI * (std::cosh(eps) - 1.0);
}

double exclusion_from_spacing(double spacing) {
  // Capped at pi/4: beyond that the band [eps, pi - eps] collapses on
  // coarse node sets and the excluded caps would swallow the whole sphere.
  return std::min(std::max(2.0 * spacing, 1e-3), M_PI / 4.0);
}

double default_s3_exclusion(int n_nodes) {
  return exclusion_from_spacing(std::cbrt(2.0 * M_PI * M_PI / n_nodes));
}

double S3PairRule::integrate_pure(S3Weight w) const {
  auto weight_fn = [&](double s) {
    switch (w) {
      case S3Weight::One:
        return 1.0;
      case S3Weight::InvSin:
        return 1.0 / std::sin(s);
      case S3Weight::InvSin2:
        return 1.0 / (std::sin(s) * std::sin(s));
    }
    return 0.0;
  };
  double ww = node_weight * node_weight;
  double total = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      double c = std::clamp(nodes[i][0] * nodes[j][0] + nodes[i][1] * nodes[j][1] +
                                nodes[i][2] * nodes[j][2] +
                                nodes[i][3] * nodes[j][3],
                            -1.0, 1.0);
      double s = std::acos(c);
      if (eps > 0.0 && (s < eps || s > M_PI - eps)) continue;
      if (eps == 0.0 && i == j) continue;  // undefined singular diagonal
      row += ww * weight_fn(s);
    }
    total += row;
  }
  if (eps > 0.0) {
    double add_back = s3_cap_integral(w, eps);
    total += 2.0 * M_PI * M_PI * 2.0 * add_back;  // near and antipodal caps
  }
  return total;
}

S3PairRule s3_pair_rule(int n_nodes, double exclusion_radius) {
  if (n_nodes < 100)
    throw std::invalid_argument("s3_pair_rule: n_nodes must be >= 100");
  if (n_nodes % 2 != 0) ++n_nodes;
  S3PairRule rule;
  rule.nodes = s3_nodes(n_nodes);
  rule.node_weight = 2.0 * M_PI * M_PI / n_nodes;
  rule.eps = exclusion_radius;
  return rule;
}

InterpStencil interp_stencil(const std::vector<double>& axis, double t) {
  InterpStencil s;
  double lo = axis.front(), hi = axis.back();
  if (t <= lo) {
    s.i0 = s.i1 = 0;
    s.w0 = 1.0;
    s.w1 = 0.0;
    return s;
  }
  if (t >= hi) {
    s.i0 = s.i1 = static_cast<int>(axis.size()) - 1;
    s.w0 = 1.0;
    s.w1 = 0.0;
    return s;
  }
  double h = axis_step(axis);
  int b = static_cast<int>((t - lo) / h);
  b = std::min<int>(b, static_cast<int>(axis.size()) - 2);
  double frac = (t - axis[b]) / h;
  s.i0 = b;
  s.i1 = b + 1;
  s.w0 = 1.0 - frac;
  s.w1 = frac;
  return s;
}

}  // namespace mtve::quad
