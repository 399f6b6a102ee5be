#include "mtve/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace mtve::oracle {

using fields::MultiTimeGrid;
using fields::SpatialDiscretization;
using geometry::SpaceKind;
using solver::ModelSpec;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr double kTimeTol = 1e-12;

}  // namespace

double CounterRng::uniform(std::uint64_t counter) const {
  std::uint64_t v = splitmix64(seed_ ^ (counter * 0xD1342543DE82EF95ULL + 1));
  return static_cast<double>(v >> 11) * 0x1.0p-53;
}

double CounterRng::gaussian(std::uint64_t counter) const {
  double u1 = std::max(uniform(2 * counter), 0x1.0p-60);
  double u2 = uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::array<double, 4> CounterRng::s3_point(std::uint64_t counter) const {
  std::array<double, 4> q;
  double n2 = 0.0;
  do {
    for (int i = 0; i < 4; ++i) q[i] = gaussian(4 * counter + i);
    n2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3];
    ++counter;  // retry stride on (vanishingly unlikely) zero vectors
  } while (n2 < 1e-200);
  double inv = 1.0 / std::sqrt(n2);
  for (auto& c : q) c *= inv;
  return q;
}

namespace {

using Rows = std::vector<std::vector<std::pair<int, double>>>;

// Entry-by-entry re-walk of the per-particle rules.  This mirrors the
// discretization recipe but is assembled independently of the solver's
// fused apply path.
Rows particle_rows(const ModelSpec& model, const MultiTimeGrid& grid,
                   int particle, const std::vector<double>& s_matrix,
                   double exclusion) {
  const auto& eta = (particle == 1) ? grid.eta1 : grid.eta2;
  const auto& space = (particle == 1) ? grid.space1 : grid.space2;
  const double mass = (particle == 1) ? model.m1 : model.m2;
  const auto kind = model.spacetime.kind;
  const int d = model.d();
  const bool flrw = model.spacetime.is_flrw();
  const auto* a = model.scale ? &*model.scale : nullptr;

  std::size_t n_space = space.count();
  Rows rows(eta.size() * n_space);

  auto axis_scatter = [&](std::vector<std::pair<int, double>>& row,
                          double weight, int time_idx,
                          const std::array<double, 3>& pos, int dim) {
    // product of per-axis stencils; points outside the box are dropped
    const auto& axis = space.axis;
    double lo = axis.front(), hi = axis.back();
    double tol = 1e-12 * (hi - lo);
    quad::InterpStencil st[3];
    for (int k = 0; k < dim; ++k) {
      if (pos[k] < lo - tol || pos[k] > hi + tol) return;
      st[k] = quad::interp_stencil(axis, std::clamp(pos[k], lo, hi));
    }
    int n_ax = static_cast<int>(axis.size());
    int combos = 1 << dim;
    for (int c = 0; c < combos; ++c) {
      double w = weight;
      int flat = 0;
      for (int k = 0; k < dim; ++k) {
        bool hibit = (c >> k) & 1;
        w *= hibit ? st[k].w1 : st[k].w0;
        flat = flat * n_ax + (hibit ? st[k].i1 : st[k].i0);
      }
      if (w != 0.0)
        row.emplace_back(time_idx * static_cast<int>(n_space) + flat, w);
    }
  };

  for (std::size_t row_idx = 0; row_idx < rows.size(); ++row_idx) {
    std::size_t ai = row_idx / n_space, i = row_idx % n_space;
    auto& row = rows[row_idx];
    double eta_a = eta[ai];

    if (kind == SpaceKind::MinkowskiHalfSpace || kind == SpaceKind::FlatFLRW) {
      if (d == 1) {
        double zi = space.axis[i];
        auto rule = quad::volterra_rule_1d_at(eta, space.axis, eta_a, zi);
        for (auto& e : rule.entries) {
          double factor = 0.5;
          if (flrw) {
            double ab = (*a)(eta[e.time_idx]);
            factor *= ab * ab;
          } else if (mass != 0.0) {
            double dt = eta_a - eta[e.time_idx];
            double dz = zi - space.axis[e.space_idx];
            factor *= greens::bessel_j0(
                mass * std::sqrt(std::max(0.0, dt * dt - dz * dz)));
          }
          row.emplace_back(
              e.time_idx * static_cast<int>(n_space) + e.space_idx,
              e.w * factor);
        }
      } else if (d == 2) {
        auto p = std::get<geometry::FlatPoint>(space.point(i));
        auto rule = quad::cone_sqrt_rule_2d(eta, static_cast<int>(ai),
                                            {p.x[0], p.x[1]}, space.spacing());
        for (auto& node : rule.nodes) {
          double factor = 1.0 / (2.0 * M_PI);
          if (flrw) {
            factor *= std::pow((*a)(eta[node.time_idx]), 1.5);
          } else if (mass != 0.0) {
            double D = eta_a - eta[node.time_idx];
            factor *=
                std::cos(mass * std::sqrt(std::max(0.0, D * D - node.r * node.r)));
          }
          axis_scatter(row, node.w * factor, node.time_idx,
                       {node.pos[0], node.pos[1], 0.0}, 2);
        }
      } else {
        auto p = std::get<geometry::FlatPoint>(space.point(i));
        double radius = eta_a - eta.front();
        if (radius <= 0.0) continue;
        auto rule = quad::ball_rule_3d(
            {p.x[0], p.x[1], p.x[2]}, radius,
            quad::ball_radial_count(radius, space.spacing()),
            quad::kBallAngularCount);
        for (auto& node : rule.nodes) {
          double t = std::max(0.0, eta_a - node.r);
          double factor = 1.0 / (4.0 * M_PI);
          if (flrw) factor *= (*a)(t);
          auto ts = quad::interp_stencil(eta, t);
          if (ts.w0 != 0.0)
            axis_scatter(row, node.w * factor * ts.w0, ts.i0, node.pos, 3);
          if (ts.w1 != 0.0)
            axis_scatter(row, node.w * factor * ts.w1, ts.i1, node.pos, 3);
        }
      }
    } else if (kind == SpaceKind::OpenFLRW3) {
      std::size_t n = space.nodes.size();
      for (std::size_t j = 0; j < n; ++j) {
        double s = s_matrix[i * n + j];
        if (s < exclusion) continue;
        double t = eta_a - s;
        if (t < -kTimeTol) continue;
        t = std::max(0.0, t);
        double g = (*a)(t) / (4.0 * M_PI * std::sinh(s));
        auto ts = quad::interp_stencil(eta, t);
        row.emplace_back(ts.i0 * static_cast<int>(n_space) + static_cast<int>(j),
                         space.node_weights[j] * g * ts.w0);
        if (ts.w1 != 0.0)
          row.emplace_back(
              ts.i1 * static_cast<int>(n_space) + static_cast<int>(j),
              space.node_weights[j] * g * ts.w1);
      }
      double cap = quad::h3_cap_integral(exclusion);
      double g0 = (*a)(eta_a) / (4.0 * M_PI);
      auto ts = quad::interp_stencil(eta, eta_a);
      row.emplace_back(ts.i0 * static_cast<int>(n_space) + static_cast<int>(i),
                       cap * g0 * ts.w0);
      if (ts.w1 != 0.0)
        row.emplace_back(
            ts.i1 * static_cast<int>(n_space) + static_cast<int>(i),
            cap * g0 * ts.w1);
    } else {  // ClosedFLRW3
      std::size_t n = space.nodes.size();
      double T = model.T;
      auto scatter_branches = [&](std::size_t j, double weight, double s_eff) {
        for (auto& b : solver::closed_branches(s_eff, T)) {
          double t = eta_a + b.sigma * b.radius;
          if (t < -kTimeTol || t > T + kTimeTol) continue;
          t = std::clamp(t, 0.0, T);
          double g = b.sign * (*a)(t) / (8.0 * M_PI);
          if (s_eff >= exclusion && s_eff <= M_PI - exclusion)
            g /= std::sin(s_eff);
          auto ts = quad::interp_stencil(eta, t);
          row.emplace_back(
              ts.i0 * static_cast<int>(n_space) + static_cast<int>(j),
              weight * g * ts.w0);
          if (ts.w1 != 0.0)
            row.emplace_back(
                ts.i1 * static_cast<int>(n_space) + static_cast<int>(j),
                weight * g * ts.w1);
        }
      };
      for (std::size_t j = 0; j < n; ++j) {
        double s = s_matrix[i * n + j];
        if (s < exclusion || s > M_PI - exclusion) continue;
        scatter_branches(j, space.node_weights[j], s);
      }
      double cap = quad::s3_cap_integral(quad::S3Weight::InvSin, exclusion);
      scatter_branches(i, cap, 0.0);
      scatter_branches((i + n / 2) % n, cap, M_PI);
    }
  }
  return rows;
}

std::vector<double> pair_distances(const MultiTimeGrid& grid, SpaceKind kind) {
  const auto& nodes = grid.space1.nodes;
  std::size_t n = nodes.size();
  std::vector<double> s(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (kind == SpaceKind::ClosedFLRW3) {
        double c = std::clamp(geometry::dot4(nodes[i], nodes[j]), -1.0, 1.0);
        s[i * n + j] = std::acos(c);
      } else {
        double c = std::max(1.0, geometry::minkowski_dot4(nodes[i], nodes[j]));
        s[i * n + j] = std::acosh(c);
      }
    }
  return s;
}

}  // namespace

DenseSystem build_dense_system(const ModelSpec& model, GridPtr grid) {
  model.validate();
  DenseSystem sys;
  sys.grid = grid;
  const auto& g = *grid;
  std::size_t n1 = g.n1(), n2 = g.n2();
  sys.n = n1 * n2;
  if (sys.n > 4096)
    throw std::invalid_argument("dense system: more than 4096 unknowns");

  const auto kind = model.spacetime.kind;
  std::vector<double> s_matrix;
  double exclusion = 0.0;
  if (kind == SpaceKind::ClosedFLRW3 || kind == SpaceKind::OpenFLRW3) {
    s_matrix = pair_distances(g, kind);
    exclusion = quad::exclusion_from_spacing(g.space1.spacing());
  }

  Rows rows1 = particle_rows(model, g, 1, s_matrix, exclusion);
  Rows rows2 = particle_rows(model, g, 2, s_matrix, exclusion);

  std::size_t s1 = g.space1.count(), s2 = g.space2.count();
  std::vector<Complex> kernel_vals(n1 * n2);
  for (std::size_t c1 = 0; c1 < n1; ++c1)
    for (std::size_t c2 = 0; c2 < n2; ++c2)
      kernel_vals[c1 * n2 + c2] = solver::discrete_kernel_value(
          model, g, c1 / s1, c1 % s1, c2 / s2, c2 % s2, exclusion);

  sys.op_matrix.assign(sys.n * sys.n, Complex(0.0, 0.0));
  for (std::size_t r1 = 0; r1 < n1; ++r1)
    for (std::size_t r2 = 0; r2 < n2; ++r2) {
      Complex* out_row = sys.op_matrix.data() + (r1 * n2 + r2) * sys.n;
      for (auto& [c1, w1] : rows1[r1])
        for (auto& [c2, w2] : rows2[r2])
          out_row[static_cast<std::size_t>(c1) * n2 + c2] +=
              model.lambda * w1 * w2 * kernel_vals[static_cast<std::size_t>(c1) * n2 + c2];
    }

  // Add-back of the kernel singularity caps for the closed singular kernel.
  if (kind == SpaceKind::ClosedFLRW3 &&
      model.kernel.singularity == kernels::SingularityClass::InverseSine) {
    const auto& a = *model.scale;
    double T = model.T;
    std::size_t n = s1;
    double cap = quad::s3_cap_integral(quad::S3Weight::InvSin, exclusion);
    for (std::size_t a1 = 0; a1 < g.eta1.size(); ++a1)
      for (std::size_t i1 = 0; i1 < n; ++i1)
        for (std::size_t a2 = 0; a2 < g.eta2.size(); ++a2)
          for (std::size_t i2 = 0; i2 < n; ++i2) {
            Complex* out_row =
                sys.op_matrix.data() + g.index(a1, i1, a2, i2) * sys.n;
            for (std::size_t j1 = 0; j1 < n; ++j1) {
              double sa = s_matrix[i1 * n + j1];
              if (sa < exclusion || sa > M_PI - exclusion) continue;
              double w1 = g.space1.node_weights[j1];
              for (int cap_idx = 0; cap_idx < 2; ++cap_idx) {
                std::size_t j2 = (cap_idx == 0) ? j1 : (j1 + n / 2) % n;
                double sb = s_matrix[i2 * n + j2];
                if (sb < exclusion || sb > M_PI - exclusion) continue;
                for (auto& b1 : solver::closed_branches(sa, T)) {
                  double t1 = g.eta1[a1] + b1.sigma * b1.radius;
                  if (t1 < -kTimeTol || t1 > T + kTimeTol) continue;
                  t1 = std::clamp(t1, 0.0, T);
                  double g1 = b1.sign / std::sin(sa) * a(t1) / (8.0 * M_PI);
                  auto ts1 = quad::interp_stencil(g.eta1, t1);
                  for (auto& b2 : solver::closed_branches(sb, T)) {
                    double t2 = g.eta2[a2] + b2.sigma * b2.radius;
                    if (t2 < -kTimeTol || t2 > T + kTimeTol) continue;
                    t2 = std::clamp(t2, 0.0, T);
                    double g2 = b2.sign / std::sin(sb) * a(t2) / (8.0 * M_PI);
                    auto ts2 = quad::interp_stencil(g.eta2, t2);
                    for (auto [bi1, bw1] :
                         {std::pair{ts1.i0, ts1.w0}, {ts1.i1, ts1.w1}}) {
                      if (bw1 == 0.0) continue;
                      for (auto [bi2, bw2] :
                           {std::pair{ts2.i0, ts2.w0}, {ts2.i1, ts2.w1}}) {
                        if (bw2 == 0.0) continue;
                        Complex f = model.kernel.eval_bounded(
                            g.space1.at(g.eta1[bi1], j1),
                            g.space2.at(g.eta2[bi2], j2));
                        out_row[g.index(bi1, j1, bi2, j2)] +=
                            model.lambda * w1 * g1 * cap * g2 * bw1 * bw2 * f;
                      }
                    }
                  }
                }
              }
            }
          }
  }
  return sys;
}

DenseResult dense_linear_solve(const ModelSpec& model,
                               const MultiTimeField& chi_free) {
  DenseSystem sys = build_dense_system(model, chi_free.grid);
  using Mat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                            Eigen::RowMajor>;
  Eigen::Map<const Mat> w(sys.op_matrix.data(), sys.n, sys.n);
  Mat m = Mat::Identity(sys.n, sys.n) - w;
  Eigen::Map<const Eigen::VectorXcd> rhs(chi_free.values.data(), sys.n);
  Eigen::PartialPivLU<Mat> lu(m);
  Eigen::VectorXcd x = lu.solve(rhs);

  DenseResult res;
  res.solution = fields::zero_field(chi_free.grid);
  for (std::size_t i = 0; i < sys.n; ++i) res.solution.values[i] = x(i);
  double resid = (m * x - rhs).norm();
  double scale = std::max(1.0, rhs.norm());
  res.singular = !std::isfinite(resid) || resid > 1e-8 * scale;
  return res;
}

McEstimate mc_identity_sin2(std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 100000)
    throw std::invalid_argument("mc_identity_sin2: need at least 1e5 samples");
  CounterRng rng(seed);
  const double measure = std::pow(2.0 * M_PI * M_PI, 2);  // |S^3|^2
  double mean = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < n_samples; ++k) {
    auto q1 = rng.s3_point(2 * k);
    auto q2 = rng.s3_point(2 * k + 1);
    double c = std::clamp(geometry::dot4(q1, q2), -1.0, 1.0);
    double s = std::sin(std::acos(c));
    double y = measure / std::max(s * s, 1e-300);
    double delta = y - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (y - mean);
  }
  McEstimate est;
  est.n_samples = n_samples;
  est.estimate = mean;
  est.std_error = std::sqrt(m2 / static_cast<double>(n_samples - 1) /
                            static_cast<double>(n_samples));
  return est;
}

double operator_norm_probe(const ModelSpec& model, GridPtr grid, int n_probes,
                           std::uint64_t seed) {
  if (model.spacetime.kind != SpaceKind::ClosedFLRW3)
    throw std::invalid_argument("operator_norm_probe: closed model required");
  solver::ModelOperator op(model, grid);
  CounterRng rng(seed);
  double best = 0.0;
  std::uint64_t counter = 0;
  for (int p = 0; p < n_probes; ++p) {
    MultiTimeField probe = fields::zero_field(grid);
    for (auto& v : probe.values)
      v = Complex(rng.gaussian(counter++), rng.gaussian(counter++));
    double denom = fields::bnorm(probe);
    if (denom == 0.0) continue;
    best = std::max(best, fields::bnorm(op.apply(probe)) / denom);
  }
  return best;
}

}  // namespace mtve::oracle
