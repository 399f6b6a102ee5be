#include "mtve/solver.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mtve/threading.hpp"

namespace mtve::solver {

using fields::MultiTimeGrid;
using fields::SpatialDiscretization;
using geometry::SpaceKind;

namespace {

constexpr double kTimeTol = 1e-12;

bool kind_matches_space(const geometry::SpacetimeKind& st,
                        const SpatialDiscretization& sp) {
  switch (st.kind) {
    case SpaceKind::MinkowskiHalfSpace:
    case SpaceKind::FlatFLRW:
      return sp.kind == SpatialDiscretization::Kind::FlatBox &&
             sp.dim == st.d;
    case SpaceKind::OpenFLRW3:
      return sp.kind == SpatialDiscretization::Kind::Hyperbolic3;
    case SpaceKind::ClosedFLRW3:
      return sp.kind == SpatialDiscretization::Kind::Sphere3;
  }
  return false;
}

// Per-axis interpolation stencil that drops points outside the box
// instead of clamping (domain truncation at the box edge).
bool axis_stencil(const std::vector<double>& axis, double t, int& i0,
                  double& w0, int& i1, double& w1) {
  double lo = axis.front(), hi = axis.back();
  double tol = 1e-12 * (hi - lo);
  if (t < lo - tol || t > hi + tol) return false;
  auto s = quad::interp_stencil(axis, std::clamp(t, lo, hi));
  i0 = s.i0;
  w0 = s.w0;
  i1 = s.i1;
  w1 = s.w1;
  return true;
}

struct RowAccumulator {
  std::vector<std::pair<int, double>> entries;
  void add(int col, double weight) {
    if (weight != 0.0) entries.emplace_back(col, weight);
  }
  std::vector<std::pair<int, double>> take() {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<int, double>> merged;
    merged.reserve(entries.size());
    for (auto& [col, w] : entries) {
      if (!merged.empty() && merged.back().first == col)
        merged.back().second += w;
      else
        merged.emplace_back(col, w);
    }
    return merged;
  }
};

}  // namespace

void ModelSpec::validate() const {
  const bool closed = spacetime.kind == SpaceKind::ClosedFLRW3;
  const bool minkowski = spacetime.kind == SpaceKind::MinkowskiHalfSpace;

  if (T <= 0.0) throw std::invalid_argument("model: T must be > 0");
  if (closed) {
    if (greens_support != greens::Support::Symmetric)
      throw std::invalid_argument(
          "model: the closed universe requires symmetric Green's functions");
  } else if (greens_support != greens::Support::Retarded) {
    throw std::invalid_argument(
        "model: Minkowski/flat/open equations require retarded Green's "
        "functions");
  }
  if (!minkowski && (m1 != 0.0 || m2 != 0.0))
    throw std::invalid_argument(
        "model: masses must vanish away from the Minkowski half-space");
  if (minkowski && spacetime.d == 3 && (m1 != 0.0 || m2 != 0.0))
    throw std::invalid_argument(
        "model: the d=3 half-space equation is the massless delta-integrated "
        "form");
  if (minkowski != !scale.has_value())
    throw std::invalid_argument(
        "model: FLRW kinds need a scale model, Minkowski must not have one");
  if (scale) {
    if (scale->T() < T * (1.0 - 1e-12))
      throw std::invalid_argument("model: scale horizon shorter than T");
    if (closed) {
      if (std::abs(scale->T() - T) > 1e-9 * T)
        throw std::invalid_argument(
            "model: closed universe needs T at the Big Crunch root");
      if (!scale->vanishes_at_horizon())
        throw std::invalid_argument(
            "model: closed universe needs a(T) = 0 (Big Crunch)");
    }
  }
  switch (kernel.singularity) {
    case kernels::SingularityClass::None:
      break;
    case kernels::SingularityClass::InverseSpatial:
      if (!spacetime.is_flat_slices() || spacetime.d != 3)
        throw std::invalid_argument(
            "model: inverse-spatial kernels require d=3 flat-type slices");
      break;
    case kernels::SingularityClass::InverseSine:
      if (!closed)
        throw std::invalid_argument(
            "model: inverse-sine kernels require the closed universe");
      break;
  }
  if (!kernel.bounded_factor)
    throw std::invalid_argument("model: kernel has no bounded factor");
}

ModelSpec minkowski_model(int d, kernels::InteractionKernel kernel,
                          Complex lambda, double T, double m1, double m2) {
  ModelSpec m;
  m.spacetime = geometry::SpacetimeKind::minkowski(d);
  m.greens_support = greens::Support::Retarded;
  m.kernel = std::move(kernel);
  m.lambda = lambda;
  m.m1 = m1;
  m.m2 = m2;
  m.T = T;
  m.validate();
  return m;
}

ModelSpec flat_flrw_model(int d, geometry::ScaleFactorModel scale,
                          kernels::InteractionKernel kernel, Complex lambda,
                          double T) {
  ModelSpec m;
  m.spacetime = geometry::SpacetimeKind::flat_flrw(d);
  m.scale = std::move(scale);
  m.greens_support = greens::Support::Retarded;
  m.kernel = std::move(kernel);
  m.lambda = lambda;
  m.T = T;
  m.validate();
  return m;
}

ModelSpec open_flrw_model(geometry::ScaleFactorModel scale,
                          kernels::InteractionKernel kernel, Complex lambda,
                          double T) {
  ModelSpec m;
  m.spacetime = geometry::SpacetimeKind::open_flrw3();
  m.scale = std::move(scale);
  m.greens_support = greens::Support::Retarded;
  m.kernel = std::move(kernel);
  m.lambda = lambda;
  m.T = T;
  m.validate();
  return m;
}

ModelSpec closed_flrw_model(geometry::ScaleFactorModel scale,
                            kernels::InteractionKernel kernel,
                            Complex lambda) {
  ModelSpec m;
  m.spacetime = geometry::SpacetimeKind::closed_flrw3();
  m.T = scale.T();
  m.scale = std::move(scale);
  m.greens_support = greens::Support::Symmetric;
  m.kernel = std::move(kernel);
  m.lambda = lambda;
  m.validate();
  return m;
}

std::vector<int> closed_winding_census(double s, double T) {
  std::vector<int> out;
  int l_min = static_cast<int>(std::floor((-T - s) / (2.0 * M_PI)));
  int l_max = static_cast<int>(std::ceil((T - s) / (2.0 * M_PI)));
  for (int l = l_min; l <= l_max; ++l)
    if (std::abs(s + 2.0 * M_PI * l) <= T) out.push_back(l);
  return out;
}

std::vector<ClosedBranch> closed_branches(double s, double T) {
  std::vector<ClosedBranch> out;
  for (int l : closed_winding_census(s, T)) {
    double shifted = s + 2.0 * M_PI * l;
    for (double sigma : {1.0, -1.0}) {
      ClosedBranch b;
      b.l = l;
      b.sigma = sigma;
      b.radius = std::abs(shifted);
      b.sign = shifted > 0.0 ? 1.0 : (shifted < 0.0 ? -1.0 : 1.0);
      out.push_back(b);
    }
  }
  return out;
}

Complex discrete_kernel_value(const ModelSpec& model,
                              const MultiTimeGrid& grid, std::size_t b1,
                              std::size_t j1, std::size_t b2, std::size_t j2,
                              double exclusion) {
  auto x1 = grid.space1.at(grid.eta1[b1], j1);
  auto x2 = grid.space2.at(grid.eta2[b2], j2);
  Complex f = model.kernel.eval_bounded(x1, x2);
  switch (model.kernel.singularity) {
    case kernels::SingularityClass::None:
      return f;
    case kernels::SingularityClass::InverseSpatial: {
      auto& p1 = std::get<geometry::FlatPoint>(x1.spatial);
      auto& p2 = std::get<geometry::FlatPoint>(x2.spatial);
      double r = geometry::flat_spatial_distance(p1, p2);
      double cap =
          0.5 * std::min(grid.space1.spacing(), grid.space2.spacing());
      return f / std::max(r, cap);
    }
    case kernels::SingularityClass::InverseSine: {
      auto& q1 = std::get<geometry::SpherePoint>(x1.spatial);
      auto& q2 = std::get<geometry::SpherePoint>(x2.spatial);
      double s = geometry::geodesic_distance_s3(q1, q2);
      if (s < exclusion || s > M_PI - exclusion) return Complex(0.0, 0.0);
      return f / std::sin(s);
    }
  }
  return f;
}

ModelOperator::ModelOperator(ModelSpec model, GridPtr grid)
    : model_(std::move(model)), grid_(std::move(grid)) {
  model_.validate();
  if (!kind_matches_space(model_.spacetime, grid_->space1) ||
      !kind_matches_space(model_.spacetime, grid_->space2))
    throw std::invalid_argument("operator: grid does not match the model");
  if (grid_->eta1.back() > model_.T * (1.0 + 1e-12) ||
      grid_->eta2.back() > model_.T * (1.0 + 1e-12))
    throw std::invalid_argument("operator: grid horizon exceeds model T");

  const auto kind = model_.spacetime.kind;
  if (kind == SpaceKind::ClosedFLRW3 || kind == SpaceKind::OpenFLRW3) {
    exclusion_ = quad::exclusion_from_spacing(grid_->space1.spacing());
    // Pairwise geodesic distances of the shared node set.
    const auto& nodes = grid_->space1.nodes;
    std::size_t n = nodes.size();
    s_matrix_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (kind == SpaceKind::ClosedFLRW3) {
          double c = std::clamp(geometry::dot4(nodes[i], nodes[j]), -1.0, 1.0);
          s_matrix_[i * n + j] = std::acos(c);
        } else {
          double c = std::max(
              1.0, geometry::minkowski_dot4(nodes[i], nodes[j]));
          s_matrix_[i * n + j] = std::acosh(c);
        }
      }
    if (kind == SpaceKind::ClosedFLRW3) {
      if (n % 2 != 0)
        throw std::invalid_argument("operator: S^3 node count must be even");
      closed_singular_kernel_ =
          model_.kernel.singularity == kernels::SingularityClass::InverseSine;
    }
  }

  assemble_particle(1);
  assemble_particle(2);
  assemble_kernel_values();
}

void ModelOperator::assemble_particle(int particle) {
  const auto& eta = (particle == 1) ? grid_->eta1 : grid_->eta2;
  const auto& space = (particle == 1) ? grid_->space1 : grid_->space2;
  const double mass = (particle == 1) ? model_.m1 : model_.m2;
  auto& rows = (particle == 1) ? rows1_ : rows2_;
  const std::size_t n_space = space.count();
  const std::size_t n_rows = eta.size() * n_space;
  rows.assign(n_rows, {});

  const auto kind = model_.spacetime.kind;
  const int d = model_.d();
  const bool flrw = model_.spacetime.is_flrw();
  const auto* a = model_.scale ? &*model_.scale : nullptr;

  threading::parallel_for(n_rows, [&](std::size_t row) {
    std::size_t ai = row / n_space;
    std::size_t i = row % n_space;
    RowAccumulator acc;
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
            double x2 = std::max(0.0, dt * dt - dz * dz);
            factor *= greens::bessel_j0(mass * std::sqrt(x2));
          }
          acc.add(e.time_idx * static_cast<int>(n_space) + e.space_idx,
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
            double u2 = std::max(0.0, D * D - node.r * node.r);
            factor *= std::cos(mass * std::sqrt(u2));
          }
          int ax0, ax1, ay0, ay1;
          double wx0, wx1, wy0, wy1;
          if (!axis_stencil(space.axis, node.pos[0], ax0, wx0, ax1, wx1))
            continue;
          if (!axis_stencil(space.axis, node.pos[1], ay0, wy0, ay1, wy1))
            continue;
          int n_ax = static_cast<int>(space.axis.size());
          double w = node.w * factor;
          int base = node.time_idx * static_cast<int>(n_space);
          acc.add(base + ax0 * n_ax + ay0, w * wx0 * wy0);
          acc.add(base + ax0 * n_ax + ay1, w * wx0 * wy1);
          acc.add(base + ax1 * n_ax + ay0, w * wx1 * wy0);
          acc.add(base + ax1 * n_ax + ay1, w * wx1 * wy1);
        }
      } else {  // d == 3, delta-integrated pullback form
        auto p = std::get<geometry::FlatPoint>(space.point(i));
        double radius = eta_a - eta.front();
        if (radius > 0.0) {
          auto rule = quad::ball_rule_3d(
              {p.x[0], p.x[1], p.x[2]}, radius,
              quad::ball_radial_count(radius, space.spacing()),
              quad::kBallAngularCount);
          int n_ax = static_cast<int>(space.axis.size());
          for (auto& node : rule.nodes) {
            double t = eta_a - node.r;
            double factor = 1.0 / (4.0 * M_PI);
            if (flrw) factor *= (*a)(std::max(0.0, t));
            int ax0, ax1, ay0, ay1, az0, az1;
            double wx0, wx1, wy0, wy1, wz0, wz1;
            if (!axis_stencil(space.axis, node.pos[0], ax0, wx0, ax1, wx1))
              continue;
            if (!axis_stencil(space.axis, node.pos[1], ay0, wy0, ay1, wy1))
              continue;
            if (!axis_stencil(space.axis, node.pos[2], az0, wz0, az1, wz1))
              continue;
            auto ts = quad::interp_stencil(eta, std::max(0.0, t));
            double w = node.w * factor;
            for (auto [ti, tw] : {std::pair{ts.i0, ts.w0}, {ts.i1, ts.w1}}) {
              if (tw == 0.0) continue;
              int base = ti * static_cast<int>(n_space);
              double wt = w * tw;
              acc.add(base + (ax0 * n_ax + ay0) * n_ax + az0, wt * wx0 * wy0 * wz0);
              acc.add(base + (ax0 * n_ax + ay0) * n_ax + az1, wt * wx0 * wy0 * wz1);
              acc.add(base + (ax0 * n_ax + ay1) * n_ax + az0, wt * wx0 * wy1 * wz0);
              acc.add(base + (ax0 * n_ax + ay1) * n_ax + az1, wt * wx0 * wy1 * wz1);
              acc.add(base + (ax1 * n_ax + ay0) * n_ax + az0, wt * wx1 * wy0 * wz0);
              acc.add(base + (ax1 * n_ax + ay0) * n_ax + az1, wt * wx1 * wy0 * wz1);
              acc.add(base + (ax1 * n_ax + ay1) * n_ax + az0, wt * wx1 * wy1 * wz0);
              acc.add(base + (ax1 * n_ax + ay1) * n_ax + az1, wt * wx1 * wy1 * wz1);
            }
          }
        }
      }
    } else if (kind == SpaceKind::OpenFLRW3) {
      std::size_t n = space.nodes.size();
      for (std::size_t j = 0; j < n; ++j) {
        double s = s_matrix_[i * n + j];
        if (s < exclusion_) continue;  // covered by the cap below
        double t = eta_a - s;
        if (t < -kTimeTol) continue;
        t = std::max(0.0, t);
        double g = (*a)(t) / (4.0 * M_PI * std::sinh(s));
        auto ts = quad::interp_stencil(eta, t);
        acc.add(ts.i0 * static_cast<int>(n_space) + static_cast<int>(j),
                space.node_weights[j] * g * ts.w0);
        acc.add(ts.i1 * static_cast<int>(n_space) + static_cast<int>(j),
                space.node_weights[j] * g * ts.w1);
      }
      // s -> 0 cap: exact mass of the 1/sinh weight, integrand at center.
      double cap = quad::h3_cap_integral(exclusion_);
      double g0 = (*a)(eta_a) / (4.0 * M_PI);
      auto ts = quad::interp_stencil(eta, eta_a);
      acc.add(ts.i0 * static_cast<int>(n_space) + static_cast<int>(i),
              cap * g0 * ts.w0);
      acc.add(ts.i1 * static_cast<int>(n_space) + static_cast<int>(i),
              cap * g0 * ts.w1);
    } else {  // ClosedFLRW3
      std::size_t n = space.nodes.size();
      double T = model_.T;
      auto scatter = [&](std::size_t j, double weight, double sign, double s,
                         double radius) {
        // one (l, sigma) branch with |s+2 pi l| = radius and given sign
        for (double sigma : {1.0, -1.0}) {
          double t = eta_a + sigma * radius;
          if (t < -kTimeTol || t > T + kTimeTol) continue;
          t = std::clamp(t, 0.0, T);
          double g = sign / std::sin(s) * (*a)(t) / (8.0 * M_PI);
          auto ts = quad::interp_stencil(eta, t);
          acc.add(ts.i0 * static_cast<int>(n_space) + static_cast<int>(j),
                  weight * g * ts.w0);
          acc.add(ts.i1 * static_cast<int>(n_space) + static_cast<int>(j),
                  weight * g * ts.w1);
        }
      };
      for (std::size_t j = 0; j < n; ++j) {
        double s = s_matrix_[i * n + j];
        if (s < exclusion_ || s > M_PI - exclusion_) continue;
        for (int l : closed_winding_census(s, T)) {
          double shifted = s + 2.0 * M_PI * l;
          scatter(j, space.node_weights[j],
                  shifted > 0.0 ? 1.0 : (shifted < 0.0 ? -1.0 : 1.0), s,
                  std::abs(shifted));
        }
      }
      // Caps around the point itself and its antipode; the 1/sin weight
      // integrates to the same mass on both.
      double cap = quad::s3_cap_integral(quad::S3Weight::InvSin, exclusion_);
      auto scatter_cap = [&](std::size_t j_center, double s_limit) {
        for (int l : closed_winding_census(s_limit, T)) {
          double shifted = s_limit + 2.0 * M_PI * l;
          double sign = shifted > 0.0 ? 1.0 : (shifted < 0.0 ? -1.0 : 1.0);
          double radius = std::abs(shifted);
          for (double sigma : {1.0, -1.0}) {
            double t = eta_a + sigma * radius;
            if (t < -kTimeTol || t > T + kTimeTol) continue;
            t = std::clamp(t, 0.0, T);
            double g = sign * (*a)(t) / (8.0 * M_PI);
            auto ts = quad::interp_stencil(eta, t);
            acc.add(
                ts.i0 * static_cast<int>(n_space) + static_cast<int>(j_center),
                cap * g * ts.w0);
            acc.add(
                ts.i1 * static_cast<int>(n_space) + static_cast<int>(j_center),
                cap * g * ts.w1);
          }
        }
      };
      scatter_cap(i, 0.0);
      scatter_cap((i + n / 2) % n, M_PI);
    }
    rows[row] = acc.take();
  });
}

void ModelOperator::assemble_kernel_values() {
  const auto& g = *grid_;
  std::size_t n1 = g.n1(), n2 = g.n2();
  std::size_t s1 = g.space1.count(), s2 = g.space2.count();
  kernel_vals_.resize(n1 * n2);

  std::vector<geometry::SpacetimePoint> pts1(n1), pts2(n2);
  for (std::size_t c1 = 0; c1 < n1; ++c1)
    pts1[c1] = g.space1.at(g.eta1[c1 / s1], c1 % s1);
  for (std::size_t c2 = 0; c2 < n2; ++c2)
    pts2[c2] = g.space2.at(g.eta2[c2 / s2], c2 % s2);

  const auto sing = model_.kernel.singularity;
  const double cap =
      0.5 * std::min(g.space1.spacing(), g.space2.spacing());
  threading::parallel_for(n1, [&](std::size_t c1) {
    for (std::size_t c2 = 0; c2 < n2; ++c2) {
      Complex f = model_.kernel.eval_bounded(pts1[c1], pts2[c2]);
      switch (sing) {
        case kernels::SingularityClass::None:
          break;
        case kernels::SingularityClass::InverseSpatial: {
          auto& p1 = std::get<geometry::FlatPoint>(pts1[c1].spatial);
          auto& p2 = std::get<geometry::FlatPoint>(pts2[c2].spatial);
          double r = geometry::flat_spatial_distance(p1, p2);
          f /= std::max(r, cap);
          break;
        }
        case kernels::SingularityClass::InverseSine: {
          double s = s_matrix_[(c1 % s1) * s2 + (c2 % s2)];
          f = (s < exclusion_ || s > M_PI - exclusion_)
                  ? Complex(0.0, 0.0)
                  : f / std::sin(s);
          break;
        }
      }
      kernel_vals_[c1 * n2 + c2] = f;
    }
  });
}

void ModelOperator::apply_closed_kernel_correction(const MultiTimeField& chi,
                                                   MultiTimeField& out) const {
  // Add-back for the excluded neighborhoods of the kernel singularity
  // 1/sin(s(q1',q2')): the cap mass times the remaining integrand at
  // q2' = q1' (near cap) and q2' = -q1' (antipodal cap).
  const auto& g = *grid_;
  const auto& a = *model_.scale;
  const double T = model_.T;
  std::size_t n = g.space1.count();
  std::size_t nt1 = g.eta1.size(), nt2 = g.eta2.size();
  double cap = quad::s3_cap_integral(quad::S3Weight::InvSin, exclusion_);

  threading::parallel_for(nt1 * n * nt2 * n, [&](std::size_t idx) {
    std::size_t i2 = idx % n;
    std::size_t a2 = (idx / n) % nt2;
    std::size_t i1 = (idx / (n * nt2)) % n;
    std::size_t a1 = idx / (n * nt2 * n);
    double eta1 = g.eta1[a1], eta2 = g.eta2[a2];
    Complex corr(0.0, 0.0);
    for (std::size_t j1 = 0; j1 < n; ++j1) {
      double s1 = s_matrix_[i1 * n + j1];
      if (s1 < exclusion_ || s1 > M_PI - exclusion_) continue;
      double w1 = g.space1.node_weights[j1];
      for (std::size_t cap_idx = 0; cap_idx < 2; ++cap_idx) {
        std::size_t j2 = (cap_idx == 0) ? j1 : (j1 + n / 2) % n;
        double s2 = s_matrix_[i2 * n + j2];
        if (s2 < exclusion_ || s2 > M_PI - exclusion_) continue;
        for (auto& b1 : closed_branches(s1, T)) {
          double t1 = eta1 + b1.sigma * b1.radius;
          if (t1 < -kTimeTol || t1 > T + kTimeTol) continue;
          t1 = std::clamp(t1, 0.0, T);
          double g1 = b1.sign / std::sin(s1) * a(t1) / (8.0 * M_PI);
          auto ts1 = quad::interp_stencil(g.eta1, t1);
          for (auto& b2 : closed_branches(s2, T)) {
            double t2 = eta2 + b2.sigma * b2.radius;
            if (t2 < -kTimeTol || t2 > T + kTimeTol) continue;
            t2 = std::clamp(t2, 0.0, T);
            double g2 = b2.sign / std::sin(s2) * a(t2) / (8.0 * M_PI);
            auto ts2 = quad::interp_stencil(g.eta2, t2);
            Complex v(0.0, 0.0);
            for (auto [bi1, bw1] :
                 {std::pair{ts1.i0, ts1.w0}, {ts1.i1, ts1.w1}}) {
              if (bw1 == 0.0) continue;
              for (auto [bi2, bw2] :
                   {std::pair{ts2.i0, ts2.w0}, {ts2.i1, ts2.w1}}) {
                if (bw2 == 0.0) continue;
                Complex f = model_.kernel.eval_bounded(
                    g.space1.at(g.eta1[bi1], j1), g.space2.at(g.eta2[bi2], j2));
                v += bw1 * bw2 * f * chi.at(bi1, j1, bi2, j2);
              }
            }
            corr += w1 * g1 * cap * g2 * v;
          }
        }
      }
    }
    out.values[idx] += model_.lambda * corr;
  });
}

MultiTimeField ModelOperator::apply(const MultiTimeField& chi) const {
  const auto& g = *grid_;
  if (!(*chi.grid == g))
    throw std::invalid_argument("apply: field lives on a different grid");
  if (chi.a_exp1 != 0.0 || chi.a_exp2 != 0.0)
    throw std::invalid_argument(
        "apply: operator acts on the reduced field (zero weight exponents)");

  MultiTimeField out = fields::zero_field(chi.grid);
  if (model_.lambda == Complex(0.0, 0.0)) return out;

  std::size_t n1 = g.n1(), n2 = g.n2();
  std::size_t s1 = g.space1.count(), s2 = g.space2.count();
  std::size_t nt2 = g.eta2.size();

  // P = kernel .* chi on the grid; the pullbacks interpolate this product.
  std::vector<Complex> P(n1 * n2);
  threading::parallel_for(n1, [&](std::size_t c1) {
    std::size_t b1 = c1 / s1, j1 = c1 % s1;
    for (std::size_t c2 = 0; c2 < n2; ++c2)
      P[c1 * n2 + c2] =
          kernel_vals_[c1 * n2 + c2] * chi.at(b1, j1, c2 / s2, c2 % s2);
  });

  // Z[c1][r2] = sum_{c2} B[r2,c2] P[c1][c2]
  std::vector<Complex> Z(n1 * n2);
  threading::parallel_for(n1, [&](std::size_t c1) {
    const Complex* Prow = P.data() + c1 * n2;
    Complex* Zrow = Z.data() + c1 * n2;
    for (std::size_t r2 = 0; r2 < n2; ++r2) {
      Complex acc(0.0, 0.0);
      for (auto& [c2, w] : rows2_[r2]) acc += w * Prow[c2];
      Zrow[r2] = acc;
    }
  });

  // out[r1][r2] = lambda * sum_{c1} A[r1,c1] Z[c1][r2]
  threading::parallel_for(n1, [&](std::size_t r1) {
    std::size_t a1 = r1 / s1, i1 = r1 % s1;
    for (std::size_t r2 = 0; r2 < n2; ++r2) {
      Complex acc(0.0, 0.0);
      for (auto& [c1, w] : rows1_[r1]) acc += w * Z[c1 * n2 + r2];
      out.at(a1, i1, r2 / s2, r2 % s2) = model_.lambda * acc;
    }
  });

  if (closed_singular_kernel_) apply_closed_kernel_correction(chi, out);
  return out;
}

MultiTimeField apply_operator(const ModelSpec& model,
                              const MultiTimeField& chi) {
  return ModelOperator(model, chi.grid).apply(chi);
}

SolutionReport picard_solve(const ModelSpec& model,
                            const MultiTimeField& chi_free, double tol,
                            int max_iter) {
  if (tol <= 0.0) throw std::invalid_argument("picard_solve: tol must be > 0");
  ModelOperator op(model, chi_free.grid);

  SolutionReport report;
  if (model.spacetime.kind == SpaceKind::ClosedFLRW3 &&
      model.kernel.singularity == kernels::SingularityClass::InverseSine) {
    report.lambda_bound = contraction_bound(model);
    report.above_bound_warning = std::abs(model.lambda) >= report.lambda_bound;
  }

  double norm_free = fields::bnorm(chi_free);
  MultiTimeField chi = chi_free;
  for (int n = 1; n <= max_iter; ++n) {
    MultiTimeField k_chi = op.apply(chi);
    MultiTimeField next = fields::lincomb(1.0, chi_free, 1.0, k_chi);
    double delta = fields::bnorm_diff(next, chi);
    if (!std::isfinite(delta)) throw DivergedError(n);
    report.residual_history.push_back(delta);
    chi = std::move(next);
    report.iterations = n;
    if (delta <= tol * norm_free) {
      report.converged = true;
      break;
    }
  }
  report.chi = std::move(chi);
  return report;
}

double residual(const ModelOperator& op, const MultiTimeField& chi,
                const MultiTimeField& chi_free) {
  MultiTimeField k_chi = op.apply(chi);
  MultiTimeField r = fields::lincomb(1.0, chi, -1.0, chi_free);
  return fields::bnorm(fields::lincomb(1.0, r, -1.0, k_chi));
}

double residual(const ModelSpec& model, const MultiTimeField& chi,
                const MultiTimeField& chi_free) {
  return residual(ModelOperator(model, chi.grid), chi, chi_free);
}

double contraction_bound(const ModelSpec& model) {
  if (model.spacetime.kind != SpaceKind::ClosedFLRW3 ||
      model.kernel.singularity != kernels::SingularityClass::InverseSine)
    throw std::invalid_argument(
        "contraction_bound: closed universe with an inverse-sine kernel "
        "required");
  double a_sup = model.scale->sup(4096);
  double winding = std::floor(model.T / M_PI) + 1.0;
  double denom = (M_PI * M_PI / std::sqrt(2.0)) * winding * winding * a_sup *
                 a_sup * model.kernel.sup_bound;
  return 1.0 / denom;
}

namespace {

// Folds nonnegative weight exponents into the values; negative exponents
// stay symbolic so roots of a never produce infinities.
MultiTimeField with_exponent_shift(const MultiTimeField& f,
                                   const geometry::ScaleFactorModel& model,
                                   double shift) {
  MultiTimeField out = f;
  out.a_exp1 += shift;
  out.a_exp2 += shift;
  if (out.a_exp1 >= 0.0 && out.a_exp2 >= 0.0 &&
      (out.a_exp1 > 0.0 || out.a_exp2 > 0.0)) {
    const auto& g = *out.grid;
    std::size_t sp1 = g.space1.count(), sp2 = g.space2.count();
    for (std::size_t a1 = 0; a1 < g.eta1.size(); ++a1) {
      double w1 = std::pow(model(g.eta1[a1]), out.a_exp1);
      for (std::size_t i1 = 0; i1 < sp1; ++i1)
        for (std::size_t a2 = 0; a2 < g.eta2.size(); ++a2) {
          double w = w1 * std::pow(model(g.eta2[a2]), out.a_exp2);
          for (std::size_t i2 = 0; i2 < sp2; ++i2)
            out.at(a1, i1, a2, i2) *= w;
        }
    }
    out.a_exp1 = out.a_exp2 = 0.0;
  }
  return out;
}

}  // namespace

MultiTimeField reduce_conformal(const MultiTimeField& psi,
                                const geometry::ScaleFactorModel& model,
                                int d) {
  return with_exponent_shift(psi, model, 0.5 * (d - 1));
}

MultiTimeField unreduce_conformal(const MultiTimeField& chi,
                                  const geometry::ScaleFactorModel& model,
                                  int d) {
  return with_exponent_shift(chi, model, -0.5 * (d - 1));
}

double bigbang_asymptotics_check(const MultiTimeField& chi,
                                 const MultiTimeField& chi_free,
                                 int n_pairs_near_zero) {
  if (!(*chi.grid == *chi_free.grid))
    throw std::invalid_argument("bigbang check: grid mismatch");
  const auto& g = *chi.grid;
  struct Pair {
    double key1, key2;
    std::size_t a1, a2;
  };
  std::vector<Pair> pairs;
  for (std::size_t a1 = 0; a1 < g.eta1.size(); ++a1)
    for (std::size_t a2 = 0; a2 < g.eta2.size(); ++a2)
      pairs.push_back({std::max(g.eta1[a1], g.eta2[a2]),
                       g.eta1[a1] + g.eta2[a2], a1, a2});
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    if (x.key1 != y.key1) return x.key1 < y.key1;
    if (x.key2 != y.key2) return x.key2 < y.key2;
    return std::tie(x.a1, x.a2) < std::tie(y.a1, y.a2);
  });
  std::size_t take = std::min<std::size_t>(pairs.size(),
                                           std::max(1, n_pairs_near_zero));
  MultiTimeField diff = fields::lincomb(1.0, chi, -1.0, chi_free);
  double worst = 0.0;
  for (std::size_t k = 0; k < take; ++k)
    worst = std::max(worst, fields::slice_l2(diff, pairs[k].a1, pairs[k].a2));
  double scale = fields::bnorm(chi_free);
  return (scale > 0.0) ? worst / scale : worst;
}

MultiTimeField neumann_solve(const ModelSpec& model,
                             const MultiTimeField& chi_free, int N) {
  if (N < 0) throw std::invalid_argument("neumann_solve: N must be >= 0");
  ModelOperator op(model, chi_free.grid);
  MultiTimeField sum = chi_free;
  MultiTimeField term = chi_free;
  for (int n = 1; n <= N; ++n) {
    term = op.apply(term);
    sum = fields::lincomb(1.0, sum, 1.0, term);
  }
  return sum;
}

}  // namespace mtve::solver
