#ifndef MTVE_FIELDS_HPP
#define MTVE_FIELDS_HPP

#include <complex>
#include <memory>
#include <vector>

#include "mtve/geometry.hpp"
#include "mtve/quadrature.hpp"

// Discretized single- and multi-time fields on tensor-product grids, the
// sup-over-times spatial-L2 norm, and free-solution factories.

namespace mtve::fields {

using Complex = std::complex<double>;

// Spatial discretization of one particle's slice: a uniform box grid for
// flat slices, or explicit weighted node sets on S^3 / truncated H^3.
struct SpatialDiscretization {
  enum class Kind { FlatBox, Sphere3, Hyperbolic3 };

  Kind kind = Kind::FlatBox;
  int dim = 1;

  // FlatBox: shared per-axis nodes on [-L, L] with trapezoid weights.
  std::vector<double> axis;
  std::vector<double> axis_weights;
  double box_halfwidth = 0.0;

  // Sphere3 / Hyperbolic3 node sets.
  std::vector<std::array<double, 4>> nodes;
  std::vector<double> node_weights;
  int n_nodes_param = 0;   // Sphere3: requested node count
  double ball_radius = 0.0;  // Hyperbolic3 truncation radius
  int n_shells = 0, n_angular = 0;

  static SpatialDiscretization flat_box(int d, double L, int n_per_axis);
  static SpatialDiscretization sphere3(int n_nodes);
  static SpatialDiscretization hyperbolic3(double L, int n_shells,
                                           int n_angular);

  std::size_t count() const;
  double weight(std::size_t i) const;
  geometry::SpatialPoint point(std::size_t i) const;
  geometry::SpacetimePoint at(double eta, std::size_t i) const;
  double spacing() const;  // representative node spacing

  bool operator==(const SpatialDiscretization& o) const;
};

struct MultiTimeGrid {
  std::vector<double> eta1, eta2;
  SpatialDiscretization space1, space2;
  double T = 0.0;

  std::size_t n1() const { return eta1.size() * space1.count(); }
  std::size_t n2() const { return eta2.size() * space2.count(); }
  std::size_t size() const { return n1() * n2(); }

  // Row-major layout: eta1 outermost, x2 innermost.
  std::size_t index(std::size_t a1, std::size_t i1, std::size_t a2,
                    std::size_t i2) const {
    return ((a1 * space1.count() + i1) * eta2.size() + a2) * space2.count() +
           i2;
  }
  bool operator==(const MultiTimeGrid& o) const;
};

using GridPtr = std::shared_ptr<const MultiTimeGrid>;

GridPtr make_flat_grid(int d, double T, int n_t, double L, int n_per_axis);
GridPtr make_closed_grid(double T, int n_t, int n_s3);
GridPtr make_open_grid(double T, int n_t, double L, int n_shells,
                       int n_angular);

// Multi-time amplitude with a symbolic scale-factor weight: the field
// represents a(eta1)^{a_exp1} a(eta2)^{a_exp2} * values, so values stay
// finite at the roots of a.
struct MultiTimeField {
  GridPtr grid;
  std::vector<Complex> values;
  double a_exp1 = 0.0, a_exp2 = 0.0;

  Complex& at(std::size_t a1, std::size_t i1, std::size_t a2,
              std::size_t i2) {
    return values[grid->index(a1, i1, a2, i2)];
  }
  const Complex& at(std::size_t a1, std::size_t i1, std::size_t a2,
                    std::size_t i2) const {
    return values[grid->index(a1, i1, a2, i2)];
  }
};

MultiTimeField zero_field(GridPtr grid);

// sup over time pairs of the weighted spatial L2 norm of the stored values.
double bnorm(const MultiTimeField& field);

// Spatial L2 norm of one fixed-time-pair slice.
double slice_l2(const MultiTimeField& field, std::size_t a1, std::size_t a2);

// Elementwise helpers (grids must match).
MultiTimeField lincomb(Complex alpha, const MultiTimeField& x, Complex beta,
                       const MultiTimeField& y);
double bnorm_diff(const MultiTimeField& x, const MultiTimeField& y);

// ---------------------------------------------------------------------------
// Single-particle fields and free-solution factories.

struct SingleParticleField {
  std::vector<double> eta;
  SpatialDiscretization space;
  std::vector<Complex> values;  // [i_eta][i_x]
  double a_exp = 0.0;

  Complex& at(std::size_t a, std::size_t i) {
    return values[a * space.count() + i];
  }
  const Complex& at(std::size_t a, std::size_t i) const {
    return values[a * space.count() + i];
  }
};

using Profile = std::function<Complex(double)>;

// phi(eta, z) = f(eta - z) + g(eta + z) on a d=1 flat grid.
SingleParticleField dalembert_free_1d(const Profile& f, const Profile& g,
                                      const std::vector<double>& eta_axis,
                                      const SpatialDiscretization& space);

// phi(eta, x) = exp(-i(|k| eta - k.x)) on a flat grid.
SingleParticleField plane_wave_free(const std::array<double, 3>& k, int d,
                                    const std::vector<double>& eta_axis,
                                    const SpatialDiscretization& space);

// phi~ = a^{-(d-1)/2} phi, recorded symbolically in the exponent.
SingleParticleField flrw_free_from_minkowski(SingleParticleField phi,
                                             const geometry::ScaleFactorModel& model,
                                             int d);

// psi_free(x1, x2) = phi1(x1) phi2(x2).
MultiTimeField product_free(const SingleParticleField& phi1,
                            const SingleParticleField& phi2);

// Zonal hyperspherical harmonic sin((n+1) alpha)/((n+1) sin alpha) with
// cos(alpha) = q . axis.
double zonal_harmonic_s3(int n, const std::array<double, 4>& axis,
                         const std::array<double, 4>& q);

// Finite-difference estimate of the -Laplacian eigenvalue of the zonal
// harmonic on S^3 (expected n(n+2), confirmed numerically).
double esu_zonal_eigenvalue_fd(int n, int n_alpha = 2048);

// Frequency minimizing the discrete conformally-coupled KG residual of
// e^{-i omega eta} on the static S^3 universe, for time step dt.
double esu_mode_frequency(int n, double dt);

// phi~(eta, q) = a(eta)^{-1} e^{-i omega_n eta} Y_n(q) on a closed grid.
SingleParticleField esu_mode_closed(int n, int axis_index,
                                    const std::vector<double>& eta_axis,
                                    const SpatialDiscretization& space,
                                    const geometry::ScaleFactorModel& model);

}  // namespace mtve::fields

#endif
