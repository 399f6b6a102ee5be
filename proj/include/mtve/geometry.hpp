#ifndef MTVE_GEOMETRY_HPP
#define MTVE_GEOMETRY_HPP

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

// Spatial geometry of the supported universes: flat slices R^d, the unit
// hyperboloid H^3 embedded in R^{1,3}, and the unit sphere S^3 in R^4,
// together with conformal-time scale-factor models a(eta).

namespace mtve::geometry {

enum class SpaceKind {
  MinkowskiHalfSpace,  // [0,inf) x R^d, d in {1,2,3}
  FlatFLRW,            // expanding flat slices, d in {1,2,3}
  OpenFLRW3,           // H^3 slices, d = 3
  ClosedFLRW3          // S^3 slices, d = 3
};

struct SpacetimeKind {
  SpaceKind kind = SpaceKind::MinkowskiHalfSpace;
  int d = 1;  // spatial dimension

  static SpacetimeKind minkowski(int d);
  static SpacetimeKind flat_flrw(int d);
  static SpacetimeKind open_flrw3();
  static SpacetimeKind closed_flrw3();

  bool is_flat_slices() const {
    return kind == SpaceKind::MinkowskiHalfSpace || kind == SpaceKind::FlatFLRW;
  }
  bool is_flrw() const { return kind != SpaceKind::MinkowskiHalfSpace; }
  std::string name() const;
};

enum class MatterKind { Dust, Radiation, Custom };

// Scale factor a(eta) on [0, T].  The catalogue models carry unit
// prefactors; rescaled variants go through `custom`.
class ScaleFactorModel {
 public:
  // Catalogue models.  For k = +1 the natural horizon is built in
  // (2*pi for dust, pi for radiation); flat/open take a user horizon.
  static ScaleFactorModel dust(int k, double T = 0.0);
  static ScaleFactorModel radiation(int k, double T = 0.0);
  static ScaleFactorModel custom(std::function<double(double)> fn, double T,
                                 std::string name = "custom");

  double operator()(double eta) const;  // domain-checked evaluation
  double T() const { return horizon_; }
  int curvature() const { return k_; }
  MatterKind matter() const { return matter_; }
  const std::string& name() const { return name_; }

  // Dense-sampled sup of a over [0,T] (default 4096 nodes incl. ends).
  double sup(int n_samples = 4096) const;

  // True when a(T) vanishes (Big Crunch), needed by closed models.
  bool vanishes_at_horizon(double tol = 1e-9) const;

 private:
  ScaleFactorModel() = default;
  MatterKind matter_ = MatterKind::Custom;
  int k_ = 0;
  double horizon_ = 0.0;
  std::function<double(double)> fn_;
  std::string name_;
};

inline double scale_factor(const ScaleFactorModel& model, double eta) {
  return model(eta);
}

struct FlatPoint {
  std::array<double, 3> x{};  // only the first d components are meaningful
  int d = 1;
};

struct SpherePoint {
  std::array<double, 4> q{};  // unit vector in R^4
};

struct HyperboloidPoint {
  std::array<double, 4> x{};  // <x,x>_Mink = 1, x[0] >= 1
};

using SpatialPoint = std::variant<FlatPoint, SpherePoint, HyperboloidPoint>;

struct SpacetimePoint {
  double eta = 0.0;
  SpatialPoint spatial;

  static SpacetimePoint flat1d(double eta, double z);
  static SpacetimePoint flat(double eta, std::array<double, 3> x, int d);
  static SpacetimePoint sphere(double eta, std::array<double, 4> q);
  static SpacetimePoint hyperboloid(double eta, std::array<double, 4> x);
};

// Unit-norm checks use this tolerance; inputs further off than this are
// rejected rather than silently renormalized.
inline constexpr double kPointTol = 1e-9;

SpherePoint make_sphere_point(std::array<double, 4> q);
HyperboloidPoint make_hyperboloid_point(std::array<double, 4> x);

double dot4(const std::array<double, 4>& a, const std::array<double, 4>& b);
double minkowski_dot4(const std::array<double, 4>& a,
                      const std::array<double, 4>& b);

// Great-circle angle arccos(q.q') in [0, pi].
double geodesic_distance_s3(const SpherePoint& q, const SpherePoint& qp);

// arcosh of the Minkowski inner product on the unit hyperboloid.
double geodesic_distance_h3(const HyperboloidPoint& x,
                            const HyperboloidPoint& xp);

// Euclidean distance of the spatial parts of two flat points.
double flat_spatial_distance(const FlatPoint& a, const FlatPoint& b);

// Covariant time-like distance on flat FLRW,
//   d(x1,x2) = (|eta1-eta2| - |x1-x2|) * Int_0^1 a(tau*eta1+(1-tau)*eta2) dtau,
// or nullopt when the points are not time-like related.
std::optional<double> timelike_distance(const SpacetimePoint& x1,
                                        const SpacetimePoint& x2,
                                        const ScaleFactorModel& model);

// a(eta1)^{(d-1)/2} * a(eta2)^{(d-1)/2}; identically 1 for d = 1.
double conformal_weight(int d, double eta1, double eta2,
                        const ScaleFactorModel& model);

// Adaptive Simpson quadrature used for the covariant distance integral.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol);

}  // namespace mtve::geometry

#endif
