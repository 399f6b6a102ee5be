#include "mtve/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace mtve::kernels {

InteractionKernel natural_kernel_1d() {
  InteractionKernel k;
  k.name = "natural1d";
  k.singularity = SingularityClass::None;
  k.sup_bound = 0.5;
  k.bounded_factor = [](const geometry::SpacetimePoint& x1,
                        const geometry::SpacetimePoint& x2) {
    const auto& p1 = std::get<geometry::FlatPoint>(x1.spatial);
    const auto& p2 = std::get<geometry::FlatPoint>(x2.spatial);
    double dt = x1.eta - x2.eta;
    double dz = geometry::flat_spatial_distance(p1, p2);
    return std::complex<double>(0.5 * heaviside(dt * dt - dz * dz), 0.0);
  };
  return k;
}

InteractionKernel constant_kernel(std::complex<double> c) {
  InteractionKernel k;
  k.name = "constant";
  k.singularity = SingularityClass::None;
  k.sup_bound = std::abs(c);
  k.bounded_factor = [c](const geometry::SpacetimePoint&,
                         const geometry::SpacetimePoint&) { return c; };
  return k;
}

InteractionKernel covariant_bounded_kernel(
    std::function<std::complex<double>(double)> f, double f_sup,
    geometry::ScaleFactorModel model, std::string name) {
  if (!f) throw std::invalid_argument("covariant_bounded_kernel: null f");
  if (!(f_sup > 0.0) && f_sup != 0.0)
    throw std::invalid_argument(
        "covariant_bounded_kernel: sup bound must be declared");
  InteractionKernel k;
  k.name = std::move(name);
  k.singularity = SingularityClass::None;
  k.sup_bound = f_sup;
  k.bounded_factor = [f = std::move(f), model = std::move(model)](
                         const geometry::SpacetimePoint& x1,
                         const geometry::SpacetimePoint& x2) {
    auto d = geometry::timelike_distance(x1, x2, model);
    if (!d) return std::complex<double>(0.0, 0.0);
    return f(*d);
  };
  return k;
}

InteractionKernel singular_kernel_flat3d(KernelFn f, double f_sup,
                                         std::string name) {
  if (!f) throw std::invalid_argument("singular_kernel_flat3d: null f");
  InteractionKernel k;
  k.name = std::move(name);
  k.singularity = SingularityClass::InverseSpatial;
  k.sup_bound = f_sup;
  k.bounded_factor = std::move(f);
  return k;
}

InteractionKernel singular_kernel_closed(KernelFn f, double f_sup,
                                         std::string name) {
  if (!f) throw std::invalid_argument("singular_kernel_closed: null f");
  InteractionKernel k;
  k.name = std::move(name);
  k.singularity = SingularityClass::InverseSine;
  k.sup_bound = f_sup;
  k.bounded_factor = std::move(f);
  return k;
}

}  // namespace mtve::kernels
