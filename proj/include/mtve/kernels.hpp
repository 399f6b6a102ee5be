#ifndef MTVE_KERNELS_HPP
#define MTVE_KERNELS_HPP

#include <complex>
#include <functional>
#include <string>

#include "mtve/geometry.hpp"

// Interaction-kernel catalogue.  A kernel is a bounded factor plus a
// singularity class; the solver supplies the singular denominator itself
// (1/|x1-x2| in flat space, 1/sin(s) on S^3), so the bounded factor is the
// only part evaluated here.

namespace mtve::kernels {

enum class SingularityClass { None, InverseSpatial, InverseSine };

using KernelFn = std::function<std::complex<double>(
    const geometry::SpacetimePoint&, const geometry::SpacetimePoint&)>;

struct InteractionKernel {
  std::string name;
  SingularityClass singularity = SingularityClass::None;
  double sup_bound = 0.0;  // declared sup of the bounded factor
  KernelFn bounded_factor;

  std::complex<double> eval_bounded(const geometry::SpacetimePoint& x1,
                                    const geometry::SpacetimePoint& x2) const {
    return bounded_factor(x1, x2);
  }
};

// Heaviside with closed upper support, H(0) = 1.
inline double heaviside(double s) { return s >= 0.0 ? 1.0 : 0.0; }

// d=1 kernel (1/2) H((eta1-eta2)^2 - |z1-z2|^2).
InteractionKernel natural_kernel_1d();

// Constant kernel K = c everywhere; handy for closed-form checks.
InteractionKernel constant_kernel(std::complex<double> c);

// f(d(x1,x2)) on time-like related pairs, 0 otherwise; depends on the
// points only through the covariant time-like distance.
InteractionKernel covariant_bounded_kernel(
    std::function<std::complex<double>(double)> f, double f_sup,
    geometry::ScaleFactorModel model, std::string name = "covariant");

// K = f / |x1-x2| on d=3 flat-type spacetimes.
InteractionKernel singular_kernel_flat3d(KernelFn f, double f_sup,
                                         std::string name = "inverse_spatial");

// K~ = f / sin(s(q1,q2)) on the closed universe.
InteractionKernel singular_kernel_closed(KernelFn f, double f_sup,
                                         std::string name = "inverse_sine");

}  // namespace mtve::kernels

#endif
