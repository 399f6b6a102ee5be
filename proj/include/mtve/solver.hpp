#ifndef MTVE_SOLVER_HPP
#define MTVE_SOLVER_HPP

#include <optional>

#include "mtve/fields.hpp"
#include "mtve/greens.hpp"
#include "mtve/kernels.hpp"

// Discrete integral operators for every supported model equation, Picard
// iteration on the conformally reduced unknown chi, and the closed-case
// contraction diagnostics.

namespace mtve::solver {

using fields::Complex;
using fields::GridPtr;
using fields::MultiTimeField;

struct ModelSpec {
  geometry::SpacetimeKind spacetime;
  std::optional<geometry::ScaleFactorModel> scale;  // absent for Minkowski
  greens::Support greens_support = greens::Support::Retarded;
  kernels::InteractionKernel kernel;
  Complex lambda{0.0, 0.0};
  double m1 = 0.0, m2 = 0.0;
  double T = 0.0;

  void validate() const;  // throws std::invalid_argument on violations
  int d() const { return spacetime.d; }
};

// Convenience builders.
ModelSpec minkowski_model(int d, kernels::InteractionKernel kernel,
                          Complex lambda, double T, double m1 = 0.0,
                          double m2 = 0.0);
ModelSpec flat_flrw_model(int d, geometry::ScaleFactorModel scale,
                          kernels::InteractionKernel kernel, Complex lambda,
                          double T);
ModelSpec open_flrw_model(geometry::ScaleFactorModel scale,
                          kernels::InteractionKernel kernel, Complex lambda,
                          double T);
ModelSpec closed_flrw_model(geometry::ScaleFactorModel scale,
                            kernels::InteractionKernel kernel, Complex lambda);

struct SolutionReport {
  MultiTimeField chi;
  std::vector<double> residual_history;  // increment norms per iteration
  int iterations = 0;
  double lambda_bound = 0.0;  // contraction threshold (closed case), else 0
  bool converged = false;
  bool above_bound_warning = false;
};

struct DivergedError : std::runtime_error {
  int iteration;
  explicit DivergedError(int it)
      : std::runtime_error("picard_solve: NaN/Inf at iteration " +
                           std::to_string(it)),
        iteration(it) {}
};

// Reachable winding indices l with |s + 2 pi l| <= T.
std::vector<int> closed_winding_census(double s, double T);

// One (l, sigma) branch of the closed-case pullback.
struct ClosedBranch {
  int l;
  double sigma;
  double radius;  // |s + 2 pi l|
  double sign;    // sgn(s + 2 pi l)
};

std::vector<ClosedBranch> closed_branches(double s, double T);

// Discrete kernel sample at a grid node pair; singular denominators are
// folded in (inverse-spatial capped at half a grid cell, inverse-sine
// band-limited by the exclusion radius).
Complex discrete_kernel_value(const ModelSpec& model,
                              const fields::MultiTimeGrid& grid,
                              std::size_t b1, std::size_t j1, std::size_t b2,
                              std::size_t j2, double exclusion);

// Assembled discrete operator chi -> lambda * K_hat chi for one model on
// one grid.  Construction performs all rule building and kernel sampling;
// apply() is the per-iteration workhorse.
class ModelOperator {
 public:
  ModelOperator(ModelSpec model, GridPtr grid);

  MultiTimeField apply(const MultiTimeField& chi) const;

  const ModelSpec& model() const { return model_; }
  const GridPtr& grid() const { return grid_; }
  double exclusion_radius() const { return exclusion_; }

 private:
  void assemble_particle(int particle);
  void assemble_kernel_values();
  void apply_closed_kernel_correction(const MultiTimeField& chi,
                                      MultiTimeField& out) const;

  ModelSpec model_;
  GridPtr grid_;
  double exclusion_ = 0.0;
  // Per-particle operator rows over (eta_idx, space_idx) flattened; each
  // entry is (column, weight) with per-particle Green coefficients folded.
  std::vector<std::vector<std::pair<int, double>>> rows1_, rows2_;
  std::vector<Complex> kernel_vals_;  // [c1 * n2 + c2]
  std::vector<double> s_matrix_;      // closed/open: pairwise distances
  bool closed_singular_kernel_ = false;
};

// lambda * K_hat chi (builds the operator; use ModelOperator in loops).
MultiTimeField apply_operator(const ModelSpec& model,
                              const MultiTimeField& chi);

SolutionReport picard_solve(const ModelSpec& model,
                            const MultiTimeField& chi_free, double tol = 1e-10,
                            int max_iter = 200);

double residual(const ModelSpec& model, const MultiTimeField& chi,
                const MultiTimeField& chi_free);
double residual(const ModelOperator& op, const MultiTimeField& chi,
                const MultiTimeField& chi_free);

// Thm-style coupling threshold for the closed universe with an
// inverse-sine kernel: (pi^2/sqrt(2) (floor(T/pi)+1)^2 |a|^2 |f|)^{-1}.
double contraction_bound(const ModelSpec& model);

// chi = a^{(d-1)/2}(eta1) a^{(d-1)/2}(eta2) psi and its inverse; exponent
// records keep the weights symbolic at scale-factor roots.
MultiTimeField reduce_conformal(const MultiTimeField& psi,
                                const geometry::ScaleFactorModel& model,
                                int d);
MultiTimeField unreduce_conformal(const MultiTimeField& chi,
                                  const geometry::ScaleFactorModel& model,
                                  int d);

// Max over the n smallest time pairs (ordered by max(eta1,eta2)) of the
// spatial L2 distance between chi and chi_free, normalized by
// bnorm(chi_free).
double bigbang_asymptotics_check(const MultiTimeField& chi,
                                 const MultiTimeField& chi_free,
                                 int n_pairs_near_zero);

// Partial Neumann sum  Sum_{n<=N} (lambda K_hat)^n chi_free.
MultiTimeField neumann_solve(const ModelSpec& model,
                             const MultiTimeField& chi_free, int N);

}  // namespace mtve::solver

#endif
