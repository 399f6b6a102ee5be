#ifndef MTVE_ORACLE_HPP
#define MTVE_ORACLE_HPP

#include <cstdint>

#include "mtve/solver.hpp"

// Brute-force verifiers, deliberately simple, slow and single-threaded.
// The dense assembly re-walks the quadrature rules on its own; it never
// calls the solver's fused apply path.

namespace mtve::oracle {

using fields::Complex;
using fields::GridPtr;
using fields::MultiTimeField;

// Counter-based generator: the stream is a pure function of (seed, counter).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
  double uniform(std::uint64_t counter) const;     // [0, 1)
  double gaussian(std::uint64_t counter) const;    // standard normal
  std::array<double, 4> s3_point(std::uint64_t counter) const;

 private:
  std::uint64_t seed_;
};

// Full discrete operator lambda * W on a tiny grid, assembled entry by
// entry with the same quadrature weights and interpolation stencils the
// solver uses.
struct DenseSystem {
  std::size_t n = 0;
  std::vector<Complex> op_matrix;  // lambda * W, row-major n x n
  GridPtr grid;
};

DenseSystem build_dense_system(const solver::ModelSpec& model, GridPtr grid);

struct DenseResult {
  MultiTimeField solution;
  bool singular = false;
};

// Solves (I - lambda W) chi = chi_free by partial-pivot elimination.
// Grid size capped at 4096 unknowns.
DenseResult dense_linear_solve(const solver::ModelSpec& model,
                               const MultiTimeField& chi_free);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
};

// Monte Carlo check of Int dO(q1) dO(q2) 1/sin^2(s(q1,q2)) = 8 pi^4 over
// uniform S^3 x S^3 pairs.
McEstimate mc_identity_sin2(std::size_t n_samples, std::uint64_t seed);

// Lower-bounds the discrete operator norm by random probe fields and
// returns the largest bnorm(K chi)/bnorm(chi).
double operator_norm_probe(const solver::ModelSpec& model, GridPtr grid,
                           int n_probes, std::uint64_t seed);

}  // namespace mtve::oracle

#endif
