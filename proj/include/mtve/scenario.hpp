#ifndef MTVE_SCENARIO_HPP
#define MTVE_SCENARIO_HPP

#include <optional>
#include <string>

#include "mtve/solver.hpp"

// Scenario files: `key = value` lines under [model], [grid], [free_field],
// [solver] and [outputs] headers.  Parsing is strict (unknown keys are
// errors, reported with line numbers) and every scenario has a canonical
// text form that round-trips.

namespace mtve::cli {

struct ParseError : std::runtime_error {
  int line;
  std::string field;
  ParseError(int line_, std::string field_, const std::string& msg)
      : std::runtime_error("scenario line " + std::to_string(line_) + " [" +
                           field_ + "]: " + msg),
        line(line_),
        field(std::move(field_)) {}
};

struct ModelSettings {
  std::string spacetime = "minkowski";  // minkowski|flat_flrw|open_flrw|closed_flrw
  int d = 1;
  std::string scale = "none";  // none|dust|radiation
  int k = 0;                   // curvature index of the scale model
  std::string kernel = "natural1d";
  double kernel_c = 1.0;  // kernel strength parameter
  double lambda_re = 0.0, lambda_im = 0.0;
  double m1 = 0.0, m2 = 0.0;
  double T = 1.0;
};

struct GridSettings {
  int n_t = 5;
  int n_x = 9;       // per-axis nodes (flat kinds)
  double L0 = 1.0;   // observation half-width; the box inflates to L0 + T
  int n_s3 = 64;     // S^3 nodes (closed)
  int n_shells = 6;  // H^3 radial shells (open)
  int n_angular = 16;
};

struct FreeFieldSettings {
  std::string factory = "gaussian";  // gaussian|plane_wave|esu|bump
  double sigma1 = 0.5, sigma2 = 0.5;
  double center1 = 0.0, center2 = 0.0;
  double k1 = 0.0, k2 = 0.0;  // plane-wave magnitudes along the first axis
  int n1 = 0, n2 = 0;         // ESU harmonic orders
  int axis1 = 0, axis2 = 0;   // ESU harmonic axes
};

struct SolverSettings {
  double tol = 1e-10;
  int max_iter = 200;
};

struct OutputSettings {
  bool slice = false;
  double slice_eta1 = 0.0, slice_eta2 = 0.0;
};

struct Scenario {
  ModelSettings model;
  GridSettings grid;
  FreeFieldSettings free_field;
  SolverSettings solver;
  OutputSettings outputs;
};

Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string canonical_text(const Scenario& sc);

// Runtime objects.  build_grid applies the domain-of-dependence inflation
// L = L0 + T for flat kinds.
solver::ModelSpec build_model(const Scenario& sc);
fields::GridPtr build_grid(const Scenario& sc);
fields::MultiTimeField build_chi_free(const Scenario& sc,
                                      const fields::GridPtr& grid);

}  // namespace mtve::cli

#endif
