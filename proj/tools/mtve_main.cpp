// mtve - multi-time integral equation solver CLI.
//
// Verbs: run, export-slice, verify, bound, oracle.
// Exit codes: 0 success/converged, 1 input error, 2 non-convergence,
// 3 verification failure.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <iostream>

#include "mtve/oracle.hpp"
#include "mtve/runio.hpp"

int main(int argc, char** argv) {
  CLI::App app{"multi-time integral equation solver"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "out", manifest_path, out_path;
  double eta1 = 0.0, eta2 = 0.0;
  std::size_t ix1 = 0, ix2 = 0;
  bool fix_points = false;
  std::size_t mc_samples = 1000000;
  std::uint64_t seed = 20240901;

  auto* run = app.add_subcommand("run", "solve a scenario and persist the run");
  run->add_option("scenario", scenario_path, "scenario file")->required();
  run->add_option("-o,--out", out_dir, "output directory");

  auto* slice = app.add_subcommand("export-slice",
                                   "export a fixed-times or fixed-points table");
  slice->add_option("manifest", manifest_path, "run manifest")->required();
  slice->add_option("--eta1", eta1, "fixed eta1");
  slice->add_option("--eta2", eta2, "fixed eta2");
  slice->add_flag("--points", fix_points,
                  "fix spatial nodes instead of times");
  slice->add_option("--ix1", ix1, "spatial node index, particle 1");
  slice->add_option("--ix2", ix2, "spatial node index, particle 2");
  slice->add_option("-o,--out", out_path, "output table path")->required();

  auto* verify = app.add_subcommand("verify", "re-check a persisted run");
  verify->add_option("manifest", manifest_path, "run manifest")->required();

  auto* bound = app.add_subcommand("bound",
                                   "print the closed-case contraction bound");
  bound->add_option("scenario", scenario_path, "scenario file")->required();

  auto* oracle = app.add_subcommand("oracle",
                                    "run the built-in oracle suite");
  oracle->add_option("--samples", mc_samples, "Monte Carlo sample count");
  oracle->add_option("--seed", seed, "Monte Carlo seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto outcome = mtve::cli::run_scenario(scenario_path, out_dir);
      if (!outcome.message.empty()) std::cerr << outcome.message << "\n";
      if (outcome.exit_code == 0)
        std::cout << "manifest: " << outcome.manifest_path << "\n";
      return outcome.exit_code;
    }
    if (*slice) {
      mtve::cli::SliceRequest req;
      req.fix_times = !fix_points;
      req.eta1 = eta1;
      req.eta2 = eta2;
      req.ix1 = ix1;
      req.ix2 = ix2;
      auto [snap1, snap2] = mtve::cli::export_slice(manifest_path, req, out_path);
      if (req.fix_times)
        std::cout << "snap distances: " << snap1 << " " << snap2 << "\n";
      std::cout << "wrote " << out_path << "\n";
      return 0;
    }
    if (*verify) {
      auto outcome = mtve::cli::verify_manifest(manifest_path);
      std::cout << outcome.message << "\n";
      return outcome.exit_code;
    }
    if (*bound) {
      auto sc = mtve::cli::load_scenario(scenario_path);
      auto model = mtve::cli::build_model(sc);
      std::printf("contraction bound: %.12e\n",
                  mtve::solver::contraction_bound(model));
      std::printf("|lambda| = %.12e\n", std::abs(model.lambda));
      return 0;
    }
    if (*oracle) {
      int failures = 0;
      auto mc = mtve::oracle::mc_identity_sin2(mc_samples, seed);
      double target = 8.0 * std::pow(M_PI, 4);
      bool mc_ok = std::abs(mc.estimate - target) <= 3.0 * mc.std_error;
      std::printf("%s sin^-2 pair integral: %.4f +- %.4f (target %.4f)\n",
                  mc_ok ? "PASS" : "FAIL", mc.estimate, mc.std_error, target);
      failures += !mc_ok;

      auto rule = mtve::quad::s3_pair_rule(400, mtve::quad::default_s3_exclusion(400));
      double sum = rule.node_weight * static_cast<double>(rule.nodes.size());
      bool w_ok = std::abs(sum - 2.0 * M_PI * M_PI) <= 0.005 * 2.0 * M_PI * M_PI;
      std::printf("%s S^3 weight sum: %.6f (target %.6f)\n",
                  w_ok ? "PASS" : "FAIL", sum, 2.0 * M_PI * M_PI);
      failures += !w_ok;

      // tiny built-in dense cross-check: d=1 half-space, natural kernel
      auto kernel = mtve::kernels::natural_kernel_1d();
      auto model = mtve::solver::minkowski_model(1, kernel, 1.0, 1.0);
      auto grid = mtve::fields::make_flat_grid(1, 1.0, 4, 1.5, 7);
      auto phi = mtve::fields::dalembert_free_1d(
          [](double u) { return mtve::fields::Complex(std::exp(-u * u), 0.0); },
          nullptr, grid->eta1, grid->space1);
      auto chi_free = mtve::fields::product_free(phi, phi);
      auto report = mtve::solver::picard_solve(model, chi_free);
      auto dense = mtve::oracle::dense_linear_solve(model, chi_free);
      double gap = mtve::fields::bnorm_diff(report.chi, dense.solution);
      bool dense_ok = !dense.singular && gap <= 1e-10;
      std::printf("%s dense cross-check: |picard - dense| = %.3e\n",
                  dense_ok ? "PASS" : "FAIL", gap);
      failures += !dense_ok;

      return failures == 0 ? 0 : 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
