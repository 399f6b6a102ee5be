#ifndef MTVE_RUNIO_HPP
#define MTVE_RUNIO_HPP

#include <cstdint>
#include <string>

#include "mtve/scenario.hpp"

// Run orchestration and persistence: a text header plus a flat
// little-endian binary of (re, im) float64 pairs per field, and a JSON run
// manifest tying scenario, files, and diagnostics together.

namespace mtve::cli {

inline constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64(const std::string& s);
std::uint64_t checksum_file(const std::string& path);

// Writes <base>.fld (text header) and <base>.f64 (binary values).
void write_field(const std::string& base_path, const fields::MultiTimeField& f,
                 const Scenario& sc);
fields::MultiTimeField read_field(const std::string& header_path);

struct RunOutcome {
  int exit_code = 0;  // 0 converged, 1 input error, 2 non-convergence
  std::string manifest_path;
  std::string message;
};

// Executes the scenario, writes chi/chi_free fields, manifest, residual
// history; returns the CLI exit code.
RunOutcome run_scenario(const std::string& scenario_path,
                        const std::string& out_dir);

struct VerifyOutcome {
  int exit_code = 0;  // 0 ok, 3 verification failure
  std::string message;
};

// Recomputes checksums and the residual from persisted data.
VerifyOutcome verify_manifest(const std::string& manifest_path);

struct SliceRequest {
  bool fix_times = true;  // otherwise fix spatial nodes
  double eta1 = 0.0, eta2 = 0.0;
  std::size_t ix1 = 0, ix2 = 0;
};

// Writes a delimited text table of the slice; returns the snap distances.
std::pair<double, double> export_slice(const std::string& manifest_path,
                                       const SliceRequest& req,
                                       const std::string& out_path);

}  // namespace mtve::cli

#endif
