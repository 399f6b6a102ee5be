#include "mtve/runio.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "mtve/threading.hpp"

namespace mtve::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::uint64_t checksum_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string bytes = buf.str();
  return fnv1a64(bytes.data(), bytes.size());
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_field(const std::string& base_path, const fields::MultiTimeField& f,
                 const Scenario& sc) {
  const auto& g = *f.grid;
  std::string data_path = base_path + ".f64";
  {
    std::ofstream out(data_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + data_path);
    static_assert(sizeof(fields::Complex) == 16);
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * 16));
  }
  std::uint64_t data_sum = checksum_file(data_path);

  std::ofstream out(base_path + ".fld", std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + base_path + ".fld");
  out << "mtve-field: 1\n";
  out << "layout: row-major eta1 x1 eta2 x2\n";
  out << "endianness: little\n";
  out << "complex: re,im float64\n";
  out << "spacetime: " << sc.model.spacetime << "\n";
  out << "d: " << sc.model.d << "\n";
  out << "T: " << fmt17(g.T) << "\n";
  out << "n_t: " << g.eta1.size() << "\n";
  out << "eta1_axis:";
  for (double v : g.eta1) out << " " << fmt17(v);
  out << "\n";
  out << "eta2_axis:";
  for (double v : g.eta2) out << " " << fmt17(v);
  out << "\n";
  if (g.space1.kind == fields::SpatialDiscretization::Kind::FlatBox) {
    out << "x_axis:";
    for (double v : g.space1.axis) out << " " << fmt17(v);
    out << "\n";
  }
  if (g.space1.kind == fields::SpatialDiscretization::Kind::FlatBox) {
    out << "box_halfwidth: " << fmt17(g.space1.box_halfwidth) << "\n";
    out << "n_x: " << g.space1.axis.size() << "\n";
  } else if (g.space1.kind == fields::SpatialDiscretization::Kind::Sphere3) {
    out << "n_s3: " << g.space1.nodes.size() << "\n";
  } else {
    out << "ball_radius: " << fmt17(g.space1.ball_radius) << "\n";
    out << "n_shells: " << g.space1.n_shells << "\n";
    out << "n_angular: " << g.space1.n_angular << "\n";
  }
  out << "a_exp1: " << fmt17(f.a_exp1) << "\n";
  out << "a_exp2: " << fmt17(f.a_exp2) << "\n";
  out << "values: " << f.values.size() << "\n";
  out << "data: " << fs::path(data_path).filename().string() << "\n";
  out << "data_checksum: " << hex64(data_sum) << "\n";
}

fields::MultiTimeField read_field(const std::string& header_path) {
  std::ifstream in(header_path);
  if (!in) throw std::runtime_error("cannot open field header: " + header_path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string key = line.substr(0, colon);
    std::string val = line.substr(colon + 1);
    while (!val.empty() && val.front() == ' ') val.erase(val.begin());
    kv[key] = val;
  }
  auto need = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end())
      throw std::runtime_error("field header missing key: " + key);
    return it->second;
  };

  std::string spacetime = need("spacetime");
  int d = std::stoi(need("d"));
  double T = std::stod(need("T"));
  int n_t = std::stoi(need("n_t"));
  fields::GridPtr grid;
  if (spacetime == "minkowski" || spacetime == "flat_flrw") {
    grid = fields::make_flat_grid(d, T, n_t, std::stod(need("box_halfwidth")),
                                  std::stoi(need("n_x")));
  } else if (spacetime == "closed_flrw") {
    grid = fields::make_closed_grid(T, n_t, std::stoi(need("n_s3")));
  } else if (spacetime == "open_flrw") {
    grid = fields::make_open_grid(T, n_t, std::stod(need("ball_radius")),
                                  std::stoi(need("n_shells")),
                                  std::stoi(need("n_angular")));
  } else {
    throw std::runtime_error("field header: unknown spacetime " + spacetime);
  }

  fields::MultiTimeField f = fields::zero_field(grid);
  f.a_exp1 = std::stod(need("a_exp1"));
  f.a_exp2 = std::stod(need("a_exp2"));
  std::size_t count = std::stoull(need("values"));
  if (count != f.values.size())
    throw std::runtime_error("field header: value count does not match grid");

  fs::path data_path = fs::path(header_path).parent_path() / need("data");
  std::uint64_t expect = std::stoull(need("data_checksum"), nullptr, 16);
  if (checksum_file(data_path.string()) != expect)
    throw std::runtime_error("field data checksum mismatch: " +
                             data_path.string());
  std::ifstream data(data_path, std::ios::binary);
  data.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(count * 16));
  if (static_cast<std::size_t>(data.gcount()) != count * 16)
    throw std::runtime_error("field data truncated: " + data_path.string());
  return f;
}

RunOutcome run_scenario(const std::string& scenario_path,
                        const std::string& out_dir) {
  RunOutcome outcome;
  Scenario sc;
  solver::ModelSpec model;
  fields::GridPtr grid;
  fields::MultiTimeField chi_free;
  try {
    sc = load_scenario(scenario_path);
    model = build_model(sc);
    grid = build_grid(sc);
    chi_free = build_chi_free(sc, grid);
  } catch (const std::exception& e) {
    outcome.exit_code = 1;
    outcome.message = e.what();
    return outcome;
  }

  fs::create_directories(out_dir);
  auto t0 = std::chrono::steady_clock::now();
  solver::SolutionReport report;
  try {
    report = solver::picard_solve(model, chi_free, sc.solver.tol,
                                  sc.solver.max_iter);
  } catch (const std::exception& e) {
    outcome.exit_code = 2;
    outcome.message = e.what();
    return outcome;
  }
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  double resid = solver::residual(model, report.chi, chi_free);

  std::string chi_base = (fs::path(out_dir) / "chi").string();
  std::string free_base = (fs::path(out_dir) / "chi_free").string();
  write_field(chi_base, report.chi, sc);
  write_field(free_base, chi_free, sc);

  std::string canonical = canonical_text(sc);
  json manifest;
  manifest["version"] = kVersion;
  manifest["scenario"] = canonical;
  manifest["scenario_checksum"] = hex64(fnv1a64(canonical));
  manifest["grid"] = {{"n1", grid->n1()}, {"n2", grid->n2()},
                      {"unknowns", grid->size()}};
  manifest["fields"] = json::array();
  for (auto& [role, base] :
       {std::pair<std::string, std::string>{"chi", chi_base},
        {"chi_free", free_base}}) {
    for (auto& ext : {".fld", ".f64"}) {
      std::string path = base + ext;
      manifest["fields"].push_back(
          {{"role", role},
           {"file", fs::path(path).filename().string()},
           {"bytes", fs::file_size(path)},
           {"checksum", hex64(checksum_file(path))}});
    }
  }
  manifest["residual_history"] = report.residual_history;
  manifest["residual"] = resid;
  manifest["iterations"] = report.iterations;
  manifest["converged"] = report.converged;
  manifest["lambda_bound"] = report.lambda_bound;
  manifest["warnings"] = json::array();
  if (report.above_bound_warning) manifest["warnings"].push_back("above-bound");
  manifest["timing_seconds"] = seconds;
  manifest["threads"] = threading::worker_count();

  outcome.manifest_path = (fs::path(out_dir) / "manifest.json").string();
  std::ofstream mf(outcome.manifest_path, std::ios::trunc);
  mf << manifest.dump(2) << "\n";

  if (sc.outputs.slice) {
    SliceRequest req;
    req.fix_times = true;
    req.eta1 = sc.outputs.slice_eta1;
    req.eta2 = sc.outputs.slice_eta2;
    export_slice(outcome.manifest_path, req,
                 (fs::path(out_dir) / "slice.tsv").string());
  }

  if (!report.converged) {
    outcome.exit_code = 2;
    outcome.message = "picard iteration did not converge";
  }
  return outcome;
}

namespace {

json load_manifest(const std::string& path, fs::path& dir) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  dir = fs::path(path).parent_path();
  json m;
  in >> m;
  return m;
}

}  // namespace

VerifyOutcome verify_manifest(const std::string& manifest_path) {
  VerifyOutcome out;
  fs::path dir;
  json manifest;
  try {
    manifest = load_manifest(manifest_path, dir);
    for (auto& entry : manifest["fields"]) {
      fs::path p = dir / entry["file"].get<std::string>();
      if (!fs::exists(p)) throw std::runtime_error("missing file: " + p.string());
      if (fs::file_size(p) != entry["bytes"].get<std::uintmax_t>())
        throw std::runtime_error("size mismatch: " + p.string());
      if (hex64(checksum_file(p.string())) != entry["checksum"].get<std::string>())
        throw std::runtime_error("checksum mismatch: " + p.string());
    }
    Scenario sc = parse_scenario_text(manifest["scenario"].get<std::string>());
    solver::ModelSpec model = build_model(sc);
    fields::MultiTimeField chi = read_field((dir / "chi.fld").string());
    fields::MultiTimeField chi_free =
        read_field((dir / "chi_free.fld").string());
    double resid = solver::residual(model, chi, chi_free);
    double recorded = manifest["residual"].get<double>();
    if (std::abs(resid - recorded) > 1e-12 * std::max(1.0, std::abs(recorded)))
      throw std::runtime_error(
          "recomputed residual " + fmt17(resid) +
          " differs from recorded " + fmt17(recorded));
    out.message = "verify: ok";
  } catch (const std::exception& e) {
    out.exit_code = 3;
    out.message = e.what();
  }
  return out;
}

std::pair<double, double> export_slice(const std::string& manifest_path,
                                       const SliceRequest& req,
                                       const std::string& out_path) {
  fs::path dir;
  json manifest = load_manifest(manifest_path, dir);
  Scenario sc = parse_scenario_text(manifest["scenario"].get<std::string>());
  fields::MultiTimeField chi = read_field((dir / "chi.fld").string());
  const auto& g = *chi.grid;

  const bool flrw = (sc.model.spacetime != "minkowski");
  std::optional<geometry::ScaleFactorModel> scale;
  if (flrw) {
    if (sc.model.scale == "dust")
      scale = geometry::ScaleFactorModel::dust(sc.model.k, sc.model.T);
    else
      scale = geometry::ScaleFactorModel::radiation(sc.model.k, sc.model.T);
  }
  double w_exp = 0.5 * (sc.model.d - 1);

  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out.precision(17);

  auto nearest = [](const std::vector<double>& axis, double v) {
    std::size_t best = 0;
    double dist = std::abs(axis[0] - v);
    for (std::size_t i = 1; i < axis.size(); ++i)
      if (std::abs(axis[i] - v) < dist) {
        dist = std::abs(axis[i] - v);
        best = i;
      }
    return std::pair<std::size_t, double>{best, dist};
  };

  auto coord_header = [&](int particle) {
    std::string tag = std::to_string(particle);
    if (g.space1.kind == fields::SpatialDiscretization::Kind::FlatBox) {
      std::string h;
      const char* names[3] = {"x", "y", "z"};
      for (int k = 0; k < g.space1.dim; ++k)
        h += std::string(names[k]) + tag + "\t";
      return h;
    }
    return "q" + tag + "0\tq" + tag + "1\tq" + tag + "2\tq" + tag + "3\t";
  };
  auto coord_cols = [&](const fields::SpatialDiscretization& sp,
                        std::size_t i, std::ostream& os) {
    if (sp.kind == fields::SpatialDiscretization::Kind::FlatBox) {
      auto p = std::get<geometry::FlatPoint>(sp.point(i));
      for (int k = 0; k < sp.dim; ++k) os << p.x[k] << "\t";
    } else {
      for (int k = 0; k < 4; ++k) os << sp.nodes[i][k] << "\t";
    }
  };

  if (req.fix_times) {
    if (req.eta1 < g.eta1.front() - 1e-12 || req.eta1 > g.eta1.back() + 1e-12 ||
        req.eta2 < g.eta2.front() - 1e-12 || req.eta2 > g.eta2.back() + 1e-12)
      throw std::runtime_error("export_slice: fixed time outside grid range");
    auto [a1, snap1] = nearest(g.eta1, req.eta1);
    auto [a2, snap2] = nearest(g.eta2, req.eta2);
    double weight = 1.0;
    bool weight_ok = true;
    if (flrw && w_exp > 0.0) {
      double a_1 = (*scale)(g.eta1[a1]), a_2 = (*scale)(g.eta2[a2]);
      if (a_1 <= 0.0 || a_2 <= 0.0)
        weight_ok = false;
      else
        weight = std::pow(a_1, -w_exp) * std::pow(a_2, -w_exp);
    }
    out << "# eta1 = " << g.eta1[a1] << " (snap " << snap1 << ")\n";
    out << "# eta2 = " << g.eta2[a2] << " (snap " << snap2 << ")\n";
    out << coord_header(1) << coord_header(2)
        << "chi_re\tchi_im\tchi_abs";
    if (weight_ok) out << "\tpsi_re\tpsi_im\tpsi_abs";
    out << "\n";
    for (std::size_t i1 = 0; i1 < g.space1.count(); ++i1)
      for (std::size_t i2 = 0; i2 < g.space2.count(); ++i2) {
        coord_cols(g.space1, i1, out);
        coord_cols(g.space2, i2, out);
        fields::Complex v = chi.at(a1, i1, a2, i2);
        out << v.real() << "\t" << v.imag() << "\t" << std::abs(v);
        if (weight_ok) {
          fields::Complex p = v * weight;
          out << "\t" << p.real() << "\t" << p.imag() << "\t" << std::abs(p);
        }
        out << "\n";
      }
    return {snap1, snap2};
  }

  std::size_t i1 = req.ix1, i2 = req.ix2;
  if (i1 >= g.space1.count() || i2 >= g.space2.count())
    throw std::runtime_error("export_slice: spatial index out of range");
  out << "# fixed spatial nodes ix1 = " << i1 << ", ix2 = " << i2 << "\n";
  out << "eta1\teta2\tchi_re\tchi_im\tchi_abs\n";
  for (std::size_t a1 = 0; a1 < g.eta1.size(); ++a1)
    for (std::size_t a2 = 0; a2 < g.eta2.size(); ++a2) {
      fields::Complex v = chi.at(a1, i1, a2, i2);
      out << g.eta1[a1] << "\t" << g.eta2[a2] << "\t" << v.real() << "\t"
          << v.imag() << "\t" << std::abs(v) << "\n";
    }
  return {0.0, 0.0};
}

}  // namespace mtve::cli
