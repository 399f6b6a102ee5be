#include "mtve/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace mtve::cli {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ParseError(line, key, "expected a number, got '" + v + "'");
  }
}

int parse_int(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t pos = 0;
    int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ParseError(line, key, "expected an integer, got '" + v + "'");
  }
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
  Scenario sc;
  std::istringstream in(text);
  std::string line;
  std::string section;
  bool saw_model = false;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError(n, t, "unterminated section header");
      section = t.substr(1, t.size() - 2);
      if (section != "model" && section != "grid" && section != "free_field" &&
          section != "solver" && section != "outputs")
        throw ParseError(n, section, "unknown section");
      if (section == "model") saw_model = true;
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError(n, t, "expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (section.empty()) throw ParseError(n, key, "key outside any section");

    auto unknown = [&]() -> ParseError {
      return ParseError(n, key, "unknown key in [" + section + "]");
    };
    if (section == "model") {
      auto& m = sc.model;
      if (key == "spacetime")
        m.spacetime = value;
      else if (key == "d")
        m.d = parse_int(value, n, key);
      else if (key == "scale")
        m.scale = value;
      else if (key == "k")
        m.k = parse_int(value, n, key);
      else if (key == "kernel")
        m.kernel = value;
      else if (key == "kernel_c")
        m.kernel_c = parse_double(value, n, key);
      else if (key == "lambda_re")
        m.lambda_re = parse_double(value, n, key);
      else if (key == "lambda_im")
        m.lambda_im = parse_double(value, n, key);
      else if (key == "m1")
        m.m1 = parse_double(value, n, key);
      else if (key == "m2")
        m.m2 = parse_double(value, n, key);
      else if (key == "T")
        m.T = parse_double(value, n, key);
      else
        throw unknown();
    } else if (section == "grid") {
      auto& g = sc.grid;
      if (key == "n_t")
        g.n_t = parse_int(value, n, key);
      else if (key == "n_x")
        g.n_x = parse_int(value, n, key);
      else if (key == "L0")
        g.L0 = parse_double(value, n, key);
      else if (key == "n_s3")
        g.n_s3 = parse_int(value, n, key);
      else if (key == "n_shells")
        g.n_shells = parse_int(value, n, key);
      else if (key == "n_angular")
        g.n_angular = parse_int(value, n, key);
      else
        throw unknown();
    } else if (section == "free_field") {
      auto& f = sc.free_field;
      if (key == "factory")
        f.factory = value;
      else if (key == "sigma1")
        f.sigma1 = parse_double(value, n, key);
      else if (key == "sigma2")
        f.sigma2 = parse_double(value, n, key);
      else if (key == "center1")
        f.center1 = parse_double(value, n, key);
      else if (key == "center2")
        f.center2 = parse_double(value, n, key);
      else if (key == "k1")
        f.k1 = parse_double(value, n, key);
      else if (key == "k2")
        f.k2 = parse_double(value, n, key);
      else if (key == "n1")
        f.n1 = parse_int(value, n, key);
      else if (key == "n2")
        f.n2 = parse_int(value, n, key);
      else if (key == "axis1")
        f.axis1 = parse_int(value, n, key);
      else if (key == "axis2")
        f.axis2 = parse_int(value, n, key);
      else
        throw unknown();
    } else if (section == "solver") {
      auto& s = sc.solver;
      if (key == "tol")
        s.tol = parse_double(value, n, key);
      else if (key == "max_iter")
        s.max_iter = parse_int(value, n, key);
      else
        throw unknown();
    } else {  // outputs
      auto& o = sc.outputs;
      if (key == "slice") {
        if (value != "true" && value != "false")
          throw ParseError(n, key, "expected true or false");
        o.slice = (value == "true");
      } else if (key == "slice_eta1")
        o.slice_eta1 = parse_double(value, n, key);
      else if (key == "slice_eta2")
        o.slice_eta2 = parse_double(value, n, key);
      else
        throw unknown();
    }
  }
  if (!saw_model) throw ParseError(0, "model", "missing [model] section");
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

std::string canonical_text(const Scenario& sc) {
  std::ostringstream out;
  out << "[model]\n";
  out << "spacetime = " << sc.model.spacetime << "\n";
  out << "d = " << sc.model.d << "\n";
  out << "scale = " << sc.model.scale << "\n";
  out << "k = " << sc.model.k << "\n";
  out << "kernel = " << sc.model.kernel << "\n";
  out << "kernel_c = " << fmt(sc.model.kernel_c) << "\n";
  out << "lambda_re = " << fmt(sc.model.lambda_re) << "\n";
  out << "lambda_im = " << fmt(sc.model.lambda_im) << "\n";
  out << "m1 = " << fmt(sc.model.m1) << "\n";
  out << "m2 = " << fmt(sc.model.m2) << "\n";
  out << "T = " << fmt(sc.model.T) << "\n";
  out << "[grid]\n";
  out << "n_t = " << sc.grid.n_t << "\n";
  out << "n_x = " << sc.grid.n_x << "\n";
  out << "L0 = " << fmt(sc.grid.L0) << "\n";
  out << "n_s3 = " << sc.grid.n_s3 << "\n";
  out << "n_shells = " << sc.grid.n_shells << "\n";
  out << "n_angular = " << sc.grid.n_angular << "\n";
  out << "[free_field]\n";
  out << "factory = " << sc.free_field.factory << "\n";
  out << "sigma1 = " << fmt(sc.free_field.sigma1) << "\n";
  out << "sigma2 = " << fmt(sc.free_field.sigma2) << "\n";
  out << "center1 = " << fmt(sc.free_field.center1) << "\n";
  out << "center2 = " << fmt(sc.free_field.center2) << "\n";
  out << "k1 = " << fmt(sc.free_field.k1) << "\n";
  out << "k2 = " << fmt(sc.free_field.k2) << "\n";
  out << "n1 = " << sc.free_field.n1 << "\n";
  out << "n2 = " << sc.free_field.n2 << "\n";
  out << "axis1 = " << sc.free_field.axis1 << "\n";
  out << "axis2 = " << sc.free_field.axis2 << "\n";
  out << "[solver]\n";
  out << "tol = " << fmt(sc.solver.tol) << "\n";
  out << "max_iter = " << sc.solver.max_iter << "\n";
  out << "[outputs]\n";
  out << "slice = " << (sc.outputs.slice ? "true" : "false") << "\n";
  out << "slice_eta1 = " << fmt(sc.outputs.slice_eta1) << "\n";
  out << "slice_eta2 = " << fmt(sc.outputs.slice_eta2) << "\n";
  return out.str();
}

namespace {

geometry::ScaleFactorModel build_scale(const Scenario& sc) {
  const auto& m = sc.model;
  if (m.scale == "dust") return geometry::ScaleFactorModel::dust(m.k, m.T);
  if (m.scale == "radiation")
    return geometry::ScaleFactorModel::radiation(m.k, m.T);
  throw std::invalid_argument("scenario: unknown scale model '" + m.scale +
                              "' (use dust or radiation)");
}

kernels::InteractionKernel build_kernel(const Scenario& sc) {
  const auto& m = sc.model;
  double c = m.kernel_c;
  const bool flat_type =
      (m.spacetime == "minkowski" || m.spacetime == "flat_flrw");
  if ((m.kernel == "timelike_const" || m.kernel == "timelike_exp") &&
      !flat_type)
    throw std::invalid_argument(
        "scenario: time-like-distance kernels need a flat-type spacetime");
  if (m.kernel == "natural1d") return kernels::natural_kernel_1d();
  if (m.kernel == "constant") return kernels::constant_kernel(c);
  if (m.kernel == "timelike_const")
    return kernels::covariant_bounded_kernel(
        [c](double) { return fields::Complex(c, 0.0); }, std::abs(c),
        build_scale(sc), "timelike_const");
  if (m.kernel == "timelike_exp")
    return kernels::covariant_bounded_kernel(
        [c](double t) { return fields::Complex(c * std::exp(-t), 0.0); },
        std::abs(c), build_scale(sc), "timelike_exp");
  if (m.kernel == "inverse_spatial_const")
    return kernels::singular_kernel_flat3d(
        [c](const geometry::SpacetimePoint&, const geometry::SpacetimePoint&) {
          return fields::Complex(c, 0.0);
        },
        std::abs(c), "inverse_spatial_const");
  if (m.kernel == "inverse_sine_const")
    return kernels::singular_kernel_closed(
        [c](const geometry::SpacetimePoint&, const geometry::SpacetimePoint&) {
          return fields::Complex(c, 0.0);
        },
        std::abs(c), "inverse_sine_const");
  if (m.kernel == "sine_compensated")
    // bounded total kernel: f proportional to sin(s(q1,q2))
    return kernels::singular_kernel_closed(
        [c](const geometry::SpacetimePoint& x1,
            const geometry::SpacetimePoint& x2) {
          auto& q1 = std::get<geometry::SpherePoint>(x1.spatial);
          auto& q2 = std::get<geometry::SpherePoint>(x2.spatial);
          return fields::Complex(
              c * std::sin(geometry::geodesic_distance_s3(q1, q2)), 0.0);
        },
        std::abs(c), "sine_compensated");
  throw std::invalid_argument("scenario: unknown kernel '" + m.kernel + "'");
}

}  // namespace

solver::ModelSpec build_model(const Scenario& sc) {
  const auto& m = sc.model;
  fields::Complex lambda(m.lambda_re, m.lambda_im);
  if (m.spacetime == "minkowski")
    return solver::minkowski_model(m.d, build_kernel(sc), lambda, m.T, m.m1,
                                   m.m2);
  if (m.spacetime == "flat_flrw")
    return solver::flat_flrw_model(m.d, build_scale(sc), build_kernel(sc),
                                   lambda, m.T);
  if (m.spacetime == "open_flrw")
    return solver::open_flrw_model(build_scale(sc), build_kernel(sc), lambda,
                                   m.T);
  if (m.spacetime == "closed_flrw") {
    auto scale = build_scale(sc);
    return solver::closed_flrw_model(scale, build_kernel(sc), lambda);
  }
  throw std::invalid_argument("scenario: unknown spacetime '" + m.spacetime +
                              "'");
}

fields::GridPtr build_grid(const Scenario& sc) {
  const auto& m = sc.model;
  const auto& g = sc.grid;
  if (m.spacetime == "minkowski" || m.spacetime == "flat_flrw") {
    double L = g.L0 + m.T;  // retarded cones limit the domain of dependence
    return fields::make_flat_grid(m.d, m.T, g.n_t, L, g.n_x);
  }
  if (m.spacetime == "open_flrw")
    return fields::make_open_grid(m.T, g.n_t, g.L0 + m.T, g.n_shells,
                                  g.n_angular);
  if (m.spacetime == "closed_flrw")
    return fields::make_closed_grid(m.T, g.n_t, g.n_s3);
  throw std::invalid_argument("scenario: unknown spacetime '" + m.spacetime +
                              "'");
}

fields::MultiTimeField build_chi_free(const Scenario& sc,
                                      const fields::GridPtr& grid) {
  const auto& f = sc.free_field;
  const auto& m = sc.model;
  const bool flat = (m.spacetime == "minkowski" || m.spacetime == "flat_flrw");

  if (f.factory == "gaussian") {
    if (!flat || m.d != 1)
      throw std::invalid_argument(
          "scenario: the gaussian factory needs a d=1 flat-type model");
    auto mover = [](double sigma, double center) {
      return [sigma, center](double u) {
        double arg = (u - center) / sigma;
        return fields::Complex(std::exp(-0.5 * arg * arg), 0.0);
      };
    };
    auto phi1 = fields::dalembert_free_1d(mover(f.sigma1, f.center1), nullptr,
                                          grid->eta1, grid->space1);
    auto phi2 = fields::dalembert_free_1d(mover(f.sigma2, f.center2), nullptr,
                                          grid->eta2, grid->space2);
    return fields::product_free(phi1, phi2);  // d=1: chi = psi
  }
  if (f.factory == "plane_wave") {
    if (!flat)
      throw std::invalid_argument(
          "scenario: the plane_wave factory needs a flat-type model");
    auto phi1 = fields::plane_wave_free({f.k1, 0.0, 0.0}, m.d, grid->eta1,
                                        grid->space1);
    auto phi2 = fields::plane_wave_free({f.k2, 0.0, 0.0}, m.d, grid->eta2,
                                        grid->space2);
    if (m.spacetime == "flat_flrw") {
      auto scale = build_scale(sc);
      phi1 = fields::flrw_free_from_minkowski(std::move(phi1), scale, m.d);
      phi2 = fields::flrw_free_from_minkowski(std::move(phi2), scale, m.d);
      return solver::reduce_conformal(fields::product_free(phi1, phi2), scale,
                                      m.d);
    }
    return fields::product_free(phi1, phi2);
  }
  if (f.factory == "esu") {
    if (m.spacetime != "closed_flrw")
      throw std::invalid_argument(
          "scenario: the esu factory needs the closed universe");
    auto scale = build_scale(sc);
    auto phi1 = fields::esu_mode_closed(f.n1, f.axis1, grid->eta1,
                                        grid->space1, scale);
    auto phi2 = fields::esu_mode_closed(f.n2, f.axis2, grid->eta2,
                                        grid->space2, scale);
    return solver::reduce_conformal(fields::product_free(phi1, phi2), scale,
                                    3);
  }
  if (f.factory == "bump") {
    if (m.spacetime != "open_flrw")
      throw std::invalid_argument(
          "scenario: the bump factory targets the open universe");
    fields::MultiTimeField chi = fields::zero_field(grid);
    const auto& g = *grid;
    std::array<double, 4> origin{1.0, 0.0, 0.0, 0.0};
    for (std::size_t a1 = 0; a1 < g.eta1.size(); ++a1)
      for (std::size_t i1 = 0; i1 < g.space1.count(); ++i1) {
        double s1 = std::acosh(
            std::max(1.0, geometry::minkowski_dot4(origin, g.space1.nodes[i1])));
        for (std::size_t a2 = 0; a2 < g.eta2.size(); ++a2)
          for (std::size_t i2 = 0; i2 < g.space2.count(); ++i2) {
            double s2 = std::acosh(std::max(
                1.0, geometry::minkowski_dot4(origin, g.space2.nodes[i2])));
            double phase = g.eta1[a1] + g.eta2[a2];
            chi.at(a1, i1, a2, i2) =
                std::exp(-(s1 * s1 + s2 * s2)) *
                fields::Complex(std::cos(phase), -std::sin(phase));
          }
      }
    return chi;
  }
  throw std::invalid_argument("scenario: unknown free-field factory '" +
                              f.factory + "'");
}

}  // namespace mtve::cli
