#include "gsc/problem_io.hpp"

#include <cmath>
#include <sstream>

#include "gsc/errors.hpp"

namespace gsc {

ControlProblem make_affine_quadratic(const AffineQuadraticSpec& c) {
  ControlProblem p;
  p.name = c.name;
  p.horizon = c.T;
  p.bounds = c.bounds;
  p.control_set = c.control;

  p.h = [c](double, double x, double u) { return c.h0 + c.hx * x + c.hu * u; };
  p.sigma = [c](double, double x, double u) { return c.s0 + c.sx * x + c.su * u; };
  p.g = [c](double, double x, double y, double z, double u) {
    return c.g0 + c.gx * x + c.gy * y + c.gz * z + c.gu * u + 0.5 * c.gxx * x * x +
           0.5 * c.guu * u * u;
  };
  p.terminal = [c](double x) { return c.p0 + c.px * x + 0.5 * c.pxx * x * x; };

  p.h_x = [c](double, double, double) { return c.hx; };
  p.h_u = [c](double, double, double) { return c.hu; };
  p.sigma_x = [c](double, double, double) { return c.sx; };
  p.sigma_u = [c](double, double, double) { return c.su; };
  p.g_x = [c](double, double x, double, double, double) { return c.gx + c.gxx * x; };
  p.g_y = [c](double, double, double, double, double) { return c.gy; };
  p.g_z = [c](double, double, double, double, double) { return c.gz; };
  p.g_u = [c](double, double, double, double, double u) { return c.gu + c.guu * u; };
  p.terminal_d = [c](double x) { return c.px + c.pxx * x; };

  p.sigma_is_zero = (c.s0 == 0.0 && c.sx == 0.0 && c.su == 0.0);

  // For an unbounded control set, F(u) is quadratic in u with curvature
  // su^2 a3 + guu; when the curvature is positive the minimizer is
  // closed-form. Flat/concave cases fall back to the clamp endpoints
  // (F linear or concave in u => boundary minimum). Interval and finite
  // sets keep the mesh search so ties break toward the smallest u.
  if (c.control.kind == ControlSet::Kind::Real) {
    p.argmin_F = [c, radius = c.control.clamp_radius](double, double x, double, double a2,
                                                      double a3) {
      const double curvature = c.su * c.su * a3 + c.guu;
      if (curvature > 1e-12) {
        const double linear = c.su * (c.s0 + c.sx * x) * a3 + c.hu * a2 + c.gz * c.su * a2 + c.gu;
        return -linear / curvature;
      }
      const double slope = 2.0 * c.su * (c.s0 + c.sx * x) * a3 + 2.0 * c.hu * a2 +
                           2.0 * (c.gz * c.su * a2 + c.gu);
      return slope >= 0.0 ? -radius : radius;
    };
  }

  p.require_valid();
  return p;
}

ControlProblem load_problem(const KeyValues& kv) {
  AffineQuadraticSpec c;
  c.name = kv.get_or("name", "problem");
  c.T = kv.get_num_or("T", 1.0);
  c.bounds.sigma_lo_sq = kv.get_num_or("sigma_lo_sq", 0.0);
  c.bounds.sigma_hi_sq = kv.get_num_or("sigma_hi_sq", 0.0);
  c.bounds.require_valid();

  const std::string control = kv.get_or("control", "");
  if (control.empty()) throw ConfigError("problem file: missing `control` key");
  std::istringstream in(control);
  std::string kind;
  in >> kind;
  std::string rest;
  std::getline(in, rest);
  if (kind == "interval") {
    const auto v = parse_number_list(rest);
    if (v.size() != 2) throw ConfigError("control = interval <lo> <hi>");
    c.control = ControlSet::interval(v[0], v[1]);
  } else if (kind == "finite") {
    c.control = ControlSet::finite(parse_number_list(rest));
  } else if (kind == "real") {
    const auto v = parse_number_list(rest);
    c.control = ControlSet::real_line(v.empty() ? 6.0 : v[0]);
  } else {
    throw ConfigError("problem file: unknown control kind `" + kind + "`");
  }

  auto fill = [&](const std::string& key, std::initializer_list<double*> slots) {
    if (!kv.has(key)) return;
    const auto v = kv.get_num_list(key);
    if (v.size() != slots.size())
      throw ConfigError("problem file: `" + key + "` expects " + std::to_string(slots.size()) +
                        " numbers");
    std::size_t i = 0;
    for (double* slot : slots) *slot = v[i++];
  };
  fill("h", {&c.h0, &c.hx, &c.hu});
  fill("sigma", {&c.s0, &c.sx, &c.su});
  fill("g", {&c.g0, &c.gx, &c.gy, &c.gz, &c.gu, &c.gxx, &c.guu});
  fill("phi", {&c.p0, &c.px, &c.pxx});

  return make_affine_quadratic(c);
}

ControlProblem load_problem_file(const std::string& path) {
  return load_problem(KeyValues::parse_file(path));
}

}  // namespace gsc
