#include "icatopo/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace icatopo {

namespace {

int scaled(int n, double scale) { return std::max(1, static_cast<int>(std::lround(n * scale))); }

ProblemSpec finish(ProblemSpec s, double scale) {
  s.canonical_filter_radius = s.filter_radius;
  if (scale == 1.0) {
    s.nx = s.canonical_nx;
    s.ny = s.canonical_ny;
    return s;
  }
  return with_mesh(s, scaled(s.canonical_nx, scale), scaled(s.canonical_ny, scale));
}

// Point load at a boundary point, split linearly between the two nearest
// nodes when the point falls between them.
void add_point_load(const Mesh& m, LoadCase& lc, double x, double y, Axis dir, double magnitude) {
  const double fi = x / m.elem_w(), fj = y / m.elem_h();
  const auto snap = [](double f) { return std::abs(f - std::round(f)) < 1e-9; };
  if (snap(fi) && snap(fj)) {
    lc.loads.push_back({m.node_id(static_cast<int>(std::lround(fi)), static_cast<int>(std::lround(fj))), dir, magnitude});
    return;
  }
  if (!snap(fi) && !snap(fj)) throw std::invalid_argument("add_point_load: point is not on a grid line");
  if (snap(fi)) {
    const int i = static_cast<int>(std::lround(fi));
    const int j0 = static_cast<int>(std::floor(fj));
    const double t = fj - j0;
    lc.loads.push_back({m.node_id(i, j0), dir, (1.0 - t) * magnitude});
    lc.loads.push_back({m.node_id(i, j0 + 1), dir, t * magnitude});
  } else {
    const int j = static_cast<int>(std::lround(fj));
    const int i0 = static_cast<int>(std::floor(fi));
    const double t = fi - i0;
    lc.loads.push_back({m.node_id(i0, j), dir, (1.0 - t) * magnitude});
    lc.loads.push_back({m.node_id(i0 + 1, j), dir, t * magnitude});
  }
}

}  // namespace

ProblemSpec cantilever(double scale) {
  ProblemSpec s;
  s.name = "cantilever";
  s.width = 120.0;
  s.height = 30.0;
  s.thickness = 1.0;
  s.E = 3000.0;
  s.nu = 0.4;
  s.load = 120.0;
  s.volume_fraction = 0.5;
  s.filter_radius = 10.0;
  s.canonical_nx = 400;
  s.canonical_ny = 100;
  return finish(s, scale);
}

ProblemSpec slender(double scale) {
  ProblemSpec s;
  s.name = "slender";
  s.width = 400.0;
  s.height = 50.0;
  s.thickness = 1.0;
  s.E = 3000.0;
  s.nu = 0.3;
  s.load = 40.0;
  s.volume_fraction = 0.2;
  s.filter_radius = 5.0;
  s.canonical_nx = 600;
  s.canonical_ny = 75;
  return finish(s, scale);
}

ProblemSpec inverter(double scale) {
  ProblemSpec s;
  s.name = "inverter";
  s.width = 300.0;
  s.height = 150.0;
  s.thickness = 7.0;
  s.E = 180.0;
  s.nu = 0.3;
  s.load = 25.0;  // 50 mN on the full model
  s.k_in = 2.0;   // 4.0
  s.k_out = 0.5;  // 1.0
  s.volume_fraction = 0.2;
  s.filter_radius = 7.5;
  s.compliance = false;
  s.canonical_nx = 300;
  s.canonical_ny = 150;
  return finish(s, scale);
}

ProblemSpec gripper(double scale) {
  ProblemSpec s;
  s.name = "gripper";
  s.width = 320.0;
  s.height = 160.0;
  s.thickness = 7.0;
  s.E = 180.0;
  s.nu = 0.3;
  s.load = 2.0;  // 4 mN on the full model
  s.k_in = 0.1;  // 0.2
  s.k_out = 1.0;
  s.volume_fraction = 0.2;
  s.filter_radius = 5.0;
  s.compliance = false;
  s.canonical_nx = 320;
  s.canonical_ny = 160;
  return finish(s, scale);
}

ProblemSpec problem_by_name(std::string_view name) {
  if (name == "cantilever") return cantilever();
  if (name == "slender") return slender();
  if (name == "inverter") return inverter();
  if (name == "gripper") return gripper();
  throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
}

ProblemSpec desk(std::string_view name) {
  const ProblemSpec s = problem_by_name(name);
  if (name == "cantilever") return with_mesh(s, 60, 15);
  if (name == "slender") return with_mesh(s, 120, 15);
  if (name == "inverter") return with_mesh(s, 60, 30);
  return with_mesh(s, 64, 32);
}

ProblemSpec with_mesh(const ProblemSpec& spec, int nx, int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("with_mesh: element counts must be positive");
  ProblemSpec s = spec;
  s.nx = nx;
  s.ny = ny;
  if (nx == s.canonical_nx) {
    s.filter_radius = s.canonical_filter_radius;
  } else {
    s.filter_radius = std::max(1.5, s.canonical_filter_radius * nx / s.canonical_nx);
  }
  return s;
}

std::vector<ProblemSpec> refinement_family(std::string_view name) {
  struct Level {
    int nx, ny;
    double radius;
  };
  std::vector<Level> levels;
  if (name == "slender") levels = {{200, 25, 2.5}, {400, 50, 5.0}, {600, 75, 7.5}, {800, 100, 10.0}};
  else if (name == "inverter") levels = {{200, 100, 5.0}, {300, 150, 7.5}, {400, 200, 10.0}, {500, 250, 12.5}};
  else throw std::invalid_argument("refinement_family: no refinement study for '" + std::string(name) + "'");
  std::vector<ProblemSpec> out;
  for (const Level& l : levels) {
    ProblemSpec s = with_mesh(problem_by_name(name), l.nx, l.ny);
    s.filter_radius = l.radius;
    out.push_back(s);
  }
  return out;
}

ProblemSpec linear_mode(const ProblemSpec& spec) {
  ProblemSpec s = spec;
  s.linear = true;
  return s;
}

Problem build(const ProblemSpec& s) {
  Mesh mesh = build_grid(s.nx, s.ny, s.width, s.height, s.thickness);
  const double W = s.width, H = s.height;
  const double tol = 1e-9 * std::max(W, H);
  LoadCase lc;
  lc.compliance = s.compliance;

  if (s.name == "cantilever") {
    mesh = fix_region(mesh, [&](const Eigen::Vector2d& p) { return p.x() < tol; }, AxisSet::Both);
    add_point_load(mesh, lc, W, 0.5 * H, Axis::Y, -s.load);
  } else if (s.name == "slender") {
    mesh = fix_region(mesh, [&](const Eigen::Vector2d& p) { return p.x() < tol || p.x() > W - tol; }, AxisSet::Both);
    add_point_load(mesh, lc, 0.5 * W, 0.0, Axis::Y, -s.load);
  } else if (s.name == "inverter") {
    // Upper half, symmetry line y = 0. Input pushes left at the right end of
    // the symmetry line; the output port sits at its left end.
    const double L = W;
    mesh = fix_region(mesh, [&](const Eigen::Vector2d& p) { return p.y() < tol; }, AxisSet::Y);
    mesh = fix_region(
        mesh, [&](const Eigen::Vector2d& p) { return p.x() > W - tol && p.y() > H - L / 20.0 - tol; },
        AxisSet::Both);
    add_point_load(mesh, lc, W, 0.0, Axis::X, -s.load);
    const int in = mesh.nearest_node({W, 0.0});
    const int out = mesh.nearest_node({0.0, 0.0});
    lc.springs.push_back({in, Axis::X, s.k_in});
    lc.springs.push_back({out, Axis::X, s.k_out});
    lc.output_dofs.push_back(Mesh::dof(out, Axis::X));
  } else if (s.name == "gripper") {
    // Lower half, symmetry line y = H. The jaw tip closes upward.
    const double L = W;
    mesh = fix_region(mesh, [&](const Eigen::Vector2d& p) { return p.y() > H - tol; }, AxisSet::Y);
    mesh = fix_region(
        mesh, [&](const Eigen::Vector2d& p) { return p.x() < tol && p.y() < L / 20.0 + tol; }, AxisSet::Both);
    add_point_load(mesh, lc, 0.0, H, Axis::X, s.load);
    const int in = mesh.nearest_node({0.0, H});
    const int out = mesh.nearest_node({W, H - L / 10.0});
    lc.springs.push_back({in, Axis::X, s.k_in});
    lc.springs.push_back({out, Axis::Y, s.k_out});
    lc.output_dofs.push_back(Mesh::dof(out, Axis::Y));
  } else {
    throw std::invalid_argument("build: unknown problem '" + s.name + "'");
  }

  const double total = s.width * s.height * s.thickness;
  return Problem{s, std::move(mesh), std::move(lc), MaterialParams(s.E, s.nu), s.volume_fraction * total};
}

Assembler make_assembler(const Problem& pb) {
  return Assembler(pb.mesh, pb.loads, pb.material, pb.spec.linear ? Kinematics2D::Linear : Kinematics2D::Nonlinear);
}

namespace {

// Shortest text that reads back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

}  // namespace

std::map<std::string, std::string> to_config(const ProblemSpec& s) {
  return {{"problem", s.name},
          {"mesh", std::to_string(s.nx) + "x" + std::to_string(s.ny)},
          {"E", fmt(s.E)},
          {"nu", fmt(s.nu)},
          {"thickness", fmt(s.thickness)},
          {"load", fmt(s.load)},
          {"k_in", fmt(s.k_in)},
          {"k_out", fmt(s.k_out)},
          {"volume-fraction", fmt(s.volume_fraction)},
          {"filter-radius", fmt(s.filter_radius)},
          {"linear", s.linear ? "true" : "false"}};
}

ProblemSpec apply_config(ProblemSpec s, const std::map<std::string, std::string>& kv) {
  if (auto it = kv.find("problem"); it != kv.end()) s = problem_by_name(it->second);
  if (auto it = kv.find("mesh"); it != kv.end()) {
    int nx = 0, ny = 0;
    char x = 0, extra = 0;
    std::istringstream is(it->second);
    if (!(is >> nx >> x >> ny) || x != 'x' || is >> extra)
      throw std::invalid_argument("config: mesh must look like WxH, got '" + it->second + "'");
    s = with_mesh(s, nx, ny);
  }
  const auto num = [&](const char* key, double& field) {
    if (auto it = kv.find(key); it != kv.end()) field = to_double(key, it->second);
  };
  num("E", s.E);
  num("nu", s.nu);
  num("thickness", s.thickness);
  num("load", s.load);
  num("k_in", s.k_in);
  num("k_out", s.k_out);
  num("volume-fraction", s.volume_fraction);
  num("filter-radius", s.filter_radius);
  if (auto it = kv.find("linear"); it != kv.end()) {
    if (it->second == "true" || it->second == "1") s.linear = true;
    else if (it->second == "false" || it->second == "0") s.linear = false;
    else throw std::invalid_argument("config: linear expects true or false");
  }
  return s;
}

}  // namespace icatopo
