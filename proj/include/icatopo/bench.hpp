#pragma once

#include "icatopo/assembly.hpp"
#include "icatopo/material.hpp"
#include "icatopo/mesh.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace icatopo {

/// One benchmark problem at a given resolution. Mechanisms are half models
/// cut along their symmetry line; loads and springs on that line are
/// already halved.
struct ProblemSpec {
  std::string name;
  double width = 0.0;
  double height = 0.0;
  double thickness = 1.0;
  int nx = 0;
  int ny = 0;
  double E = 0.0;
  double nu = 0.0;
  double load = 0.0;  // magnitude of the applied force
  double k_in = 0.0;  // spring stiffness at the input port (0: none)
  double k_out = 0.0;
  double volume_fraction = 0.0;
  double filter_radius = 0.0;  // element lengths
  bool compliance = true;
  bool linear = false;

  int canonical_nx = 0;
  int canonical_ny = 0;
  double canonical_filter_radius = 0.0;
};

ProblemSpec cantilever(double scale = 1.0);
ProblemSpec slender(double scale = 1.0);
ProblemSpec inverter(double scale = 1.0);
ProblemSpec gripper(double scale = 1.0);

/// Canonical problem by name. Throws std::invalid_argument.
ProblemSpec problem_by_name(std::string_view name);
/// Default small mesh per problem (cantilever 60x15, slender 120x15,
/// inverter 60x30, gripper 64x32).
ProblemSpec desk(std::string_view name);

/// Same physics on an nx-by-ny mesh. The filter radius scales with nx
/// relative to the canonical mesh, but not below 1.5 elements.
ProblemSpec with_mesh(const ProblemSpec& spec, int nx, int ny);
/// Meshes used for the refinement study, each with its own filter radius
/// (slender: 200x25 .. 800x100, inverter: 200x100 .. 500x250). Note that the
/// slender family uses 7.5 elements at 600x75 while the canonical problem
/// uses 5. Throws std::invalid_argument for other problems.
std::vector<ProblemSpec> refinement_family(std::string_view name);
/// Small-strain variant: K(rho) u = f.
ProblemSpec linear_mode(const ProblemSpec& spec);

/// Assembled problem data.
struct Problem {
  ProblemSpec spec;
  Mesh mesh;
  LoadCase loads;
  MaterialParams material;
  double volume_target;  // V*
};

Problem build(const ProblemSpec& spec);
Assembler make_assembler(const Problem& problem);

/// Flat key=value description, readable back through the CLI config.
std::map<std::string, std::string> to_config(const ProblemSpec& spec);
/// Applies recognised keys (problem, mesh, E, nu, thickness, load, k_in,
/// k_out, volume-fraction, filter-radius, linear) on top of `spec`.
ProblemSpec apply_config(ProblemSpec spec, const std::map<std::string, std::string>& kv);

}  // namespace icatopo
