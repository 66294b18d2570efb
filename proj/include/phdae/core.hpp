#pragma once

// The continuous model
//
//   [dH/dz1; z2'; 0] = (J - R) [z1'; dH/dz2; z3] + B u,   y = B^T [z1'; dH/dz2; z3].
//
// The stack w = [z1'; dH/dz2; z3] is called the flow vector everywhere below.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "phdae/hamiltonians.hpp"

namespace phdae {

struct StatePartition {
  Eigen::Index n1 = 0;
  Eigen::Index n2 = 0;
  Eigen::Index n3 = 0;

  Eigen::Index n() const { return n1 + n2 + n3; }
  bool operator==(const StatePartition&) const = default;
};

struct State {
  Vector z1;
  Vector z2;
  Vector z3;

  State() = default;
  State(Vector a, Vector b, Vector c) : z1(std::move(a)), z2(std::move(b)), z3(std::move(c)) {}

  static State zeros(const StatePartition& p);
  static State from_stacked(const StatePartition& p, const Vector& z);

  Vector stacked() const;
  /// [z1; z2], the arguments of H.
  Vector energy_variables() const;
  StatePartition partition() const { return {z1.size(), z2.size(), z3.size()}; }
};

struct StructureMatrices {
  Matrix J;
  Matrix R;
  Matrix B;  // n x m
};

struct InputSignal {
  Eigen::Index m = 0;
  std::function<Vector(double)> u;

  static InputSignal zero(Eigen::Index m);
  static InputSignal constant(Vector value);

  /// Throws DimensionMismatch or Error when u(t) has the wrong length or is not finite.
  Vector operator()(double t) const;
};

/// A state-dependent dissipative term r(w) added to the right-hand side as
/// -r(w). Must satisfy <w, r(w)> >= 0.
using ResistiveFn = std::function<Vector(const Vector& w)>;

/// Set on specs produced by regularize(): the last n3 entries of z2 hold
/// q = epsilon * z3 of the original system.
struct RegularizationInfo {
  double epsilon = 0.0;
  Eigen::Index n2_original = 0;
  Eigen::Index n3_original = 0;
};

struct SystemSpec {
  std::string name;
  StatePartition partition;
  StructureMatrices structure;
  HamiltonianModel hamiltonian;
  InputSignal input;
  ResistiveFn resistive;  // may be empty
  std::optional<RegularizationInfo> regularization;

  Eigen::Index n() const { return partition.n(); }
  Eigen::Index m() const { return structure.B.cols(); }
};

/// Throws DimensionMismatch when the blocks of `spec` do not fit together.
void check_dimensions(const SystemSpec& spec);

struct ValidationTolerances {
  double skew = 1e-12;
  double symmetry = 1e-12;
  double min_eigenvalue = -1e-10;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool valid() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate_structure(const StructureMatrices& s, const ValidationTolerances& tol = {});

/// Dimension checks plus validate_structure; throws ValidationError listing violations.
void require_valid(const SystemSpec& spec, const ValidationTolerances& tol = {});

/// y = B^T w.
Vector eval_output(const SystemSpec& spec, const Vector& flow);

Vector flow_vector(const SystemSpec& spec, const State& state, const Vector& z1dot);

/// [dH/dz1; z2'; 0] - (J - R) w + r(w) - B u(t). Zero iff the tuple solves the model.
Vector continuous_residual(const SystemSpec& spec, double t, const State& state,
                           const Vector& z1dot, const Vector& z2dot);

struct PowerBalance {
  double dH = 0.0;
  double supply = 0.0;
  double dissipation = 0.0;
};

/// supply = <y, u(t)>, dissipation = <w, R w> + <w, r(w)>, dH = supply - dissipation.
/// Throws Error when <w, J w> is not zero to 1e-12 relative.
PowerBalance power_balance_rate(const SystemSpec& spec, const Vector& flow, double t);

/// <w, R w> + <w, r(w)>.
double dissipation_rate(const SystemSpec& spec, const Vector& flow);

struct StepAudit {
  double energy_before = 0.0;
  double energy_after = 0.0;
  double supply = 0.0;       // tau <y, u>
  double dissipation = 0.0;  // tau (<v, R v> + <v, r(v)>)
  int newton_iters = 0;
  double newton_residual = 0.0;

  /// (H^{n+1} - H^n) - (supply - dissipation); zero for the structure-preserving schemes.
  double identity_defect() const { return (energy_after - energy_before) - (supply - dissipation); }
};

/// states, energies, times and outputs have one entry per grid point;
/// outputs[0] is zero (no step has produced a port output yet) and
/// step_audits has one entry per step.
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<double> energies;
  std::vector<Vector> outputs;
  std::vector<StepAudit> step_audits;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
};

}  // namespace phdae
