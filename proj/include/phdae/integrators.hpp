#pragma once

// One-step schemes for SystemSpec.
//
// Every scheme solves, after dividing through by tau,
//
//   [g1; (z2' - z2)/tau; 0] = (J - R) v - r(v) + B u*,   v = [(z1' - z1)/tau; g2; z3*]
//
// for (z1', z2', z3*) by Newton's method, where g = [g1; g2] is
//   ExplicitEuler     grad H(z^n),            u* = u(t)
//   ImplicitEuler     grad H(z^{n+1}),        u* = u(t + tau)
//   Midpoint          grad H((z^n+z^{n+1})/2), u* = u(t + tau/2)
//   DiscreteGradient  a discrete gradient,    u* = u(t + tau/2)
// z3* is the half-step multiplier and is what the trajectory reports for z3.

#include <exception>
#include <optional>
#include <string>

#include "phdae/core.hpp"

namespace phdae {

enum class Scheme { ExplicitEuler, ImplicitEuler, Midpoint, DiscreteGradient };

std::string to_string(Scheme scheme);
/// Accepts the names produced by to_string; throws Error otherwise.
Scheme scheme_from_string(const std::string& name);

struct SchemeConfig {
  Scheme scheme = Scheme::DiscreteGradient;
  DiscreteGradientKind dg_kind = DiscreteGradientKind::Gonzalez;
  double tau = 0.01;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;

  /// "discrete_gradient(gonzalez)" etc.
  std::string label() const;
};

struct StepResult {
  State next_state;
  Vector midpoint_output;  // y* = B^T v
  StepAudit audit;
};

/// Throws IndexTooHigh when an Euler scheme meets n3 > 0, or explicit Euler
/// meets a singular (J - R)_11 block.
void check_scheme_applicable(const SystemSpec& spec, const SchemeConfig& cfg);

/// Advances one step. A failed Newton solve is retried once as two half steps
/// before NewtonFailure is thrown.
StepResult step(const SystemSpec& spec, const SchemeConfig& cfg, double t, const State& state);

struct SimulationResult {
  Trajectory trajectory;
  /// Set when a step raised NewtonFailure or DomainError; the trajectory
  /// then holds every step completed before it.
  std::exception_ptr error;
  std::string error_message;

  bool ok() const { return !error; }
};

/// Uniform grid t0 + k tau with a final shorter step when (t_end - t0)/tau is
/// not an integer.
SimulationResult simulate(const SystemSpec& spec, const SchemeConfig& cfg, double t0,
                          double t_end, const State& initial);

}  // namespace phdae
