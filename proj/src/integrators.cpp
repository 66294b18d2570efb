#include "phdae/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace phdae {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::ExplicitEuler:
      return "explicit_euler";
    case Scheme::ImplicitEuler:
      return "implicit_euler";
    case Scheme::Midpoint:
      return "midpoint";
    case Scheme::DiscreteGradient:
      return "discrete_gradient";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
  for (Scheme s : {Scheme::ExplicitEuler, Scheme::ImplicitEuler, Scheme::Midpoint,
                   Scheme::DiscreteGradient}) {
    if (name == to_string(s)) return s;
  }
  throw Error("unknown scheme '" + name + "'");
}

std::string SchemeConfig::label() const {
  if (scheme == Scheme::DiscreteGradient) return to_string(scheme) + "(" + to_string(dg_kind) + ")";
  return to_string(scheme);
}

void check_scheme_applicable(const SystemSpec& spec, const SchemeConfig& cfg) {
  if (cfg.scheme != Scheme::ExplicitEuler && cfg.scheme != Scheme::ImplicitEuler) return;
  const auto& p = spec.partition;
  if (p.n3 > 0) {
    std::ostringstream msg;
    msg << spec.name << ": " << to_string(cfg.scheme) << " needs an ODE but the system has "
        << p.n3 << " algebraic variables; regularize it first";
    throw IndexTooHigh(msg.str());
  }
  if (cfg.scheme == Scheme::ExplicitEuler && p.n1 > 0) {
    const Matrix block = (spec.structure.J - spec.structure.R).topLeftCorner(p.n1, p.n1);
    if (numkit::matrix_rank(block) < p.n1) {
      throw IndexTooHigh(spec.name + ": explicit_euler cannot resolve z1' because (J - R)_11 is singular");
    }
  }
}

namespace {

struct Solved {
  State next;
  Vector output;
  StepAudit audit;
};

Solved solve_step(const SystemSpec& spec, const SchemeConfig& cfg, double t, double tau,
                  const State& state) {
  const auto& p = spec.partition;
  const auto& h = spec.hamiltonian;
  const Matrix a = spec.structure.J - spec.structure.R;
  const Matrix& b = spec.structure.B;
  const Vector za = state.energy_variables();
  const Vector grad_a = h.gradient(za);

  double t_input = t + 0.5 * tau;
  if (cfg.scheme == Scheme::ExplicitEuler) t_input = t;
  if (cfg.scheme == Scheme::ImplicitEuler) t_input = t + tau;
  const Vector u = spec.input(t_input);
  const Vector bu = spec.m() > 0 ? Vector(b * u) : Vector::Zero(p.n());

  auto gradient_choice = [&](const Vector& zb) -> Vector {
    switch (cfg.scheme) {
      case Scheme::ExplicitEuler:
        return grad_a;
      case Scheme::ImplicitEuler:
        return h.gradient(zb);
      case Scheme::Midpoint:
        return h.gradient(0.5 * (za + zb));
      case Scheme::DiscreteGradient:
        return discrete_gradient(h, cfg.dg_kind, za, zb);
    }
    throw Error("unknown scheme");
  };

  // v and the gradient choice for unknowns x = (z1', z2', z3*).
  auto flow_at = [&](const Vector& x, Vector& g) {
    const Vector zb = x.head(p.n1 + p.n2);
    g = gradient_choice(zb);
    Vector v(p.n());
    v << (x.head(p.n1) - state.z1) / tau, g.tail(p.n2), x.tail(p.n3);
    return v;
  };

  auto residual = [&](const Vector& x) -> Vector {
    Vector g;
    const Vector v = flow_at(x, g);
    Vector lhs = Vector::Zero(p.n());
    lhs.head(p.n1) = g.head(p.n1);
    lhs.segment(p.n1, p.n2) = (x.segment(p.n1, p.n2) - state.z2) / tau;
    Vector r = lhs - a * v - bu;
    if (spec.resistive) r += spec.resistive(v);
    return r;
  };

  numkit::NewtonOptions opts;
  opts.tol = cfg.newton_tol;
  opts.max_iter = cfg.newton_max_iter;
  const numkit::NewtonResult nr = numkit::newton_solve(residual, std::nullopt, state.stacked(), opts);

  Solved out;
  out.next = State::from_stacked(p, nr.x);
  Vector g;
  const Vector v = flow_at(nr.x, g);
  out.output = spec.m() > 0 ? Vector(b.transpose() * v) : Vector();
  out.audit.energy_before = h.energy(za);
  out.audit.energy_after = out.audit.energy_before + h.energy_difference(za, out.next.energy_variables());
  out.audit.supply = spec.m() > 0 ? tau * out.output.dot(u) : 0.0;
  out.audit.dissipation = tau * dissipation_rate(spec, v);
  out.audit.newton_iters = nr.iterations;
  out.audit.newton_residual = nr.residual_norm;
  return out;
}

}  // namespace

StepResult step(const SystemSpec& spec, const SchemeConfig& cfg, double t, const State& state) {
  if (!(cfg.tau > 0.0)) throw Error("step: tau must be positive");
  if (!(cfg.newton_tol > 0.0)) throw Error("step: newton_tol must be positive");
  if (state.partition() != spec.partition) throw DimensionMismatch("step: state does not match partition");
  check_scheme_applicable(spec, cfg);

  try {
    Solved s = solve_step(spec, cfg, t, cfg.tau, state);
    return StepResult{std::move(s.next), std::move(s.output), s.audit};
  } catch (const NoConvergence& first) {
    try {
      const double half = 0.5 * cfg.tau;
      Solved a = solve_step(spec, cfg, t, half, state);
      Solved b = solve_step(spec, cfg, t + half, half, a.next);
      StepAudit audit;
      audit.energy_before = a.audit.energy_before;
      audit.energy_after = b.audit.energy_after;
      audit.supply = a.audit.supply + b.audit.supply;
      audit.dissipation = a.audit.dissipation + b.audit.dissipation;
      audit.newton_iters = a.audit.newton_iters + b.audit.newton_iters;
      audit.newton_residual = std::max(a.audit.newton_residual, b.audit.newton_residual);
      Vector y = a.output.size() > 0 ? Vector(0.5 * (a.output + b.output)) : Vector();
      return StepResult{std::move(b.next), std::move(y), audit};
    } catch (const NoConvergence&) {
    } catch (const SingularMatrix&) {
    }
    std::ostringstream msg;
    msg << spec.name << ": Newton failed at t = " << t << " (tau = " << cfg.tau
        << ", residual " << first.residual_norm() << " after " << first.iterations()
        << " iterations, half-step retry failed)";
    throw NewtonFailure(msg.str(), first.last_iterate(), first.residual_norm(), first.iterations());
  } catch (const SingularMatrix& e) {
    std::ostringstream msg;
    msg << spec.name << ": singular Newton matrix at t = " << t << ": " << e.what();
    throw NewtonFailure(msg.str(), state.stacked(), std::numeric_limits<double>::quiet_NaN(), 0);
  }
}

SimulationResult simulate(const SystemSpec& spec, const SchemeConfig& cfg, double t0,
                          double t_end, const State& initial) {
  if (!(t_end > t0)) throw Error("simulate: t_end must exceed t0");
  if (!(cfg.tau > 0.0)) throw Error("simulate: tau must be positive");
  if (initial.partition() != spec.partition) {
    throw DimensionMismatch("simulate: initial state does not match partition");
  }
  check_scheme_applicable(spec, cfg);

  const double span = t_end - t0;
  auto full_steps = static_cast<long long>(std::floor(span / cfg.tau * (1.0 + 1e-12)));
  const double remainder = span - static_cast<double>(full_steps) * cfg.tau;
  const bool partial = remainder > 1e-9 * cfg.tau;
  const long long total = full_steps + (partial ? 1 : 0);

  SimulationResult result;
  Trajectory& tr = result.trajectory;
  tr.times.reserve(total + 1);
  tr.states.reserve(total + 1);
  tr.times.push_back(t0);
  tr.states.push_back(initial);
  tr.energies.push_back(spec.hamiltonian.energy(initial.energy_variables()));
  tr.outputs.push_back(Vector::Zero(spec.m()));

  SchemeConfig local = cfg;
  State current = initial;
  for (long long k = 0; k < total; ++k) {
    const double t = t0 + static_cast<double>(k) * cfg.tau;
    const double t_next = (k + 1 == total) ? t_end : t0 + static_cast<double>(k + 1) * cfg.tau;
    local.tau = t_next - t;
    try {
      StepResult s = step(spec, local, t, current);
      current = std::move(s.next_state);
      tr.times.push_back(t_next);
      tr.states.push_back(current);
      tr.energies.push_back(s.audit.energy_after);
      tr.outputs.push_back(std::move(s.midpoint_output));
      tr.step_audits.push_back(s.audit);
    } catch (const NewtonFailure& e) {
      result.error = std::current_exception();
      result.error_message = e.what();
      break;
    } catch (const DomainError& e) {
      result.error = std::current_exception();
      result.error_message = e.what();
      break;
    }
  }
  return result;
}

}  // namespace phdae
