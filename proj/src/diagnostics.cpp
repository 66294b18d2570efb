#include "phdae/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "phdae/transforms.hpp"

namespace phdae {

DissipationAudit audit_dissipation(const Trajectory& traj, double threshold) {
  if (traj.step_audits.empty()) throw Error("audit_dissipation: trajectory has no steps");
  DissipationAudit out;
  for (std::size_t k = 0; k < traj.step_audits.size(); ++k) {
    const StepAudit& a = traj.step_audits[k];
    const double v = a.energy_after - a.energy_before - a.supply;
    if (!(v <= out.max_violation)) out.max_violation = v;  // NaN propagates
    if (!(v <= threshold)) out.violating_steps.push_back(k);
    out.max_identity_defect = std::max(out.max_identity_defect, std::abs(a.identity_defect()));
    out.min_dissipation = std::min(out.min_dissipation, a.dissipation);
  }
  return out;
}

DecayFit fit_decay_rate(const Trajectory& traj, double window) {
  if (!(window > 0.0 && window <= 1.0)) throw Error("fit_decay_rate: window must lie in (0, 1]");
  const std::size_t n = traj.size();
  if (n < 2) throw Error("fit_decay_rate: need at least two samples");
  std::size_t first = n - static_cast<std::size_t>(std::ceil(window * static_cast<double>(n)));
  first = std::min(first, n - 2);

  double st = 0, sy = 0, stt = 0, sty = 0;
  const double cnt = static_cast<double>(n - first);
  std::vector<double> logs;
  for (std::size_t k = first; k < n; ++k) {
    const double h = traj.energies[k];
    if (!(h > 0.0)) {
      std::ostringstream msg;
      msg << "fit_decay_rate: energy " << h << " at t = " << traj.times[k] << " is not positive";
      throw NonPositiveEnergy(msg.str());
    }
    const double t = traj.times[k];
    const double y = std::log(h);
    logs.push_back(y);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double tm = st / cnt;
  const double ym = sy / cnt;
  const double sxx = stt - cnt * tm * tm;
  const double sxy = sty - cnt * tm * ym;
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;

  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t k = first; k < n; ++k) {
    const double y = logs[k - first];
    const double fit = ym + slope * (traj.times[k] - tm);
    ss_tot += (y - ym) * (y - ym);
    ss_res += (y - fit) * (y - fit);
  }
  DecayFit out;
  out.beta = -slope;
  // A flat log H (conservative run) has nothing to explain.
  const double flat = 1e-24 * cnt * (1.0 + ym * ym);
  out.r2 = ss_tot > flat ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 0.0;
  out.no_decay = out.beta <= 1e-6;

  const double h0 = traj.energies.front();
  const double t0 = traj.times.front();
  out.envelope_ratio = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double bound = h0 * std::exp(-out.beta * (traj.times[k] - t0));
    out.envelope_ratio = std::max(out.envelope_ratio, traj.energies[k] / bound);
  }
  out.envelope_holds = out.envelope_ratio <= 1.05;
  return out;
}

Matrix linear_ode_matrix(const SystemSpec& spec) {
  const auto& p = spec.partition;
  if (p.n3 > 0) throw ReferenceUnavailable(spec.name + ": closed form needs n3 = 0");
  if (spec.resistive) throw ReferenceUnavailable(spec.name + ": closed form needs a linear R");
  const auto& q = spec.hamiltonian.quadratic_form();
  if (!q) throw ReferenceUnavailable(spec.name + ": closed form needs a quadratic energy");
  const Matrix a = spec.structure.J - spec.structure.R;
  const Eigen::Index n1 = p.n1, n2 = p.n2;
  std::optional<numkit::LuFactorization> a11;
  if (n1 > 0) {
    try {
      a11.emplace(a.topLeftCorner(n1, n1));
    } catch (const SingularMatrix&) {
      throw ReferenceUnavailable(spec.name + ": closed form needs an invertible (J - R)_11");
    }
  }
  Matrix ode(n1 + n2, n1 + n2);
  for (Eigen::Index j = 0; j < n1 + n2; ++j) {
    const Vector g = q->col(j);
    Vector z1dot = Vector::Zero(n1);
    if (n1 > 0) z1dot = a11->solve(g.head(n1) - a.block(0, n1, n1, n2) * g.tail(n2));
    Vector col(n1 + n2);
    col << z1dot, a.block(n1, 0, n2, n1) * z1dot + a.block(n1, n1, n2, n2) * g.tail(n2);
    ode.col(j) = col;
  }
  return ode;
}

State closed_form_solution(const SystemSpec& spec, const State& initial, double t0, double t_end) {
  const Matrix ode = linear_ode_matrix(spec);
  if (spec.m() > 0) {
    for (int k = 0; k <= 8; ++k) {
      const double t = t0 + (t_end - t0) * k / 8.0;
      if (numkit::inf_norm(Vector(spec.structure.B * spec.input(t))) != 0.0) {
        throw ReferenceUnavailable(spec.name + ": closed form needs a vanishing input");
      }
    }
  }
  const Matrix prop = (ode * (t_end - t0)).exp();
  const Vector z = prop * initial.energy_variables();
  return State(z.head(spec.partition.n1), z.tail(spec.partition.n2), Vector());
}

OrderEstimate estimate_order(const SystemSpec& spec, const SchemeConfig& cfg, const State& initial,
                             double t0, double t_end, const std::vector<double>& taus,
                             ReferenceKind reference) {
  if (taus.size() < 3) throw Error("estimate_order: need at least 3 step sizes");
  for (std::size_t k = 0; k + 1 < taus.size(); ++k) {
    if (std::abs(taus[k] / taus[k + 1] - 2.0) > 1e-9) {
      throw Error("estimate_order: step sizes must halve successively");
    }
  }
  Vector ref;
  if (reference == ReferenceKind::ClosedForm) {
    ref = closed_form_solution(spec, initial, t0, t_end).energy_variables();
  } else {
    SchemeConfig fine = cfg;
    fine.tau = taus.back() / 16.0;
    const SimulationResult r = simulate(spec, fine, t0, t_end, initial);
    if (!r.ok()) throw ReferenceUnavailable("estimate_order: reference run failed: " + r.error_message);
    ref = r.trajectory.states.back().energy_variables();
  }

  OrderEstimate out;
  out.reference = reference;
  out.taus = taus;
  for (double tau : taus) {
    SchemeConfig c = cfg;
    c.tau = tau;
    const SimulationResult r = simulate(spec, c, t0, t_end, initial);
    if (!r.ok()) {
      out.errors.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    out.errors.push_back(
        numkit::inf_norm(Vector(r.trajectory.states.back().energy_variables() - ref)));
  }
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < out.errors.size(); ++k) {
    const double o = std::log2(out.errors[k] / out.errors[k + 1]);
    out.pair_orders.push_back(o);
    sum += o;
  }
  out.order = sum / static_cast<double>(out.pair_orders.size());
  return out;
}

Boundedness check_boundedness(const Trajectory& traj, double cap) {
  Boundedness out;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const Vector z = traj.states[k].stacked();
    const double norm = numkit::inf_norm(z);
    if (!std::isfinite(norm) || norm > cap) {
      out.bounded = false;
      out.diverged_step = k;
      out.max_norm = std::isfinite(norm) ? std::max(out.max_norm, norm) : norm;
      return out;
    }
    out.max_norm = std::max(out.max_norm, norm);
  }
  return out;
}

Plateau terminal_plateau(const Trajectory& traj) {
  if (traj.energies.empty()) throw Error("terminal_plateau: empty trajectory");
  const std::size_t n = traj.energies.size();
  const std::size_t first = n - std::max<std::size_t>(1, n / 10);
  const auto [lo, hi] = std::minmax_element(traj.energies.begin() + static_cast<long>(first),
                                            traj.energies.end());
  Plateau out;
  out.terminal_energy = traj.energies.back();
  out.last_decile_range = *hi - *lo;
  out.settled = out.last_decile_range <= 1e-6 * std::abs(traj.energies.front());
  return out;
}

double max_energy_increase(const Trajectory& traj) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < traj.energies.size(); ++k) {
    worst = std::max(worst, traj.energies[k + 1] - traj.energies[k]);
  }
  return worst;
}

double terminal_increment(const Trajectory& traj) {
  if (traj.states.size() < 2) throw Error("terminal_increment: need at least one step");
  const std::size_t n = traj.states.size();
  return numkit::inf_norm(
      Vector(traj.states[n - 1].energy_variables() - traj.states[n - 2].energy_variables()));
}

namespace {

Table1Row table1_row(const SystemSpec& spec, const SchemeConfig& cfg, double t_end,
                     const State& initial, const Trajectory& reference, std::size_t stride) {
  Table1Row row;
  row.scheme = cfg.label();
  const double inf = std::numeric_limits<double>::infinity();
  SimulationResult r;
  try {
    r = simulate(spec, cfg, 0.0, t_end, initial);
  } catch (const Error& e) {
    r.error_message = e.what();
    r.error = std::current_exception();
  }
  const Trajectory& tr = r.trajectory;
  bool finite = r.ok();
  for (double h : tr.energies) finite = finite && std::isfinite(h);
  if (!finite) {
    row.completed = false;
    row.failure = r.ok() ? "energy is not finite" : r.error_message;
    row.energy_balance_error = row.energy_accuracy_error = inf;
    row.probability_violation = row.entropy_violation = inf;
    return row;
  }
  row.completed = true;
  double cumulative = 0.0;
  double min_ds = inf;
  for (std::size_t k = 0; k < tr.step_audits.size(); ++k) {
    cumulative += tr.step_audits[k].identity_defect();
    row.energy_balance_error = std::max(row.energy_balance_error, std::abs(cumulative));
    min_ds = std::min(min_ds, tr.states[k + 1].z2(0) - tr.states[k].z2(0));
  }
  row.entropy_violation = std::max(0.0, -min_ds);
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    const State& s = tr.states[k];
    row.probability_violation = std::max(row.probability_violation, std::abs(s.z1(0) + s.z1(1) - 1.0));
    const std::size_t j = k * stride;
    if (j < reference.energies.size()) {
      row.energy_accuracy_error =
          std::max(row.energy_accuracy_error, std::abs(tr.energies[k] - reference.energies[j]));
    }
  }
  return row;
}

}  // namespace

Table1Grid table1_comparison(const QuantumThermoParams& p, double tau, double t_end,
                             const Table1Options& options) {
  if (!(tau > 0.0) || !(t_end > tau)) throw Error("table1_comparison: need 0 < tau < t_end");
  const SystemSpec spec = make_quantum_thermo(p);
  const State initial = quantum_thermo_state(p, options.rho11, options.rho22, options.S0);

  const double ref_tau = options.reference_tau > 0.0 ? options.reference_tau : tau / 16.0;
  const double ratio = tau / ref_tau;
  const auto stride = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(stride)) > 1e-9 * ratio || stride < 1) {
    throw Error("table1_comparison: reference_tau must divide tau");
  }
  SchemeConfig ref_cfg;
  ref_cfg.scheme = Scheme::DiscreteGradient;
  ref_cfg.tau = ref_tau;
  const SimulationResult ref = simulate(spec, ref_cfg, 0.0, t_end, initial);
  if (!ref.ok()) throw ReferenceUnavailable("table1_comparison: reference run failed: " + ref.error_message);

  Table1Grid grid;
  grid.tau = tau;
  grid.t_end = t_end;
  grid.epsilon = p.epsilon_reg;
  for (Scheme s : {Scheme::ExplicitEuler, Scheme::ImplicitEuler, Scheme::Midpoint,
                   Scheme::DiscreteGradient}) {
    SchemeConfig cfg;
    cfg.scheme = s;
    cfg.tau = tau;
    grid.rows.push_back(table1_row(spec, cfg, t_end, initial, ref.trajectory, stride));
  }
  const auto& r = grid.rows;
  grid.energy_ordering_holds = r[3].energy_balance_error <= r[2].energy_balance_error &&
                               r[2].energy_balance_error <= r[1].energy_balance_error &&
                               r[1].energy_balance_error <= r[0].energy_balance_error;
  grid.probability_bound_holds = r[3].probability_violation <= 10.0 * p.epsilon_reg;
  return grid;
}

double quantum_beta_formula(const QuantumThermoParams& p) {
  const double e_max = std::max(p.E1, p.E2);
  return std::min(p.Gamma / e_max, 1.0 / (p.alpha_heat * p.kB_T0));
}

DiagnosticsReport make_report(const Trajectory& traj, double boundedness_cap) {
  DiagnosticsReport report;
  if (!traj.step_audits.empty()) {
    const DissipationAudit audit = audit_dissipation(traj);
    report.max_dissipation_violation = audit.max_violation;
    report.max_identity_defect = audit.max_identity_defect;
  }
  if (traj.size() >= 2) {
    try {
      const DecayFit fit = fit_decay_rate(traj);
      report.decay_rate_beta = fit.beta;
      report.decay_fit_r2 = fit.r2;
      report.decay_envelope_holds = fit.envelope_holds;
    } catch (const NonPositiveEnergy&) {
    }
  }
  report.boundedness = check_boundedness(traj, boundedness_cap);
  if (!traj.empty()) report.plateau = terminal_plateau(traj);
  return report;
}

}  // namespace phdae
