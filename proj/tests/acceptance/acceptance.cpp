// Prints one PASS/FAIL line per acceptance criterion and exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "../unit/fixtures.hpp"
#include "phdae/diagnostics.hpp"
#include "phdae/integrators.hpp"
#include "phdae/transforms.hpp"

namespace phdae {
namespace {

using testing::vec;

// Pinned tolerances.
constexpr double kNewtonTol = 1e-10;
constexpr double kDissipationTol = 10.0 * kNewtonTol;
constexpr double kIdentityTol = 1e-9;
constexpr double kRuntimeLimitSeconds = 60.0;
constexpr double kConservationTol = 1e-8;
constexpr double kOrderTol = 0.2;
constexpr double kSlopeTol = 0.3;
constexpr double kDecayRelTol = 0.05;
constexpr double kEnvelopeFactor = 1.05;
constexpr double kMassTol = 1e-10;
constexpr double kTerminalIncrementTol = 1e-8;
constexpr double kEntropyTol = 1e-9;
constexpr double kDecoupledTol = 1e-12;
constexpr double kAxiomTol = 1e-10;
constexpr double kBoundednessCap = 1e3;

const DiscreteGradientKind kKinds[] = {DiscreteGradientKind::Gonzalez, DiscreteGradientKind::ItohAbe};

SchemeConfig config(Scheme s, double tau, DiscreteGradientKind kind = DiscreteGradientKind::Gonzalez) {
  SchemeConfig c;
  c.scheme = s;
  c.tau = tau;
  c.dg_kind = kind;
  c.newton_tol = kNewtonTol;
  return c;
}

SchemeConfig dg(double tau, DiscreteGradientKind kind = DiscreteGradientKind::Gonzalez) {
  return config(Scheme::DiscreteGradient, tau, kind);
}

double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// least-squares slope of y against x
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

void note(Outcome& o, bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
void note(Outcome& o, bool ok, const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += buf;
  if (!ok) {
    o.pass = false;
    o.detail += " [FAIL]";
  }
}

Trajectory must_run(Outcome& o, const std::string& what, const SystemSpec& spec, const SchemeConfig& cfg,
                    double t_end, const State& s0) {
  const SimulationResult r = simulate(spec, cfg, 0.0, t_end, s0);
  if (!r.ok()) note(o, false, "%s stopped: %s", what.c_str(), r.error_message.c_str());
  return r.trajectory;
}

// Criteria 1 and 2 share their runs.
std::pair<Outcome, Outcome> dissipation_and_identity() {
  Outcome c1, c2;
  const auto start = std::chrono::steady_clock::now();
  double worst_violation = -INFINITY, worst_defect = 0.0;
  for (const auto& mc : testing::builtin_cases(64)) {
    for (DiscreteGradientKind kind : kKinds) {
      const Trajectory t = must_run(c1, mc.name, mc.spec, dg(0.05, kind), 50.0, mc.initial);
      if (t.step_audits.size() != 1000) {
        note(c1, false, "%s %s: %zu steps", mc.name.c_str(), to_string(kind).c_str(), t.step_audits.size());
        continue;
      }
      const DissipationAudit a = audit_dissipation(t, kDissipationTol);
      worst_violation = std::max(worst_violation, a.max_violation);
      worst_defect = std::max(worst_defect, a.max_identity_defect);
      if (a.max_violation > kDissipationTol)
        note(c1, false, "%s %s violation %.3g", mc.name.c_str(), to_string(kind).c_str(), a.max_violation);
      if (a.max_identity_defect > kIdentityTol)
        note(c2, false, "%s %s defect %.3g", mc.name.c_str(), to_string(kind).c_str(), a.max_identity_defect);
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  note(c1, worst_violation <= kDissipationTol, "max violation %.3g <= %.0e", worst_violation, kDissipationTol);
  note(c1, seconds < kRuntimeLimitSeconds, "runtime %.1f s < %.0f s", seconds, kRuntimeLimitSeconds);
  note(c2, worst_defect <= kIdentityTol, "max identity defect %.3g <= %.0e", worst_defect, kIdentityTol);
  return {c1, c2};
}

Outcome exact_conservation() {
  Outcome o;
  const Trajectory t = must_run(o, "pendulum", make_pendulum_system(), dg(0.1), 1000.0,
                                State(Vector(), vec({2.0, 0.5}), Vector()));
  double drift = 0.0;
  for (double h : t.energies) drift = std::max(drift, std::abs(h - t.energies.front()));
  note(o, t.step_audits.size() == 10000, "%zu steps", t.step_audits.size());
  note(o, drift <= kConservationTol, "max |H^n - H^0| = %.3g <= %.0e", drift, kConservationTol);
  return o;
}

Outcome orders() {
  Outcome o;
  const std::vector<double> taus{0.2, 0.1, 0.05, 0.025};
  const State s0(Vector(), vec({1.0, 0.0}), Vector());
  const std::pair<Scheme, double> expected[] = {{Scheme::ExplicitEuler, 1.0},
                                                {Scheme::ImplicitEuler, 1.0},
                                                {Scheme::Midpoint, 2.0},
                                                {Scheme::DiscreteGradient, 2.0}};
  for (const auto& [s, p] : expected) {
    const OrderEstimate e = estimate_order(make_harmonic_oscillator(), config(s, 0.1), s0, 0.0, 1.0, taus);
    note(o, std::abs(e.order - p) <= kOrderTol, "%s %.3f", to_string(s).c_str(), e.order);
  }
  return o;
}

Outcome regularization() {
  Outcome o;
  const MechanicalParams p = testing::constrained_mechanical_params();
  const SystemSpec raw = make_mechanical(p);
  const State s0 = mechanical_state(p, vec({1.0, 0.5}), vec({0.3, 0.3}));
  for (Scheme s : {Scheme::ExplicitEuler, Scheme::ImplicitEuler}) {
    bool rejected = false;
    try {
      check_scheme_applicable(raw, config(s, 1e-3));
    } catch (const IndexTooHigh&) {
      rejected = true;
    }
    const SystemSpec reg = regularize(raw, {1e-3});
    // explicit Euler needs tau well below eps on the stiff multiplier row
    const double tau = s == Scheme::ExplicitEuler ? 1e-4 : 1e-2;
    const SimulationResult r = simulate(reg, config(s, tau), 0.0, 0.1, to_regularized(reg, s0));
    note(o, rejected && r.ok(), "%s raw %s, regularized %s", to_string(s).c_str(),
         rejected ? "rejected" : "accepted", r.ok() ? "runs" : r.error_message.c_str());
  }

  const double t_end = 1.0, tau = 0.01;
  auto terminal = [&](double eps) {
    const SystemSpec reg = regularize(raw, {eps});
    const Trajectory t = must_run(o, "sweep", reg, dg(tau), t_end, to_regularized(reg, s0));
    return from_regularized(reg, t.states.back()).energy_variables();
  };
  const Vector reference = terminal(1e-8);
  std::vector<double> log_eps, log_err;
  double previous = INFINITY;
  bool monotone = true;
  std::string errors;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const double err = max_abs(terminal(eps) - reference);
    monotone = monotone && err < previous;
    previous = err;
    log_eps.push_back(std::log10(eps));
    log_err.push_back(std::log10(err));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.3g", errors.empty() ? "" : " ", err);
    errors += buf;
  }
  note(o, monotone, "terminal errors %s", errors.c_str());
  const double k = slope(log_eps, log_err);
  note(o, std::abs(k - 1.0) <= kSlopeTol, "slope %.3f", k);
  return o;
}

Outcome exponential_stability() {
  Outcome o;
  {
    const MechanicalParams p;
    Matrix a = Matrix::Zero(4, 4);
    a.topRightCorner(2, 2) = Matrix::Identity(2, 2);
    a.bottomLeftCorner(2, 2) = -p.M.inverse() * p.K;
    a.bottomRightCorner(2, 2) = -p.M.inverse() * p.D;
    Eigen::EigenSolver<Matrix> es(a);
    const double oracle = 2.0 * es.eigenvalues().real().cwiseAbs().minCoeff();
    const Trajectory t = must_run(o, "mechanical", make_mechanical(p), dg(0.05), 100.0,
                                  mechanical_state(p, vec({1.0, 0.5}), vec({0.0, 0.0})));
    const DecayFit f = fit_decay_rate(t);
    note(o, std::abs(f.beta - oracle) <= kDecayRelTol * oracle, "mechanical beta %.4f vs %.4f", f.beta, oracle);
    note(o, f.envelope_ratio <= kEnvelopeFactor, "envelope %.4f", f.envelope_ratio);
  }
  {
    const PoroelasticParams p = testing::coupled_poroelastic_params();
    const Matrix s = p.C + p.D * p.A.inverse() * p.D.transpose();
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(p.Bflow, s);
    const double oracle = 2.0 * ges.eigenvalues().minCoeff();
    const Trajectory t = must_run(o, "poroelastic", make_poroelastic(p), dg(0.05), 20.0,
                                  poroelastic_state(p, vec({1.0, -0.5})));
    const DecayFit f = fit_decay_rate(t);
    note(o, std::abs(f.beta - oracle) <= kDecayRelTol * oracle, "poroelastic beta %.4f vs %.4f", f.beta, oracle);
    note(o, f.envelope_ratio <= kEnvelopeFactor, "envelope %.4f", f.envelope_ratio);
  }
  return o;
}

Outcome long_time() {
  Outcome o;
  {
    const CahnHilliard1DParams p;  // N = 64
    const Trajectory t = must_run(o, "cahn_hilliard", make_cahn_hilliard_1d(p), dg(1.0), 500.0,
                                  cahn_hilliard_two_phase_state(p, 1));
    const double h = p.L / p.N;
    double drift = 0.0;
    for (const State& s : t.states) drift = std::max(drift, h * std::abs(s.z1.sum() - t.states.front().z1.sum()));
    const double rise = max_energy_increase(t);
    note(o, rise <= kDissipationTol, "max energy increase %.3g", rise);
    note(o, drift <= kMassTol, "mass drift %.3g", drift);
    const double inc = terminal_increment(t);
    note(o, inc <= kTerminalIncrementTol, "terminal increment %.3g", inc);
  }
  {
    CircuitParams p = default_circuit_params();
    p.u_S = InputSignal{1, [](double t) { return vec({std::sin(t)}); }};
    const SystemSpec spec = make_circuit(p);
    const Trajectory t = must_run(o, "circuit", spec, dg(0.05), 500.0,
                                  State(vec({0.5}), vec({0.2}), Vector::Zero(spec.partition.n3)));
    const Boundedness b = check_boundedness(t, kBoundednessCap);
    note(o, b.bounded && t.step_audits.size() == 10000, "circuit %zu steps, sup-norm %.3g",
         t.step_audits.size(), b.max_norm);
  }
  return o;
}

Outcome quantum() {
  Outcome o;
  std::vector<double> log_eps, log_err;
  for (double eps : {1e-3, 1e-4, 1e-5}) {
    QuantumThermoParams p;
    p.epsilon_reg = eps;
    const Trajectory t = must_run(o, "quantum", make_quantum_thermo(p), dg(0.1), 20.0,
                                  quantum_thermo_state(p, 0.2, 0.8, 0.3));
    double v = 0.0;
    for (const State& s : t.states) v = std::max(v, std::abs(s.z1(0) + s.z1(1) - 1.0));
    log_eps.push_back(std::log10(eps));
    log_err.push_back(std::log10(v));
  }
  const double k = slope(log_eps, log_err);
  note(o, std::abs(k - 1.0) <= kSlopeTol, "probability slope %.3f", k);

  const QuantumThermoParams p;
  const Trajectory t = must_run(o, "quantum", make_quantum_thermo(p), dg(0.1), 100.0,
                                quantum_thermo_state(p, 0.2, 0.8, 0.3));
  double worst = INFINITY;
  for (std::size_t n = 1; n < t.size(); ++n) worst = std::min(worst, t.states[n].z2(0) - t.states[n - 1].z2(0));
  note(o, worst >= -kEntropyTol, "min entropy increment %.3g", worst);

  const Table1Grid g = table1_comparison(p, 0.1, 100.0);
  std::string row;
  for (const Table1Row& r : g.rows) {
    char buf[96];
    if (r.completed)
      std::snprintf(buf, sizeof buf, "%s%s=%.3g", row.empty() ? "" : " ", r.scheme.c_str(), r.energy_balance_error);
    else
      std::snprintf(buf, sizeof buf, "%s%s=failed", row.empty() ? "" : " ", r.scheme.c_str());
    row += buf;
  }
  note(o, g.energy_ordering_holds, "energy balance errors %s", row.c_str());
  return o;
}

SystemSpec random_system(std::mt19937_64& rng, int ports) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_int_distribution<int> dim(0, 2);
  const Eigen::Index n1 = dim(rng), n2 = 1 + dim(rng), n3 = dim(rng);
  const Eigen::Index n = n1 + n2 + n3;
  auto random = [&](Eigen::Index r, Eigen::Index c) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = unif(rng);
    return m;
  };
  const Matrix a = random(n, n), g = random(n, n), b = random(n, ports), q = random(n1 + n2, n1 + n2);
  return make_linear_system({n1, n2, n3}, q * q.transpose() + Matrix::Identity(n1 + n2, n1 + n2),
                            a - a.transpose(), g * g.transpose(), b);
}

Outcome interconnection() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  int valid = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int ma = 1 + trial % 2, mb = 1 + (trial / 2) % 2, m = ma + mb;
    const SystemSpec a = random_system(rng, ma);
    const SystemSpec b = random_system(rng, mb);
    Matrix s(m, m), g(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        s(i, j) = unif(rng);
        g(i, j) = unif(rng);
      }
    try {
      const SystemSpec c = interconnect(a, b, {s - s.transpose(), g * g.transpose()});
      if (validate_structure(c.structure).valid()) ++valid;
    } catch (const Error&) {
    }
  }
  note(o, valid == 1000, "%d/1000 couplings valid", valid);

  // F = 0: a ported oscillator with a sinusoidal input next to the constrained mechanical model
  Matrix q(2, 2), j(2, 2), bp(2, 1);
  q << 1, 0, 0, 1;
  j << 0, 1, -1, 0;
  bp << 0, 1;
  const SystemSpec a = make_linear_system({0, 2, 0}, q, j, Matrix::Zero(2, 2), bp,
                                          InputSignal{1, [](double t) { return vec({std::sin(t)}); }});
  const MechanicalParams mp = testing::constrained_mechanical_params();
  const SystemSpec b = make_mechanical(mp);
  const Eigen::Index m = a.m() + b.m();
  const SystemSpec c = interconnect(a, b, {Matrix::Zero(m, m), Matrix::Zero(m, m)});
  const State sa(Vector(), vec({1.0, 0.0}), Vector());
  const State sb = mechanical_state(mp, vec({1.0, 0.5}), vec({0.3, 0.3}));
  const Trajectory ta = must_run(o, "a", a, dg(0.05), 5.0, sa);
  const Trajectory tb = must_run(o, "b", b, dg(0.05), 5.0, sb);
  const Trajectory tc = must_run(o, "coupled", c, dg(0.05), 5.0, join_interconnected(sa, sb));
  double diff = tc.size() == ta.size() ? 0.0 : INFINITY;
  for (std::size_t k = 0; k < std::min(tc.size(), ta.size()); ++k) {
    const auto [xa, xb] = split_interconnected(a, b, tc.states[k]);
    diff = std::max({diff, max_abs(xa.stacked() - ta.states[k].stacked()),
                     max_abs(xb.stacked() - tb.states[k].stacked())});
  }
  note(o, diff <= kDecoupledTol, "F = 0 deviation %.3g", diff);
  return o;
}

Outcome axioms() {
  Outcome o;
  std::vector<std::pair<std::string, std::pair<HamiltonianModel, Vector>>> cases;
  for (const auto& mc : testing::builtin_cases(64)) {
    cases.push_back({mc.name, {mc.spec.hamiltonian, mc.initial.energy_variables()}});
  }
  cases.push_back({"pendulum", {make_pendulum(), vec({0.0, 0.0})}});
  double worst_energy = 0.0;
  for (const auto& [name, hc] : cases) {
    const auto& [h, center] = hc;
    // keep the quantum probes inside S > 0
    const double radius = name == "quantum_thermo" ? 0.1 : 1.0;
    for (DiscreteGradientKind kind : kKinds) {
      const auto r = check_discrete_gradient_axioms(h, kind, 1000, {center, radius});
      worst_energy = std::max(worst_energy, r.max_energy_violation);
      if (r.max_energy_violation > kAxiomTol || r.max_consistency_violation > kAxiomTol)
        note(o, false, "%s %s energy %.3g consistency %.3g", name.c_str(), to_string(kind).c_str(),
             r.max_energy_violation, r.max_consistency_violation);

      // consistency limit along a random direction
      std::mt19937_64 rng(11);
      std::normal_distribution<double> normal;
      Vector dir(h.size());
      for (Eigen::Index i = 0; i < dir.size(); ++i) dir(i) = normal(rng);
      dir /= dir.norm();
      const Vector exact = h.gradient(center);
      const double scale = 1.0 + max_abs(exact);
      const double e6 = max_abs(discrete_gradient(h, kind, center, center + 1e-6 * dir) - exact) / scale;
      const double e8 = max_abs(discrete_gradient(h, kind, center, center + 1e-8 * dir) - exact) / scale;
      if (!(e6 <= 1e-4 && e8 <= std::max(e6, 1e-7)))
        note(o, false, "%s %s consistency %.3g at 1e-6, %.3g at 1e-8", name.c_str(), to_string(kind).c_str(), e6, e8);
    }
  }
  note(o, worst_energy <= kAxiomTol, "%zu Hamiltonians x 2 kinds, max energy identity error %.3g",
       cases.size(), worst_energy);
  return o;
}

}  // namespace
}  // namespace phdae

int main() {
  using phdae::Outcome;
  std::vector<std::pair<int, std::function<Outcome()>>> criteria;
  Outcome c1, c2;
  criteria.emplace_back(1, [&] {
    std::tie(c1, c2) = phdae::dissipation_and_identity();
    return c1;
  });
  criteria.emplace_back(2, [&] { return c2; });
  criteria.emplace_back(3, phdae::exact_conservation);
  criteria.emplace_back(4, phdae::orders);
  criteria.emplace_back(5, phdae::regularization);
  criteria.emplace_back(6, phdae::exponential_stability);
  criteria.emplace_back(7, phdae::long_time);
  criteria.emplace_back(8, phdae::quantum);
  criteria.emplace_back(9, phdae::interconnection);
  criteria.emplace_back(10, phdae::axioms);

  int failures = 0;
  for (auto& [id, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("criterion %d: %s - %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
