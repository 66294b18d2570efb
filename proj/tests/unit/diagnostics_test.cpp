#include "phdae/diagnostics.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"

namespace phdae {
namespace {

using testing::vec;

SchemeConfig scheme(Scheme s, double tau) {
  SchemeConfig c;
  c.scheme = s;
  c.tau = tau;
  return c;
}

const State kOscillatorStart(Vector(), vec({1.0, 0.0}), Vector());

Trajectory run(const SystemSpec& spec, Scheme s, double tau, double t_end, const State& start) {
  const SimulationResult r = simulate(spec, scheme(s, tau), 0.0, t_end, start);
  EXPECT_TRUE(r.ok()) << r.error_message;
  return r.trajectory;
}

TEST(AuditDissipation, ConservativeRunIsExact) {
  const Trajectory t = run(make_harmonic_oscillator(), Scheme::DiscreteGradient, 0.1, 10.0, kOscillatorStart);
  const DissipationAudit a = audit_dissipation(t);
  EXPECT_LE(a.max_violation, 1e-9);
  EXPECT_GE(a.max_violation, -1e-9);
  EXPECT_TRUE(a.violating_steps.empty());
}

TEST(AuditDissipation, DampedRunHasNonnegativeDissipation) {
  const Trajectory t = run(make_harmonic_oscillator(0.4), Scheme::Midpoint, 0.1, 10.0, kOscillatorStart);
  const DissipationAudit a = audit_dissipation(t);
  EXPECT_LE(a.max_violation, 1e-9);
  EXPECT_GE(a.min_dissipation, 0.0);
  for (const StepAudit& s : t.step_audits) EXPECT_GE(s.dissipation, 0.0);
}

TEST(AuditDissipation, ExplicitEulerGrowthReported) {
  const double tau = 0.1;
  const Trajectory t = run(make_harmonic_oscillator(), Scheme::ExplicitEuler, tau, 1.0, kOscillatorStart);
  const DissipationAudit a = audit_dissipation(t);
  ASSERT_EQ(a.violating_steps.size(), t.step_audits.size());
  // H grows by tau^2 H per step; the last step has the largest H
  const double h_last = t.energies[t.energies.size() - 2];
  EXPECT_NEAR(a.max_violation, tau * tau * h_last, 1e-12);
  EXPECT_NEAR(a.max_violation, 0.5 * tau * tau * std::pow(1.0 + tau * tau, 9), 1e-12);
}

TEST(AuditDissipation, EmptyTrajectoryThrows) {
  EXPECT_THROW(audit_dissipation(Trajectory{}), Error);
}

TEST(FitDecayRate, ScalarRelaxation) {
  const double r = 0.5;
  const SystemSpec spec = make_linear_system({0, 1, 0}, Matrix::Identity(1, 1), Matrix::Zero(1, 1),
                                             Matrix::Constant(1, 1, r), Matrix::Zero(1, 0));
  const Trajectory t = run(spec, Scheme::DiscreteGradient, 0.01, 10.0, State(Vector(), vec({1.0}), Vector()));
  const DecayFit fit = fit_decay_rate(t);
  EXPECT_NEAR(fit.beta, 2.0 * r, 0.01 * 2.0 * r);
  EXPECT_GT(fit.r2, 0.999);
  EXPECT_LE(fit.r2, 1.0);
  EXPECT_TRUE(fit.envelope_holds);
  EXPECT_FALSE(fit.no_decay);
}

TEST(FitDecayRate, ConservativeRunFlagsNoDecay) {
  const Trajectory t = run(make_harmonic_oscillator(), Scheme::DiscreteGradient, 0.1, 20.0, kOscillatorStart);
  const DecayFit fit = fit_decay_rate(t);
  EXPECT_NEAR(fit.beta, 0.0, 1e-6);
  EXPECT_TRUE(fit.no_decay);
  EXPECT_GE(fit.r2, 0.0);
  EXPECT_LE(fit.r2, 1.0);
}

TEST(FitDecayRate, NonPositiveEnergyThrows) {
  const Trajectory t = run(make_harmonic_oscillator(), Scheme::DiscreteGradient, 0.1, 1.0,
                           State(Vector(), vec({0.0, 0.0}), Vector()));
  EXPECT_THROW(fit_decay_rate(t), NonPositiveEnergy);
  EXPECT_THROW(fit_decay_rate(t, 0.0), Error);
}

TEST(ClosedForm, RotationOfOscillator) {
  const State s = closed_form_solution(make_harmonic_oscillator(), kOscillatorStart, 0.0, 1.3);
  EXPECT_NEAR(s.z2(0), std::cos(1.3), 1e-13);
  EXPECT_NEAR(s.z2(1), -std::sin(1.3), 1e-13);
}

TEST(ClosedForm, UnavailableCases) {
  const SystemSpec constrained = make_mechanical(testing::constrained_mechanical_params());
  const State s = State::zeros(constrained.partition);
  EXPECT_THROW(closed_form_solution(constrained, s, 0.0, 1.0), ReferenceUnavailable);
  EXPECT_THROW(closed_form_solution(make_pendulum_system(), kOscillatorStart, 0.0, 1.0), ReferenceUnavailable);
  const SystemSpec circuit = make_circuit(default_circuit_params());
  EXPECT_THROW(closed_form_solution(circuit, State::zeros(circuit.partition), 0.0, 1.0), ReferenceUnavailable);
}

TEST(EstimateOrder, MidpointAndImplicitEuler) {
  const std::vector<double> taus{0.2, 0.1, 0.05};
  const OrderEstimate mp =
      estimate_order(make_harmonic_oscillator(), scheme(Scheme::Midpoint, 0.1), kOscillatorStart, 0.0, 1.0, taus);
  EXPECT_NEAR(mp.order, 2.0, 0.2);
  EXPECT_EQ(mp.reference, ReferenceKind::ClosedForm);
  ASSERT_EQ(mp.errors.size(), 3u);
  ASSERT_EQ(mp.pair_orders.size(), 2u);
  const OrderEstimate ie = estimate_order(make_harmonic_oscillator(), scheme(Scheme::ImplicitEuler, 0.1),
                                          kOscillatorStart, 0.0, 1.0, taus);
  EXPECT_NEAR(ie.order, 1.0, 0.2);
}

TEST(EstimateOrder, GonzalezMatchesMidpointOnQuadraticEnergy) {
  const std::vector<double> taus{0.2, 0.1, 0.05};
  const SystemSpec spec = make_harmonic_oscillator(0.3);
  const OrderEstimate mp = estimate_order(spec, scheme(Scheme::Midpoint, 0.1), kOscillatorStart, 0.0, 1.0, taus);
  const OrderEstimate dg =
      estimate_order(spec, scheme(Scheme::DiscreteGradient, 0.1), kOscillatorStart, 0.0, 1.0, taus);
  for (std::size_t k = 0; k < taus.size(); ++k) EXPECT_NEAR(mp.errors[k], dg.errors[k], 1e-9);
}

TEST(EstimateOrder, FinestReferenceForNonlinearModels) {
  const OrderEstimate e = estimate_order(make_pendulum_system(), scheme(Scheme::DiscreteGradient, 0.1),
                                         State(Vector(), vec({1.0, 0.0}), Vector()), 0.0, 2.0,
                                         {0.2, 0.1, 0.05}, ReferenceKind::Finest);
  EXPECT_EQ(e.reference, ReferenceKind::Finest);
  EXPECT_NEAR(e.order, 2.0, 0.2);
}

TEST(EstimateOrder, BadStepLists) {
  const auto spec = make_harmonic_oscillator();
  EXPECT_THROW(estimate_order(spec, scheme(Scheme::Midpoint, 0.1), kOscillatorStart, 0.0, 1.0, {0.1, 0.05}), Error);
  EXPECT_THROW(estimate_order(spec, scheme(Scheme::Midpoint, 0.1), kOscillatorStart, 0.0, 1.0, {0.1, 0.07, 0.05}),
               Error);
}

TEST(LongTime, BoundednessDetectsDivergence) {
  const Trajectory ok = run(make_harmonic_oscillator(), Scheme::DiscreteGradient, 0.1, 10.0, kOscillatorStart);
  const Boundedness b = check_boundedness(ok, 10.0);
  EXPECT_TRUE(b.bounded);
  EXPECT_NEAR(b.max_norm, 1.0, 1e-9);
  // explicit Euler at tau = 1 doubles H every step
  const Trajectory bad = run(make_harmonic_oscillator(), Scheme::ExplicitEuler, 1.0, 20.0, kOscillatorStart);
  const Boundedness d = check_boundedness(bad, 100.0);
  EXPECT_FALSE(d.bounded);
  ASSERT_TRUE(d.diverged_step.has_value());
  // |z| = 2^{k/2} first exceeds 100 at k = 14
  EXPECT_EQ(*d.diverged_step, 14u);
}

TEST(LongTime, CircuitUnderSinusoidalSourceStaysBounded) {
  CircuitParams p = default_circuit_params();
  p.u_S = InputSignal{1, [](double t) { return vec({std::sin(t)}); }};
  const SystemSpec spec = make_circuit(p);
  const Trajectory t =
      run(spec, Scheme::DiscreteGradient, 0.05, 100.0, State(vec({0.5}), vec({0.2}), Vector::Zero(spec.partition.n3)));
  EXPECT_TRUE(check_boundedness(t, 10.0).bounded);
}

TEST(LongTime, PlateauOfDissipativeRun) {
  const Trajectory t = run(make_harmonic_oscillator(0.5), Scheme::DiscreteGradient, 0.1, 100.0, kOscillatorStart);
  const Plateau p = terminal_plateau(t);
  EXPECT_TRUE(p.settled);
  EXPECT_LE(p.last_decile_range, 1e-6 * t.energies.front());
  EXPECT_LE(max_energy_increase(t), 1e-9);
  const Trajectory short_run = run(make_harmonic_oscillator(0.5), Scheme::DiscreteGradient, 0.1, 5.0, kOscillatorStart);
  EXPECT_FALSE(terminal_plateau(short_run).settled);
}

TEST(LongTime, TerminalIncrement) {
  const Trajectory t = run(make_harmonic_oscillator(), Scheme::Midpoint, 0.1, 0.2, kOscillatorStart);
  const Vector d = t.states[2].stacked() - t.states[1].stacked();
  EXPECT_DOUBLE_EQ(terminal_increment(t), d.cwiseAbs().maxCoeff());
}

TEST(Table1, OrderingAndBounds) {
  const QuantumThermoParams p;
  const Table1Grid g = table1_comparison(p, 0.1, 100.0);
  ASSERT_EQ(g.rows.size(), 4u);
  EXPECT_EQ(g.rows[0].scheme, "explicit_euler");
  EXPECT_EQ(g.rows[3].scheme.rfind("discrete_gradient", 0), 0u);
  EXPECT_TRUE(g.energy_ordering_holds);
  EXPECT_TRUE(g.probability_bound_holds);
  const Table1Row& dg = g.rows[3];
  const Table1Row& ee = g.rows[0];
  EXPECT_TRUE(dg.completed);
  EXPECT_LE(10.0 * dg.energy_balance_error, ee.energy_balance_error);
  EXPECT_LE(dg.entropy_violation, 1e-9);
}

TEST(Table1, ProbabilityViolationHalvesWithEpsilon) {
  QuantumThermoParams p;
  p.epsilon_reg = 1e-3;
  const double v1 = table1_comparison(p, 0.1, 20.0).rows[3].probability_violation;
  p.epsilon_reg = 5e-4;
  const double v2 = table1_comparison(p, 0.1, 20.0).rows[3].probability_violation;
  EXPECT_NEAR(v1 / v2, 2.0, 0.4);
}

TEST(Table1, AccuracyErrorQuartersWhenStepHalves) {
  const QuantumThermoParams p;
  const double e1 = table1_comparison(p, 0.1, 100.0).rows[3].energy_accuracy_error;
  const double e2 = table1_comparison(p, 0.05, 100.0).rows[3].energy_accuracy_error;
  EXPECT_GE(e1 / e2, 3.0);
  EXPECT_LE(e1 / e2, 5.0);
}

TEST(Table1, RejectsBadGrid) {
  EXPECT_THROW(table1_comparison({}, 0.0, 1.0), Error);
  EXPECT_THROW(table1_comparison({}, 1.0, 0.5), Error);
}

TEST(QuantumBetaFormula, MinimumOfTwoRates) {
  QuantumThermoParams p;
  EXPECT_DOUBLE_EQ(quantum_beta_formula(p), 0.5);  // Gamma / E2 = 0.5 < 1 / (alpha T0) = 1
  p.alpha_heat = 4.0;
  EXPECT_DOUBLE_EQ(quantum_beta_formula(p), 0.25);
}

TEST(MakeReport, CollectsFields) {
  const Trajectory t = run(make_harmonic_oscillator(0.5), Scheme::DiscreteGradient, 0.1, 20.0, kOscillatorStart);
  const DiagnosticsReport r = make_report(t);
  EXPECT_LE(r.max_dissipation_violation, 1e-9);
  EXPECT_LE(r.max_identity_defect, 1e-9);
  ASSERT_TRUE(r.decay_rate_beta.has_value());
  EXPECT_GT(*r.decay_rate_beta, 0.0);
  EXPECT_GE(r.decay_fit_r2, 0.0);
  EXPECT_LE(r.decay_fit_r2, 1.0);
  EXPECT_TRUE(r.boundedness.bounded);
  EXPECT_DOUBLE_EQ(r.plateau.terminal_energy, t.energies.back());
}

}  // namespace
}  // namespace phdae
