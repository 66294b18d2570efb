#pragma once

// Post-processing of trajectories: dissipation audits, decay fits,
// convergence orders, boundedness and the four-scheme comparison.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phdae/integrators.hpp"
#include "phdae/models.hpp"

namespace phdae {

struct DissipationAudit {
  /// max_n (H^{n+1} - H^n - supply_n)
  double max_violation = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> violating_steps;  // steps above the threshold
  /// max_n |(H^{n+1} - H^n) - (supply_n - dissipation_n)|
  double max_identity_defect = 0.0;
  double min_dissipation = std::numeric_limits<double>::infinity();
};

/// Throws Error when the trajectory has no steps.
DissipationAudit audit_dissipation(const Trajectory& traj, double threshold = 1e-9);

struct DecayFit {
  double beta = 0.0;
  double r2 = 0.0;
  /// beta <= 1e-6: the energy is not decaying.
  bool no_decay = false;
  /// max_n H(t_n) / (H(t_0) e^{-beta (t_n - t_0)}) and whether it stays <= 1.05.
  double envelope_ratio = 0.0;
  bool envelope_holds = false;
};

/// Least-squares fit of log H against t over the trailing `window` fraction
/// of the samples. Throws NonPositiveEnergy when H <= 0 inside the window.
DecayFit fit_decay_rate(const Trajectory& traj, double window = 0.5);

enum class ReferenceKind { ClosedForm, Finest };

struct OrderEstimate {
  double order = 0.0;
  std::vector<double> taus;
  std::vector<double> errors;  // terminal max-norm error per tau
  std::vector<double> pair_orders;
  ReferenceKind reference = ReferenceKind::ClosedForm;
};

/// Exact solution of a linear ODE spec (quadratic H, n3 = 0, no input, no
/// resistive term, invertible (J - R)_11) at time t_end, via the matrix
/// exponential. Throws ReferenceUnavailable otherwise.
State closed_form_solution(const SystemSpec& spec, const State& initial, double t0, double t_end);

/// The linear ODE matrix A with z' = A z for specs accepted by closed_form_solution.
Matrix linear_ode_matrix(const SystemSpec& spec);

/// taus must be >= 3 successive halvings. Finest uses the same scheme at
/// min(taus)/16 as reference. Throws ReferenceUnavailable when the reference
/// cannot be produced, Error on a bad tau list.
OrderEstimate estimate_order(const SystemSpec& spec, const SchemeConfig& cfg, const State& initial,
                             double t0, double t_end, const std::vector<double>& taus,
                             ReferenceKind reference = ReferenceKind::ClosedForm);

struct Boundedness {
  bool bounded = true;
  double max_norm = 0.0;
  std::optional<std::size_t> diverged_step;
};

/// Sup-norm of the stacked state over the trajectory against `cap`.
Boundedness check_boundedness(const Trajectory& traj, double cap);

struct Plateau {
  double terminal_energy = 0.0;   // reported H^infinity
  double last_decile_range = 0.0;
  bool settled = false;           // range <= 1e-6 H^0
};

Plateau terminal_plateau(const Trajectory& traj);

/// max_n (H^{n+1} - H^n); <= 0 for a nonincreasing sequence.
double max_energy_increase(const Trajectory& traj);

/// |[z1; z2]^N - [z1; z2]^{N-1}|_inf of the last step.
double terminal_increment(const Trajectory& traj);

struct Table1Row {
  std::string scheme;
  bool completed = false;
  std::string failure;
  /// max_n |sum_k (dH_k - supply_k + dissipation_k)|
  double energy_balance_error = 0.0;
  /// max_n |H^n - H_ref(t_n)| against a fine discrete-gradient run
  double energy_accuracy_error = 0.0;
  double probability_violation = 0.0;  // max |rho11 + rho22 - 1|
  double entropy_violation = 0.0;      // max(0, -min_n (S^{n+1} - S^n))
};

struct Table1Options {
  double reference_tau = 0.0;  // 0: tau / 16
  std::uint64_t seed = 0;      // unused by the deterministic model, kept for reports
  double rho11 = 0.2;
  double rho22 = 0.8;
  double S0 = 0.3;
};

struct Table1Grid {
  double tau = 0.0;
  double t_end = 0.0;
  double epsilon = 0.0;
  std::vector<Table1Row> rows;  // explicit Euler, implicit Euler, midpoint, discrete gradient
  /// discrete gradient <= midpoint <= implicit Euler <= explicit Euler in energy_balance_error
  bool energy_ordering_holds = false;
  /// discrete-gradient probability violation <= 10 epsilon
  bool probability_bound_holds = false;
};

Table1Grid table1_comparison(const QuantumThermoParams& p, double tau, double t_end,
                             const Table1Options& options = {});

/// min(Gamma / E_max, 1 / (alpha T0)) with kB = 1, reported next to fitted rates.
double quantum_beta_formula(const QuantumThermoParams& p);

struct DiagnosticsReport {
  double max_dissipation_violation = 0.0;
  double max_identity_defect = 0.0;
  std::optional<double> decay_rate_beta;
  double decay_fit_r2 = 0.0;
  bool decay_envelope_holds = false;
  std::map<std::string, double> observed_orders;
  Boundedness boundedness;
  Plateau plateau;
  std::optional<Table1Grid> table1;
};

/// Collects the trajectory-level diagnostics; decay fields stay empty when
/// the energy is not positive.
DiagnosticsReport make_report(const Trajectory& traj, double boundedness_cap = 1e6);

}  // namespace phdae
