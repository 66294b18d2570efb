#pragma once

// Constructors for the built-in example systems. Each returns a validated
// SystemSpec; the *_state helpers build matching initial states.

#include <cstdint>
#include <functional>

#include "phdae/core.hpp"

namespace phdae {

// Linear poroelasticity: z1 = u (displacement), z2 = C p, n3 = 0.
//   A u = D^T p + f,   C p' = -D u' - Bflow p + g.
struct PoroelasticParams {
  Matrix A = Matrix::Identity(2, 2);
  Matrix C = Matrix::Identity(2, 2);
  Matrix D = Matrix::Identity(2, 2);  // rows: pressure dofs, cols: displacement dofs
  Matrix Bflow = Matrix::Identity(2, 2);
  InputSignal f = InputSignal::zero(2);
  InputSignal g = InputSignal::zero(2);
};

SystemSpec make_poroelastic(const PoroelasticParams& p);
/// z2 = C p0 and the displacement solving A u0 = D^T p0 + f(t0).
State poroelastic_state(const PoroelasticParams& p, const Vector& p0, double t0 = 0.0);

// Circuit in charge/flux form: z1 = q_C, z2 = psi_L, z3 = (i_S, phi).
struct CircuitParams {
  Matrix A_C;  // nodes x capacitors
  Matrix A_R;  // nodes x resistors
  Matrix A_L;  // nodes x inductors
  Matrix A_S;  // nodes x sources
  /// Resistor currents as a function of resistor voltages. Must be monotone.
  std::function<Vector(const Vector&)> G;
  /// Set when G(v) = G_linear v; the resistive block then lives in R.
  std::optional<Matrix> G_linear;
  HamiltonianModel H_C;  // on (n_C, 0)
  HamiltonianModel H_L;  // on (0, n_L)
  InputSignal u_S;
};

/// Two nodes with a source and a resistor G(v) = v + v^3 on node 1 -> 2,
/// a capacitor H_C(q) = q^4/4 + q^2/2 and an inductor H_L = psi^2/2 at node 2.
CircuitParams default_circuit_params();

/// Throws ValidationError for non-incidence entries or a G that fails the
/// monotonicity probes.
SystemSpec make_circuit(const CircuitParams& p);

/// Scalar capacitor energy q^4/4 + q^2/2 (set quartic = 0 for q^2/2).
HamiltonianModel make_capacitor_energy(double quartic = 1.0);
/// Inductor energies psi_i^2 / (2 L).
HamiltonianModel make_inductor_energy(Eigen::Index n, double inductance = 1.0);

// Constrained mechanics M x'' + D x' + K x + Bc^T lambda = f, Bc x' = g.
// z2 = (K x, M y), z3 = lambda.
struct MechanicalParams {
  Matrix M = Matrix::Identity(2, 2);
  Matrix D = 0.1 * Matrix::Identity(2, 2);
  Matrix K = Eigen::Vector2d(1.0, 4.0).asDiagonal();
  Matrix Bc = Matrix::Zero(0, 2);
  InputSignal f = InputSignal::zero(2);
  InputSignal g = InputSignal::zero(0);
};

SystemSpec make_mechanical(const MechanicalParams& p);
/// lambda0 empty selects mechanical_consistent_lambda.
State mechanical_state(const MechanicalParams& p, const Vector& x0, const Vector& y0,
                       const Vector& lambda0 = Vector(), double t0 = 0.0);
/// Multiplier keeping Bc y' = 0 at (x0, y0):
/// -(Bc M^-1 Bc^T)^-1 Bc M^-1 (K x0 + D y0 - f(t0)).
Vector mechanical_consistent_lambda(const MechanicalParams& p, const Vector& x0, const Vector& y0,
                                    double t0 = 0.0);

// Periodic 1D Cahn-Hilliard: z1 = u, z3 = w, partition (N, 0, N).
//   H(u) = h sum(eps/2 (D_h u)_i^2 + W(u_i)/eps),  W(u) = (u^2 - 1)^2 / 4,
//   u' = -(sigma/h) K_h w,  h w = dH/du.
struct CahnHilliard1DParams {
  int N = 64;
  double L = 64.0;
  double eps_interface = 0.4;
  double sigma = 1.0;
};

SystemSpec make_cahn_hilliard_1d(const CahnHilliard1DParams& p);
/// u drawn uniformly from [-amplitude, amplitude]; w set consistently.
State cahn_hilliard_random_state(const CahnHilliard1DParams& p, std::uint64_t seed,
                                 double amplitude = 0.1);
/// Two phases, u ~ +1 on the middle half of the domain and -1 outside, joined
/// by tanh interfaces of width sqrt(2) eps, plus uniform noise in
/// [-perturbation, perturbation]; w set consistently.
State cahn_hilliard_two_phase_state(const CahnHilliard1DParams& p, std::uint64_t seed,
                                    double perturbation = 0.1);
/// u given; w set consistently.
State cahn_hilliard_state(const CahnHilliard1DParams& p, const Vector& u);

// Two-level system with entropy, heat and an exponential memory kernel.
// Raw partition (2, 3, 1): z1 = (rho11, rho22), z2 = (S, Q, m), z3 = lambda.
//   H = E1 rho11 + E2 rho22 + kB_T0 S ln S + alpha Q^2 / 2 + m^2 / 2.
struct QuantumThermoParams {
  double E1 = 1.0;
  double E2 = 2.0;
  double Gamma = 1.0;
  double gamma_k = 0.5;
  double beta_k = 1.0;
  double kB_T0 = 1.0;
  double alpha_heat = 1.0;
  double R_m = 1.0;
  double epsilon_reg = 1e-3;
  InputSignal heat = InputSignal::zero(1);
};

/// The unregularized system (index > 0).
SystemSpec make_quantum_thermo_dae(const QuantumThermoParams& p);
/// make_quantum_thermo_dae regularized with epsilon_reg.
SystemSpec make_quantum_thermo(const QuantumThermoParams& p);
/// Multiplier on the slow manifold rho11' + rho22' = 0: (E1 + E2 + gamma_k m) / 2.
double quantum_thermo_consistent_lambda(const QuantumThermoParams& p, double m0 = 0.0);
/// State of the unregularized system; lambda defaults to the consistent value.
State quantum_thermo_dae_state(const QuantumThermoParams& p, double rho11, double rho22, double S0,
                               double Q0 = 0.0, double m0 = 0.0,
                               std::optional<double> lambda0 = std::nullopt);
/// Same state mapped into the regularized spec made from `p`.
State quantum_thermo_state(const QuantumThermoParams& p, double rho11, double rho22, double S0,
                           double Q0 = 0.0, double m0 = 0.0,
                           std::optional<double> lambda0 = std::nullopt);

// Small systems used by tests, acceptance runs and the CLI.

/// z2 = (q, p), J = [[0, 1], [-1, 0]], R = diag(0, damping), H = |z2|^2 / 2, no input.
SystemSpec make_harmonic_oscillator(double damping = 0.0);
/// H = p^2/2 + 1 - cos q, same J and R as the oscillator.
SystemSpec make_pendulum_system(double damping = 0.0);

/// Linear system with H = z^T Q z / 2 over (n1, n2, n3). Input zero unless given.
SystemSpec make_linear_system(const StatePartition& partition, const Matrix& Q, const Matrix& J,
                              const Matrix& R, const Matrix& B,
                              std::optional<InputSignal> input = std::nullopt,
                              const std::string& name = "linear");

}  // namespace phdae
