#include <cmath>
#include <sstream>

#include "phdae/models.hpp"
#include "phdae/transforms.hpp"

namespace phdae {

namespace {

// Index layout of the unregularized flow vector.
enum : Eigen::Index { kRho11 = 0, kRho22, kS, kQ, kM, kLambda, kSize };

void check_params(const QuantumThermoParams& p) {
  const std::pair<const char*, double> positive[] = {
      {"E1", p.E1},       {"E2", p.E2},           {"Gamma", p.Gamma},
      {"beta_k", p.beta_k}, {"kB_T0", p.kB_T0},   {"alpha_heat", p.alpha_heat},
      {"R_m", p.R_m},     {"epsilon_reg", p.epsilon_reg}};
  for (const auto& [name, value] : positive) {
    if (!(value > 0.0)) {
      std::ostringstream msg;
      msg << "quantum_thermo: " << name << " must be positive, got " << value;
      throw ValidationError(msg.str());
    }
  }
  if (!(p.gamma_k >= 0.0)) throw ValidationError("quantum_thermo: gamma_k must be nonnegative");
  if (p.heat.m != 1) throw ValidationError("quantum_thermo: heat input must be scalar");
}

// S ln S with 0 ln 0 = 0.
double entropy_term(double s) {
  if (s < 0.0 || std::isnan(s)) {
    std::ostringstream msg;
    msg << "quantum_thermo: entropy S = " << s << " left the domain S >= 0";
    throw DomainError(msg.str());
  }
  return s > 0.0 ? s * std::log(s) : 0.0;
}

// b ln b - a ln a = (b - a) ln b + a log1p((b - a)/a)
double entropy_difference(double a, double b) {
  if (a <= 0.0 || b <= 0.0) return entropy_term(b) - entropy_term(a);
  return (b - a) * std::log(b) + a * std::log1p((b - a) / a);
}

}  // namespace

SystemSpec make_quantum_thermo_dae(const QuantumThermoParams& p) {
  check_params(p);
  SystemSpec s;
  s.name = "quantum_thermo";
  s.partition = StatePartition{2, 3, 1};
  Matrix J = Matrix::Zero(kSize, kSize);
  auto set = [&J](Eigen::Index i, Eigen::Index j, double v) {
    J(i, j) = v;
    J(j, i) = -v;
  };
  set(kRho11, kS, -1.0);
  set(kRho22, kS, 1.0);
  set(kRho11, kQ, -1.0);
  set(kRho22, kQ, 1.0);
  set(kRho22, kM, -p.gamma_k);
  set(kRho11, kLambda, 1.0);
  set(kRho22, kLambda, 1.0);
  s.structure.J = J;
  Vector r = Vector::Zero(kSize);
  r(kRho11) = p.Gamma;
  r(kRho22) = p.Gamma;
  r(kQ) = p.R_m;
  r(kM) = p.beta_k;
  s.structure.R = r.asDiagonal();
  s.structure.B = Matrix::Zero(kSize, 1);
  s.structure.B(kQ, 0) = 1.0;
  s.input = p.heat;

  const double e1 = p.E1, e2 = p.E2, kt = p.kB_T0, alpha = p.alpha_heat;
  s.hamiltonian = HamiltonianModel(
      2, 3,
      [=](const Vector& z) {
        return e1 * z(0) + e2 * z(1) + kt * entropy_term(z(2)) + 0.5 * alpha * z(3) * z(3) +
               0.5 * z(4) * z(4);
      },
      [=](const Vector& z) -> Vector {
        if (!(z(2) > 0.0)) {
          std::ostringstream msg;
          msg << "quantum_thermo: entropy S = " << z(2) << " must be positive";
          throw DomainError(msg.str());
        }
        Vector g(5);
        g << e1, e2, kt * (std::log(z(2)) + 1.0), alpha * z(3), z(4);
        return g;
      },
      [=](const Vector& a, const Vector& b) {
        return e1 * (b(0) - a(0)) + e2 * (b(1) - a(1)) + kt * entropy_difference(a(2), b(2)) +
               0.5 * alpha * (a(3) + b(3)) * (b(3) - a(3)) + 0.5 * (a(4) + b(4)) * (b(4) - a(4));
      });
  require_valid(s);
  return s;
}

SystemSpec make_quantum_thermo(const QuantumThermoParams& p) {
  return regularize(make_quantum_thermo_dae(p), RegularizationConfig{p.epsilon_reg});
}

double quantum_thermo_consistent_lambda(const QuantumThermoParams& p, double m0) {
  return 0.5 * (p.E1 + p.E2 + p.gamma_k * m0);
}

State quantum_thermo_dae_state(const QuantumThermoParams& p, double rho11, double rho22, double S0,
                               double Q0, double m0, std::optional<double> lambda0) {
  const double lambda = lambda0 ? *lambda0 : quantum_thermo_consistent_lambda(p, m0);
  return State(Eigen::Vector2d(rho11, rho22), Eigen::Vector3d(S0, Q0, m0),
               Vector::Constant(1, lambda));
}

State quantum_thermo_state(const QuantumThermoParams& p, double rho11, double rho22, double S0,
                           double Q0, double m0, std::optional<double> lambda0) {
  return to_regularized(make_quantum_thermo(p),
                        quantum_thermo_dae_state(p, rho11, rho22, S0, Q0, m0, lambda0));
}

}  // namespace phdae
