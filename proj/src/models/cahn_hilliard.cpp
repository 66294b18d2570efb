#include <cmath>
#include <random>
#include <sstream>

#include "phdae/models.hpp"

namespace phdae {

namespace {

void check_params(const CahnHilliard1DParams& p) {
  std::ostringstream msg;
  if (p.N < 4) msg << "cahn_hilliard_1d: N must be at least 4, got " << p.N;
  else if (!(p.L > 0.0)) msg << "cahn_hilliard_1d: L must be positive";
  else if (!(p.eps_interface > 0.0)) msg << "cahn_hilliard_1d: eps_interface must be positive";
  else if (!(p.sigma > 0.0)) msg << "cahn_hilliard_1d: sigma must be positive";
  else return;
  throw ValidationError(msg.str());
}

// Periodic three-point Laplacian (1/h^2) tridiag(-1, 2, -1) applied to u.
Vector apply_stiffness(const Vector& u, double h) {
  const Eigen::Index n = u.size();
  Vector out(n);
  const double s = 1.0 / (h * h);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double left = u((i + n - 1) % n);
    const double right = u((i + 1) % n);
    out(i) = s * (2.0 * u(i) - left - right);
  }
  return out;
}

Matrix stiffness_matrix(int n, double h) {
  Matrix k = Matrix::Zero(n, n);
  const double s = 1.0 / (h * h);
  for (int i = 0; i < n; ++i) {
    k(i, i) += 2.0 * s;
    k(i, (i + 1) % n) -= s;
    k(i, (i + n - 1) % n) -= s;
  }
  return k;
}

double well(double u) {
  const double a = u * u - 1.0;
  return 0.25 * a * a;
}

// W(b) - W(a) = (b - a)(b + a)(a^2 + b^2 - 2) / 4
double well_difference(double a, double b) { return 0.25 * (b - a) * (b + a) * (a * a + b * b - 2.0); }

HamiltonianModel energy(const CahnHilliard1DParams& p) {
  const double h = p.L / p.N;
  const double eps = p.eps_interface;
  const int n = p.N;
  return HamiltonianModel(
      n, 0,
      [h, eps](const Vector& u) {
        double sum = 0.0;
        const Eigen::Index n = u.size();
        for (Eigen::Index i = 0; i < n; ++i) {
          const double du = (u((i + 1) % n) - u(i)) / h;
          sum += 0.5 * eps * du * du + well(u(i)) / eps;
        }
        return h * sum;
      },
      [h, eps](const Vector& u) -> Vector {
        Vector g = eps * apply_stiffness(u, h);
        for (Eigen::Index i = 0; i < u.size(); ++i) g(i) += (u(i) * u(i) * u(i) - u(i)) / eps;
        return h * g;
      },
      [h, eps](const Vector& a, const Vector& b) {
        const Vector d = b - a;
        double wsum = 0.0;
        for (Eigen::Index i = 0; i < a.size(); ++i) wsum += well_difference(a(i), b(i));
        return h * (0.5 * eps * (a + b).dot(apply_stiffness(d, h)) + wsum / eps);
      });
}

}  // namespace

SystemSpec make_cahn_hilliard_1d(const CahnHilliard1DParams& p) {
  check_params(p);
  const int n = p.N;
  const double h = p.L / n;
  const double eps = p.eps_interface;
  SystemSpec s;
  s.name = "cahn_hilliard_1d";
  s.partition = StatePartition{n, 0, n};
  s.structure.J = Matrix::Zero(2 * n, 2 * n);
  s.structure.J.topRightCorner(n, n) = Matrix::Identity(n, n);
  s.structure.J.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  s.structure.R = Matrix::Zero(2 * n, 2 * n);
  s.structure.R.bottomRightCorner(n, n) = (p.sigma / h) * stiffness_matrix(n, h);
  s.structure.B = Matrix::Zero(2 * n, 0);
  s.input = InputSignal::zero(0);

  HamiltonianModel H = energy(p);
  H.set_coordinate_difference([h, eps](const Vector& u, Eigen::Index i, double value) {
    const Eigen::Index n = u.size();
    const double d = value - u(i);
    const double s = 1.0 / (h * h);
    const double ku = s * (2.0 * u(i) - u((i + n - 1) % n) - u((i + 1) % n));
    const double quad = d * ku + s * d * d;  // (1/2)(2 d (Ku)_i + K_ii d^2)
    return h * (eps * quad + well_difference(u(i), value) / eps);
  });
  s.hamiltonian = std::move(H);
  require_valid(s);
  return s;
}

State cahn_hilliard_state(const CahnHilliard1DParams& p, const Vector& u) {
  check_params(p);
  if (u.size() != p.N) throw DimensionMismatch("cahn_hilliard_state: u has the wrong size");
  const HamiltonianModel h = energy(p);
  return State(u, Vector(), h.gradient(u));
}

State cahn_hilliard_random_state(const CahnHilliard1DParams& p, std::uint64_t seed,
                                 double amplitude) {
  check_params(p);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-amplitude, amplitude);
  Vector u(p.N);
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = unit(rng);
  return cahn_hilliard_state(p, u);
}

State cahn_hilliard_two_phase_state(const CahnHilliard1DParams& p, std::uint64_t seed,
                                    double perturbation) {
  check_params(p);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-perturbation, perturbation);
  const double h = p.L / p.N;
  const double width = std::sqrt(2.0) * p.eps_interface;
  Vector u(p.N);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double x = (static_cast<double>(i) + 0.5) * h;
    u(i) = std::tanh((x - 0.25 * p.L) / width) * std::tanh((0.75 * p.L - x) / width) + unit(rng);
  }
  return cahn_hilliard_state(p, u);
}

}  // namespace phdae
