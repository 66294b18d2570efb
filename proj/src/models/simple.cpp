#include "phdae/models.hpp"

namespace phdae {

SystemSpec make_linear_system(const StatePartition& partition, const Matrix& Q, const Matrix& J,
                              const Matrix& R, const Matrix& B, std::optional<InputSignal> input,
                              const std::string& name) {
  SystemSpec s;
  s.name = name;
  s.partition = partition;
  s.structure = StructureMatrices{J, R, B};
  s.hamiltonian = make_quadratic_form(partition.n1, partition.n2, Q);
  s.input = input ? *input : InputSignal::zero(B.cols());
  require_valid(s);
  return s;
}

namespace {

StructureMatrices oscillator_structure(double damping) {
  Matrix J{{0.0, 1.0}, {-1.0, 0.0}};
  Matrix R = Matrix::Zero(2, 2);
  R(1, 1) = damping;
  return StructureMatrices{J, R, Matrix::Zero(2, 0)};
}

}  // namespace

SystemSpec make_harmonic_oscillator(double damping) {
  if (damping < 0.0) throw ValidationError("oscillator: damping must be nonnegative");
  SystemSpec s;
  s.name = "oscillator";
  s.partition = StatePartition{0, 2, 0};
  s.structure = oscillator_structure(damping);
  s.hamiltonian = make_quadratic_form(0, 2, Matrix::Identity(2, 2));
  s.input = InputSignal::zero(0);
  require_valid(s);
  return s;
}

SystemSpec make_pendulum_system(double damping) {
  if (damping < 0.0) throw ValidationError("pendulum: damping must be nonnegative");
  SystemSpec s;
  s.name = "pendulum";
  s.partition = StatePartition{0, 2, 0};
  s.structure = oscillator_structure(damping);
  s.hamiltonian = make_pendulum();
  s.input = InputSignal::zero(0);
  require_valid(s);
  return s;
}

}  // namespace phdae
