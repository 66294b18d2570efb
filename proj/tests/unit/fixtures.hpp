#pragma once

// Built-in models with matching initial states, shared by the test binaries.

#include <string>
#include <vector>

#include "phdae/models.hpp"

namespace phdae::testing {

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

struct ModelCase {
  std::string name;
  SystemSpec spec;
  State initial;
};

inline MechanicalParams constrained_mechanical_params() {
  MechanicalParams p;
  Matrix bc(1, 2);
  bc << 1.0, -1.0;
  p.Bc = bc;
  p.g = InputSignal::zero(1);
  return p;
}

inline PoroelasticParams coupled_poroelastic_params() {
  PoroelasticParams p;
  p.A << 2.0, 0.5, 0.5, 1.0;
  p.C << 1.0, 0.0, 0.0, 2.0;
  p.D << 1.0, 0.3, 0.0, 1.0;
  p.Bflow << 1.0, 0.2, 0.2, 0.5;
  return p;
}

/// The five built-in examples with u = 0; Cahn-Hilliard is kept small.
inline std::vector<ModelCase> builtin_cases(int ch_points = 16) {
  std::vector<ModelCase> out;
  {
    const PoroelasticParams p = coupled_poroelastic_params();
    out.push_back({"poroelastic", make_poroelastic(p), poroelastic_state(p, vec({1.0, -0.5}))});
  }
  {
    const CircuitParams p = default_circuit_params();
    const SystemSpec spec = make_circuit(p);
    out.push_back({"circuit", spec, State(vec({0.5}), vec({0.2}), Vector::Zero(spec.partition.n3))});
  }
  {
    const MechanicalParams p = constrained_mechanical_params();
    out.push_back({"mechanical", make_mechanical(p),
                   mechanical_state(p, vec({1.0, 0.5}), vec({0.3, 0.3}))});
  }
  {
    CahnHilliard1DParams p;
    p.N = ch_points;
    p.L = static_cast<double>(ch_points);
    out.push_back({"cahn_hilliard_1d", make_cahn_hilliard_1d(p), cahn_hilliard_random_state(p, 1)});
  }
  {
    const QuantumThermoParams p;
    out.push_back({"quantum_thermo", make_quantum_thermo(p), quantum_thermo_state(p, 0.2, 0.8, 0.3)});
  }
  return out;
}

}  // namespace phdae::testing
