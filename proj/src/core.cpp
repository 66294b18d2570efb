#include "phdae/core.hpp"

#include <cmath>
#include <sstream>

namespace phdae {

State State::zeros(const StatePartition& p) {
  return State(Vector::Zero(p.n1), Vector::Zero(p.n2), Vector::Zero(p.n3));
}

State State::from_stacked(const StatePartition& p, const Vector& z) {
  if (z.size() != p.n()) throw DimensionMismatch("State::from_stacked: length mismatch");
  return State(z.head(p.n1), z.segment(p.n1, p.n2), z.tail(p.n3));
}

Vector State::stacked() const {
  Vector z(z1.size() + z2.size() + z3.size());
  z << z1, z2, z3;
  return z;
}

Vector State::energy_variables() const {
  Vector z(z1.size() + z2.size());
  z << z1, z2;
  return z;
}

InputSignal InputSignal::zero(Eigen::Index m) {
  return InputSignal{m, [m](double) -> Vector { return Vector::Zero(m); }};
}

InputSignal InputSignal::constant(Vector value) {
  const Eigen::Index m = value.size();
  return InputSignal{m, [value = std::move(value)](double) { return value; }};
}

Vector InputSignal::operator()(double t) const {
  if (m == 0) return Vector();
  if (!u) throw Error("input signal is not set");
  Vector v = u(t);
  if (v.size() != m) {
    std::ostringstream msg;
    msg << "input signal returned " << v.size() << " entries, expected " << m;
    throw DimensionMismatch(msg.str());
  }
  if (!v.allFinite()) {
    std::ostringstream msg;
    msg << "input signal is not finite at t = " << t;
    throw Error(msg.str());
  }
  return v;
}

void check_dimensions(const SystemSpec& spec) {
  const auto& p = spec.partition;
  const auto& s = spec.structure;
  const Eigen::Index n = p.n();
  std::ostringstream msg;
  if (p.n1 < 0 || p.n2 < 0 || p.n3 < 0 || n < 1) {
    msg << "partition (" << p.n1 << ", " << p.n2 << ", " << p.n3 << ") is invalid";
  } else if (s.J.rows() != n || s.J.cols() != n) {
    msg << "J is " << s.J.rows() << "x" << s.J.cols() << ", expected " << n << "x" << n;
  } else if (s.R.rows() != n || s.R.cols() != n) {
    msg << "R is " << s.R.rows() << "x" << s.R.cols() << ", expected " << n << "x" << n;
  } else if (s.B.rows() != n) {
    msg << "B has " << s.B.rows() << " rows, expected " << n;
  } else if (spec.input.m != s.B.cols()) {
    msg << "input has " << spec.input.m << " channels but B has " << s.B.cols() << " columns";
  } else if (spec.hamiltonian.n1() != p.n1 || spec.hamiltonian.n2() != p.n2) {
    msg << "hamiltonian is defined on (" << spec.hamiltonian.n1() << ", " << spec.hamiltonian.n2()
        << "), partition has (" << p.n1 << ", " << p.n2 << ")";
  } else {
    return;
  }
  throw DimensionMismatch(spec.name.empty() ? msg.str() : spec.name + ": " + msg.str());
}

std::string ValidationReport::to_string() const {
  if (valid()) return "valid";
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out << "\n";
    out << violations[i];
  }
  return out.str();
}

ValidationReport validate_structure(const StructureMatrices& s, const ValidationTolerances& tol) {
  ValidationReport report;
  auto add = [&report](const std::string& what, double value) {
    std::ostringstream msg;
    msg << what << " " << value;
    report.violations.push_back(msg.str());
  };
  if (s.J.rows() != s.J.cols()) {
    report.violations.push_back("J is not square");
  } else {
    const double skew = numkit::inf_norm(Matrix(s.J + s.J.transpose()));
    if (skew > tol.skew * (1.0 + numkit::inf_norm(s.J))) add("J not skew, |J + J^T|_inf =", skew);
  }
  if (s.R.rows() != s.R.cols()) {
    report.violations.push_back("R is not square");
  } else {
    const double asym = numkit::inf_norm(Matrix(s.R - s.R.transpose()));
    if (asym > tol.symmetry * (1.0 + numkit::inf_norm(s.R))) {
      add("R not symmetric, |R - R^T|_inf =", asym);
    }
    if (s.R.size() > 0) {
      const double min_eig = numkit::min_symmetric_eigenvalue(0.5 * (s.R + s.R.transpose()));
      if (min_eig < tol.min_eigenvalue) add("R not PSD, min eig", min_eig);
    }
  }
  if (s.J.rows() != s.R.rows()) report.violations.push_back("J and R differ in size");
  if (s.B.rows() != s.J.rows()) report.violations.push_back("B row count differs from J");
  if (!s.J.allFinite() || !s.R.allFinite() || !s.B.allFinite()) {
    report.violations.push_back("structure matrices contain non-finite entries");
  }
  return report;
}

void require_valid(const SystemSpec& spec, const ValidationTolerances& tol) {
  check_dimensions(spec);
  const ValidationReport report = validate_structure(spec.structure, tol);
  if (!report.valid()) {
    throw ValidationError((spec.name.empty() ? std::string("system") : spec.name) + ": " +
                          report.to_string());
  }
}

Vector eval_output(const SystemSpec& spec, const Vector& flow) {
  if (flow.size() != spec.structure.B.rows()) {
    throw DimensionMismatch("eval_output: flow length differs from B rows");
  }
  return spec.structure.B.transpose() * flow;
}

Vector flow_vector(const SystemSpec& spec, const State& state, const Vector& z1dot) {
  const auto& p = spec.partition;
  if (state.partition() != p) throw DimensionMismatch("flow_vector: state does not match partition");
  if (z1dot.size() != p.n1) throw DimensionMismatch("flow_vector: z1dot length mismatch");
  const Vector grad = spec.hamiltonian.gradient(state.energy_variables());
  Vector w(p.n());
  w << z1dot, grad.tail(p.n2), state.z3;
  return w;
}

Vector continuous_residual(const SystemSpec& spec, double t, const State& state,
                           const Vector& z1dot, const Vector& z2dot) {
  const auto& p = spec.partition;
  if (z2dot.size() != p.n2) throw DimensionMismatch("continuous_residual: z2dot length mismatch");
  const Vector grad = spec.hamiltonian.gradient(state.energy_variables());
  const Vector w = flow_vector(spec, state, z1dot);
  Vector lhs = Vector::Zero(p.n());
  lhs.head(p.n1) = grad.head(p.n1);
  lhs.segment(p.n1, p.n2) = z2dot;
  Vector res = lhs - (spec.structure.J - spec.structure.R) * w;
  if (spec.resistive) res += spec.resistive(w);
  if (spec.m() > 0) res -= spec.structure.B * spec.input(t);
  return res;
}

double dissipation_rate(const SystemSpec& spec, const Vector& flow) {
  double d = flow.dot(spec.structure.R * flow);
  if (spec.resistive) d += flow.dot(spec.resistive(flow));
  return d;
}

PowerBalance power_balance_rate(const SystemSpec& spec, const Vector& flow, double t) {
  if (flow.size() != spec.n()) throw DimensionMismatch("power_balance_rate: flow length mismatch");
  const double skew = flow.dot(spec.structure.J * flow);
  const double scale = flow.squaredNorm() * (1.0 + numkit::inf_norm(spec.structure.J));
  if (std::abs(skew) > 1e-12 * scale) {
    std::ostringstream msg;
    msg << "power_balance_rate: <w, J w> = " << skew << " is not zero";
    throw Error(msg.str());
  }
  PowerBalance pb;
  if (spec.m() > 0) pb.supply = eval_output(spec, flow).dot(spec.input(t));
  pb.dissipation = dissipation_rate(spec, flow);
  pb.dH = pb.supply - pb.dissipation;
  return pb;
}

}  // namespace phdae
