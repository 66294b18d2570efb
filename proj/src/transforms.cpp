#include "phdae/transforms.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace phdae {

SystemSpec regularize(const SystemSpec& spec, const RegularizationConfig& cfg) {
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) {
    std::ostringstream msg;
    msg << "regularize: epsilon must be positive, got " << cfg.epsilon;
    throw Error(msg.str());
  }
  check_dimensions(spec);
  const StatePartition p = spec.partition;
  if (p.n3 == 0) throw NothingToRegularize(spec.name + ": no algebraic variables to regularize");

  const double eps = cfg.epsilon;
  const Eigen::Index ne = p.n1 + p.n2;
  const HamiltonianModel base = spec.hamiltonian;

  HamiltonianModel h(
      p.n1, p.n2 + p.n3,
      [base, ne, eps](const Vector& z) {
        return base.energy(z.head(ne)) + 0.5 * z.tail(z.size() - ne).squaredNorm() / eps;
      },
      [base, ne, eps](const Vector& z) -> Vector {
        Vector g(z.size());
        g << base.gradient(z.head(ne)), z.tail(z.size() - ne) / eps;
        return g;
      },
      [base, ne, eps](const Vector& za, const Vector& zb) {
        const Eigen::Index k = za.size() - ne;
        const Vector qa = za.tail(k);
        const Vector qb = zb.tail(k);
        return base.energy_difference(za.head(ne), zb.head(ne)) +
               0.5 * (qa + qb).dot(qb - qa) / eps;
      });
  h.set_coordinate_difference([base, ne, eps](const Vector& z, Eigen::Index i, double value) {
    if (i < ne) return base.coordinate_difference(z.head(ne), i, value);
    const double d = value - z(i);
    return (d * z(i) + 0.5 * d * d) / eps;
  });
  if (base.quadratic_form()) {
    h.set_quadratic_form(numkit::block_diagonal(*base.quadratic_form(),
                                                Matrix::Identity(p.n3, p.n3) / eps));
  }

  SystemSpec out = spec;
  out.partition = StatePartition{p.n1, p.n2 + p.n3, 0};
  out.hamiltonian = std::move(h);
  out.regularization = RegularizationInfo{eps, p.n2, p.n3};
  require_valid(out);
  return out;
}

State to_regularized(const SystemSpec& regularized, const State& original) {
  if (!regularized.regularization) throw Error("to_regularized: spec is not regularized");
  const auto& info = *regularized.regularization;
  if (original.z2.size() != info.n2_original || original.z3.size() != info.n3_original ||
      original.z1.size() != regularized.partition.n1) {
    throw DimensionMismatch("to_regularized: state does not match the original partition");
  }
  Vector z2(info.n2_original + info.n3_original);
  z2 << original.z2, info.epsilon * original.z3;
  return State(original.z1, std::move(z2), Vector());
}

State from_regularized(const SystemSpec& regularized, const State& state) {
  if (!regularized.regularization) throw Error("from_regularized: spec is not regularized");
  const auto& info = *regularized.regularization;
  if (state.partition() != regularized.partition) {
    throw DimensionMismatch("from_regularized: state does not match the regularized partition");
  }
  return State(state.z1, state.z2.head(info.n2_original),
               state.z2.tail(info.n3_original) / info.epsilon);
}

namespace {

// Position in [stack_a; stack_b] of each combined coordinate.
std::vector<Eigen::Index> combined_order(const StatePartition& a, const StatePartition& b) {
  std::vector<Eigen::Index> idx;
  idx.reserve(a.n() + b.n());
  const Eigen::Index off_b = a.n();
  auto push = [&idx](Eigen::Index start, Eigen::Index count) {
    for (Eigen::Index i = 0; i < count; ++i) idx.push_back(start + i);
  };
  push(0, a.n1);
  push(off_b, b.n1);
  push(a.n1, a.n2);
  push(off_b + b.n1, b.n2);
  push(a.n1 + a.n2, a.n3);
  push(off_b + b.n1 + b.n2, b.n3);
  return idx;
}

void check_coupling(const CouplingMatrices& c, Eigen::Index m) {
  std::ostringstream msg;
  if (c.F_skew.rows() != m || c.F_skew.cols() != m || c.F_sym.rows() != m || c.F_sym.cols() != m) {
    msg << "interconnect: coupling matrices must be " << m << "x" << m;
    throw DimensionMismatch(msg.str());
  }
  const double skew = numkit::inf_norm(Matrix(c.F_skew + c.F_skew.transpose()));
  if (skew > 1e-12 * (1.0 + numkit::inf_norm(c.F_skew))) {
    msg << "interconnect: F_skew not skew, |F + F^T|_inf = " << skew;
    throw ValidationError(msg.str());
  }
  const double asym = numkit::inf_norm(Matrix(c.F_sym - c.F_sym.transpose()));
  if (asym > 1e-12 * (1.0 + numkit::inf_norm(c.F_sym))) {
    msg << "interconnect: F_sym not symmetric, |F - F^T|_inf = " << asym;
    throw ValidationError(msg.str());
  }
  if (m > 0) {
    const double min_eig = numkit::min_symmetric_eigenvalue(0.5 * (c.F_sym + c.F_sym.transpose()));
    if (min_eig < -1e-10) {
      msg << "interconnect: F_sym not PSD, min eig " << min_eig;
      throw ValidationError(msg.str());
    }
  }
}

}  // namespace

SystemSpec interconnect(const SystemSpec& a, const SystemSpec& b, const CouplingMatrices& c) {
  check_dimensions(a);
  check_dimensions(b);
  const Eigen::Index ma = a.m();
  const Eigen::Index mb = b.m();
  const Eigen::Index m = ma + mb;
  check_coupling(c, m);

  const StatePartition pa = a.partition;
  const StatePartition pb = b.partition;
  const Eigen::Index n = pa.n() + pb.n();
  const Matrix j0 = numkit::block_diagonal(a.structure.J, b.structure.J);
  const Matrix r0 = numkit::block_diagonal(a.structure.R, b.structure.R);
  const Matrix b0 = numkit::block_diagonal(a.structure.B, b.structure.B);
  Matrix jb = j0 + b0 * c.F_skew * b0.transpose();
  Matrix rb = r0 + b0 * c.F_sym * b0.transpose();
  // Exact symmetry for the validators.
  jb = 0.5 * (jb - jb.transpose()).eval();
  rb = 0.5 * (rb + rb.transpose()).eval();

  const std::vector<Eigen::Index> idx = combined_order(pa, pb);
  SystemSpec out;
  out.name = a.name + "+" + b.name;
  out.partition = StatePartition{pa.n1 + pb.n1, pa.n2 + pb.n2, pa.n3 + pb.n3};
  out.structure.J.resize(n, n);
  out.structure.R.resize(n, n);
  out.structure.B.resize(n, m);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) {
      out.structure.J(k, l) = jb(idx[k], idx[l]);
      out.structure.R(k, l) = rb(idx[k], idx[l]);
    }
    out.structure.B.row(k) = b0.row(idx[k]);
  }

  // Energy variables: combined [z1a; z1b; z2a; z2b] versus [z1a; z2a] and [z1b; z2b].
  const Eigen::Index n1a = pa.n1, n1b = pb.n1, n2a = pa.n2, n2b = pb.n2;
  auto part_a = [=](const Vector& z) {
    Vector v(n1a + n2a);
    v << z.head(n1a), z.segment(n1a + n1b, n2a);
    return v;
  };
  auto part_b = [=](const Vector& z) {
    Vector v(n1b + n2b);
    v << z.segment(n1a, n1b), z.tail(n2b);
    return v;
  };
  const HamiltonianModel ha = a.hamiltonian;
  const HamiltonianModel hb = b.hamiltonian;
  HamiltonianModel h(
      n1a + n1b, n2a + n2b,
      [=](const Vector& z) { return ha.energy(part_a(z)) + hb.energy(part_b(z)); },
      [=](const Vector& z) -> Vector {
        const Vector ga = ha.gradient(part_a(z));
        const Vector gb = hb.gradient(part_b(z));
        Vector g(z.size());
        g << ga.head(n1a), gb.head(n1b), ga.tail(n2a), gb.tail(n2b);
        return g;
      },
      [=](const Vector& za, const Vector& zb) {
        return ha.energy_difference(part_a(za), part_a(zb)) +
               hb.energy_difference(part_b(za), part_b(zb));
      });
  h.set_coordinate_difference([=](const Vector& z, Eigen::Index i, double value) {
    if (i < n1a) return ha.coordinate_difference(part_a(z), i, value);
    if (i < n1a + n1b) return hb.coordinate_difference(part_b(z), i - n1a, value);
    if (i < n1a + n1b + n2a) return ha.coordinate_difference(part_a(z), i - n1b, value);
    return hb.coordinate_difference(part_b(z), i - n1a - n2a, value);
  });
  if (ha.quadratic_form() && hb.quadratic_form()) {
    const Matrix qa = *ha.quadratic_form();
    const Matrix qb = *hb.quadratic_form();
    const Matrix qblk = numkit::block_diagonal(qa, qb);
    // Order of [z1a; z2a; z1b; z2b] positions for the combined energy vector.
    std::vector<Eigen::Index> eidx;
    for (Eigen::Index i = 0; i < n1a; ++i) eidx.push_back(i);
    for (Eigen::Index i = 0; i < n1b; ++i) eidx.push_back(n1a + n2a + i);
    for (Eigen::Index i = 0; i < n2a; ++i) eidx.push_back(n1a + i);
    for (Eigen::Index i = 0; i < n2b; ++i) eidx.push_back(n1a + n2a + n1b + i);
    const Eigen::Index ne = static_cast<Eigen::Index>(eidx.size());
    Matrix q(ne, ne);
    for (Eigen::Index k = 0; k < ne; ++k)
      for (Eigen::Index l = 0; l < ne; ++l) q(k, l) = qblk(eidx[k], eidx[l]);
    h.set_quadratic_form(std::move(q));
  }
  out.hamiltonian = std::move(h);

  const InputSignal ua = a.input;
  const InputSignal ub = b.input;
  out.input.m = m;
  out.input.u = [ua, ub, m](double t) -> Vector {
    Vector u(m);
    u << ua(t), ub(t);
    return u;
  };

  if (a.resistive || b.resistive) {
    const ResistiveFn ra = a.resistive;
    const ResistiveFn rb_fn = b.resistive;
    const Eigen::Index na = pa.n();
    out.resistive = [ra, rb_fn, idx, na, n](const Vector& w) -> Vector {
      Vector blk(n);
      for (Eigen::Index k = 0; k < n; ++k) blk(idx[k]) = w(k);
      Vector rblk = Vector::Zero(n);
      if (ra) rblk.head(na) = ra(blk.head(na));
      if (rb_fn) rblk.tail(n - na) = rb_fn(blk.tail(n - na));
      Vector r(n);
      for (Eigen::Index k = 0; k < n; ++k) r(k) = rblk(idx[k]);
      return r;
    };
  }

  require_valid(out);
  return out;
}

std::pair<State, State> split_interconnected(const SystemSpec& a, const SystemSpec& b,
                                             const State& combined) {
  const auto& pa = a.partition;
  const auto& pb = b.partition;
  if (combined.z1.size() != pa.n1 + pb.n1 || combined.z2.size() != pa.n2 + pb.n2 ||
      combined.z3.size() != pa.n3 + pb.n3) {
    throw DimensionMismatch("split_interconnected: state does not match the combined partition");
  }
  State sa(combined.z1.head(pa.n1), combined.z2.head(pa.n2), combined.z3.head(pa.n3));
  State sb(combined.z1.tail(pb.n1), combined.z2.tail(pb.n2), combined.z3.tail(pb.n3));
  return {std::move(sa), std::move(sb)};
}

State join_interconnected(const State& a, const State& b) {
  Vector z1(a.z1.size() + b.z1.size());
  Vector z2(a.z2.size() + b.z2.size());
  Vector z3(a.z3.size() + b.z3.size());
  z1 << a.z1, b.z1;
  z2 << a.z2, b.z2;
  z3 << a.z3, b.z3;
  return State(std::move(z1), std::move(z2), std::move(z3));
}

}  // namespace phdae
