#include <cmath>
#include <random>
#include <sstream>

#include "common.hpp"
#include "phdae/models.hpp"

namespace phdae {

HamiltonianModel make_capacitor_energy(double quartic) {
  if (quartic < 0.0) throw ValidationError("capacitor: quartic coefficient must be nonnegative");
  return HamiltonianModel(
      1, 0,
      [quartic](const Vector& z) {
        const double q2 = z(0) * z(0);
        return 0.25 * quartic * q2 * q2 + 0.5 * q2;
      },
      [quartic](const Vector& z) -> Vector {
        return Vector::Constant(1, quartic * z(0) * z(0) * z(0) + z(0));
      },
      [quartic](const Vector& za, const Vector& zb) {
        const double a = za(0), b = zb(0);
        return (b - a) * (b + a) * (0.25 * quartic * (a * a + b * b) + 0.5);
      });
}

HamiltonianModel make_inductor_energy(Eigen::Index n, double inductance) {
  if (!(inductance > 0.0)) throw ValidationError("inductor: inductance must be positive");
  return make_quadratic_form(0, n, Matrix::Identity(n, n) / inductance);
}

CircuitParams default_circuit_params() {
  CircuitParams p;
  p.A_S = Matrix{{1.0}, {0.0}};
  p.A_R = Matrix{{1.0}, {-1.0}};
  p.A_C = Matrix{{0.0}, {1.0}};
  p.A_L = Matrix{{0.0}, {1.0}};
  p.G = [](const Vector& v) -> Vector { return v + v.cwiseProduct(v).cwiseProduct(v); };
  p.H_C = make_capacitor_energy(1.0);
  p.H_L = make_inductor_energy(1);
  p.u_S = InputSignal::zero(1);
  return p;
}

namespace {

void require_incidence(const Matrix& a, Eigen::Index nodes, const std::string& what) {
  if (a.rows() != nodes) {
    std::ostringstream msg;
    msg << "circuit: " << what << " has " << a.rows() << " rows, expected " << nodes;
    throw ValidationError(msg.str());
  }
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0 && a(i, j) != 1.0 && a(i, j) != -1.0) {
        throw ValidationError("circuit: " + what + " entries must be -1, 0 or 1");
      }
}

void require_monotone(const std::function<Vector(const Vector&)>& G, Eigen::Index nr) {
  std::mt19937_64 rng(0x6c17);
  std::uniform_real_distribution<double> unit(-2.0, 2.0);
  for (int s = 0; s < 200; ++s) {
    Vector a(nr), b(nr);
    for (Eigen::Index i = 0; i < nr; ++i) {
      a(i) = unit(rng);
      b(i) = unit(rng);
    }
    const Vector ga = G(a);
    const Vector gb = G(b);
    if (ga.size() != nr || gb.size() != nr) throw ValidationError("circuit: G returns the wrong size");
    const double pairing = (ga - gb).dot(a - b);
    if (pairing < -1e-12 * (1.0 + (a - b).squaredNorm())) {
      std::ostringstream msg;
      msg << "circuit: G is not monotone, <G(a) - G(b), a - b> = " << pairing;
      throw ValidationError(msg.str());
    }
  }
}

}  // namespace

SystemSpec make_circuit(const CircuitParams& p) {
  const Eigen::Index nodes = std::max({p.A_C.rows(), p.A_R.rows(), p.A_L.rows(), p.A_S.rows()});
  if (nodes == 0) throw ValidationError("circuit: no nodes");
  const Eigen::Index nc = p.A_C.cols();
  const Eigen::Index nr = p.A_R.cols();
  const Eigen::Index nl = p.A_L.cols();
  const Eigen::Index ns = p.A_S.cols();
  require_incidence(p.A_C, nodes, "A_C");
  require_incidence(p.A_R, nodes, "A_R");
  require_incidence(p.A_L, nodes, "A_L");
  require_incidence(p.A_S, nodes, "A_S");
  if (p.H_C.n1() != nc || p.H_C.n2() != 0) throw ValidationError("circuit: H_C must be defined on (n_C, 0)");
  if (p.H_L.n1() != 0 || p.H_L.n2() != nl) throw ValidationError("circuit: H_L must be defined on (0, n_L)");
  if (p.u_S.m != ns) throw ValidationError("circuit: u_S has the wrong size");
  if (nr > 0 && !p.G && !p.G_linear) throw ValidationError("circuit: resistors need G");
  if (p.G_linear) {
    detail::require_shape(*p.G_linear, nr, nr, "circuit G_linear");
    detail::require_definite(*p.G_linear, "circuit G_linear", false);
  } else if (nr > 0) {
    require_monotone(p.G, nr);
  }

  // Flow order: q_C', i_L = dH/dpsi_L, i_S, phi.
  const Eigen::Index o_s = nc + nl;
  const Eigen::Index o_phi = o_s + ns;
  const Eigen::Index n = o_phi + nodes;
  SystemSpec s;
  s.name = "circuit";
  s.partition = StatePartition{nc, nl, ns + nodes};
  Matrix& J = s.structure.J;
  J = Matrix::Zero(n, n);
  J.block(0, o_phi, nc, nodes) = p.A_C.transpose();
  J.block(nc, o_phi, nl, nodes) = p.A_L.transpose();
  J.block(o_s, o_phi, ns, nodes) = p.A_S.transpose();
  J.block(o_phi, 0, nodes, nc) = -p.A_C;
  J.block(o_phi, nc, nodes, nl) = -p.A_L;
  J.block(o_phi, o_s, nodes, ns) = -p.A_S;
  s.structure.R = Matrix::Zero(n, n);
  if (p.G_linear && nr > 0) {
    s.structure.R.block(o_phi, o_phi, nodes, nodes) = p.A_R * (*p.G_linear) * p.A_R.transpose();
  } else if (nr > 0) {
    const Matrix a_r = p.A_R;
    const auto G = p.G;
    s.resistive = [a_r, G, o_phi, nodes, n](const Vector& w) -> Vector {
      Vector r = Vector::Zero(n);
      r.segment(o_phi, nodes) = a_r * G(a_r.transpose() * w.segment(o_phi, nodes));
      return r;
    };
  }
  s.structure.B = Matrix::Zero(n, ns);
  s.structure.B.block(o_s, 0, ns, ns) = -Matrix::Identity(ns, ns);

  const HamiltonianModel hc = p.H_C;
  const HamiltonianModel hl = p.H_L;
  HamiltonianModel h(
      nc, nl,
      [hc, hl, nc, nl](const Vector& z) { return hc.energy(z.head(nc)) + hl.energy(z.tail(nl)); },
      [hc, hl, nc, nl](const Vector& z) -> Vector {
        Vector g(nc + nl);
        g << hc.gradient(z.head(nc)), hl.gradient(z.tail(nl));
        return g;
      },
      [hc, hl, nc, nl](const Vector& za, const Vector& zb) {
        return hc.energy_difference(za.head(nc), zb.head(nc)) +
               hl.energy_difference(za.tail(nl), zb.tail(nl));
      });
  h.set_coordinate_difference([hc, hl, nc, nl](const Vector& z, Eigen::Index i, double value) {
    if (i < nc) return hc.coordinate_difference(z.head(nc), i, value);
    return hl.coordinate_difference(z.tail(nl), i - nc, value);
  });
  s.hamiltonian = std::move(h);
  s.input = p.u_S;
  require_valid(s);
  return s;
}

}  // namespace phdae
