#include "common.hpp"
#include "phdae/models.hpp"

namespace phdae {

SystemSpec make_mechanical(const MechanicalParams& p) {
  const Eigen::Index d = p.M.rows();
  const Eigen::Index c = p.Bc.rows();
  detail::require_definite(p.M, "mechanical M", true);
  detail::require_definite(p.K, "mechanical K", true);
  detail::require_definite(p.D, "mechanical D", false);
  detail::require_shape(p.K, d, d, "mechanical K");
  detail::require_shape(p.D, d, d, "mechanical D");
  detail::require_shape(p.Bc, c, d, "mechanical Bc");
  if (c > 0 && numkit::matrix_rank(p.Bc) < c) {
    throw ValidationError("mechanical: constraint matrix Bc does not have full row rank");
  }
  if (p.f.m != d || p.g.m != c) throw ValidationError("mechanical: f or g has the wrong size");

  const Eigen::Index n = 2 * d + c;
  SystemSpec s;
  s.name = "mechanical";
  s.partition = StatePartition{0, 2 * d, c};
  Matrix& J = s.structure.J;
  J = Matrix::Zero(n, n);
  J.block(0, d, d, d) = p.K;
  J.block(d, 0, d, d) = -p.K;
  J.block(d, 2 * d, d, c) = -p.Bc.transpose();
  J.block(2 * d, d, c, d) = p.Bc;
  s.structure.R = Matrix::Zero(n, n);
  s.structure.R.block(d, d, d, d) = 0.5 * (p.D + p.D.transpose());
  Matrix& B = s.structure.B;
  B = Matrix::Zero(n, d + c);
  B.block(d, 0, d, d) = Matrix::Identity(d, d);
  B.block(2 * d, d, c, c) = -Matrix::Identity(c, c);

  s.hamiltonian = make_quadratic(QuadraticHamiltonian{Matrix(0, 0),
                                                      numkit::block_diagonal(p.K.inverse(), p.M.inverse())});
  const InputSignal f = p.f;
  const InputSignal g = p.g;
  const Eigen::Index m = d + c;
  s.input = InputSignal{m, [f, g, m](double t) -> Vector {
                          Vector u(m);
                          u << f(t), g(t);
                          return u;
                        }};
  require_valid(s);
  return s;
}

Vector mechanical_consistent_lambda(const MechanicalParams& p, const Vector& x0, const Vector& y0,
                                    double t0) {
  const Eigen::Index d = p.M.rows();
  const Eigen::Index c = p.Bc.rows();
  if (x0.size() != d || y0.size() != d) throw DimensionMismatch("mechanical: x0/y0 size");
  if (c == 0) return Vector();
  const Matrix bm = p.Bc * p.M.inverse();
  const Vector force = p.K * x0 + p.D * y0 - p.f(t0);
  return -numkit::lu_solve(bm * p.Bc.transpose(), bm * force);
}

State mechanical_state(const MechanicalParams& p, const Vector& x0, const Vector& y0,
                       const Vector& lambda0, double t0) {
  const Eigen::Index d = p.M.rows();
  const Eigen::Index c = p.Bc.rows();
  if (x0.size() != d || y0.size() != d) throw DimensionMismatch("mechanical_state: x0/y0 size");
  Vector lam = lambda0.size() == 0 ? mechanical_consistent_lambda(p, x0, y0, t0) : lambda0;
  if (lam.size() != c) throw DimensionMismatch("mechanical_state: lambda0 size");
  Vector z2(2 * d);
  z2 << p.K * x0, p.M * y0;
  return State(Vector(), std::move(z2), std::move(lam));
}

}  // namespace phdae
