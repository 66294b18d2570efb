#include "common.hpp"
#include "phdae/models.hpp"

namespace phdae {

SystemSpec make_poroelastic(const PoroelasticParams& p) {
  const Eigen::Index nu = p.A.rows();
  const Eigen::Index np = p.C.rows();
  detail::require_definite(p.A, "poroelastic A", true);
  detail::require_definite(p.C, "poroelastic C", true);
  detail::require_definite(p.Bflow, "poroelastic Bflow", true);
  detail::require_shape(p.D, np, nu, "poroelastic D");
  detail::require_shape(p.Bflow, np, np, "poroelastic Bflow");
  if (p.f.m != nu || p.g.m != np) throw ValidationError("poroelastic: f or g has the wrong size");

  const Eigen::Index n = nu + np;
  SystemSpec s;
  s.name = "poroelastic";
  s.partition = StatePartition{nu, np, 0};
  s.structure.J = Matrix::Zero(n, n);
  s.structure.J.topRightCorner(nu, np) = p.D.transpose();
  s.structure.J.bottomLeftCorner(np, nu) = -p.D;
  s.structure.R = Matrix::Zero(n, n);
  s.structure.R.bottomRightCorner(np, np) = 0.5 * (p.Bflow + p.Bflow.transpose());
  s.structure.B = Matrix::Identity(n, n);
  s.hamiltonian = make_quadratic(QuadraticHamiltonian{p.A, numkit::Matrix(p.C.inverse())});
  const InputSignal f = p.f;
  const InputSignal g = p.g;
  s.input = InputSignal{n, [f, g, n](double t) -> Vector {
                          Vector u(n);
                          u << f(t), g(t);
                          return u;
                        }};
  require_valid(s);
  return s;
}

State poroelastic_state(const PoroelasticParams& p, const Vector& p0, double t0) {
  if (p0.size() != p.C.rows()) throw DimensionMismatch("poroelastic_state: p0 has the wrong size");
  const Vector rhs = p.D.transpose() * p0 + p.f(t0);
  return State(numkit::lu_solve(p.A, rhs), p.C * p0, Vector());
}

}  // namespace phdae
