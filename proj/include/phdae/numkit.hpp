#pragma once

// Small dense linear-algebra and root-finding toolkit shared by all modules.

#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "phdae/errors.hpp"

namespace phdae::numkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

using ResidualFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;

/// Pivots smaller than this times max |a_ij| are treated as zero.
inline constexpr double kSingularPivotRatio = 1e-14;

double inf_norm(const Vector& v);
double inf_norm(const Matrix& m);  // max absolute row sum

bool all_finite(const Vector& v);
bool all_finite(const Matrix& m);

/// LU factorization with partial pivoting. Reusable across right-hand sides.
class LuFactorization {
 public:
  /// Throws SingularMatrix if a pivot magnitude drops below
  /// kSingularPivotRatio * max |entry|, DimensionMismatch if A is not square.
  explicit LuFactorization(Matrix a);

  Vector solve(const Vector& b) const;
  Eigen::Index size() const { return lu_.rows(); }

 private:
  Matrix lu_;
  Eigen::VectorXi perm_;
};

Vector lu_solve(const Matrix& a, const Vector& b);

/// Numerical rank by Gaussian elimination with complete pivoting.
Eigen::Index matrix_rank(const Matrix& a, double relative_tol = 1e-12);

/// Forward differences with h_i = sqrt(machine eps) * (1 + |x_i|).
Matrix finite_difference_jacobian(const ResidualFn& residual, const Vector& x,
                                  const Vector& fx);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 50;
  /// Trial points that raise DomainError are backtracked by halving.
  int max_backtracks = 30;
  /// Halvings tried while looking for a decrease of |residual|_2.
  int max_decrease_backtracks = 8;
};

struct NewtonResult {
  Vector x;
  int iterations = 0;
  double residual_norm = 0.0;
};

/// Solves residual(x) = 0 to ||residual||_inf <= tol. Falls back to finite
/// differences when no Jacobian is given. Throws NoConvergence or
/// SingularMatrix.
NewtonResult newton_solve(const ResidualFn& residual,
                          const std::optional<JacobianFn>& jacobian,
                          const Vector& x0, const NewtonOptions& options = {});

/// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
/// Throws NotSymmetric when |A - A^T| exceeds 1e-12 relative.
double min_symmetric_eigenvalue(const Matrix& a);

/// All eigenvalues (ascending) by cyclic Jacobi rotations.
Vector symmetric_eigenvalues(const Matrix& a);

Matrix block_diagonal(const Matrix& a, const Matrix& b);

}  // namespace phdae::numkit
