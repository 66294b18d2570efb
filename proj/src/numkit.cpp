#include "phdae/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace phdae::numkit {

double inf_norm(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

double inf_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

bool all_finite(const Vector& v) { return v.allFinite(); }
bool all_finite(const Matrix& m) { return m.allFinite(); }

LuFactorization::LuFactorization(Matrix a) : lu_(std::move(a)) {
  if (lu_.rows() != lu_.cols()) {
    throw DimensionMismatch("lu: matrix is not square");
  }
  const Eigen::Index n = lu_.rows();
  perm_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) perm_(i) = static_cast<int>(i);
  const double scale = n == 0 ? 0.0 : lu_.cwiseAbs().maxCoeff();
  const double threshold = kSingularPivotRatio * scale;

  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index pivot_row = k;
    lu_.col(k).tail(n - k).cwiseAbs().maxCoeff(&pivot_row);
    pivot_row += k;
    const double pivot = lu_(pivot_row, k);
    if (!(std::abs(pivot) > threshold)) {
      std::ostringstream msg;
      msg << "lu: pivot " << std::abs(pivot) << " at column " << k
          << " below threshold " << threshold;
      throw SingularMatrix(msg.str());
    }
    if (pivot_row != k) {
      lu_.row(k).swap(lu_.row(pivot_row));
      std::swap(perm_(k), perm_(pivot_row));
    }
    const double inv = 1.0 / lu_(k, k);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double factor = lu_(i, k) * inv;
      lu_(i, k) = factor;
      if (factor != 0.0) {
        lu_.row(i).tail(n - k - 1).noalias() -= factor * lu_.row(k).tail(n - k - 1);
      }
    }
  }
}

Vector LuFactorization::solve(const Vector& b) const {
  const Eigen::Index n = lu_.rows();
  if (b.size() != n) throw DimensionMismatch("lu: rhs length mismatch");
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = b(perm_(i));
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i) -= lu_.row(i).head(i).dot(x.head(i));
  }
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    x(i) -= lu_.row(i).tail(n - i - 1).dot(x.tail(n - i - 1));
    x(i) /= lu_(i, i);
  }
  return x;
}

Vector lu_solve(const Matrix& a, const Vector& b) {
  if (a.rows() != b.size()) throw DimensionMismatch("lu_solve: rhs length mismatch");
  return LuFactorization(a).solve(b);
}

Eigen::Index matrix_rank(const Matrix& a, double relative_tol) {
  Matrix m = a;
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  if (m.size() == 0) return 0;
  const double threshold = relative_tol * std::max(1.0, m.cwiseAbs().maxCoeff());
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < std::min(rows, cols); ++k) {
    Eigen::Index r = 0;
    Eigen::Index c = 0;
    const double pivot = m.bottomRightCorner(rows - k, cols - k).cwiseAbs().maxCoeff(&r, &c);
    if (pivot <= threshold) break;
    m.row(k).swap(m.row(k + r));
    m.col(k).swap(m.col(k + c));
    for (Eigen::Index i = k + 1; i < rows; ++i) {
      const double factor = m(i, k) / m(k, k);
      m.row(i).tail(cols - k) -= factor * m.row(k).tail(cols - k);
    }
    ++rank;
  }
  return rank;
}

Matrix finite_difference_jacobian(const ResidualFn& residual, const Vector& x,
                                  const Vector& fx) {
  static const double kSqrtEps = std::sqrt(std::numeric_limits<double>::epsilon());
  Matrix jac(fx.size(), x.size());
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = kSqrtEps * (1.0 + std::abs(x(i)));
    xp(i) = x(i) + h;
    const double actual = xp(i) - x(i);
    jac.col(i) = (residual(xp) - fx) / actual;
    xp(i) = x(i);
  }
  return jac;
}

NewtonResult newton_solve(const ResidualFn& residual,
                          const std::optional<JacobianFn>& jacobian,
                          const Vector& x0, const NewtonOptions& options) {
  if (!(options.tol > 0.0)) throw Error("newton_solve: tol must be positive");
  Vector x = x0;
  Vector r = residual(x);
  if (r.size() != x.size()) throw DimensionMismatch("newton_solve: residual length differs from x0");

  std::optional<LuFactorization> last_lu;
  for (int iter = 0;; ++iter) {
    double norm = inf_norm(r);
    if (!std::isfinite(norm)) {
      throw NoConvergence("newton_solve: residual is not finite", x, norm, iter);
    }
    if (norm <= options.tol) {
      // One chord correction with the last factorization tightens the linear
      // rows of the residual well below tol at O(n^2) cost.
      if (last_lu && norm > 0.0) {
        try {
          Vector xc = x - last_lu->solve(r);
          Vector rc = residual(xc);
          const double nc = inf_norm(rc);
          if (std::isfinite(nc) && nc <= norm) {
            x = std::move(xc);
            norm = nc;
          }
        } catch (const DomainError&) {
        }
      }
      return NewtonResult{std::move(x), iter, norm};
    }
    if (iter >= options.max_iter) {
      std::ostringstream msg;
      msg << "newton_solve: no convergence after " << iter
          << " iterations, residual " << norm;
      throw NoConvergence(msg.str(), x, norm, iter);
    }

    Matrix jac = jacobian ? (*jacobian)(x) : finite_difference_jacobian(residual, x, r);
    last_lu.emplace(std::move(jac));
    const Vector dx = last_lu->solve(r);

    // Halve the step until the residual decreases; keep the best trial if none does.
    const double r2 = r.norm();
    double scale = 1.0;
    std::optional<std::pair<Vector, Vector>> best;
    double best_norm = std::numeric_limits<double>::infinity();
    for (int bt = 0;; ++bt) {
      if (bt > options.max_backtracks) {
        if (!best) throw DomainError("newton_solve: every trial point left the domain");
        break;
      }
      try {
        Vector trial = x - scale * dx;
        Vector r_trial = residual(trial);
        const double n_trial = r_trial.norm();
        if (n_trial <= (1.0 - 1e-4 * scale) * r2) {
          best.emplace(std::move(trial), std::move(r_trial));
          break;
        }
        if (n_trial < best_norm) {
          best_norm = n_trial;
          best.emplace(std::move(trial), std::move(r_trial));
        }
        if (bt >= options.max_decrease_backtracks) break;
      } catch (const DomainError&) {
      }
      scale *= 0.5;
    }
    x = std::move(best->first);
    r = std::move(best->second);
  }
}

namespace {

void check_symmetric(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("eigenvalues: matrix is not square");
  const double asym = inf_norm(Matrix(a - a.transpose()));
  if (asym > 1e-12 * (1.0 + inf_norm(a))) {
    std::ostringstream msg;
    msg << "matrix is not symmetric, |A - A^T|_inf = " << asym;
    throw NotSymmetric(msg.str());
  }
}

}  // namespace

Vector symmetric_eigenvalues(const Matrix& input) {
  check_symmetric(input);
  Matrix a = 0.5 * (input + input.transpose());
  const Eigen::Index n = a.rows();
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= 1e-15 * scale) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Vector eig = a.diagonal();
  std::sort(eig.data(), eig.data() + eig.size());
  return eig;
}

double min_symmetric_eigenvalue(const Matrix& a) {
  if (a.size() == 0) return std::numeric_limits<double>::infinity();
  return symmetric_eigenvalues(a)(0);
}

Matrix block_diagonal(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace phdae::numkit
