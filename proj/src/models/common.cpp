#include "common.hpp"

#include <sstream>

namespace phdae::detail {

void require_definite(const Matrix& m, const std::string& what, bool strict) {
  if (m.rows() != m.cols()) throw ValidationError(what + " is not square");
  if (m.size() == 0) return;
  const double asym = numkit::inf_norm(Matrix(m - m.transpose()));
  if (asym > 1e-12 * (1.0 + numkit::inf_norm(m))) {
    std::ostringstream msg;
    msg << what << " is not symmetric, |M - M^T|_inf = " << asym;
    throw ValidationError(msg.str());
  }
  const double min_eig = numkit::min_symmetric_eigenvalue(0.5 * (m + m.transpose()));
  if (strict ? !(min_eig > 0.0) : min_eig < -1e-10) {
    std::ostringstream msg;
    msg << what << " is not positive " << (strict ? "definite" : "semidefinite") << ", min eig "
        << min_eig;
    throw ValidationError(msg.str());
  }
}

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream msg;
    msg << what << " is " << m.rows() << "x" << m.cols() << ", expected " << rows << "x" << cols;
    throw ValidationError(msg.str());
  }
}

}  // namespace phdae::detail
