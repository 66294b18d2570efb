#pragma once

// Energy functions H(z1, z2) and their discrete gradients.
//
// Throughout the library the energy variables are passed as one stacked
// vector z = [z1; z2] of length n1 + n2.

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "phdae/numkit.hpp"

namespace phdae {

using numkit::Matrix;
using numkit::Vector;

class HamiltonianModel {
 public:
  using EnergyFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;
  using DifferenceFn = std::function<double(const Vector& za, const Vector& zb)>;
  /// H(z with z_i replaced by value) - H(z).
  using CoordinateDifferenceFn =
      std::function<double(const Vector& z, Eigen::Index i, double value)>;

  HamiltonianModel() = default;

  /// `difference` (optional) returns H(zb) - H(za) without catastrophic
  /// cancellation. Discrete gradients divide this by |zb - za|, so models
  /// that reach near-steady states should provide one.
  HamiltonianModel(Eigen::Index n1, Eigen::Index n2, EnergyFn energy,
                   GradientFn gradient, DifferenceFn difference = nullptr);

  Eigen::Index n1() const { return n1_; }
  Eigen::Index n2() const { return n2_; }
  Eigen::Index size() const { return n1_ + n2_; }

  double energy(const Vector& z) const;
  Vector gradient(const Vector& z) const;
  double energy_difference(const Vector& za, const Vector& zb) const;

  bool has_exact_difference() const { return static_cast<bool>(difference_); }

  /// Falls back to energy_difference on a modified copy, O(n) per call.
  double coordinate_difference(const Vector& z, Eigen::Index i, double value) const;
  /// Optional O(1) override; Itoh-Abe calls this once per coordinate.
  void set_coordinate_difference(CoordinateDifferenceFn fn) { coordinate_difference_ = std::move(fn); }
  const CoordinateDifferenceFn& coordinate_difference_fn() const { return coordinate_difference_; }
  const DifferenceFn& difference_fn() const { return difference_; }
  const EnergyFn& energy_fn() const { return energy_; }
  const GradientFn& gradient_fn() const { return gradient_; }

  /// Hessian blocks when the energy is quadratic (H = 1/2 z^T Q z).
  const std::optional<Matrix>& quadratic_form() const { return quadratic_; }
  void set_quadratic_form(Matrix q) { quadratic_ = std::move(q); }

 private:
  void check_size(const Vector& z) const;

  Eigen::Index n1_ = 0;
  Eigen::Index n2_ = 0;
  EnergyFn energy_;
  GradientFn gradient_;
  DifferenceFn difference_;
  CoordinateDifferenceFn coordinate_difference_;
  std::optional<Matrix> quadratic_;
};

/// H = 1/2 <z1, M1 z1> + 1/2 <z2, M2 z2> with M1, M2 symmetric positive definite.
struct QuadraticHamiltonian {
  Matrix m1;
  Matrix m2;
};

/// Throws ValidationError when M1 or M2 is not SPD.
HamiltonianModel make_quadratic(const QuadraticHamiltonian& q);

/// H = 1/2 z^T Q z for an arbitrary symmetric PSD Q over (n1, n2).
HamiltonianModel make_quadratic_form(Eigen::Index n1, Eigen::Index n2, const Matrix& q);

/// Pendulum H(q, p) = p^2/2 + (1 - cos q) with q, p both in z2.
HamiltonianModel make_pendulum();

enum class DiscreteGradientKind { Gonzalez, ItohAbe };

std::string to_string(DiscreteGradientKind kind);

/// Returns g with <g, zb - za> = H(zb) - H(za).
///
/// Gonzalez: the midpoint gradient plus a correction along zb - za; falls back
/// to grad H(za) when |zb - za| < 1e-13.
/// ItohAbe: divided differences along coordinates in natural order 0..n-1;
/// a coordinate whose increment is below 1e-13 uses the partial derivative.
Vector discrete_gradient(const HamiltonianModel& h, DiscreteGradientKind kind,
                         const Vector& za, const Vector& zb);

using DiscreteGradientFn = std::function<Vector(const Vector& za, const Vector& zb)>;

/// Random probes are drawn uniformly from the box center +- radius.
struct ProbeRegion {
  Vector center;
  double radius = 1.0;
  std::uint64_t seed = 0x5eed;
};

struct DiscreteGradientReport {
  int samples = 0;
  /// max |<g, zb-za> - (H(zb)-H(za))| / (1 + |H(za)| + |H(zb)|)
  double max_energy_violation = 0.0;
  /// max |g(z, z) - grad H(z)|_inf / (1 + |grad H(z)|_inf)
  double max_consistency_violation = 0.0;
};

DiscreteGradientReport check_discrete_gradient_axioms(const HamiltonianModel& h,
                                                      DiscreteGradientKind kind,
                                                      int samples,
                                                      const ProbeRegion& region);

/// Same probes for an arbitrary two-point map (used for fault injection).
DiscreteGradientReport check_discrete_gradient_axioms(const HamiltonianModel& h,
                                                      const DiscreteGradientFn& dg,
                                                      int samples,
                                                      const ProbeRegion& region);

struct CoercivityConstants {
  double c1 = 1.0;
  double c2 = 1.0;
};

struct CoercivityReport {
  int samples = 0;
  int violations = 0;
  /// Largest c_i |z_i|^2 - <z_i, dH/dz_i> seen (positive means violated).
  double worst_margin = -std::numeric_limits<double>::infinity();
  Vector worst_state;
};

/// Samples states uniformly in the ball of the given radius around `center`
/// (origin when empty) and checks both coercivity inequalities.
CoercivityReport check_coercivity(const HamiltonianModel& h, const CoercivityConstants& c,
                                  int samples, double radius, std::uint64_t seed = 0x5eed,
                                  const Vector& center = Vector());

}  // namespace phdae
