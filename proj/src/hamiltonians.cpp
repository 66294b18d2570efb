#include "phdae/hamiltonians.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace phdae {

namespace {

constexpr double kCoincidence = 1e-13;

void require_spd(const Matrix& m, const char* name) {
  if (m.rows() != m.cols()) {
    throw ValidationError(std::string(name) + " is not square");
  }
  if (m.size() == 0) return;
  double min_eig = 0.0;
  try {
    min_eig = numkit::min_symmetric_eigenvalue(m);
  } catch (const NotSymmetric&) {
    throw ValidationError(std::string(name) + " is not symmetric");
  }
  if (!(min_eig > 0.0)) {
    std::ostringstream msg;
    msg << name << " is not positive definite, min eig " << min_eig;
    throw ValidationError(msg.str());
  }
}

Vector random_box_point(std::mt19937_64& rng, const ProbeRegion& region) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vector z(region.center.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = region.center(i) + region.radius * unit(rng);
  return z;
}

}  // namespace

HamiltonianModel::HamiltonianModel(Eigen::Index n1, Eigen::Index n2, EnergyFn energy,
                                   GradientFn gradient, DifferenceFn difference)
    : n1_(n1),
      n2_(n2),
      energy_(std::move(energy)),
      gradient_(std::move(gradient)),
      difference_(std::move(difference)) {
  if (n1 < 0 || n2 < 0) throw DimensionMismatch("hamiltonian: negative block size");
  if (!energy_ || !gradient_) throw Error("hamiltonian: energy and gradient are required");
}

void HamiltonianModel::check_size(const Vector& z) const {
  if (z.size() != size()) {
    std::ostringstream msg;
    msg << "hamiltonian: expected " << size() << " energy variables, got " << z.size();
    throw DimensionMismatch(msg.str());
  }
}

double HamiltonianModel::energy(const Vector& z) const {
  check_size(z);
  return energy_(z);
}

Vector HamiltonianModel::gradient(const Vector& z) const {
  check_size(z);
  return gradient_(z);
}

double HamiltonianModel::energy_difference(const Vector& za, const Vector& zb) const {
  check_size(za);
  check_size(zb);
  if (difference_) return difference_(za, zb);
  return energy_(zb) - energy_(za);
}

double HamiltonianModel::coordinate_difference(const Vector& z, Eigen::Index i,
                                               double value) const {
  check_size(z);
  if (i < 0 || i >= size()) throw DimensionMismatch("coordinate_difference: index out of range");
  if (coordinate_difference_) return coordinate_difference_(z, i, value);
  Vector zb = z;
  zb(i) = value;
  return energy_difference(z, zb);
}

HamiltonianModel make_quadratic_form(Eigen::Index n1, Eigen::Index n2, const Matrix& q) {
  if (q.rows() != n1 + n2 || q.cols() != n1 + n2) {
    throw DimensionMismatch("quadratic hamiltonian: Q has wrong size");
  }
  const Matrix sym = 0.5 * (q + q.transpose());
  HamiltonianModel h(
      n1, n2, [sym](const Vector& z) { return 0.5 * z.dot(sym * z); },
      [sym](const Vector& z) -> Vector { return sym * z; },
      [sym](const Vector& za, const Vector& zb) {
        return 0.5 * (za + zb).dot(sym * (zb - za));
      });
  h.set_coordinate_difference([sym](const Vector& z, Eigen::Index i, double value) {
    const double d = value - z(i);
    return d * sym.row(i).dot(z) + 0.5 * sym(i, i) * d * d;
  });
  h.set_quadratic_form(sym);
  return h;
}

HamiltonianModel make_quadratic(const QuadraticHamiltonian& q) {
  require_spd(q.m1, "M1");
  require_spd(q.m2, "M2");
  return make_quadratic_form(q.m1.rows(), q.m2.rows(), numkit::block_diagonal(q.m1, q.m2));
}

HamiltonianModel make_pendulum() {
  return HamiltonianModel(
      0, 2, [](const Vector& z) { return 0.5 * z(1) * z(1) + (1.0 - std::cos(z(0))); },
      [](const Vector& z) -> Vector { return Vector{{std::sin(z(0)), z(1)}}; },
      [](const Vector& za, const Vector& zb) {
        // cos a - cos b = 2 sin((a+b)/2) sin((b-a)/2)
        const double dq = 2.0 * std::sin(0.5 * (za(0) + zb(0))) * std::sin(0.5 * (zb(0) - za(0)));
        return 0.5 * (za(1) + zb(1)) * (zb(1) - za(1)) + dq;
      });
}

std::string to_string(DiscreteGradientKind kind) {
  switch (kind) {
    case DiscreteGradientKind::Gonzalez:
      return "gonzalez";
    case DiscreteGradientKind::ItohAbe:
      return "itoh_abe";
  }
  return "unknown";
}

namespace {

Vector gonzalez(const HamiltonianModel& h, const Vector& za, const Vector& zb) {
  const Vector dz = zb - za;
  const double dz2 = dz.squaredNorm();
  if (std::sqrt(dz2) < kCoincidence) return h.gradient(za);
  Vector g = h.gradient(0.5 * (za + zb));
  const double defect = h.energy_difference(za, zb) - g.dot(dz);
  g += (defect / dz2) * dz;
  return g;
}

Vector itoh_abe(const HamiltonianModel& h, const Vector& za, const Vector& zb) {
  const Eigen::Index n = za.size();
  Vector g(n);
  Vector lower = za;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double step = zb(i) - za(i);
    if (std::abs(step) < kCoincidence) {
      lower(i) = zb(i);
      g(i) = h.gradient(lower)(i);
      continue;
    }
    g(i) = h.coordinate_difference(lower, i, zb(i)) / step;
    lower(i) = zb(i);
  }
  return g;
}

}  // namespace

Vector discrete_gradient(const HamiltonianModel& h, DiscreteGradientKind kind,
                         const Vector& za, const Vector& zb) {
  if (za.size() != h.size() || zb.size() != h.size()) {
    throw DimensionMismatch("discrete_gradient: state size mismatch");
  }
  switch (kind) {
    case DiscreteGradientKind::Gonzalez:
      return gonzalez(h, za, zb);
    case DiscreteGradientKind::ItohAbe:
      return itoh_abe(h, za, zb);
  }
  throw Error("discrete_gradient: unknown kind");
}

DiscreteGradientReport check_discrete_gradient_axioms(const HamiltonianModel& h,
                                                      DiscreteGradientKind kind,
                                                      int samples,
                                                      const ProbeRegion& region) {
  return check_discrete_gradient_axioms(
      h, [&h, kind](const Vector& a, const Vector& b) { return discrete_gradient(h, kind, a, b); },
      samples, region);
}

DiscreteGradientReport check_discrete_gradient_axioms(const HamiltonianModel& h,
                                                      const DiscreteGradientFn& dg,
                                                      int samples,
                                                      const ProbeRegion& region) {
  if (samples < 1) throw Error("check_discrete_gradient_axioms: samples must be >= 1");
  if (region.center.size() != h.size()) {
    throw DimensionMismatch("check_discrete_gradient_axioms: probe center size mismatch");
  }
  std::mt19937_64 rng(region.seed);
  DiscreteGradientReport report;
  report.samples = samples;
  for (int s = 0; s < samples; ++s) {
    const Vector za = random_box_point(rng, region);
    const Vector zb = random_box_point(rng, region);
    const Vector g = dg(za, zb);
    const double ha = h.energy(za);
    const double hb = h.energy(zb);
    const double violation =
        std::abs(g.dot(zb - za) - h.energy_difference(za, zb)) / (1.0 + std::abs(ha) + std::abs(hb));
    report.max_energy_violation = std::max(report.max_energy_violation, violation);

    const Vector exact = h.gradient(za);
    const double consistency =
        numkit::inf_norm(Vector(dg(za, za) - exact)) / (1.0 + numkit::inf_norm(exact));
    report.max_consistency_violation = std::max(report.max_consistency_violation, consistency);
  }
  return report;
}

CoercivityReport check_coercivity(const HamiltonianModel& h, const CoercivityConstants& c,
                                  int samples, double radius, std::uint64_t seed,
                                  const Vector& center) {
  if (samples < 1) throw Error("check_coercivity: samples must be >= 1");
  if (!(radius > 0.0)) throw Error("check_coercivity: radius must be positive");
  if (!(c.c1 > 0.0) || !(c.c2 > 0.0)) throw Error("check_coercivity: constants must be positive");
  const Eigen::Index n = h.size();
  const Vector origin = center.size() == 0 ? Vector::Zero(n) : center;
  if (origin.size() != n) throw DimensionMismatch("check_coercivity: center size mismatch");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CoercivityReport report;
  report.samples = samples;
  for (int s = 0; s < samples; ++s) {
    Vector dir(n);
    for (Eigen::Index i = 0; i < n; ++i) dir(i) = normal(rng);
    const double len = dir.norm();
    if (len > 0.0) dir /= len;
    const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(std::max<Eigen::Index>(n, 1)));
    const Vector z = origin + r * dir;
    const Vector g = h.gradient(z);

    double margin = -std::numeric_limits<double>::infinity();
    if (h.n1() > 0) {
      const auto z1 = z.head(h.n1());
      margin = std::max(margin, c.c1 * z1.squaredNorm() - z1.dot(g.head(h.n1())));
    }
    if (h.n2() > 0) {
      const auto z2 = z.tail(h.n2());
      margin = std::max(margin, c.c2 * z2.squaredNorm() - z2.dot(g.tail(h.n2())));
    }
    // Round-off on exactly tight constants (c = eigenvalue) is not a violation.
    const double slack = 1e-12 * (1.0 + z.squaredNorm());
    if (margin > slack) ++report.violations;
    if (margin > report.worst_margin) {
      report.worst_margin = margin;
      report.worst_state = z;
    }
  }
  return report;
}

}  // namespace phdae
