#pragma once

// System-to-system transforms: epsilon-regularization of the algebraic block
// and power-preserving interconnection of two systems.

#include "phdae/core.hpp"

namespace phdae {

struct RegularizationConfig {
  double epsilon = 1e-6;
};

/// Replaces the algebraic rows 0 = (...)_3 by eps z3' = (...)_3.
///
/// The result has partition (n1, n2 + n3, 0); the appended energy variables
/// are q = eps z3 with energy |q|^2 / (2 eps) = (eps/2)|z3|^2, so dH/dq = z3
/// and the flow vector keeps its layout. J, R and B are unchanged.
/// Throws NothingToRegularize when n3 = 0, Error when eps <= 0.
SystemSpec regularize(const SystemSpec& spec, const RegularizationConfig& cfg);

/// Maps a state of the original system to the regularized one (q = eps z3).
State to_regularized(const SystemSpec& regularized, const State& original);

/// Inverse of to_regularized (z3 = q / eps).
State from_regularized(const SystemSpec& regularized, const State& state);

struct CouplingMatrices {
  Matrix F_skew;
  Matrix F_sym;
};

/// Closes the ports with u = (F_skew - F_sym) y + u_ext, u = [u_a; u_b],
/// y = [y_a; y_b]. The combined state is ordered
/// [z1a; z1b; z2a; z2b; z3a; z3b], H = H_a + H_b, and the external input
/// u_ext(t) = [u_a(t); u_b(t)] uses the subsystems' own signals.
/// Throws DimensionMismatch or ValidationError.
SystemSpec interconnect(const SystemSpec& a, const SystemSpec& b, const CouplingMatrices& c);

/// Splits a combined state back into the two subsystem states.
std::pair<State, State> split_interconnected(const SystemSpec& a, const SystemSpec& b,
                                             const State& combined);
State join_interconnected(const State& a, const State& b);

}  // namespace phdae
