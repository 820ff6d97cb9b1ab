#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/SparseCore>

namespace bornwalk {

/// Integer composition (k_1, ..., k_n) with sum M; the simplex point k / M.
using LatticePoint = std::vector<std::uint32_t>;

/// The pair-transfer walk restricted to the grid {k / M}: a uniformly chosen
/// pair of positive coordinates exchanges one unit, each direction with
/// probability 1/2 (PairTransfer with h = 1/M).
struct LatticeChain {
  std::size_t n = 2;
  std::uint32_t M = 10;
  /// Upper bound on transient states solved for in one call.
  std::size_t max_transient = 200'000;
};

struct LatticeTransition {
  LatticePoint next;
  double prob = 0.0;
};

/// Outgoing transitions of a state; absorbing states (one positive
/// coordinate) return a single self-loop.
std::vector<LatticeTransition> lattice_transitions(const LatticeChain& chain, const LatticePoint& x);

/// Probability that the fair +-1 walk on {0..M} started at start_k ends at
/// M, by a direct solve of (I - Q) x = b over the transient states.
double gamblers_ruin(std::uint32_t start_k, std::uint32_t M);

/// Exact absorption probability at each vertex. States on a face of the
/// simplex are solved as the smaller chain on that face, recursively.
/// Throws SizeExceeded past chain.max_transient, SolverFailure if the
/// factorization fails.
std::vector<double> lattice_absorption(const LatticeChain& chain, const LatticePoint& start);

/// Transition matrix over every lattice state (enumerated into `states`).
Eigen::SparseMatrix<double> lattice_transition_matrix(const LatticeChain& chain,
                                                      std::vector<LatticePoint>& states);

/// All compositions of M into n nonnegative parts, lexicographic.
std::vector<LatticePoint> lattice_states(std::size_t n, std::uint32_t M);

}  // namespace bornwalk
