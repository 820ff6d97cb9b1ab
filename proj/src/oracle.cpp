#include "bornwalk/oracle.hpp"

#include <map>
#include <string>

#include <Eigen/SparseLU>

#include "bornwalk/error.hpp"

namespace bornwalk {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

std::size_t support_size(const LatticePoint& x) {
  std::size_t k = 0;
  for (auto v : x) k += v > 0 ? 1 : 0;
  return k;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void check_point(const LatticeChain& chain, const LatticePoint& x) {
  if (chain.n < 2) throw Error(ErrorKind::ConfigInvalid, "lattice chain needs n >= 2");
  if (chain.M < 1) throw Error(ErrorKind::ConfigInvalid, "lattice chain needs M >= 1");
  if (x.size() != chain.n) throw Error(ErrorKind::DimensionMismatch, "lattice point has wrong length");
  std::uint64_t sum = 0;
  for (auto v : x) sum += v;
  if (sum != chain.M) throw Error(ErrorKind::ConfigInvalid, "lattice point does not sum to M");
}

void solve_failed(const char* what) { throw Error(ErrorKind::SolverFailure, what); }

/// Memoized face-by-face solver.
class AbsorptionSolver {
 public:
  explicit AbsorptionSolver(const LatticeChain& chain) : chain_(chain) {}

  const std::vector<double>& absorption(const LatticePoint& x) {
    if (auto it = memo_.find(x); it != memo_.end()) return it->second;
    if (support_size(x) == 1) {
      std::vector<double> unit(chain_.n, 0.0);
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0) unit[i] = 1.0;
      }
      return memo_.emplace(x, std::move(unit)).first->second;
    }
    solve_face(x);
    return memo_.at(x);
  }

 private:
  // Solves for every state whose support equals that of x.
  void solve_face(const LatticePoint& x) {
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] > 0) support.push_back(i);
    }
    const std::size_t k = support.size();
    const std::uint64_t interior = binomial(chain_.M - 1, k - 1);
    solved_ += interior;
    if (solved_ > chain_.max_transient) {
      throw Error(ErrorKind::SizeExceeded, "transient states exceed cap " + std::to_string(chain_.max_transient));
    }

    // Enumerate positive compositions on the face.
    std::vector<LatticePoint> states;
    std::map<LatticePoint, Eigen::Index> index;
    for (const LatticePoint& sub : lattice_states(k, chain_.M - static_cast<std::uint32_t>(k))) {
      LatticePoint s(chain_.n, 0);
      for (std::size_t r = 0; r < k; ++r) s[support[r]] = sub[r] + 1;
      index.emplace(s, static_cast<Eigen::Index>(states.size()));
      states.push_back(std::move(s));
    }

    const auto size = static_cast<Eigen::Index>(states.size());
    std::vector<Triplet> triplets;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(size, static_cast<Eigen::Index>(chain_.n));
    for (Eigen::Index r = 0; r < size; ++r) {
      triplets.emplace_back(r, r, 1.0);
      for (const LatticeTransition& t : lattice_transitions(chain_, states[static_cast<std::size_t>(r)])) {
        if (auto it = index.find(t.next); it != index.end()) {
          triplets.emplace_back(r, it->second, -t.prob);
        } else {
          const std::vector<double>& face = absorption(t.next);
          for (std::size_t v = 0; v < chain_.n; ++v) rhs(r, static_cast<Eigen::Index>(v)) += t.prob * face[v];
        }
      }
    }
    SparseMatrix a(size, size);
    a.setFromTriplets(triplets.begin(), triplets.end());
    a.makeCompressed();
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) solve_failed("sparse LU factorization failed");
    const Eigen::MatrixXd sol = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !sol.allFinite()) solve_failed("sparse LU solve failed");
    for (Eigen::Index r = 0; r < size; ++r) {
      std::vector<double> row(chain_.n);
      for (std::size_t v = 0; v < chain_.n; ++v) row[v] = sol(r, static_cast<Eigen::Index>(v));
      memo_.emplace(states[static_cast<std::size_t>(r)], std::move(row));
    }
  }

  const LatticeChain& chain_;
  std::map<LatticePoint, std::vector<double>> memo_;
  std::uint64_t solved_ = 0;
};

void enumerate(std::size_t n, std::uint32_t remaining, LatticePoint& cur, std::vector<LatticePoint>& out) {
  const std::size_t pos = cur.size();
  if (pos + 1 == n) {
    cur.push_back(remaining);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (std::uint32_t v = 0; v <= remaining; ++v) {
    cur.push_back(v);
    enumerate(n, remaining - v, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<LatticePoint> lattice_states(std::size_t n, std::uint32_t M) {
  std::vector<LatticePoint> out;
  if (n == 0) return out;
  LatticePoint cur;
  enumerate(n, M, cur, out);
  return out;
}

std::vector<LatticeTransition> lattice_transitions(const LatticeChain& chain, const LatticePoint& x) {
  check_point(chain, x);
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0) active.push_back(i);
  }
  if (active.size() < 2) return {{x, 1.0}};
  const double pairs = static_cast<double>(active.size() * (active.size() - 1) / 2);
  const double p = 0.5 / pairs;
  std::vector<LatticeTransition> out;
  for (std::size_t a = 0; a < active.size(); ++a) {
    for (std::size_t b = a + 1; b < active.size(); ++b) {
      LatticePoint up = x;
      ++up[active[a]];
      --up[active[b]];
      LatticePoint down = x;
      --down[active[a]];
      ++down[active[b]];
      out.push_back({std::move(up), p});
      out.push_back({std::move(down), p});
    }
  }
  return out;
}

double gamblers_ruin(std::uint32_t start_k, std::uint32_t M) {
  if (M < 1 || start_k > M) throw Error(ErrorKind::ConfigInvalid, "gambler's ruin needs 0 <= start <= M, M >= 1");
  if (start_k == 0) return 0.0;
  if (start_k == M) return 1.0;
  // Transient states 1..M-1 map to rows 0..M-2.
  const auto size = static_cast<Eigen::Index>(M - 1);
  std::vector<Triplet> triplets;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(size);
  for (Eigen::Index r = 0; r < size; ++r) {
    triplets.emplace_back(r, r, 1.0);
    if (r > 0) triplets.emplace_back(r, r - 1, -0.5);
    if (r + 1 < size) {
      triplets.emplace_back(r, r + 1, -0.5);
    } else {
      b(r) = 0.5;
    }
  }
  SparseMatrix a(size, size);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) solve_failed("sparse LU factorization failed");
  const Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) solve_failed("sparse LU solve failed");
  return x(static_cast<Eigen::Index>(start_k - 1));
}

std::vector<double> lattice_absorption(const LatticeChain& chain, const LatticePoint& start) {
  check_point(chain, start);
  AbsorptionSolver solver(chain);
  return solver.absorption(start);
}

Eigen::SparseMatrix<double> lattice_transition_matrix(const LatticeChain& chain,
                                                      std::vector<LatticePoint>& states) {
  states = lattice_states(chain.n, chain.M);
  if (states.size() > chain.max_transient) {
    throw Error(ErrorKind::SizeExceeded, "lattice has more states than the cap");
  }
  std::map<LatticePoint, Eigen::Index> index;
  for (std::size_t i = 0; i < states.size(); ++i) index.emplace(states[i], static_cast<Eigen::Index>(i));
  std::vector<Triplet> triplets;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (const LatticeTransition& t : lattice_transitions(chain, states[i])) {
      triplets.emplace_back(static_cast<Eigen::Index>(i), index.at(t.next), t.prob);
    }
  }
  const auto size = static_cast<Eigen::Index>(states.size());
  SparseMatrix p(size, size);
  p.setFromTriplets(triplets.begin(), triplets.end());
  return p;
}

}  // namespace bornwalk
