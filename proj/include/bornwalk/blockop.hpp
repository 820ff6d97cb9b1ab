#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "bornwalk/simplex_point.hpp"

namespace bornwalk {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Dimensions of the joint space H_m (x) (H_1 (+) ... (+) H_n).
///
/// Joint vectors are stored sector-major: sector i occupies a contiguous
/// slice of length m * d_i, and inside a slice the element for particle
/// basis index p and apparatus index a sits at p * m + a. In that layout the
/// sector operator "H_i (x) I_i" is the matrix kron(I_{d_i}, H_i).
class Dims {
 public:
  static constexpr std::size_t kDefaultCap = 4096;

  Dims(std::size_t m, std::vector<std::size_t> d, std::size_t cap = kDefaultCap);

  std::size_t m() const noexcept { return m_; }
  const std::vector<std::size_t>& d() const noexcept { return d_; }
  std::size_t sectors() const noexcept { return d_.size(); }
  /// Total particle dimension D.
  std::size_t particle_dim() const noexcept { return particle_dim_; }
  /// Joint dimension m * D.
  std::size_t size() const noexcept { return m_ * particle_dim_; }
  /// Offset of sector i (0-based) in a joint vector.
  std::size_t joint_offset(std::size_t i) const { return m_ * particle_offset(i); }
  /// Offset of sector i (0-based) in the particle space.
  std::size_t particle_offset(std::size_t i) const;

  friend bool operator==(const Dims&, const Dims&) = default;

 private:
  std::size_t m_;
  std::vector<std::size_t> d_;
  std::size_t particle_dim_ = 0;
};

/// Largest |H - H^dagger| entry.
double hermitian_defect(const CMatrix& h);

/// Measurement Hamiltonian of block form H_1 (x) I_1 (+) ... (+) H_n (x) I_n.
class BlockHamiltonian {
 public:
  const Dims& dims() const noexcept { return dims_; }
  /// Apparatus operator H_i (m x m), 0-based.
  const CMatrix& apparatus_block(std::size_t i) const { return apparatus_.at(i); }
  /// Sector operator on H_m (x) H_i, shape (m d_i) x (m d_i), 0-based.
  const CMatrix& sector_block(std::size_t i) const { return sectors_.at(i); }
  /// The assembled operator on the whole joint space.
  CMatrix full() const;

 private:
  friend BlockHamiltonian assemble(const Dims&, std::vector<CMatrix>);
  BlockHamiltonian(Dims dims, std::vector<CMatrix> apparatus, std::vector<CMatrix> sectors)
      : dims_(std::move(dims)), apparatus_(std::move(apparatus)), sectors_(std::move(sectors)) {}

  Dims dims_;
  std::vector<CMatrix> apparatus_;
  std::vector<CMatrix> sectors_;
};

/// Builds the sector-preserving operator from n Hermitian m x m apparatus
/// blocks. Throws NotHermitian naming the first block whose defect exceeds
/// 1e-12, DimensionMismatch on wrong count or shape.
BlockHamiltonian assemble(const Dims& dims, std::vector<CMatrix> apparatus_blocks);

/// The apparatus-only Hamiltonian hbar (x) I_p.
BlockHamiltonian uniform_block(const CMatrix& hbar, const Dims& dims);

/// True iff H maps H_m (x) H_w into itself, i.e. max |(I - P_w) H P_w| <= 1e-10.
/// `w` holds 1-based sector indices.
bool check_invariance(const CMatrix& h, const Dims& dims, const std::vector<std::size_t>& w);

/// True iff every singleton sector is invariant and each sector block equals
/// kron(I_{d_i}, average of its d_i diagonal m x m sub-blocks) to 1e-10.
bool verify_form(const CMatrix& h, const Dims& dims);

struct InvarianceSuite {
  std::size_t subsets_checked = 0;
  std::vector<std::vector<std::size_t>> failing;  // 1-based subsets
  bool form_ok = false;

  bool passed() const noexcept { return form_ok && failing.empty(); }
};

/// check_invariance over all 2^n subsets (n <= 20) plus verify_form.
InvarianceSuite run_invariance_suite(const CMatrix& h, const Dims& dims);

/// Normalized joint vector.
class JointState {
 public:
  static constexpr double kNormTolerance = 1e-12;

  /// Validates the length and unit norm.
  JointState(Dims dims, CVector v);
  /// Rescales v to unit norm; DegenerateState if v == 0.
  static JointState normalized(Dims dims, CVector v);

  const Dims& dims() const noexcept { return dims_; }
  const CVector& vec() const noexcept { return v_; }
  /// Slice of sector i (0-based).
  Eigen::VectorBlock<const CVector> sector(std::size_t i) const;

 private:
  Dims dims_;
  CVector v_;
};

/// exp(-i H t) s, computed per sector from the eigensystem of each
/// apparatus block. Throws EigenFailure if a decomposition fails.
JointState evolve(const BlockHamiltonian& h, const JointState& s, double t);

/// evolve() at several times sharing one set of eigendecompositions.
std::vector<JointState> evolve_many(const BlockHamiltonian& h, const JointState& s,
                                    const std::vector<double>& times);

/// exp(-i H t) s for an arbitrary Hermitian operator on the joint space.
JointState evolve_dense(const CMatrix& h, const JointState& s, double t);

/// |g> (x) (phi_1 (+) ... (+) phi_n), normalized.
JointState product_state(const CVector& g, const std::vector<CVector>& phi_parts, const Dims& dims);

/// a_i = squared norm of sector slice i.
SimplexPoint simplex_map(const JointState& s);

/// Partial trace over the apparatus: a D x D density matrix.
CMatrix reduced_particle_state(const JointState& s);

}  // namespace bornwalk
