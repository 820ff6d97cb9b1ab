#include "bornwalk/blockop.hpp"

#include <random>

#include <gtest/gtest.h>

#include "bornwalk/error.hpp"
#include "bornwalk/io.hpp"
#include "oracles.hpp"

namespace bornwalk {
namespace {

using testing::random_hermitian;
using testing::random_unit_vector;

const Dims kDims(4, {1, 2, 1});

BlockHamiltonian random_block(const Dims& dims, std::mt19937_64& rng) {
  std::vector<CMatrix> blocks;
  for (std::size_t i = 0; i < dims.sectors(); ++i) blocks.push_back(random_hermitian(static_cast<Eigen::Index>(dims.m()), rng));
  return assemble(dims, blocks);
}

JointState random_state(const Dims& dims, std::mt19937_64& rng) {
  return JointState::normalized(dims, random_unit_vector(static_cast<Eigen::Index>(dims.size()), rng));
}

double max_diff(const SimplexPoint& a, const SimplexPoint& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

TEST(Dims, Validation) {
  EXPECT_THROW(Dims(0, {1, 1}), Error);
  EXPECT_THROW(Dims(2, {1}), Error);
  EXPECT_THROW(Dims(2, {1, 0}), Error);
  EXPECT_THROW(Dims(64, {64, 1}), Error);  // 4160 > 4096
  EXPECT_EQ(kDims.size(), 16u);
  EXPECT_EQ(kDims.joint_offset(2), 12u);
}

TEST(Assemble, ZeroBlocksGiveIdentityEvolution) {
  const BlockHamiltonian h = assemble(kDims, std::vector<CMatrix>(3, CMatrix::Zero(4, 4)));
  EXPECT_EQ(h.full().cwiseAbs().maxCoeff(), 0.0);
  std::mt19937_64 rng(1);
  const JointState s = random_state(kDims, rng);
  EXPECT_LT((evolve(h, s, 3.3).vec() - s.vec()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Assemble, IdenticalBlocksEqualUniform) {
  std::mt19937_64 rng(2);
  const CMatrix hbar = random_hermitian(4, rng);
  const BlockHamiltonian a = assemble(kDims, std::vector<CMatrix>(3, hbar));
  EXPECT_EQ(a.full(), uniform_block(hbar, kDims).full());
}

TEST(Assemble, RandomBlocksAreHermitianAndSectorPreserving) {
  std::mt19937_64 rng(3);
  const CMatrix full = random_block(kDims, rng).full();
  EXPECT_LE(hermitian_defect(full), 1e-12);
  // Direct check: nothing couples distinct sectors.
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      const auto bi = static_cast<Eigen::Index>(kDims.joint_offset(i));
      const auto bj = static_cast<Eigen::Index>(kDims.joint_offset(j));
      const auto li = static_cast<Eigen::Index>(4 * kDims.d()[i]);
      const auto lj = static_cast<Eigen::Index>(4 * kDims.d()[j]);
      EXPECT_EQ(full.block(bi, bj, li, lj).cwiseAbs().maxCoeff(), 0.0);
    }
  }
}

TEST(Assemble, NotHermitianNamesBlock) {
  std::vector<CMatrix> blocks(3, CMatrix::Identity(4, 4));
  blocks[1](0, 1) = {1e-6, 0};
  try {
    assemble(kDims, blocks);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotHermitian);
    EXPECT_NE(std::string(e.what()).find("block 2"), std::string::npos);
  }
  EXPECT_THROW(assemble(kDims, std::vector<CMatrix>(2, CMatrix::Identity(4, 4))), Error);
}

TEST(UniformBlock, IdentityIsGlobalPhase) {
  std::mt19937_64 rng(4);
  const JointState s = random_state(kDims, rng);
  const JointState out = evolve(uniform_block(CMatrix::Identity(4, 4), kDims), s, 0.9);
  const std::complex<double> phase = std::polar(1.0, -0.9);
  EXPECT_LT((out.vec() - phase * s.vec()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(UniformBlock, ZeroIsZeroOperator) {
  EXPECT_EQ(uniform_block(CMatrix::Zero(4, 4), kDims).full().cwiseAbs().maxCoeff(), 0.0);
}

TEST(UniformBlock, DiagonalKeepsReducedStateFixed) {
  CMatrix hbar = CMatrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) hbar(i, i) = i + 1.0;
  std::mt19937_64 rng(5);
  const JointState s = random_state(kDims, rng);
  const CMatrix rho0 = reduced_particle_state(s);
  for (double t : {0.1, 0.5, 1.0, 5.0}) {
    const CMatrix rho = reduced_particle_state(evolve(uniform_block(hbar, kDims), s, t));
    EXPECT_LT((rho - rho0).cwiseAbs().maxCoeff(), 1e-10) << t;
  }
}

TEST(CheckInvariance, AllSubsetsForAssembled) {
  std::mt19937_64 rng(6);
  const CMatrix full = random_block(kDims, rng).full();
  const InvarianceSuite suite = run_invariance_suite(full, kDims);
  EXPECT_EQ(suite.subsets_checked, 8u);
  EXPECT_TRUE(suite.passed());
}

TEST(CheckInvariance, OffSectorCouplingIsDetected) {
  std::mt19937_64 rng(7);
  CMatrix full = random_block(kDims, rng).full();
  // Couple sector 1 (index 0) with sector 3 (index 12).
  full(12, 0) += 1e-3;
  full(0, 12) += 1e-3;
  EXPECT_FALSE(check_invariance(full, kDims, {1}));
  EXPECT_FALSE(check_invariance(full, kDims, {3}));
  EXPECT_TRUE(check_invariance(full, kDims, {2}));
  EXPECT_TRUE(check_invariance(full, kDims, {1, 3}));
  EXPECT_FALSE(verify_form(full, kDims));
}

TEST(CheckInvariance, FullSetAlwaysInvariant) {
  std::mt19937_64 rng(8);
  EXPECT_TRUE(check_invariance(random_hermitian(16, rng), kDims, {1, 2, 3}));
  EXPECT_TRUE(check_invariance(random_hermitian(16, rng), kDims, {}));
}

TEST(CheckInvariance, Errors) {
  std::mt19937_64 rng(9);
  EXPECT_THROW(check_invariance(random_hermitian(15, rng), kDims, {1}), Error);
  EXPECT_THROW(check_invariance(random_hermitian(16, rng), kDims, {4}), Error);
}

TEST(VerifyForm, AssembledPasses) {
  std::mt19937_64 rng(10);
  EXPECT_TRUE(verify_form(random_block(kDims, rng).full(), kDims));
}

TEST(VerifyForm, NonProductSectorBlockFails) {
  std::mt19937_64 rng(11);
  CMatrix full = random_block(kDims, rng).full();
  // Sector 2 has d = 2: give its two diagonal sub-blocks different content.
  const CMatrix extra = random_hermitian(4, rng);
  full.block(4, 4, 4, 4) += extra;
  EXPECT_TRUE(check_invariance(full, kDims, {2}));
  EXPECT_FALSE(verify_form(full, kDims));
}

TEST(VerifyForm, SingleSectorIsPureFactorization) {
  const Dims one(3, {2});
  std::mt19937_64 rng(12);
  const CMatrix h = random_hermitian(3, rng);
  EXPECT_TRUE(verify_form(assemble(one, {h}).full(), one));
  EXPECT_FALSE(verify_form(random_hermitian(6, rng), one));
}

TEST(Evolve, TimeZeroIsIdentity) {
  std::mt19937_64 rng(13);
  const JointState s = random_state(kDims, rng);
  EXPECT_LT((evolve(random_block(kDims, rng), s, 0.0).vec() - s.vec()).norm(), 1e-14);
}

TEST(Evolve, MatchesDenseExponentialOracle) {
  std::mt19937_64 rng(14);
  const BlockHamiltonian h = random_block(kDims, rng);
  const JointState s = random_state(kDims, rng);
  const CVector oracle = testing::evolve_oracle(h.full(), s.vec(), 0.7);
  EXPECT_LT((evolve(h, s, 0.7).vec() - oracle).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Evolve, UnitarityGroupLawAndReversal) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> time(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const BlockHamiltonian h = random_block(kDims, rng);
    const JointState s = random_state(kDims, rng);
    const double t1 = time(rng), t2 = time(rng);
    const JointState a = evolve(h, s, t1);
    EXPECT_NEAR(a.vec().norm(), 1.0, 1e-10);
    EXPECT_LT((evolve(h, a, t2).vec() - evolve(h, s, t1 + t2).vec()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((evolve(h, a, -t1).vec() - s.vec()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Evolve, SectorNormsAreConserved) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const BlockHamiltonian h = random_block(kDims, rng);
    const JointState s = random_state(kDims, rng);
    const SimplexPoint a0 = simplex_map(s);
    for (double t : {0.1, 0.5, 1.0, 5.0}) EXPECT_LT(max_diff(simplex_map(evolve(h, s, t)), a0), 1e-10);
  }
}

TEST(Evolve, VanishedSectorStaysExactlyZero) {
  std::mt19937_64 rng(17);
  CVector g = random_unit_vector(4, rng);
  const JointState s = product_state(g, {CVector::Ones(1), CVector::Zero(2), CVector::Ones(1)}, kDims);
  const JointState out = evolve(random_block(kDims, rng), s, 2.5);
  EXPECT_EQ(simplex_map(out)[1], 0.0);
}

TEST(Evolve, DenseNegativeControlMovesSimplex) {
  std::mt19937_64 rng(18);
  const CMatrix h = random_hermitian(16, rng);
  const JointState s = random_state(kDims, rng);
  EXPECT_GT(max_diff(simplex_map(evolve_dense(h, s, 1.0)), simplex_map(s)), 1e-3);
}

TEST(ProductState, SimplexMapReadsSectorWeights) {
  const CVector g = CVector::Unit(4, 0);
  EXPECT_EQ(simplex_map(product_state(g, {CVector::Ones(1), CVector::Zero(2), CVector::Zero(1)}, kDims)),
            SimplexPoint::vertex(3, 1));
  CVector p2(2);
  p2 << std::sqrt(0.5), std::complex<double>(0, std::sqrt(0.5));
  const CVector p1 = CVector::Constant(1, std::sqrt(2.0));
  const CVector p3 = CVector::Constant(1, std::sqrt(3.0));
  const SimplexPoint a = simplex_map(product_state(g, {p1, p2, p3}, kDims));
  EXPECT_NEAR(a[0], 2.0 / 6, 1e-15);
  EXPECT_NEAR(a[1], 1.0 / 6, 1e-15);
  EXPECT_NEAR(a[2], 3.0 / 6, 1e-15);
}

TEST(ProductState, ProjectiveInvariance) {
  std::mt19937_64 rng(19);
  const CVector g = random_unit_vector(4, rng);
  const std::vector<CVector> parts = {CVector::Ones(1), random_unit_vector(2, rng), CVector::Ones(1)};
  EXPECT_LT((product_state(2.0 * g, parts, kDims).vec() - product_state(g, parts, kDims).vec()).cwiseAbs().maxCoeff(),
            1e-15);
}

TEST(ProductState, DegenerateInputs) {
  EXPECT_THROW(product_state(CVector::Zero(4), {CVector::Ones(1), CVector::Ones(2), CVector::Ones(1)}, kDims), Error);
  EXPECT_THROW(product_state(CVector::Ones(4), {CVector::Zero(1), CVector::Zero(2), CVector::Zero(1)}, kDims), Error);
}

TEST(SimplexMap, EqualTwoSectorState) {
  const Dims dims(1, {1, 1, 1});
  CVector v(3);
  v << std::sqrt(0.5), std::sqrt(0.5), 0;
  const SimplexPoint a = simplex_map(JointState::normalized(dims, v));
  EXPECT_EQ(a[0], 0.5);
  EXPECT_EQ(a[1], 0.5);
  EXPECT_EQ(a[2], 0.0);
}

TEST(ReducedState, ProductStateIsPure) {
  std::mt19937_64 rng(20);
  const CVector g = random_unit_vector(4, rng);
  const std::vector<CVector> parts = {random_unit_vector(1, rng), random_unit_vector(2, rng), random_unit_vector(1, rng)};
  const JointState s = product_state(g, parts, kDims);
  CVector phi(4);
  phi << parts[0], parts[1], parts[2];
  phi /= phi.norm();
  const CMatrix rho = reduced_particle_state(s);
  EXPECT_LT((rho - phi * phi.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR((rho * rho).trace().real(), 1.0, 1e-12);
}

TEST(ReducedState, MaximallyEntangled) {
  const Dims dims(4, {1, 2, 1});
  CVector v = CVector::Zero(16);
  for (int p = 0; p < 4; ++p) v(4 * p + p) = 0.5;
  const CMatrix rho = reduced_particle_state(JointState(dims, v));
  EXPECT_LT((rho - CMatrix::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ReducedState, DensityMatrixProperties) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix rho = reduced_particle_state(random_state(kDims, rng));
    EXPECT_LE(hermitian_defect(rho), 1e-10);
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-10);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(BlockIo, HamiltonianAndStateRoundTrip) {
  std::mt19937_64 rng(22);
  const BlockHamiltonian h = random_block(kDims, rng);
  const BlockHamiltonian back = block_hamiltonian_from_json(Json::parse(dump(to_json(h))));
  EXPECT_EQ(back.full(), h.full());
  const JointState s = random_state(kDims, rng);
  EXPECT_LT((joint_state_from_json(to_json(s)).vec() - s.vec()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(operator_from_json(to_json(h), kDims), h.full());
  EXPECT_EQ(operator_from_json(Json{{"matrix", matrix_to_json(h.full())}}, kDims), h.full());
}

}  // namespace
}  // namespace bornwalk
