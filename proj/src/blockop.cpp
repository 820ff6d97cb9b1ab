#include "bornwalk/blockop.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "bornwalk/error.hpp"

namespace bornwalk {

namespace {

constexpr double kConstructionTol = 1e-12;
constexpr double kStructureTol = 1e-10;

using Eigen::Index;

Index idx(std::size_t v) { return static_cast<Index>(v); }

void require_square(const CMatrix& h, std::size_t n, const char* what) {
  if (h.rows() != idx(n) || h.cols() != idx(n)) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": expected " + std::to_string(n) + "x" + std::to_string(n) +
                    ", got " + std::to_string(h.rows()) + "x" + std::to_string(h.cols()));
  }
}

void require_hermitian_operator(const CMatrix& h, const Dims& dims, const char* what) {
  require_square(h, dims.size(), what);
  if (hermitian_defect(h) > kStructureTol) {
    throw Error(ErrorKind::NotHermitian, std::string(what) + ": operator is not Hermitian");
  }
}

/// Unitary exp(-i H t) of a Hermitian matrix from its eigensystem.
struct Propagator {
  Eigen::VectorXd values;
  CMatrix vectors;

  explicit Propagator(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "eigendecomposition did not converge");
    values = es.eigenvalues();
    vectors = es.eigenvectors();
  }

  CMatrix at(double t) const {
    CVector phases(values.size());
    for (Index k = 0; k < values.size(); ++k) phases(k) = std::polar(1.0, -values(k) * t);
    return vectors * phases.asDiagonal() * vectors.adjoint();
  }
};

CVector evolve_sectors(const Dims& dims, const std::vector<Propagator>& props, const CVector& v,
                       double t) {
  CVector out(v.size());
  const Index m = idx(dims.m());
  for (std::size_t i = 0; i < dims.sectors(); ++i) {
    const Index off = idx(dims.joint_offset(i));
    const Index d = idx(dims.d()[i]);
    // Columns are the apparatus vectors for each particle basis index.
    Eigen::Map<const CMatrix> in(v.data() + off, m, d);
    Eigen::Map<CMatrix> res(out.data() + off, m, d);
    res.noalias() = props[i].at(t) * in;
  }
  return out;
}

}  // namespace

Dims::Dims(std::size_t m, std::vector<std::size_t> d, std::size_t cap) : m_(m), d_(std::move(d)) {
  if (m_ < 1) throw Error(ErrorKind::ConfigInvalid, "dims.m must be >= 1");
  if (d_.empty()) throw Error(ErrorKind::ConfigInvalid, "dims.d must name at least one sector");
  for (std::size_t i = 0; i < d_.size(); ++i) {
    if (d_[i] < 1) throw Error(ErrorKind::ConfigInvalid, "dims.d[" + std::to_string(i) + "] must be >= 1");
    particle_dim_ += d_[i];
  }
  if (particle_dim_ < 2) throw Error(ErrorKind::ConfigInvalid, "total particle dimension must be >= 2");
  if (m_ * particle_dim_ > cap) {
    throw Error(ErrorKind::ConfigInvalid,
                "joint dimension " + std::to_string(m_ * particle_dim_) + " exceeds cap " + std::to_string(cap));
  }
}

std::size_t Dims::particle_offset(std::size_t i) const {
  if (i >= d_.size()) throw Error(ErrorKind::DimensionMismatch, "sector index out of range");
  std::size_t off = 0;
  for (std::size_t k = 0; k < i; ++k) off += d_[k];
  return off;
}

double hermitian_defect(const CMatrix& h) {
  if (h.rows() != h.cols()) return std::numeric_limits<double>::infinity();
  if (h.size() == 0) return 0.0;
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

CMatrix BlockHamiltonian::full() const {
  const Index n = idx(dims_.size());
  CMatrix out = CMatrix::Zero(n, n);
  for (std::size_t i = 0; i < dims_.sectors(); ++i) {
    const Index off = idx(dims_.joint_offset(i));
    const Index len = sectors_[i].rows();
    out.block(off, off, len, len) = sectors_[i];
  }
  return out;
}

BlockHamiltonian assemble(const Dims& dims, std::vector<CMatrix> apparatus_blocks) {
  if (apparatus_blocks.size() != dims.sectors()) {
    throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(dims.sectors()) +
                                                  " apparatus blocks, got " +
                                                  std::to_string(apparatus_blocks.size()));
  }
  std::vector<CMatrix> sectors;
  sectors.reserve(dims.sectors());
  const Index m = idx(dims.m());
  for (std::size_t i = 0; i < apparatus_blocks.size(); ++i) {
    const CMatrix& h = apparatus_blocks[i];
    require_square(h, dims.m(), ("apparatus block " + std::to_string(i + 1)).c_str());
    if (hermitian_defect(h) > kConstructionTol) {
      throw Error(ErrorKind::NotHermitian, "apparatus block " + std::to_string(i + 1));
    }
    const Index d = idx(dims.d()[i]);
    CMatrix sector = CMatrix::Zero(m * d, m * d);
    for (Index p = 0; p < d; ++p) sector.block(p * m, p * m, m, m) = h;
    sectors.push_back(std::move(sector));
  }
  return BlockHamiltonian(dims, std::move(apparatus_blocks), std::move(sectors));
}

BlockHamiltonian uniform_block(const CMatrix& hbar, const Dims& dims) {
  return assemble(dims, std::vector<CMatrix>(dims.sectors(), hbar));
}

bool check_invariance(const CMatrix& h, const Dims& dims, const std::vector<std::size_t>& w) {
  require_hermitian_operator(h, dims, "check_invariance");
  std::vector<bool> in_w(dims.size(), false);
  for (std::size_t s : w) {
    if (s < 1 || s > dims.sectors()) {
      throw Error(ErrorKind::DimensionMismatch, "subset names sector " + std::to_string(s));
    }
    const std::size_t off = dims.joint_offset(s - 1);
    for (std::size_t k = 0; k < dims.m() * dims.d()[s - 1]; ++k) in_w[off + k] = true;
  }
  // Entries H(r, c) with c inside the subspace and r outside it.
  double worst = 0.0;
  for (Index c = 0; c < h.cols(); ++c) {
    if (!in_w[static_cast<std::size_t>(c)]) continue;
    for (Index r = 0; r < h.rows(); ++r) {
      if (in_w[static_cast<std::size_t>(r)]) continue;
      worst = std::max(worst, std::abs(h(r, c)));
    }
  }
  return worst <= kStructureTol;
}

bool verify_form(const CMatrix& h, const Dims& dims) {
  require_hermitian_operator(h, dims, "verify_form");
  for (std::size_t i = 1; i <= dims.sectors(); ++i) {
    if (!check_invariance(h, dims, {i})) return false;
  }
  const Index m = idx(dims.m());
  for (std::size_t i = 0; i < dims.sectors(); ++i) {
    const Index off = idx(dims.joint_offset(i));
    const Index d = idx(dims.d()[i]);
    const auto block = h.block(off, off, m * d, m * d);
    CMatrix avg = CMatrix::Zero(m, m);
    for (Index p = 0; p < d; ++p) avg += block.block(p * m, p * m, m, m);
    avg /= static_cast<double>(d);
    for (Index p = 0; p < d; ++p) {
      for (Index q = 0; q < d; ++q) {
        const auto sub = block.block(p * m, q * m, m, m);
        const double dev = p == q ? (sub - avg).cwiseAbs().maxCoeff() : sub.cwiseAbs().maxCoeff();
        if (dev > kStructureTol) return false;
      }
    }
  }
  return true;
}

InvarianceSuite run_invariance_suite(const CMatrix& h, const Dims& dims) {
  const std::size_t n = dims.sectors();
  if (n > 20) throw Error(ErrorKind::SizeExceeded, "subset enumeration limited to n <= 20");
  InvarianceSuite suite;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> w;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) w.push_back(i + 1);
    }
    ++suite.subsets_checked;
    if (!check_invariance(h, dims, w)) suite.failing.push_back(std::move(w));
  }
  suite.form_ok = verify_form(h, dims);
  return suite;
}

JointState::JointState(Dims dims, CVector v) : dims_(std::move(dims)), v_(std::move(v)) {
  if (v_.size() != idx(dims_.size())) {
    throw Error(ErrorKind::DimensionMismatch, "state length " + std::to_string(v_.size()) +
                                                  " != m*D = " + std::to_string(dims_.size()));
  }
  if (!v_.allFinite()) throw Error(ErrorKind::NonFiniteResult, "state has non-finite entries");
  if (std::abs(v_.norm() - 1.0) > kNormTolerance) {
    throw Error(ErrorKind::ConfigInvalid, "state norm is not 1");
  }
}

JointState JointState::normalized(Dims dims, CVector v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw Error(ErrorKind::DegenerateState, "zero state vector");
  v /= norm;
  return JointState(std::move(dims), std::move(v));
}

Eigen::VectorBlock<const CVector> JointState::sector(std::size_t i) const {
  return v_.segment(idx(dims_.joint_offset(i)), idx(dims_.m() * dims_.d().at(i)));
}

std::vector<JointState> evolve_many(const BlockHamiltonian& h, const JointState& s,
                                    const std::vector<double>& times) {
  if (!(h.dims() == s.dims())) throw Error(ErrorKind::DimensionMismatch, "operator and state dims differ");
  std::vector<Propagator> props;
  props.reserve(h.dims().sectors());
  for (std::size_t i = 0; i < h.dims().sectors(); ++i) props.emplace_back(h.apparatus_block(i));
  std::vector<JointState> out;
  out.reserve(times.size());
  for (double t : times) {
    if (!std::isfinite(t)) throw Error(ErrorKind::ConfigInvalid, "evolution time must be finite");
    // Renormalize away rounding so the result meets the JointState invariant.
    out.push_back(JointState::normalized(s.dims(), evolve_sectors(s.dims(), props, s.vec(), t)));
  }
  return out;
}

JointState evolve(const BlockHamiltonian& h, const JointState& s, double t) {
  return std::move(evolve_many(h, s, {t}).front());
}

JointState evolve_dense(const CMatrix& h, const JointState& s, double t) {
  require_hermitian_operator(h, s.dims(), "evolve_dense");
  if (!std::isfinite(t)) throw Error(ErrorKind::ConfigInvalid, "evolution time must be finite");
  const Propagator prop(h);
  return JointState::normalized(s.dims(), prop.at(t) * s.vec());
}

JointState product_state(const CVector& g, const std::vector<CVector>& phi_parts, const Dims& dims) {
  if (g.size() != idx(dims.m())) throw Error(ErrorKind::DimensionMismatch, "apparatus vector length != m");
  if (phi_parts.size() != dims.sectors()) {
    throw Error(ErrorKind::DimensionMismatch, "need one particle part per sector");
  }
  if (!(g.norm() > 0.0)) throw Error(ErrorKind::DegenerateState, "apparatus vector is zero");
  CVector v(idx(dims.size()));
  double particle_mass = 0.0;
  for (std::size_t i = 0; i < dims.sectors(); ++i) {
    const CVector& phi = phi_parts[i];
    if (phi.size() != idx(dims.d()[i])) {
      throw Error(ErrorKind::DimensionMismatch, "particle part " + std::to_string(i + 1) + " has wrong length");
    }
    particle_mass += phi.squaredNorm();
    const Index off = idx(dims.joint_offset(i));
    for (Index p = 0; p < phi.size(); ++p) {
      v.segment(off + p * g.size(), g.size()) = phi(p) * g;
    }
  }
  if (!(particle_mass > 0.0)) throw Error(ErrorKind::DegenerateState, "particle parts are all zero");
  return JointState::normalized(dims, std::move(v));
}

SimplexPoint simplex_map(const JointState& s) {
  std::vector<double> a(s.dims().sectors());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = s.sector(i).squaredNorm();
  return SimplexPoint::normalized(std::move(a));
}

CMatrix reduced_particle_state(const JointState& s) {
  const Index m = idx(s.dims().m());
  const Index dp = idx(s.dims().particle_dim());
  // Column P holds the apparatus amplitudes for particle basis index P.
  Eigen::Map<const CMatrix> y(s.vec().data(), m, dp);
  CMatrix rho = y.transpose() * y.conjugate();
  return rho;
}

}  // namespace bornwalk
