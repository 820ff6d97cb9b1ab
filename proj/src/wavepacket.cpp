#include "bornwalk/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "bornwalk/error.hpp"

namespace bornwalk {

namespace {

struct AxisNodes {
  std::vector<double> x;
  std::vector<double> w;
};

const GaussRule& panel_rule() {
  static const GaussRule rule = gauss_legendre(QuadratureSpec::kPanelOrder);
  return rule;
}

AxisNodes composite_nodes(double lo, double hi, int requested) {
  AxisNodes out;
  if (!(hi > lo)) return out;
  const GaussRule& rule = panel_rule();
  const int order = QuadratureSpec::kPanelOrder;
  const int panels = (requested + order - 1) / order;
  const double width = (hi - lo) / panels;
  out.x.reserve(static_cast<std::size_t>(panels * order));
  out.w.reserve(static_cast<std::size_t>(panels * order));
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * width;
    const double mid = a + 0.5 * width;
    for (int i = 0; i < order; ++i) {
      out.x.push_back(mid + 0.5 * width * rule.nodes[static_cast<std::size_t>(i)]);
      out.w.push_back(0.5 * width * rule.weights[static_cast<std::size_t>(i)]);
    }
  }
  return out;
}

}  // namespace

GaussRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::ConfigInvalid, "Gauss-Legendre order must be >= 1");
  // Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
  // Legendre recurrence, weights are 2 * (first eigenvector component)^2.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "Golub-Welsch");
  GaussRule rule;
  for (int i = 0; i < n; ++i) {
    const double x = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    rule.nodes.push_back(x);
    rule.weights.push_back(2.0 * v * v);
  }
  // Symmetrize so mirrored nodes and their weights match exactly.
  for (int i = 0; i < n / 2; ++i) {
    const auto j = static_cast<std::size_t>(n - 1 - i);
    const auto ii = static_cast<std::size_t>(i);
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[ii]);
    const double w = 0.5 * (rule.weights[j] + rule.weights[ii]);
    rule.nodes[ii] = -x;
    rule.nodes[j] = x;
    rule.weights[ii] = w;
    rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

WaveFunction::WaveFunction(std::vector<GaussianPacket> packets) : packets_(std::move(packets)) {
  if (packets_.empty()) throw Error(ErrorKind::ConfigInvalid, "wave function needs at least one packet");
  for (std::size_t i = 0; i < packets_.size(); ++i) {
    const GaussianPacket& p = packets_[i];
    const std::string where = "packets[" + std::to_string(i) + "]";
    for (int a = 0; a < 3; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      if (!std::isfinite(p.center[ua]) || !std::isfinite(p.sigma[ua]) || !std::isfinite(p.k[ua])) {
        throw Error(ErrorKind::ConfigInvalid, where + " has a non-finite parameter");
      }
      if (!(p.sigma[ua] > 0.0)) throw Error(ErrorKind::ConfigInvalid, where + ".sigma must be > 0");
    }
    if (!(p.center[2] > 0.0)) throw Error(ErrorKind::ConfigInvalid, where + ".center z must be > 0");
    if (!std::isfinite(p.amp.real()) || !std::isfinite(p.amp.imag())) {
      throw Error(ErrorKind::ConfigInvalid, where + ".amp is non-finite");
    }
  }
}

WaveFunction WaveFunction::scaled(Complex factor) const {
  std::vector<GaussianPacket> out = packets_;
  for (auto& p : out) p.amp *= factor;
  return WaveFunction(std::move(out));
}

Complex packet_axis_factor(const GaussianPacket& p, int axis, double coord) {
  const auto a = static_cast<std::size_t>(axis);
  const double s = p.sigma[a];
  const double u = coord - p.center[a];
  const double norm = std::pow(std::numbers::pi * s * s, -0.25);
  const double envelope = norm * std::exp(-u * u / (2.0 * s * s));
  const double phase = p.k[a] * u;
  return {envelope * std::cos(phase), envelope * std::sin(phase)};
}

Complex evaluate(const WaveFunction& psi, double x, double y, double z) {
  if (!(z > 0.0)) return {0.0, 0.0};
  Complex sum{0.0, 0.0};
  for (const auto& p : psi.packets()) {
    sum += p.amp * packet_axis_factor(p, 0, x) * packet_axis_factor(p, 1, y) *
           packet_axis_factor(p, 2, z);
  }
  return sum;
}

void QuadratureSpec::validate() const {
  for (int n : nodes) {
    if (n < 8) throw Error(ErrorKind::ConfigInvalid, "quadrature.nodes must be >= 8");
  }
  if (!(half_width >= 4.0) || !std::isfinite(half_width)) {
    throw Error(ErrorKind::ConfigInvalid, "quadrature.half_width must be >= 4");
  }
}

QuadratureSpec QuadratureSpec::refined(int factor) const {
  QuadratureSpec out = *this;
  for (int& n : out.nodes) n *= factor;
  return out;
}

Box3 bounding_box(const WaveFunction& psi, const QuadratureSpec& q) {
  Box3 box;
  box.lo.fill(std::numeric_limits<double>::infinity());
  box.hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& p : psi.packets()) {
    for (std::size_t a = 0; a < 3; ++a) {
      box.lo[a] = std::min(box.lo[a], p.center[a] - q.half_width * p.sigma[a]);
      box.hi[a] = std::max(box.hi[a], p.center[a] + q.half_width * p.sigma[a]);
    }
  }
  box.lo[2] = std::max(box.lo[2], 0.0);
  return box;
}

double integrate_abs2(const WaveFunction& psi, const Box3& box, const QuadratureSpec& q) {
  std::array<AxisNodes, 3> axes;
  for (std::size_t a = 0; a < 3; ++a) {
    axes[a] = composite_nodes(box.lo[a], box.hi[a], q.nodes[a]);
    if (axes[a].x.empty()) return 0.0;
  }

  // Per-packet axis factors; amplitudes folded into the x factor.
  const auto& packets = psi.packets();
  const std::size_t np = packets.size();
  std::array<std::vector<Complex>, 3> factors;
  for (std::size_t a = 0; a < 3; ++a) {
    const std::size_t len = axes[a].x.size();
    factors[a].resize(np * len);
    for (std::size_t p = 0; p < np; ++p) {
      for (std::size_t i = 0; i < len; ++i) {
        Complex f = packet_axis_factor(packets[p], static_cast<int>(a), axes[a].x[i]);
        if (a == 0) f *= packets[p].amp;
        factors[a][p * len + i] = f;
      }
    }
  }

  const std::size_t nx = axes[0].x.size();
  const std::size_t ny = axes[1].x.size();
  const std::size_t nz = axes[2].x.size();
  std::vector<Complex> xy(np);
  double total = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    double plane = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t p = 0; p < np; ++p) {
        xy[p] = factors[0][p * nx + i] * factors[1][p * ny + j];
      }
      double line = 0.0;
      for (std::size_t l = 0; l < nz; ++l) {
        Complex v{0.0, 0.0};
        for (std::size_t p = 0; p < np; ++p) v += xy[p] * factors[2][p * nz + l];
        line += axes[2].w[l] * std::norm(v);
      }
      plane += axes[1].w[j] * line;
    }
    total += axes[0].w[i] * plane;
  }
  return total;
}

double norm_squared(const WaveFunction& psi, const QuadratureSpec& q) {
  q.validate();
  const double value = integrate_abs2(psi, bounding_box(psi, q), q);
  if (!std::isfinite(value)) throw Error(ErrorKind::NonFiniteResult, "norm_squared quadrature");
  return value;
}

std::vector<double> region_masses(const WaveFunction& psi, const DetectorArray& array,
                                  const QuadratureSpec& q) {
  q.validate();
  const Box3 box = bounding_box(psi, q);
  std::vector<double> masses;
  masses.reserve(array.region_count());
  double cells_total = 0.0;
  for (const Cell& c : array.cells()) {
    Box3 clip = box;
    clip.lo[0] = std::max(box.lo[0], c.x_min);
    clip.hi[0] = std::min(box.hi[0], c.x_max);
    clip.lo[1] = std::max(box.lo[1], c.y_min);
    clip.hi[1] = std::min(box.hi[1], c.y_max);
    const double m = integrate_abs2(psi, clip, q);
    if (!std::isfinite(m)) throw Error(ErrorKind::NonFiniteResult, "region quadrature");
    masses.push_back(m);
    cells_total += m;
  }
  const double total = integrate_abs2(psi, box, q);
  if (!std::isfinite(total)) throw Error(ErrorKind::NonFiniteResult, "norm quadrature");
  masses.push_back(total - cells_total);
  return masses;
}

SimplexPoint born_weights(const WaveFunction& psi, const DetectorArray& array,
                          const QuadratureSpec& q) {
  std::vector<double> masses = region_masses(psi, array, q);
  double total = 0.0;
  for (double m : masses) total += m;
  if (total < 1e-12) throw Error(ErrorKind::DegenerateState, "||psi||^2 below 1e-12");
  for (double& m : masses) m = std::clamp(m / total, 0.0, 1.0);
  return SimplexPoint::normalized(std::move(masses));
}

}  // namespace bornwalk
