#pragma once

#include <array>
#include <complex>
#include <vector>

#include "bornwalk/geometry.hpp"
#include "bornwalk/simplex_point.hpp"

namespace bornwalk {

using Vec3 = std::array<double, 3>;
using Complex = std::complex<double>;

/// Separable Gaussian packet with a plane-wave phase:
///
///   g(r) = amp * prod_{a in x,y,z} (pi sigma_a^2)^(-1/4)
///                * exp(-(r_a - c_a)^2 / (2 sigma_a^2)) * exp(i k_a (r_a - c_a))
///
/// With amp = 1 the packet has unit L2 norm over all of R^3 and the value at
/// the center is (sigma_x sigma_y sigma_z)^(-1/2) pi^(-3/4). |g|^2 along each
/// axis is a normal density with standard deviation sigma_a / sqrt(2).
struct GaussianPacket {
  Vec3 center{0.0, 0.0, 1.0};
  Vec3 sigma{1.0, 1.0, 1.0};
  Vec3 k{0.0, 0.0, 0.0};
  Complex amp{1.0, 0.0};
};

/// Coherent superposition of packets, truncated to zero for z <= 0.
class WaveFunction {
 public:
  explicit WaveFunction(std::vector<GaussianPacket> packets);

  const std::vector<GaussianPacket>& packets() const noexcept { return packets_; }

  /// Copy with every amplitude multiplied by `factor`.
  WaveFunction scaled(Complex factor) const;

 private:
  std::vector<GaussianPacket> packets_;
};

/// One-dimensional factor of a packet along `axis` (0, 1, 2).
Complex packet_axis_factor(const GaussianPacket& p, int axis, double coord);

Complex evaluate(const WaveFunction& psi, double x, double y, double z);

enum class QuadratureScheme { CompositeGaussLegendre };

/// Tensor-product quadrature settings.
///
/// Each axis interval is split into ceil(nodes / kPanelOrder) equal panels
/// with a kPanelOrder-point Gauss-Legendre rule on each, so the effective
/// node count is rounded up to a multiple of kPanelOrder. The integration
/// box is the union of the packets' +-half_width*sigma boxes, cut at z = 0.
struct QuadratureSpec {
  static constexpr int kPanelOrder = 8;

  std::array<int, 3> nodes{128, 128, 128};
  double half_width = 8.0;
  QuadratureScheme scheme = QuadratureScheme::CompositeGaussLegendre;

  /// Throws ConfigInvalid unless nodes >= 8 and half_width >= 4.
  void validate() const;

  /// Same settings with every node count multiplied by `factor`.
  QuadratureSpec refined(int factor) const;
};

struct Box3 {
  Vec3 lo{};
  Vec3 hi{};
};

/// Truncation box of the superposition (z clipped to [0, inf)).
Box3 bounding_box(const WaveFunction& psi, const QuadratureSpec& q);

/// Integral of |psi|^2 over `box`; empty boxes give 0.
double integrate_abs2(const WaveFunction& psi, const Box3& box, const QuadratureSpec& q);

/// Integral of |psi|^2 over z > 0. Throws NonFiniteResult on NaN/inf.
double norm_squared(const WaveFunction& psi, const QuadratureSpec& q);

/// Unnormalized region integrals: entry i < n-1 is cell i+1 (clipped to the
/// truncation box), the last entry is the box total minus the cells.
std::vector<double> region_masses(const WaveFunction& psi, const DetectorArray& array,
                                  const QuadratureSpec& q);

/// Born weights a_i = (1/||psi||^2) * integral over R_i of |psi|^2. Mass
/// outside every cell (including outside the box) is assigned to A_n.
/// Throws DegenerateState when ||psi||^2 < 1e-12, NonFiniteResult on NaN/inf.
SimplexPoint born_weights(const WaveFunction& psi, const DetectorArray& array,
                          const QuadratureSpec& q);

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

}  // namespace bornwalk
