#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace bornwalk {

/// A point of the probability simplex: nonnegative coordinates summing to 1.
///
/// Born weights and walk states share this type. Construction validates
/// (a_i >= 0, |sum - 1| <= kSumTolerance) and throws ConfigInvalid otherwise;
/// use normalized() to clamp and rescale arbitrary nonnegative data.
class SimplexPoint {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit SimplexPoint(std::vector<double> coords);

  /// Clamps negatives to 0 and divides by the sum. Throws DegenerateState
  /// when nothing positive remains.
  static SimplexPoint normalized(std::vector<double> coords);

  /// The vertex e_i, with i in 1..n.
  static SimplexPoint vertex(std::size_t n, std::size_t i);

  std::size_t size() const noexcept { return a_.size(); }
  double operator[](std::size_t i) const { return a_[i]; }
  std::span<const double> coords() const noexcept { return a_; }
  const std::vector<double>& vec() const noexcept { return a_; }

  /// Number of strictly positive coordinates.
  std::size_t active_count() const noexcept;

  friend bool operator==(const SimplexPoint&, const SimplexPoint&) = default;

 private:
  std::vector<double> a_;
};

/// Returns i (1-based) iff a_i == 1 exactly; exact-zero semantics.
std::optional<std::size_t> is_absorbed(const SimplexPoint& a);

}  // namespace bornwalk
