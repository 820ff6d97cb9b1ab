#pragma once

#include <cstddef>
#include <vector>

namespace bornwalk {

/// Axis-aligned rectangle in the detector plane. Bounds may be infinite,
/// which lets a cell cover a half-plane or a full strip.
struct Cell {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  bool contains(double x, double y) const noexcept {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Partition of the plane into cells A_1..A_{n-1} plus the implicit
/// catch-all A_n (the complement of their union). Region i >= 1 above the
/// plane is the half-space column A_i x (0, inf).
///
/// Construction only rejects structurally unusable input (no cells, NaN
/// bounds, inverted bounds); overlap and zero area are reported by
/// validate().
class DetectorArray {
 public:
  explicit DetectorArray(std::vector<Cell> cells);

  const std::vector<Cell>& cells() const noexcept { return cells_; }

  /// Total region count n, including the catch-all.
  std::size_t region_count() const noexcept { return cells_.size() + 1; }

  /// 1-based region of a plane point. Boundary points go to the lowest
  /// index whose closed cell contains them.
  std::size_t region_index(double x, double y) const noexcept;

 private:
  std::vector<Cell> cells_;
};

struct Violation {
  enum class Kind { Overlap, Degenerate };
  Kind kind;
  std::size_t first;   // 1-based cell index
  std::size_t second;  // 1-based, Overlap only; 0 otherwise

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Every pairwise interior overlap and every zero-area cell. Empty means ok.
std::vector<Violation> validate(const DetectorArray& array);

}  // namespace bornwalk
