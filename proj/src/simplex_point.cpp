#include "bornwalk/simplex_point.hpp"

#include <cmath>
#include <string>

#include "bornwalk/error.hpp"

namespace bornwalk {

SimplexPoint::SimplexPoint(std::vector<double> coords) : a_(std::move(coords)) {
  if (a_.empty()) throw Error(ErrorKind::ConfigInvalid, "simplex point has no coordinates");
  double sum = 0.0;
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (!std::isfinite(a_[i]) || a_[i] < 0.0) {
      throw Error(ErrorKind::ConfigInvalid,
                  "simplex coordinate " + std::to_string(i + 1) + " is negative or non-finite");
    }
    sum += a_[i];
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw Error(ErrorKind::ConfigInvalid, "simplex coordinates sum to " + std::to_string(sum));
  }
}

SimplexPoint SimplexPoint::normalized(std::vector<double> coords) {
  double sum = 0.0;
  for (double& c : coords) {
    if (std::isnan(c)) throw Error(ErrorKind::NonFiniteResult, "NaN coordinate");
    if (c < 0.0) c = 0.0;
    sum += c;
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw Error(ErrorKind::DegenerateState, "no positive mass to normalize");
  }
  for (double& c : coords) c = std::min(1.0, c / sum);
  return SimplexPoint(std::move(coords));
}

SimplexPoint SimplexPoint::vertex(std::size_t n, std::size_t i) {
  if (i < 1 || i > n) throw Error(ErrorKind::ConfigInvalid, "vertex index out of range");
  std::vector<double> a(n, 0.0);
  a[i - 1] = 1.0;
  return SimplexPoint(std::move(a));
}

std::size_t SimplexPoint::active_count() const noexcept {
  std::size_t k = 0;
  for (double c : a_) k += c > 0.0 ? 1 : 0;
  return k;
}

std::optional<std::size_t> is_absorbed(const SimplexPoint& a) {
  std::optional<std::size_t> hit;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 1.0 && !hit) {
      hit = i + 1;
    } else if (a[i] != 0.0) {
      return std::nullopt;
    }
  }
  return hit;
}

}  // namespace bornwalk
