#include "bornwalk/stats.hpp"

#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "bornwalk/error.hpp"

namespace bornwalk {

double chi_square_upper_tail(double x, std::size_t dof) {
  if (dof == 0) throw Error(ErrorKind::ConfigInvalid, "chi-square needs dof >= 1");
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * x);
}

double binomial_se(double p, std::uint64_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

ChiSquare chi_square(const std::vector<std::uint64_t>& counts, const SimplexPoint& expected) {
  if (counts.size() != expected.size()) {
    throw Error(ErrorKind::ConfigInvalid, "counts and expected differ in length");
  }
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) throw Error(ErrorKind::ConfigInvalid, "chi-square needs at least one count");
  if (expected.active_count() < 2) {
    throw Error(ErrorKind::DegenerateExpected, "all expected mass in one category");
  }

  struct Bin {
    double expected;
    double observed;
  };
  std::vector<Bin> bins;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    bins.push_back({expected[i] * static_cast<double>(total), static_cast<double>(counts[i])});
  }

  constexpr double kMinExpected = 5.0;
  while (bins.size() > 1) {
    std::size_t smallest = bins.size();
    for (std::size_t i = 0; i < bins.size(); ++i) {
      if (bins[i].expected < kMinExpected &&
          (smallest == bins.size() || bins[i].expected < bins[smallest].expected)) {
        smallest = i;
      }
    }
    if (smallest == bins.size()) break;
    std::size_t target;
    if (smallest == 0) {
      target = 1;
    } else if (smallest + 1 == bins.size()) {
      target = smallest - 1;
    } else {
      target = bins[smallest - 1].expected <= bins[smallest + 1].expected ? smallest - 1 : smallest + 1;
    }
    bins[target].expected += bins[smallest].expected;
    bins[target].observed += bins[smallest].observed;
    bins.erase(bins.begin() + static_cast<std::ptrdiff_t>(smallest));
  }
  if (bins.size() < 2) {
    throw Error(ErrorKind::DegenerateExpected, "fewer than two categories after pooling");
  }

  ChiSquare out;
  for (const Bin& b : bins) {
    const double diff = b.observed - b.expected;
    out.statistic += diff * diff / b.expected;
  }
  out.categories = bins.size();
  out.dof = bins.size() - 1;
  out.p_value = chi_square_upper_tail(out.statistic, out.dof);
  return out;
}

}  // namespace bornwalk
