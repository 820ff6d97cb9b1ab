#pragma once

#include <cstdint>
#include <vector>

#include "bornwalk/simplex_point.hpp"

namespace bornwalk {

struct ChiSquare {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t categories = 0;  // after pooling
  std::size_t dof = 0;
};

/// Pearson goodness-of-fit of `counts` against the `expected` distribution.
///
/// Categories whose expected count is below 5 are pooled, smallest first,
/// into whichever adjacent category has the smaller expected count. The
/// p-value is the upper tail of chi-square with (categories - 1) degrees of
/// freedom. Throws DegenerateExpected when fewer than two categories carry
/// expected mass (before or after pooling), ConfigInvalid on empty counts or
/// a length mismatch.
ChiSquare chi_square(const std::vector<std::uint64_t>& counts, const SimplexPoint& expected);

/// Upper tail P(X > x) of chi-square with `dof` degrees of freedom.
double chi_square_upper_tail(double x, std::size_t dof);

/// Binomial standard error sqrt(p (1 - p) / n).
double binomial_se(double p, std::uint64_t n);

}  // namespace bornwalk
