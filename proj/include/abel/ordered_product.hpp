#pragma once

#include <cstddef>
#include <vector>

#include "abel/euclid_plane.hpp"

namespace abel {

/* One factor of an ordered matrix product. Factors are indexed by a real
 * position; the product is taken left-to-right in increasing position. */
struct OrderedFactor {
  double position = 0.0;
  Mat2 factor{};
  double deviation_norm = 0.0;
};

OrderedFactor make_factor(double position, const Mat2& factor);

struct ProductResult {
  Mat2 value{};
  double tail_bound = 0.0;
  std::size_t factors_used = 0;
  double norm_sum = 0.0;
};

/* Multiplies the factors left-to-right in position order. Positions must be
 * strictly increasing; a repeated position is a caller bug (coincident
 * factors must be merged before they get here). tail_bound is left at zero,
 * the caller accounts for omitted factors via estimate_tail. */
ProductResult product_in_order(const std::vector<OrderedFactor>& factors);

/* Upper bound on the operator-norm gap between the full product and the
 * truncation, given that the omitted factors' deviation norms sum to at most
 * omitted_norm_sum. Valid for any interleaving of the omitted factors. */
double estimate_tail(double omitted_norm_sum, double current_norm_sum);

/* Inverse of the ordered product: the reversed-order product of inverses. */
Mat2 product_inverse(const std::vector<OrderedFactor>& factors);

}  // namespace abel
