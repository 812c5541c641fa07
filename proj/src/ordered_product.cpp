#include "abel/ordered_product.hpp"

#include <cmath>

#include "abel/errors.hpp"

namespace abel {

OrderedFactor make_factor(double position, const Mat2& factor) {
  return OrderedFactor{position, factor, deviation_norm(factor)};
}

ProductResult product_in_order(const std::vector<OrderedFactor>& factors) {
  for (std::size_t i = 1; i < factors.size(); ++i) {
    if (!(factors[i - 1].position < factors[i].position)) {
      throw InvalidInput("ordered product: positions must strictly increase");
    }
  }
  ProductResult out;
  for (const OrderedFactor& f : factors) {
    out.value = out.value * f.factor;
    out.norm_sum += f.deviation_norm;
  }
  out.factors_used = factors.size();
  return out;
}

double estimate_tail(double omitted_norm_sum, double current_norm_sum) {
  if (omitted_norm_sum < 0.0 || current_norm_sum < 0.0) {
    throw InvalidInput("estimate_tail: norm sums must be nonnegative");
  }
  return omitted_norm_sum * std::exp(current_norm_sum + omitted_norm_sum);
}

Mat2 product_inverse(const std::vector<OrderedFactor>& factors) {
  Mat2 out{};
  for (const OrderedFactor& f : factors) {
    out = inverse(f.factor) * out;
  }
  return out;
}

}  // namespace abel
