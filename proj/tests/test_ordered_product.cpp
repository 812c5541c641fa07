#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "abel/errors.hpp"
#include "abel/euclid_plane.hpp"
#include "abel/ordered_product.hpp"
#include "doctest.h"
#include "support/random_mat.hpp"

using namespace abel;
using testsupport::random_mat;
using testsupport::random_near_identity;
using testsupport::random_sl2;

namespace {

std::vector<OrderedFactor> with_positions(const std::vector<Mat2>& mats) {
  std::vector<OrderedFactor> out;
  out.reserve(mats.size());
  for (std::size_t i = 0; i < mats.size(); ++i) {
    out.push_back(make_factor(static_cast<double>(i), mats[i]));
  }
  return out;
}

}  // namespace

TEST_SUITE("ordered_product") {

TEST_CASE("empty product is the identity") {
  const ProductResult p = product_in_order({});
  CHECK(p.value.a == 1.0);
  CHECK(p.value.b == 0.0);
  CHECK(p.value.c == 0.0);
  CHECK(p.value.d == 1.0);
  CHECK(p.tail_bound == 0.0);
  CHECK(p.factors_used == 0);
  CHECK(p.norm_sum == 0.0);
}

TEST_CASE("commuting lower shears add their coefficients") {
  const double a = 0.25, b = 0.5;
  const ProductResult p = product_in_order(
      {make_factor(0.0, Mat2{1, 0, a, 1}), make_factor(1.0, Mat2{1, 0, b, 1})});
  CHECK(p.value.a == 1.0);
  CHECK(p.value.b == 0.0);
  CHECK(p.value.c == a + b);
  CHECK(p.value.d == 1.0);
}

TEST_CASE("thirty dyadic upper shears hit the exact partial sum") {
  /* All partial sums of 2^-1 + ... + 2^-30 are exact doubles, so the
   * accumulated product is bitwise predictable. */
  std::vector<OrderedFactor> factors;
  for (int n = 1; n <= 30; ++n) {
    factors.push_back(
        make_factor(static_cast<double>(n), Mat2{1, std::ldexp(1.0, -n), 0, 1}));
  }
  const ProductResult p = product_in_order(factors);
  CHECK(p.value.a == 1.0);
  CHECK(p.value.b == 1.0 - std::ldexp(1.0, -30));
  CHECK(p.value.c == 0.0);
  CHECK(p.value.d == 1.0);
  CHECK(p.factors_used == 30);
  CHECK(p.norm_sum == 1.0 - std::ldexp(1.0, -30));
}

TEST_CASE("unsorted or duplicate positions are rejected") {
  const Mat2 m{1, 0.1, 0, 1};
  CHECK_THROWS_AS(
      product_in_order({make_factor(1.0, m), make_factor(0.0, m)}),
      InvalidInput);
  CHECK_THROWS_AS(
      product_in_order({make_factor(0.5, m), make_factor(0.5, m)}),
      InvalidInput);
}

TEST_CASE("estimate_tail pinned values") {
  CHECK(estimate_tail(0.0, 0.7) == 0.0);
  CHECK(estimate_tail(0.01, 0.5) ==
        doctest::Approx(0.01 * std::exp(0.51)).epsilon(1e-12));
  CHECK(estimate_tail(0.01, 0.5) == doctest::Approx(0.016657).epsilon(1e-4));
  CHECK_THROWS_AS(estimate_tail(-1e-12, 0.0), InvalidInput);
  CHECK_THROWS_AS(estimate_tail(0.0, -1.0), InvalidInput);
}

TEST_CASE("geometric shear family: truncation brackets the closed form") {
  /* Upper shears with coefficients 2^-n commute, so the full product is
   * [[1, 1],[0, 1]]. Truncating at N leaves an omitted norm sum of 2^-N,
   * and the tail estimate must cover the gap to the limit. */
  const int N = 10;
  std::vector<OrderedFactor> factors;
  for (int n = 1; n <= N; ++n) {
    factors.push_back(
        make_factor(static_cast<double>(n), Mat2{1, std::ldexp(1.0, -n), 0, 1}));
  }
  const ProductResult p = product_in_order(factors);
  const double omitted = std::ldexp(1.0, -N);
  const double tail = estimate_tail(omitted, p.norm_sum);
  const Mat2 limit{1, 1, 0, 1};
  CHECK(op_norm(limit - p.value) <= tail);
  CHECK(tail <= 10.0 * omitted);
}

TEST_CASE("product_inverse pinned and oracle cases") {
  const Mat2 m{2, 1, 1, 1};
  const Mat2 mi = product_inverse({make_factor(0.0, m)});
  CHECK(mi.a == 1.0);
  CHECK(mi.b == -1.0);
  CHECK(mi.c == -1.0);
  CHECK(mi.d == 2.0);

  const Mat2 lower{1, 0, 0.375, 1};
  const Mat2 upper{1, -0.25, 0, 1};
  const Mat2 two = product_inverse({make_factor(0.0, lower), make_factor(1.0, upper)});
  const Mat2 expect = inverse_unimodular(upper) * inverse_unimodular(lower);
  CHECK(op_norm(two - expect) < 1e-15);

  std::mt19937_64 rng(21);
  std::vector<OrderedFactor> factors;
  for (int i = 0; i < 100; ++i) {
    factors.push_back(
        make_factor(static_cast<double>(i), random_near_identity(rng, 0.05)));
  }
  const Mat2 direct = product_inverse(factors);
  const Mat2 oracle = inverse(product_in_order(factors).value);
  CHECK(op_norm(direct - oracle) < 1e-9 * op_norm(oracle));
  CHECK(op_norm(direct * product_in_order(factors).value - Mat2{}) < 1e-9);
}

TEST_CASE("norm bound holds for arbitrary factor lists") {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<int> len(0, 12);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<OrderedFactor> factors;
    const int k = len(rng);
    for (int i = 0; i < k; ++i) {
      const Mat2 m = (trial % 2 == 0) ? random_mat(rng) : random_sl2(rng);
      factors.push_back(make_factor(static_cast<double>(i), m));
    }
    const ProductResult p = product_in_order(factors);
    CHECK(op_norm(p.value) <= std::exp(p.norm_sum) + 1e-9);
  }
}

TEST_CASE("splitting a list multiplies the sub-products") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Mat2> mats;
    for (int i = 0; i < 10; ++i) mats.push_back(random_near_identity(rng, 0.2));
    const std::vector<OrderedFactor> factors = with_positions(mats);
    const Mat2 full = product_in_order(factors).value;
    std::uniform_int_distribution<std::size_t> cut(0, factors.size());
    const std::size_t at = cut(rng);
    const std::vector<OrderedFactor> head(factors.begin(), factors.begin() + at);
    const std::vector<OrderedFactor> rest(factors.begin() + at, factors.end());
    const Mat2 glued = product_in_order(head).value * product_in_order(rest).value;
    CHECK(op_norm(full - glued) < 1e-10 * (1.0 + op_norm(full)));
  }
}

TEST_CASE("conjugation commutes with the ordered product") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 200; ++trial) {
    const Mat2 q = random_sl2(rng);
    const Mat2 qi = inverse_unimodular(q);
    std::vector<OrderedFactor> factors;
    std::vector<OrderedFactor> conjugated;
    for (int i = 0; i < 8; ++i) {
      const Mat2 m = random_near_identity(rng, 0.1);
      factors.push_back(make_factor(static_cast<double>(i), m));
      conjugated.push_back(make_factor(static_cast<double>(i), q * m * qi));
    }
    const Mat2 lhs = product_in_order(conjugated).value;
    const Mat2 rhs = q * product_in_order(factors).value * qi;
    CHECK(op_norm(lhs - rhs) < 1e-9 * (1.0 + op_norm(rhs)));
  }
}

}  // TEST_SUITE
