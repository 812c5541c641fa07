#pragma once

#include <cmath>
#include <random>

#include "abel/euclid_plane.hpp"

/* Seeded generators shared by the property tests. */

namespace testsupport {

inline abel::Vec2 random_vec(std::mt19937_64& rng, double lo = -2.0,
                             double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng)};
}

inline abel::Vec2 random_nonzero_vec(std::mt19937_64& rng) {
  for (;;) {
    abel::Vec2 v = random_vec(rng);
    if (abel::norm(v) > 1e-3) return v;
  }
}

inline abel::Mat2 random_mat(std::mt19937_64& rng, double lo = -2.0,
                             double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng), u(rng), u(rng)};
}

/* Random SL2 element with moderate condition number: rotation * shear *
 * rotation keeps the determinant exactly at the product of exact-1 factors. */
inline abel::Mat2 random_sl2(std::mt19937_64& rng, double shear_scale = 1.0) {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> sh(-shear_scale, shear_scale);
  const double a1 = ang(rng), a2 = ang(rng), t = sh(rng);
  const abel::Mat2 r1{std::cos(a1), -std::sin(a1), std::sin(a1), std::cos(a1)};
  const abel::Mat2 r2{std::cos(a2), -std::sin(a2), std::sin(a2), std::cos(a2)};
  const abel::Mat2 s{1.0, t, 0.0, 1.0};
  return r1 * s * r2;
}

/* Random SL2 near the identity with op_norm(x - 1) close to `size`. */
inline abel::Mat2 random_near_identity(std::mt19937_64& rng, double size) {
  const abel::Vec2 v = random_nonzero_vec(rng);
  const abel::Vec2 vh = (1.0 / abel::norm(v)) * v;
  std::uniform_real_distribution<double> sgn(0.0, 1.0);
  const double coeff = (sgn(rng) < 0.5 ? -1.0 : 1.0) * size;
  return abel::rank_one_shear(vh, coeff);
}

}  // namespace testsupport
