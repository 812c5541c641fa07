#include "abel/euclid_plane.hpp"

#include <algorithm>

namespace abel {

Uncertified::Uncertified(std::string stage_, std::string quantity_,
                         double value_, double threshold_)
    : std::runtime_error(stage_ + ": " + quantity_ + " = " +
                         std::to_string(value_) + " exceeds threshold " +
                         std::to_string(threshold_)),
      stage(std::move(stage_)),
      quantity(std::move(quantity_)),
      value(value_),
      threshold(threshold_) {}

OrbitTerminated::OrbitTerminated(long steps_done_, double coord_)
    : std::runtime_error("orbit terminated after " +
                         std::to_string(steps_done_) + " steps at coord " +
                         std::to_string(coord_)),
      steps_done(steps_done_),
      coord(coord_) {}

Mat2 inverse(const Mat2& m) {
  const double dt = det(m);
  if (std::fabs(dt) < kDetTol)
    throw InvalidInput("inverse: matrix is singular within det_tol");
  const double r = 1.0 / dt;
  return {r * m.d, -r * m.b, -r * m.c, r * m.a};
}

Svd2 svd2(const Mat2& m) {
  /* Eigen-decomposition of S = M^T M = [[p, q], [q, r]]. The rotation angle
   * of the large eigenvector is well conditioned precisely when the singular
   * values are well separated, which is the only regime callers certify. */
  const double p = m.a * m.a + m.c * m.c;
  const double r = m.b * m.b + m.d * m.d;
  const double q = m.a * m.b + m.c * m.d;
  const double mean = 0.5 * (p + r);
  const double diff = std::hypot(0.5 * (p - r), q);
  const double s_max = std::sqrt(std::max(0.0, mean + diff));
  const double s_min = s_max > 0.0 ? std::fabs(det(m)) / s_max : 0.0;
  const double theta = 0.5 * std::atan2(2.0 * q, p - r);
  const Vec2 v_max{std::cos(theta), std::sin(theta)};
  return {s_max, s_min, v_max, perp(v_max)};
}

double op_norm(const Mat2& m) { return svd2(m).s_max; }

double deviation_norm(const Mat2& m) { return op_norm(m - Mat2{}); }

double sine_distance(Vec2 u, Vec2 v) {
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu == 0.0 || nv == 0.0)
    throw InvalidInput("sine_distance: zero vector has no direction");
  return std::min(1.0, std::fabs(volume_form(u, v)) / (nu * nv));
}

ProjLine::ProjLine(Vec2 v) {
  const double n = norm(v);
  if (n == 0.0) throw InvalidInput("ProjLine: zero vector has no direction");
  rep = (1.0 / n) * v;
  if (rep.x < 0.0 || (rep.x == 0.0 && rep.y < 0.0)) rep = -rep;
  rep.x += 0.0;  /* normalize -0.0 away for canonical printing */
  rep.y += 0.0;
}

double sine_distance(const ProjLine& u, const ProjLine& v) {
  return sine_distance(u.rep, v.rep);
}

Mat2 solve_shear(Vec2 v, Vec2 u, Vec2 u_prime) {
  const double nv = norm(v);
  const double nu = norm(u);
  const double nup = norm(u_prime);
  if (nv == 0.0 || nu == 0.0 || nup == 0.0)
    throw InvalidInput("solve_shear: zero vector");
  const Vec2 vh = (1.0 / nv) * v;
  const double dvu = volume_form(vh, u);
  const double dvup = volume_form(vh, u_prime);
  /* Collinearity cutoff: |D(v,u)| is |u| times the sine of the angle to v. */
  constexpr double kCollinearTol = 1e-12;
  if (std::fabs(dvu) <= kCollinearTol * nu ||
      std::fabs(dvup) <= kCollinearTol * nup)
    throw InvalidInput("solve_shear: degenerate basis, v collinear with u or u'");
  /* Rescale so D(v, u) = D(v, u') = 1; then s - 1 kills v and maps u to
   * (u' - u), which lies on the line of v. Writing s in the rank-one form
   * keeps the trace exactly 2 and the nilpotency exact. */
  const Vec2 us = (1.0 / dvu) * u;
  const Vec2 ups = (1.0 / dvup) * u_prime;
  const Vec2 delta = ups - us;
  const double coeff = dot(delta, vh);
  return rank_one_shear(vh, coeff);
}

ShearParts split_shear(const Mat2& s) {
  const Mat2 n = s - Mat2{};
  const Vec2 col1{n.a, n.c};
  const Vec2 col2{n.b, n.d};
  const Vec2 image = norm(col1) >= norm(col2) ? col1 : col2;
  const double ni = norm(image);
  if (ni == 0.0) return {Vec2{1.0, 0.0}, 0.0};
  const Vec2 vh = (1.0 / ni) * image;
  /* n(perp v) = coeff * v * D(v, perp v) = coeff * v for unit v. */
  const double coeff = dot(n * perp(vh), vh);
  return {vh, coeff};
}

}  // namespace abel
