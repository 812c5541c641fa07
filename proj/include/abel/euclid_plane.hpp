#pragma once

#include <cmath>

#include "abel/errors.hpp"

/* Plane linear algebra for the rest of the library: 2-vectors, 2x2 matrices,
 * the area form D, sine distance between lines, closed-form SVD, and the
 * shear solver used to construct slithering jumps. Everything here is exact
 * formula work; no iterative solvers. */

namespace abel {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double t, Vec2 a) { return {t * a.x, t * a.y}; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/* Area form D(u, v): the unit square has unit volume. */
constexpr double volume_form(Vec2 u, Vec2 v) { return u.x * v.y - u.y * v.x; }

/* Row-major [[a, b], [c, d]]; default constructs the identity. */
struct Mat2 {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 1.0;
};

constexpr Mat2 operator*(const Mat2& m, const Mat2& n) {
  return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
          m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}
constexpr Vec2 operator*(const Mat2& m, Vec2 v) {
  return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
}
constexpr Mat2 operator+(const Mat2& m, const Mat2& n) {
  return {m.a + n.a, m.b + n.b, m.c + n.c, m.d + n.d};
}
constexpr Mat2 operator-(const Mat2& m, const Mat2& n) {
  return {m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d};
}
constexpr Mat2 operator*(double t, const Mat2& m) {
  return {t * m.a, t * m.b, t * m.c, t * m.d};
}

constexpr Mat2 transpose(const Mat2& m) { return {m.a, m.c, m.b, m.d}; }
constexpr double det(const Mat2& m) { return m.a * m.d - m.b * m.c; }
constexpr double trace(const Mat2& m) { return m.a + m.d; }

/* Adjugate. Inverse of a determinant-one matrix with no division, so
 * round-trips of SL2 elements stay bitwise faithful. */
constexpr Mat2 inverse_unimodular(const Mat2& m) {
  return {m.d, -m.b, -m.c, m.a};
}

/* Tolerance for SL(2) membership checks (|det - 1|) and for refusing to
 * invert a nearly singular matrix. */
inline constexpr double kDetTol = 1e-9;

/* General inverse; refuses |det| < kDetTol. */
Mat2 inverse(const Mat2& m);

inline double max_abs_entry(const Mat2& m) {
  return std::max(std::max(std::fabs(m.a), std::fabs(m.b)),
                  std::max(std::fabs(m.c), std::fabs(m.d)));
}

/* Closed-form singular value decomposition data for a 2x2 matrix: singular
 * values and the unit right singular directions. The directions are the
 * eigenvectors of M^T M; s_min is recovered as |det|/s_max, which avoids the
 * cancellation in the small eigenvalue when the matrix is very anisotropic
 * (exactly the regime stable-line extraction cares about). */
struct Svd2 {
  double s_max;
  double s_min;
  Vec2 right_max;
  Vec2 right_min;
};
Svd2 svd2(const Mat2& m);

double op_norm(const Mat2& m);

/* op_norm(m - 1); how far a factor deviates from the identity. */
double deviation_norm(const Mat2& m);

/* Sine of the angle between the lines spanned by u and v: |D(u,v)|/(|u||v|),
 * clamped to [0, 1]. */
double sine_distance(Vec2 u, Vec2 v);

/* A line through the origin with a canonical unit representative: first
 * nonzero component positive. */
struct ProjLine {
  Vec2 rep;
  explicit ProjLine(Vec2 v);
};

double sine_distance(const ProjLine& u, const ProjLine& v);

/* The shear with s(v) = v, s(line of u) = line of u', det 1, trace exactly 2,
 * after internally rescaling u, u' so that D(v,u) = D(v,u') = 1. Throws if v
 * is collinear with u or u' (no basis to solve in). Returns the identity when
 * u and u' span the same line. */
Mat2 solve_shear(Vec2 v, Vec2 u, Vec2 u_prime);

/* The matrix 1 + coeff * v D(v, .) for unit v: the rank-one form of a shear
 * fixing v. The diagonal corrections are the same product with opposite
 * signs, so the trace is 2 up to the rounding of 1 +- t alone. */
constexpr Mat2 rank_one_shear(Vec2 v, double coeff) {
  return {1.0 - coeff * v.x * v.y, coeff * v.x * v.x,
          -coeff * v.y * v.y, 1.0 + coeff * v.x * v.y};
}

/* Inverse of rank_one_shear: recover (unit fixed direction, coefficient) from
 * a near-identity shear. The returned coefficient is exact for matrices built
 * by rank_one_shear; for general trace-2 shears it is the least-squares fit.
 * Identity maps to coeff = 0 with an arbitrary direction. */
struct ShearParts {
  Vec2 fixed_dir;
  double coeff;
};
ShearParts split_shear(const Mat2& s);

}  // namespace abel
