#include "abel/torus_model.hpp"

#include <cmath>
#include <string>

#include "abel/errors.hpp"

namespace abel {

namespace {

void check_params(const TorusParams& p) {
  if (!std::isfinite(p.m) || !(p.m > 0.0) || !(p.m < 1.0))
    throw InvalidInput("torus: m must lie in (0, 1), got " + std::to_string(p.m));
  if (!std::isfinite(p.mu) || !std::isfinite(p.nu) || !(p.mu * p.nu > 1.0))
    throw InvalidInput("torus: need mu * nu > 1 for a unimodular A");
  if (!std::isfinite(p.lambda) || !(std::fabs(p.lambda) > 0.0) ||
      !(std::fabs(p.lambda) < 1.0))
    throw InvalidInput("torus: need 0 < |lambda| < 1");
}

/* Smallest continued-fraction denominator q <= 10^6 with |m - p/q| within
 * 1e-12, or 0 when no convergent qualifies. */
void rational_proximity(double m, long long& den, double& err) {
  den = 0;
  err = 0.0;
  const double tol = 1e-12;
  const long long q_cap = 1000000;
  double x = m;
  long long h_prev = 0, h = 1;  /* numerators  */
  long long k_prev = 1, k = 0;  /* denominators */
  for (int i = 0; i < 64; ++i) {
    const double a_floor = std::floor(x);
    const long long a = static_cast<long long>(a_floor);
    const long long h_next = a * h + h_prev;
    const long long k_next = a * k + k_prev;
    if (k_next > q_cap || k_next <= 0) return;
    h_prev = h; h = h_next;
    k_prev = k; k = k_next;
    const double approx_err =
        std::fabs(m - static_cast<double>(h) / static_cast<double>(k));
    if (k > 0 && approx_err <= tol) {
      den = k;
      err = approx_err;
      return;
    }
    const double frac = x - a_floor;
    if (frac < 1e-15) return;
    x = 1.0 / frac;
  }
}

}  // namespace

double TorusParams::rho() const {
  if (!(mu * nu > 1.0)) throw InvalidInput("torus: rho needs mu * nu > 1");
  return std::sqrt(mu * nu - 1.0);
}

Mat2 side_matrix(const TorusParams& params) {
  const double r = params.rho();
  return Mat2{params.mu, r, r, params.nu};
}

Mat2 horizontal_matrix(const TorusParams& params) {
  return Mat2{params.lambda, 0.0, 0.0, 1.0 / params.lambda};
}

TorusSystem build_torus(const TorusParams& params) {
  check_params(params);
  const double m = params.m;
  const Mat2 a = side_matrix(params);
  const Mat2 b = horizontal_matrix(params);
  const Mat2 a_inv = inverse_unimodular(a);

  long long den = 0;
  double err = 0.0;
  rational_proximity(m, den, err);

  if (params.lean == Lean::left) {
    IntervalExchange iet(-1.0, 0.0,
                         {Piece{-1.0, 1.0 - m, m}, Piece{-m, m / 2, m - 1.0},
                          Piece{-m / 2, m / 2, m - 1.0}},
                         {-m / 2}, {-1.0 + m / 2});
    IntervalCocycle coc(iet, {Cell{-1.0, 1.0 - m, b},
                              Cell{-m, m / 2, a_inv * b},
                              Cell{-m / 2, m / 2, b * a_inv}});
    return TorusSystem{params,
                       std::move(iet),
                       std::move(coc),
                       -m / 2,
                       -1.0 + m / 2,
                       {-m, -1.0 + m},
                       a,
                       b,
                       den,
                       err};
  }

  /* Mirror chart s -> -1 - s: the wrap piece moves to the high end and the
   * side crossings pick up A instead of A^-1. */
  IntervalExchange iet(-1.0, 0.0,
                       {Piece{-1.0, m / 2, 1.0 - m},
                        Piece{-1.0 + m / 2, m / 2, 1.0 - m},
                        Piece{-1.0 + m, 1.0 - m, -m}},
                       {-1.0 + m / 2}, {-m / 2});
  IntervalCocycle coc(iet, {Cell{-1.0, m / 2, b * a},
                            Cell{-1.0 + m / 2, m / 2, a * b},
                            Cell{-1.0 + m, 1.0 - m, b}});
  return TorusSystem{params,
                     std::move(iet),
                     std::move(coc),
                     -1.0 + m / 2,
                     -m / 2,
                     {-1.0 + m, -m},
                     a,
                     b,
                     den,
                     err};
}

PredictedLimits predicted_limits(const TorusParams& params) {
  check_params(params);
  const double r = params.rho();
  const double lam2 = params.lambda * params.lambda;
  const double read = params.lean == Lean::left ? params.mu : params.nu;
  const double coeff = (lam2 - 1.0) * r / read;

  PredictedLimits out;
  out.a_ab = params.lean == Lean::left
                 ? Mat2{params.mu, 0.0, 0.0, 1.0 / params.mu}
                 : Mat2{1.0 / params.nu, 0.0, 0.0, params.nu};
  out.b_ab = horizontal_matrix(params);
  out.jumps = {Mat2{1.0, 0.0, coeff, 1.0}, Mat2{1.0, coeff, 0.0, 1.0}};
  return out;
}

std::pair<LoopDescription, LoopDescription> torus_loops(const TorusSystem& sys) {
  const double lo = -1.0;
  const double hi = 0.0;
  const double base = -0.5;

  LoopDescription horizontal;
  horizontal.label = "horizontal";
  horizontal.steps = {LoopStep{LegKind::deviation, base, lo, Mat2{}},
                      LoopStep{LegKind::raw, lo, hi, sys.a_matrix},
                      LoopStep{LegKind::deviation, hi, base, Mat2{}}};

  const LanePoint p{base, Lane::plain};
  const Mat2* cell = sys.cocycle.cell_value(p);
  const auto image = sys.iet.apply(p);
  if (cell == nullptr || !image.has_value())
    throw InvalidInput("torus: base point -1/2 fell on a piece boundary");

  LoopDescription vertical;
  vertical.label = "vertical";
  vertical.steps = {LoopStep{LegKind::raw, base, image->coord, *cell},
                    LoopStep{LegKind::deviation, image->coord, base, Mat2{}}};
  return {horizontal, vertical};
}

}  // namespace abel
