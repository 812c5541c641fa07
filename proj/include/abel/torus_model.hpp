#pragma once

#include <utility>
#include <vector>

#include "abel/abelianize.hpp"
#include "abel/cocycle.hpp"
#include "abel/euclid_plane.hpp"
#include "abel/interval_exchange.hpp"

namespace abel {

/* Slanted torus: a unit-area parallelogram with horizontal top and bottom,
 * slanted sides, and translation gluings. The vertical flow returns to the
 * mid-height horizontal section, giving a rotation written as an interval
 * exchange on (-1, 0); the SL(2) cocycle collects one crossing factor B per
 * return (through the horizontal curve) and a factor A^(+-1) per crossing
 * of the glued slanted sides. */
struct TorusParams {
  double m = 0.02;      /* horizontal offset of the top edge, in (0, 1) */
  double mu = 2.0;      /* A = [[mu, rho], [rho, nu]] with rho chosen so */
  double nu = 1.0;      /* that det A = mu nu - rho^2 = 1               */
  double lambda = 0.5;  /* B = diag(lambda, 1/lambda), 0 < |lambda| < 1 */
  Lean lean = Lean::left;

  double rho() const;  /* +sqrt(mu nu - 1); requires mu nu > 1 */
};

Mat2 side_matrix(const TorusParams& params);       /* A */
Mat2 horizontal_matrix(const TorusParams& params); /* B */

struct TorusSystem {
  TorusParams params;
  IntervalExchange iet;     /* return map to the section, on (-1, 0) */
  IntervalCocycle cocycle;  /* crossing factors per return */
  double break_forward = 0.0;   /* registered forward-critical endpoint */
  double break_backward = 0.0;  /* registered backward-critical endpoint */
  /* Piece endpoints that are mere wrap points of the chart: the transport
   * germs agree across them, so they carry no jump and are not registered. */
  std::pair<double, double> non_critical_vanishing{0.0, 0.0};
  Mat2 a_matrix{};
  Mat2 b_matrix{};
  /* Closest simple rational to m (smallest denominator <= 10^6 within
   * 1e-12), reported so rational parameters are visible up front; 0 when
   * none qualifies. Orbit collisions themselves are detected during
   * grading, not here. */
  long long rational_denominator = 0;
  double rational_error = 0.0;
};

/* Validates the parameters and assembles the section cocycle. Left lean
 * puts the cell values (B, A^-1 B, B A^-1) on the pieces left to right;
 * right lean is the mirrored chart with values (B A, A B, B). */
TorusSystem build_torus(const TorusParams& params);

struct PredictedLimits {
  Mat2 a_ab{};               /* horizontal-loop holonomy as m -> 0 */
  Mat2 b_ab{};               /* vertical-loop holonomy as m -> 0 */
  std::vector<Mat2> jumps;   /* root jump limits, forward then backward */
};

/* Closed-form m -> 0 limits at the given parameters: the horizontal
 * holonomy tends to diag(mu, 1/mu) for left lean and diag(1/nu, nu) for
 * right lean, the vertical holonomy to B, and the root jumps to unipotent
 * shears with coefficient (lambda^2 - 1) rho / mu (or nu). */
PredictedLimits predicted_limits(const TorusParams& params);

/* The two generating loops as leg lists for abelianized_holonomy, based at
 * -1/2: the horizontal loop walks to the low end, wraps across the side
 * gluing with raw factor A, and walks back; the vertical loop is one
 * return of the section map followed by the deviation leg home. */
std::pair<LoopDescription, LoopDescription> torus_loops(const TorusSystem& sys);

}  // namespace abel
