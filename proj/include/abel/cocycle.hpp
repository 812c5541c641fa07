#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "abel/euclid_plane.hpp"
#include "abel/interval_exchange.hpp"

namespace abel {

struct Cell {
  double left = 0.0;
  double length = 0.0;
  Mat2 value{};
};

/* A cocycle over an interval exchange, constant on each cell. Cells must
 * tile the base interval, refine the exchanged pieces, and carry matrices
 * of unit determinant. */
class IntervalCocycle {
 public:
  IntervalCocycle(IntervalExchange iet, std::vector<Cell> cells);

  const IntervalExchange& iet() const { return iet_; }
  const std::vector<Cell>& cells() const { return cells_; }

  /* Matrix applied during one forward step from p. Null when the value is
   * ambiguous for the lane: plain or median points on a cell boundary. */
  const Mat2* cell_value(LanePoint p) const;

 private:
  IntervalExchange iet_;
  std::vector<Cell> cells_;
};

/* A transport matrix kept at a bounded scale. Long products are scaled
 * down periodically so entries never overflow; log_scale accumulates the
 * scaling taken out. value() reconstructs the plain matrix and is only
 * safe while exp(log_scale) is representable. */
struct Transported {
  Mat2 matrix{};
  double log_scale = 0.0;

  double log_norm() const;
  Mat2 value() const;
};

/* Ordered product of cell matrices along the orbit of p: n > 0 multiplies
 * the matrices met by the forward orbit (latest factor leftmost), n < 0 the
 * inverses met by the backward orbit. Throws OrbitTerminated, carrying the
 * number of completed steps, when the orbit dies first. */
Transported transport(const IntervalCocycle& coc, LanePoint p, long n);

struct LyapunovEstimate {
  double lambda_hat = 0.0;
  long n = 0;
  std::size_t sample_count = 0;
  std::size_t skipped = 0;
  double spread = 0.0;
};

/* Mean of log ||transport(s, n)|| / n over the samples. Samples whose
 * orbits die are skipped and counted. The spread (max minus min) is the
 * caller's convergence signal; no claim is made here. */
LyapunovEstimate lyapunov_estimate(const IntervalCocycle& coc,
                                   const std::vector<LanePoint>& samples,
                                   long n);

/* Deterministic plain sample points spread by the golden rotation, kept
 * clear of cell boundaries. */
std::vector<LanePoint> low_discrepancy_samples(const IntervalCocycle& coc,
                                               std::size_t count,
                                               std::uint64_t seed);

/* Smallest n <= n_max for which every n-step transport matrix has strictly
 * positive entries, scanning one representative per cell of the n-step
 * constancy refinement. Absence is inconclusive, not a disproof. */
std::optional<int> eventual_positivity_certificate(const IntervalCocycle& coc,
                                                   int n_max);

enum class Direction { forward, backward };

struct StableLineResult {
  ProjLine line{Vec2{1.0, 0.0}};
  Direction direction = Direction::forward;
  long iterations_used = 0;
  double residual = 0.0;
};

/* Most contracted input direction of the 2n-step transport, with the
 * distance between the n- and 2n-step estimates as residual. Refuses when
 * the singular values stay equal to working precision (no contraction). */
StableLineResult stable_line(const IntervalCocycle& coc, LanePoint p,
                             Direction direction, long n);

/* Doubles n from n_start until the residual meets the target, shrinking to
 * what the orbit supports when it terminates early. */
StableLineResult stable_line_auto(const IntervalCocycle& coc, LanePoint p,
                                  Direction direction, double residual_target,
                                  long n_start = 32, long n_cap = 1 << 14);

}  // namespace abel
