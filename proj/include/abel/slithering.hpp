#pragma once

#include <cstddef>
#include <vector>

#include "abel/cocycle.hpp"
#include "abel/euclid_plane.hpp"
#include "abel/interval_exchange.hpp"
#include "abel/ordered_product.hpp"

namespace abel {

/* The shear correcting the one-sided stable lines across a critical point.
 * For a backward-critical point it fixes the shared forward-stable line
 * and carries the right lane's backward-stable line to the left lane's;
 * for a forward-critical point the roles of the two lines swap. */
struct Jump {
  GradingEntry at{};
  Mat2 matrix{};
  double off_diag_norm = 0.0;
};

struct JumpOptions {
  /* stable-line residuals above this refuse the jump */
  double line_tol = 1e-7;
  long stable_n_start = 32;
  long stable_n_cap = 1 << 14;
  /* preferred half-depth for the per-anchor line re-estimates */
  long anchor_n_pref = 64;
};

/* Root jump at a registered break, from scratch. */
Jump jump_at(const IntervalCocycle& coc, const GradingEntry& entry,
             JumpOptions options = {});

/* Conjugate of a jump along the orbit of its coordinate: the result sits
 * at the n-step image and equals transport * matrix * transport^-1. The
 * rank-one form is transported as a vector so the shear structure is
 * preserved exactly; accuracy degrades with |n| because the carried
 * direction is not re-estimated. */
Jump pushed_jump(const IntervalCocycle& coc, const Jump& base, long n);

struct DecaySeries {
  std::vector<double> max_norm; /* index = grade, 0..n_max */
  double slope = 0.0;
  double intercept = 0.0;
  bool slope_defined = false;
  int fit_lo = 0;
  int fit_hi = 0;
};

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  bool defined = false;
};

/* Least-squares line through (n, log max_norm[n]) for n in [lo, hi],
 * skipping zero entries. Undefined with fewer than two usable points. */
DecayFit fit_decay(const std::vector<double>& max_norm, int lo, int hi);

struct DeviationResult {
  Mat2 value{};
  double tail_bound = 0.0;
  int truncation_grade = 0;
  double norm_sum = 0.0;
};

/* Jump norms at or below this level measure rounding in the stable-line
 * extraction, not structure; a series that never rises above it is treated
 * as identically zero (zero omitted mass) instead of being fitted. */
inline constexpr double kJumpNoiseFloor = 1e-12;

struct FamilyInfo {
  GradingEntry root{};
  double root_residual = 0.0;  /* worst certified line residual at the root */
  double sharedness = 0.0;     /* lane disagreement of the fixed line */
  double worst_anchor_residual = 0.0;
  int depth = 0;               /* largest grade reached by the walk */
};

/* Jumps for every table entry: roots computed from stable lines and
 * certified against line_tol, deeper grades pushed along the orbit with a
 * fresh contracted-line estimate at each anchor. Certification applies at
 * the roots; anchor residuals are reported, not enforced, because the
 * pushed jumps shrink like K^-n while finite orbits at near-rational
 * parameters cap the achievable residual. */
class JumpAtlas {
 public:
  JumpAtlas(const IntervalCocycle& coc, const GradingTable& table,
            JumpOptions options = {});

  const GradingTable& table() const { return table_; }
  const std::vector<Jump>& jumps() const { return jumps_; }
  const std::vector<FamilyInfo>& families() const { return families_; }
  const DecaySeries& decay() const { return decay_; }
  const JumpOptions& options() const { return options_; }
  const IntervalCocycle& cocycle() const { return coc_; }

  /* Ordered product of the jumps strictly between the two coordinates,
   * smallest coordinate leftmost, inverted when y > x. Entries sharing a
   * coordinate (distinct-sign families crossing) are merged into one
   * factor, higher grade leftmost. The tail bound extrapolates the fitted
   * decay beyond the truncation grade with a 2x safety factor. */
  DeviationResult deviation(double y, double x, int grade_cap = -1) const;

 private:
  const IntervalCocycle& coc_;
  GradingTable table_;
  JumpOptions options_;
  std::vector<Jump> jumps_;
  std::vector<FamilyInfo> families_;
  DecaySeries decay_;
};

/* Max jump deviation norm per grade with a log-linear fit; default fit
 * window is [n_max/2, n_max]. */
DecaySeries jump_decay_series(const IntervalCocycle& coc,
                              const GradingTable& table, int n_max,
                              int fit_lo = -1, int fit_hi = -1,
                              JumpOptions options = {});

/* Convenience wrapper building an atlas for one query. */
DeviationResult deviation(const IntervalCocycle& coc, const GradingTable& table,
                          double y, double x, JumpOptions options = {});

}  // namespace abel
