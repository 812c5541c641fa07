#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "abel/cocycle.hpp"
#include "abel/euclid_plane.hpp"
#include "abel/interval_exchange.hpp"
#include "abel/slithering.hpp"

namespace abel {

enum class Lean { left, right };

enum class LegKind { raw, deviation };

/* One leg of a loop on the base circle: either a raw germ map with an
 * explicit matrix (a flow segment or an edge identification) or the
 * slithering deviation between two base points. A deviation leg from f to
 * t contributes deviation(t, f), the germ map carrying data at f to data
 * at t. */
struct LoopStep {
  LegKind kind = LegKind::deviation;
  double from = 0.0;
  double to = 0.0;
  Mat2 raw{};
};

struct LoopDescription {
  std::string label;
  std::vector<LoopStep> steps;
};

struct AbelianizedHolonomy {
  std::string loop_label;
  Mat2 matrix{};
  ProjLine plus{Vec2{1.0, 0.0}};  /* forward-stable line at the loop base */
  ProjLine minus{Vec2{0.0, 1.0}}; /* backward-stable line at the loop base */
  double diag_plus = 1.0;         /* eigen-entry on the forward-stable line */
  double diag_minus = 1.0;
  double off_diag_residual = 0.0; /* max off-diagonal size in the stable basis */
  double tail_bound = 0.0;
};

/* Compose the loop legs in travel order (first leg rightmost) and express
 * the result in the stable basis at the loop's base point. Deviation legs
 * capped at grade_cap when it is nonnegative. */
AbelianizedHolonomy abelianized_holonomy(const JumpAtlas& atlas,
                                         const LoopDescription& loop,
                                         int grade_cap = -1);

struct SplittingReport {
  double max_distance_plus = 0.0;
  double max_distance_minus = 0.0;
  double half_max_distance_plus = 0.0; /* same maxima at half the grade */
  double half_max_distance_minus = 0.0;
  double mean_tail = 0.0;
  int grade = 0;
  int half_grade = 0;
  std::size_t samples_used = 0;
};

/* How constant the deviation-warped stable lines are across the samples:
 * F(h) = deviation(a, h) * E(h) with a the midpoint of the base interval.
 * Reports the maximum pairwise line distance at the requested truncation
 * grade and at half that grade, plus the mean deviation tail bound. */
SplittingReport splitting_report(const JumpAtlas& atlas,
                                 const std::vector<LanePoint>& samples,
                                 int truncation_grade);

struct SpectralCoordinates {
  double a_plus = 0.0;
  double b_plus = 0.0;
  Lean lean = Lean::left;
};

inline constexpr double kSplitTolFactor = 1e-3;

/* Diagonal read-off of two holonomies on their forward-stable lines.
 * Refused unless each off-diagonal residual is at most
 * kSplitTolFactor * op_norm(matrix). */
SpectralCoordinates spectral_coordinates(const AbelianizedHolonomy& first,
                                         const AbelianizedHolonomy& second,
                                         Lean lean);

}  // namespace abel
