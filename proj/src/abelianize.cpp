#include "abel/abelianize.hpp"

#include <algorithm>
#include <cmath>

#include "abel/errors.hpp"

namespace abel {

namespace {

/* Rewrite m in the column basis (plus, minus). The basis determinant is the
 * sine of the angle between the stable lines; when they collapse there is
 * no splitting to read off. */
Mat2 in_basis(const Mat2& m, Vec2 plus, Vec2 minus) {
  const Mat2 basis{plus.x, minus.x, plus.y, minus.y};
  const double d = det(basis);
  if (std::fabs(d) < kDetTol)
    throw Uncertified("holonomy", "stable basis close to collinear",
                      std::fabs(d), kDetTol);
  const Mat2 inv{basis.d / d, -basis.b / d, -basis.c / d, basis.a / d};
  return inv * (m * basis);
}

StableLineResult base_line(const JumpAtlas& atlas, double coord, Direction dir) {
  const JumpOptions& opts = atlas.options();
  return stable_line_auto(atlas.cocycle(), LanePoint{coord, Lane::plain}, dir,
                          opts.line_tol, opts.stable_n_start,
                          opts.stable_n_cap);
}

}  // namespace

AbelianizedHolonomy abelianized_holonomy(const JumpAtlas& atlas,
                                         const LoopDescription& loop,
                                         int grade_cap) {
  const GradingTable& table = atlas.table();
  if (loop.steps.empty()) throw InvalidInput("holonomy: loop has no steps");
  for (std::size_t k = 0; k + 1 < loop.steps.size(); ++k)
    if (std::fabs(loop.steps[k].to - loop.steps[k + 1].from) > table.tol)
      throw InvalidInput("holonomy: loop legs do not chain");
  if (std::fabs(loop.steps.back().to - loop.steps.front().from) > table.tol)
    throw InvalidInput("holonomy: loop does not close");

  Mat2 value{};
  std::vector<double> leg_norms;
  std::vector<double> leg_tails;
  for (const LoopStep& step : loop.steps) {
    Mat2 leg{};
    double tail = 0.0;
    if (step.kind == LegKind::raw) {
      if (std::fabs(det(step.raw) - 1.0) > kDetTol)
        throw InvalidInput("holonomy: raw leg is not unimodular");
      leg = step.raw;
    } else {
      const DeviationResult dev = atlas.deviation(step.to, step.from, grade_cap);
      leg = dev.value;
      tail = dev.tail_bound;
    }
    value = leg * value;
    leg_norms.push_back(op_norm(leg));
    leg_tails.push_back(tail);
  }

  /* First-order composition tail: each leg's bound scaled by the operator
   * norms of all the other legs. */
  double tail_bound = 0.0;
  for (std::size_t k = 0; k < leg_tails.size(); ++k) {
    if (leg_tails[k] == 0.0) continue;
    double scale = 1.0;
    for (std::size_t j = 0; j < leg_norms.size(); ++j)
      if (j != k) scale *= leg_norms[j];
    tail_bound += leg_tails[k] * scale;
  }

  const double base = loop.steps.front().from;
  const StableLineResult plus = base_line(atlas, base, Direction::forward);
  const StableLineResult minus = base_line(atlas, base, Direction::backward);

  AbelianizedHolonomy out;
  out.loop_label = loop.label;
  out.matrix = value;
  out.plus = plus.line;
  out.minus = minus.line;
  const Mat2 split = in_basis(value, plus.line.rep, minus.line.rep);
  out.diag_plus = split.a;
  out.diag_minus = split.d;
  out.off_diag_residual = std::max(std::fabs(split.b), std::fabs(split.c));
  out.tail_bound = tail_bound;
  return out;
}

SplittingReport splitting_report(const JumpAtlas& atlas,
                                 const std::vector<LanePoint>& samples,
                                 int truncation_grade) {
  const GradingTable& table = atlas.table();
  if (samples.size() < 2)
    throw InvalidInput("splitting report: need at least two samples");
  if (truncation_grade < 0 || truncation_grade > table.max_grade)
    throw InvalidInput("splitting report: grade outside the table");
  const double a = 0.5 * (table.lo + table.hi);
  const int half = truncation_grade / 2;

  std::vector<ProjLine> fp, fm, hp, hm;
  double tail_sum = 0.0;
  for (const LanePoint& h : samples) {
    const StableLineResult ep = base_line(atlas, h.coord, Direction::forward);
    const StableLineResult em = base_line(atlas, h.coord, Direction::backward);
    Mat2 full{};
    Mat2 capped{};
    if (std::fabs(h.coord - a) > table.tol) {
      const DeviationResult dev = atlas.deviation(a, h.coord, truncation_grade);
      full = dev.value;
      tail_sum += dev.tail_bound;
      capped = atlas.deviation(a, h.coord, half).value;
    }
    fp.emplace_back(full * ep.line.rep);
    fm.emplace_back(full * em.line.rep);
    hp.emplace_back(capped * ep.line.rep);
    hm.emplace_back(capped * em.line.rep);
  }

  SplittingReport out;
  out.grade = truncation_grade;
  out.half_grade = half;
  out.samples_used = samples.size();
  out.mean_tail = tail_sum / static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      out.max_distance_plus =
          std::max(out.max_distance_plus, sine_distance(fp[i], fp[j]));
      out.max_distance_minus =
          std::max(out.max_distance_minus, sine_distance(fm[i], fm[j]));
      out.half_max_distance_plus =
          std::max(out.half_max_distance_plus, sine_distance(hp[i], hp[j]));
      out.half_max_distance_minus =
          std::max(out.half_max_distance_minus, sine_distance(hm[i], hm[j]));
    }
  }
  return out;
}

SpectralCoordinates spectral_coordinates(const AbelianizedHolonomy& first,
                                         const AbelianizedHolonomy& second,
                                         Lean lean) {
  for (const AbelianizedHolonomy* h : {&first, &second}) {
    const double tol = kSplitTolFactor * op_norm(h->matrix);
    if (!(h->off_diag_residual <= tol))
      throw Uncertified("spectral", h->loop_label + " off-diagonal residual",
                        h->off_diag_residual, tol);
  }
  SpectralCoordinates out;
  out.a_plus = first.diag_plus;
  out.b_plus = second.diag_plus;
  out.lean = lean;
  if (!std::isfinite(out.a_plus) || !std::isfinite(out.b_plus) ||
      out.a_plus == 0.0 || out.b_plus == 0.0)
    throw Uncertified("spectral", "degenerate diagonal read-off",
                      std::min(std::fabs(out.a_plus), std::fabs(out.b_plus)),
                      0.0);
  return out;
}

}  // namespace abel
