#include "abel/slithering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>

#include "abel/errors.hpp"

namespace abel {

namespace {

struct StepOut {
  LanePoint next{};
  Mat2 factor{};
};

/* One orbit step together with the transport factor for that step: the
 * cocycle value at the departure germ going forward, the inverse value at
 * the arrival germ going backward. */
std::optional<StepOut> orbit_step(const IntervalCocycle& coc, LanePoint p,
                                  bool forward) {
  if (forward) {
    const Mat2* v = coc.cell_value(p);
    if (v == nullptr) return std::nullopt;
    std::optional<LanePoint> next = coc.iet().apply(p);
    if (!next) return std::nullopt;
    return StepOut{*next, *v};
  }
  std::optional<LanePoint> next = coc.iet().apply_inverse(p);
  if (!next) return std::nullopt;
  const Mat2* v = coc.cell_value(*next);
  if (v == nullptr) return std::nullopt;
  return StepOut{*next, inverse_unimodular(*v)};
}

struct RootJump {
  Jump jump{};
  Vec2 v_hat{1.0, 0.0}; /* unit fixed direction of the shear */
  double coeff = 0.0;
  double residual = 0.0;
  double sharedness = 0.0;
};

void check_options(const JumpOptions& options) {
  if (!(options.line_tol > 0.0))
    throw InvalidInput("jump: line_tol must be positive");
  if (options.stable_n_start < 1 || options.stable_n_cap < options.stable_n_start)
    throw InvalidInput("jump: bad stable-line iteration bounds");
  if (options.anchor_n_pref < 1)
    throw InvalidInput("jump: anchor_n_pref must be positive");
}

RootJump root_jump_impl(const IntervalCocycle& coc, const GradingEntry& entry,
                        const JumpOptions& options) {
  check_options(options);
  const bool fwd = entry.sign == CriticalSign::forward_critical;
  /* The line shared across lanes is the one stable against the direction
   * that made the point critical; the lines the shear must carry into each
   * other are stable the other way and genuinely lane-dependent. */
  const Direction fixed_dir = fwd ? Direction::backward : Direction::forward;
  const Direction moved_dir = fwd ? Direction::forward : Direction::backward;
  const LanePoint right{entry.coord, Lane::right};
  const LanePoint left{entry.coord, Lane::left};
  auto line = [&](LanePoint p, Direction dir) {
    return stable_line_auto(coc, p, dir, options.line_tol,
                            options.stable_n_start, options.stable_n_cap);
  };
  const StableLineResult vr = line(right, fixed_dir);
  const StableLineResult vl = line(left, fixed_dir);
  const StableLineResult ur = line(right, moved_dir);
  const StableLineResult ul = line(left, moved_dir);

  RootJump out;
  out.sharedness = sine_distance(vr.line, vl.line);
  if (out.sharedness > options.line_tol)
    throw Uncertified("jump", "lane agreement of the fixed stable line",
                      out.sharedness, options.line_tol);
  out.residual = std::max(std::max(vr.residual, vl.residual),
                          std::max(ur.residual, ul.residual));
  Mat2 s;
  try {
    s = solve_shear(vr.line.rep, ur.line.rep, ul.line.rep);
  } catch (const InvalidInput&) {
    throw Uncertified("jump", "stable lines collinear at the critical point",
                      sine_distance(vr.line.rep, ur.line.rep), 0.0);
  }
  out.jump.at = entry;
  out.jump.matrix = s;
  out.jump.off_diag_norm = deviation_norm(s);
  out.v_hat = vr.line.rep;
  /* Coefficient of the rank-one form: (s - 1) maps perp(v) to coeff * v
   * when v is unit, since D(v, perp(v)) = 1. */
  const Vec2 w = perp(out.v_hat);
  const Vec2 dw = s * w - w;
  out.coeff = dot(dw, out.v_hat);
  return out;
}

DecaySeries make_decay(const GradingTable& table, const std::vector<Jump>& jumps,
                       int n_max, int fit_lo, int fit_hi) {
  if (n_max < 0 || n_max > table.max_grade)
    throw InvalidInput("decay series: grade range outside the table");
  DecaySeries out;
  out.max_norm.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (const Jump& j : jumps)
    if (j.at.grade <= n_max)
      out.max_norm[static_cast<std::size_t>(j.at.grade)] =
          std::max(out.max_norm[static_cast<std::size_t>(j.at.grade)],
                   j.off_diag_norm);
  if (fit_lo < 0 || fit_hi < 0) {
    /* Fit over the upper half of the grades that actually hold data, so a
     * truncated table still yields a usable slope. */
    int top = n_max;
    while (top > 0 && out.max_norm[static_cast<std::size_t>(top)] == 0.0) --top;
    fit_lo = top / 2;
    fit_hi = top;
  }
  out.fit_lo = fit_lo;
  out.fit_hi = fit_hi;
  const DecayFit fit = fit_decay(out.max_norm, fit_lo, fit_hi);
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.slope_defined = fit.defined;
  return out;
}

}  // namespace

DecayFit fit_decay(const std::vector<double>& max_norm, int lo, int hi) {
  if (lo < 0 || hi < lo)
    throw InvalidInput("decay fit: bad window");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  const int top = std::min<int>(hi, static_cast<int>(max_norm.size()) - 1);
  for (int n = lo; n <= top; ++n) {
    const double value = max_norm[static_cast<std::size_t>(n)];
    if (!(value > 0.0)) continue;
    const double x = static_cast<double>(n);
    const double y = std::log(value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  DecayFit out;
  if (count < 2) return out;
  const double denom = count * sxx - sx * sx;
  out.slope = (count * sxy - sx * sy) / denom;
  out.intercept = (sy - out.slope * sx) / count;
  out.defined = true;
  return out;
}

Jump jump_at(const IntervalCocycle& coc, const GradingEntry& entry,
             JumpOptions options) {
  return root_jump_impl(coc, entry, options).jump;
}

Jump pushed_jump(const IntervalCocycle& coc, const Jump& base, long n) {
  if (n == 0) return base;
  const ShearParts parts = split_shear(base.matrix);
  LanePoint p{base.at.coord, Lane::plain};
  Vec2 v = parts.fixed_dir;
  double ell = 0.0;
  const bool forward = n > 0;
  const long steps = std::labs(n);
  for (long k = 0; k < steps; ++k) {
    const std::optional<StepOut> s = orbit_step(coc, p, forward);
    if (!s) throw OrbitTerminated(k, p.coord);
    p = s->next;
    v = s->factor * v;
    const double r = norm(v);
    ell += std::log(r);
    v = (1.0 / r) * v;
  }
  Jump out;
  out.at = GradingEntry{p.coord, base.at.sign,
                        base.at.grade + static_cast<int>(steps)};
  out.matrix = rank_one_shear(v, parts.coeff * std::exp(2.0 * ell));
  out.off_diag_norm = deviation_norm(out.matrix);
  return out;
}

JumpAtlas::JumpAtlas(const IntervalCocycle& coc, const GradingTable& table,
                     JumpOptions options)
    : coc_(coc), table_(table), options_(options) {
  check_options(options_);
  const std::vector<GradingEntry>& entries = table_.entries;
  jumps_.resize(entries.size());
  std::vector<char> assigned(entries.size(), 0);

  auto find_entry = [&](CriticalSign sign, int grade, double coord) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (!assigned[i] && entries[i].sign == sign && entries[i].grade == grade &&
          std::fabs(entries[i].coord - coord) <= table_.tol)
        return static_cast<long>(i);
    }
    return -1L;
  };

  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].grade != 0) continue;
    const RootJump root = root_jump_impl(coc_, entries[i], options_);
    jumps_[i] = root.jump;
    assigned[i] = 1;

    FamilyInfo info;
    info.root = entries[i];
    info.root_residual = root.residual;
    info.sharedness = root.sharedness;

    /* Family anchors move against the critical direction: preimages of a
     * forward break, images of a backward one. The carried line is the one
     * contracted by that motion, so errors in it keep shrinking. */
    const bool fwd = entries[i].sign == CriticalSign::forward_critical;
    const bool step_forward = !fwd;
    const Direction line_dir = fwd ? Direction::backward : Direction::forward;

    LanePoint p{entries[i].coord, Lane::plain};
    Vec2 v_hat = root.v_hat;
    double ell = 0.0;
    for (int g = 1; g <= table_.max_grade; ++g) {
      const std::optional<StepOut> s = orbit_step(coc_, p, step_forward);
      if (!s) break;
      const long idx = find_entry(entries[i].sign, g, s->next.coord);
      if (idx < 0) break;
      p = s->next;
      Vec2 carried = s->factor * v_hat;
      const double r = norm(carried);
      ell += std::log(r);
      carried = (1.0 / r) * carried;
      /* Re-estimate the direction at the anchor whenever its own orbit
       * affords a contraction; otherwise keep the carried vector. The
       * orbit is probed first so a short one is a fallback, not an error. */
      double residual = 1.0;
      Vec2 dir = carried;
      const long probe = 2 * options_.anchor_n_pref;
      const long avail =
          static_cast<long>(orbit(coc_.iet(), p,
                                  line_dir == Direction::backward ? -probe
                                                                  : probe)
                                .size()) -
          1;
      const long n_use = std::min<long>(options_.anchor_n_pref, avail / 2);
      if (n_use >= 1) {
        try {
          const StableLineResult fresh = stable_line(coc_, p, line_dir, n_use);
          dir = fresh.line.rep;
          residual = fresh.residual;
        } catch (const Uncertified&) {
        } catch (const OrbitTerminated&) {
        }
      }
      v_hat = dir;
      info.worst_anchor_residual =
          std::max(info.worst_anchor_residual, residual);
      info.depth = g;
      Jump pushed;
      pushed.at = entries[static_cast<std::size_t>(idx)];
      pushed.matrix = rank_one_shear(v_hat, root.coeff * std::exp(2.0 * ell));
      pushed.off_diag_norm = deviation_norm(pushed.matrix);
      jumps_[static_cast<std::size_t>(idx)] = pushed;
      assigned[static_cast<std::size_t>(idx)] = 1;
    }
    families_.push_back(info);
  }

  for (std::size_t i = 0; i < entries.size(); ++i)
    if (!assigned[i])
      throw Uncertified("atlas", "grading entry unreachable from any root",
                        entries[i].coord, table_.tol);

  decay_ = make_decay(table_, jumps_, table_.max_grade, -1, -1);
}

DeviationResult JumpAtlas::deviation(double y, double x, int grade_cap) const {
  if (!std::isfinite(y) || !std::isfinite(x))
    throw InvalidInput("deviation: endpoints must be finite");
  if (grade_cap < 0 || grade_cap > table_.max_grade)
    grade_cap = table_.max_grade;
  const double lo = std::min(y, x);
  const double hi = std::max(y, x);
  if (!(hi - lo > table_.tol))
    throw InvalidInput("deviation: endpoints coincide");
  const std::vector<GradingEntry>& entries = table_.entries;
  for (const GradingEntry& e : entries)
    if (std::fabs(e.coord - y) <= table_.tol ||
        std::fabs(e.coord - x) <= table_.tol)
      throw InvalidInput("deviation: endpoint sits on a critical coordinate");

  /* Jumps strictly inside the interval, one factor per geometric point:
   * entries sharing a coordinate are merged, higher grade leftmost. */
  std::vector<OrderedFactor> factors;
  std::size_t i = 0;
  while (i < entries.size()) {
    std::size_t j = i;
    while (j < entries.size() && entries[j].coord - entries[i].coord <= table_.tol)
      ++j;
    if (entries[i].coord > lo && entries[i].coord < hi) {
      /* Coincident coordinates may differ by rounding, so the table order
       * within the run is not grade order; sort explicitly. */
      std::vector<std::size_t> run;
      for (std::size_t k = i; k < j; ++k)
        if (entries[k].grade <= grade_cap) run.push_back(k);
      std::sort(run.begin(), run.end(), [&](std::size_t p, std::size_t q) {
        if (entries[p].grade != entries[q].grade)
          return entries[p].grade > entries[q].grade;
        return p < q;
      });
      Mat2 merged{};
      for (std::size_t k : run) merged = merged * jumps_[k].matrix;
      if (!run.empty()) factors.push_back(make_factor(entries[i].coord, merged));
    }
    i = j;
  }

  const ProductResult prod = product_in_order(factors);
  DeviationResult out;
  out.value = y <= x ? prod.value : product_inverse(factors);
  out.truncation_grade = grade_cap;
  out.norm_sum = prod.norm_sum;

  double peak = 0.0;
  for (double m : decay_.max_norm) peak = std::max(peak, m);
  double omitted = 0.0;
  if (peak <= kJumpNoiseFloor) {
    omitted = 0.0;
  } else if (!decay_.slope_defined) {
    omitted = std::numeric_limits<double>::infinity();
  } else if (decay_.slope >= 0.0) {
    throw Uncertified("deviation", "jump decay slope is not negative",
                      decay_.slope, 0.0);
  } else {
    /* Geometric tail of the fitted bound past each family's last tabulated
     * grade (or the cap), with a 2x safety factor on the constant. */
    const double r = std::exp(decay_.slope);
    for (const FamilyInfo& f : families_) {
      const int start = std::min(f.depth, grade_cap) + 1;
      omitted += 2.0 * std::exp(decay_.intercept) * std::pow(r, start) / (1.0 - r);
    }
  }
  out.tail_bound = estimate_tail(omitted, prod.norm_sum);
  return out;
}

DecaySeries jump_decay_series(const IntervalCocycle& coc,
                              const GradingTable& table, int n_max, int fit_lo,
                              int fit_hi, JumpOptions options) {
  const JumpAtlas atlas(coc, table, options);
  if (fit_lo < 0) fit_lo = n_max / 2;
  if (fit_hi < 0) fit_hi = n_max;
  return make_decay(atlas.table(), atlas.jumps(), n_max, fit_lo, fit_hi);
}

DeviationResult deviation(const IntervalCocycle& coc, const GradingTable& table,
                          double y, double x, JumpOptions options) {
  const JumpAtlas atlas(coc, table, options);
  return atlas.deviation(y, x);
}

}  // namespace abel
