#include "abel/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "abel/errors.hpp"

namespace abel {

IntervalCocycle::IntervalCocycle(IntervalExchange iet, std::vector<Cell> cells)
    : iet_(std::move(iet)), cells_(std::move(cells)) {
  if (cells_.empty()) {
    throw InvalidInput("cocycle: no cells");
  }
  std::sort(cells_.begin(), cells_.end(),
            [](const Cell& a, const Cell& b) { return a.left < b.left; });

  const double lo = iet_.lo();
  const double hi = iet_.hi();
  const double tol = iet_.coincidence_tol();
  const double slack = 1e-9 * (hi - lo);
  double cursor = lo;
  for (const Cell& c : cells_) {
    if (!(c.length > 2.0 * tol)) {
      throw InvalidInput("cocycle: cell of degenerate length");
    }
    if (std::fabs(c.left - cursor) > slack) {
      throw InvalidInput("cocycle: cells leave a gap or overlap");
    }
    if (std::fabs(det(c.value) - 1.0) > kDetTol) {
      throw InvalidInput("cocycle: cell matrix does not have unit determinant");
    }
    cursor = c.left + c.length;
  }
  if (std::fabs(cursor - hi) > slack) {
    throw InvalidInput("cocycle: cells do not reach the end");
  }

  /* cells must refine the exchanged pieces: every interior piece endpoint
   * has to be a cell endpoint */
  for (std::size_t i = 1; i < iet_.pieces().size(); ++i) {
    const double e = iet_.pieces()[i].left;
    bool matched = false;
    for (const Cell& c : cells_) {
      matched = matched || std::fabs(c.left - e) <= tol;
    }
    if (!matched) {
      throw InvalidInput("cocycle: cells do not refine the exchanged pieces");
    }
  }
}

const Mat2* IntervalCocycle::cell_value(LanePoint p) const {
  const double c = p.coord;
  const double lo = iet_.lo();
  const double hi = iet_.hi();
  const double tol = iet_.coincidence_tol();
  if (c < lo - tol || c > hi + tol) {
    throw InvalidInput("cocycle: point outside the base interval");
  }
  const std::size_t n = cells_.size();
  if (c <= lo + tol) {
    return p.lane == Lane::right ? &cells_[0].value : nullptr;
  }
  if (c >= hi - tol) {
    return p.lane == Lane::left ? &cells_[n - 1].value : nullptr;
  }
  std::size_t i = n - 1;
  for (std::size_t j = 1; j < n; ++j) {
    if (c < cells_[j].left) {
      i = j - 1;
      break;
    }
  }
  if (i >= 1 && c - cells_[i].left <= tol) {
    if (p.lane == Lane::left) return &cells_[i - 1].value;
    if (p.lane == Lane::right) return &cells_[i].value;
    return nullptr;
  }
  if (i + 1 < n && cells_[i + 1].left - c <= tol) {
    if (p.lane == Lane::left) return &cells_[i].value;
    if (p.lane == Lane::right) return &cells_[i + 1].value;
    return nullptr;
  }
  return &cells_[i].value;
}

double Transported::log_norm() const {
  return std::log(op_norm(matrix)) + log_scale;
}

Mat2 Transported::value() const { return std::exp(log_scale) * matrix; }

Transported transport(const IntervalCocycle& coc, LanePoint p, long n) {
  Transported out;
  const long steps = n < 0 ? -n : n;
  LanePoint cur = p;
  for (long k = 0; k < steps; ++k) {
    if (n < 0) {
      const std::optional<LanePoint> prev = coc.iet().apply_inverse(cur);
      if (!prev) throw OrbitTerminated(k, cur.coord);
      cur = *prev;
      const Mat2* v = coc.cell_value(cur);
      if (!v) throw OrbitTerminated(k, cur.coord);
      out.matrix = inverse_unimodular(*v) * out.matrix;
    } else {
      const Mat2* v = coc.cell_value(cur);
      if (!v) throw OrbitTerminated(k, cur.coord);
      out.matrix = *v * out.matrix;
      if (k + 1 < steps) {
        const std::optional<LanePoint> next = coc.iet().apply(cur);
        if (!next) throw OrbitTerminated(k + 1, cur.coord);
        cur = *next;
      }
    }
    if ((k & 63) == 63) {
      const double s = max_abs_entry(out.matrix);
      out.matrix = (1.0 / s) * out.matrix;
      out.log_scale += std::log(s);
    }
  }
  return out;
}

LyapunovEstimate lyapunov_estimate(const IntervalCocycle& coc,
                                   const std::vector<LanePoint>& samples,
                                   long n) {
  if (n < 1) {
    throw InvalidInput("lyapunov estimate: n must be at least 1");
  }
  if (samples.empty()) {
    throw InvalidInput("lyapunov estimate: no samples");
  }
  LyapunovEstimate out;
  out.n = n;
  double sum = 0.0, low = 0.0, high = 0.0;
  for (const LanePoint& s : samples) {
    double val = 0.0;
    try {
      val = transport(coc, s, n).log_norm() / static_cast<double>(n);
    } catch (const OrbitTerminated&) {
      ++out.skipped;
      continue;
    }
    if (out.sample_count == 0) {
      low = high = val;
    } else {
      low = std::min(low, val);
      high = std::max(high, val);
    }
    sum += val;
    ++out.sample_count;
  }
  if (out.sample_count == 0) {
    throw Uncertified("lyapunov", "every sample orbit terminated",
                      static_cast<double>(out.skipped), 1.0);
  }
  out.lambda_hat = sum / static_cast<double>(out.sample_count);
  out.spread = high - low;
  return out;
}

std::vector<LanePoint> low_discrepancy_samples(const IntervalCocycle& coc,
                                               std::size_t count,
                                               std::uint64_t seed) {
  const double lo = coc.iet().lo();
  const double hi = coc.iet().hi();
  const double span = hi - lo;
  const double tol = coc.iet().coincidence_tol();
  const double kGolden = 0.6180339887498949;
  double u = std::fmod(0.12345 + kGolden * static_cast<double>(seed % 65536 + 1),
                       1.0);
  std::vector<LanePoint> out;
  long guard = 0;
  while (out.size() < count && guard < 1000000) {
    ++guard;
    u += kGolden;
    if (u >= 1.0) u -= 1.0;
    const double x = lo + u * span;
    if (x <= lo + 1e-6 * span || x >= hi - 1e-6 * span) continue;
    bool clear = true;
    for (const Cell& c : coc.cells()) {
      clear = clear && std::fabs(x - c.left) > 16.0 * tol;
    }
    if (clear) out.push_back(LanePoint{x, Lane::plain});
  }
  if (out.size() < count) {
    throw InvalidInput("sample generation failed to clear cell boundaries");
  }
  return out;
}

std::optional<int> eventual_positivity_certificate(const IntervalCocycle& coc,
                                                   int n_max) {
  if (n_max < 1) {
    throw InvalidInput("positivity certificate: n_max must be at least 1");
  }
  const IntervalExchange& iet = coc.iet();
  const double tol = iet.coincidence_tol();

  /* boundaries of the n-step constancy refinement; the frontier tracks the
   * newest generation as lane points so both one-sided preimages of a
   * boundary survive the pullback */
  std::vector<double> bounds;
  std::vector<LanePoint> frontier;
  for (std::size_t i = 1; i < coc.cells().size(); ++i) {
    const double b = coc.cells()[i].left;
    bounds.push_back(b);
    frontier.push_back(LanePoint{b, Lane::left});
    frontier.push_back(LanePoint{b, Lane::right});
  }
  std::sort(bounds.begin(), bounds.end());

  for (int n = 1; n <= n_max; ++n) {
    bool all_positive = true;
    double prev = iet.lo();
    std::vector<double> edges = bounds;
    edges.push_back(iet.hi());
    for (double e : edges) {
      if (all_positive && e - prev > 8.0 * tol) {
        const double mid = 0.5 * (prev + e);
        try {
          const Mat2 m = transport(coc, LanePoint{mid, Lane::plain}, n).matrix;
          all_positive = m.a > 0.0 && m.b > 0.0 && m.c > 0.0 && m.d > 0.0;
        } catch (const OrbitTerminated&) {
          /* sliver around a dead orbit of measure zero; not evidence */
        }
      }
      prev = std::max(prev, e);
    }
    if (all_positive) return n;
    if (n == n_max) break;

    std::vector<LanePoint> next_frontier;
    for (const LanePoint& q : frontier) {
      const std::optional<LanePoint> pre = iet.apply_inverse(q);
      if (!pre) continue;
      next_frontier.push_back(*pre);
      bounds.push_back(pre->coord);
    }
    frontier = std::move(next_frontier);
    std::sort(bounds.begin(), bounds.end());
    std::vector<double> dedup;
    for (double b : bounds) {
      if (dedup.empty() || b - dedup.back() > tol) dedup.push_back(b);
    }
    bounds = std::move(dedup);
  }
  return std::nullopt;
}

StableLineResult stable_line(const IntervalCocycle& coc, LanePoint p,
                             Direction direction, long n) {
  if (n < 1) {
    throw InvalidInput("stable line: n must be at least 1");
  }
  const long sn = direction == Direction::forward ? n : -n;
  const auto contracted = [](const Transported& t) {
    const Svd2 s = svd2(t.matrix);
    if (s.s_max - s.s_min <= 1e-12 * s.s_max) {
      throw Uncertified("stable-line", "singular value gap", s.s_max - s.s_min,
                        1e-12 * s.s_max);
    }
    return ProjLine(s.right_min);
  };
  const ProjLine coarse = contracted(transport(coc, p, sn));
  const ProjLine fine = contracted(transport(coc, p, 2 * sn));
  StableLineResult out;
  out.line = fine;
  out.direction = direction;
  out.iterations_used = 2 * n;
  out.residual = sine_distance(coarse, fine);
  return out;
}

StableLineResult stable_line_auto(const IntervalCocycle& coc, LanePoint p,
                                  Direction direction, double residual_target,
                                  long n_start, long n_cap) {
  if (!(residual_target > 0.0) || n_start < 1 || n_cap < n_start) {
    throw InvalidInput("stable line auto: bad search parameters");
  }
  long n = n_start;
  bool shrunk = false;
  while (true) {
    StableLineResult r;
    try {
      r = stable_line(coc, p, direction, n);
    } catch (const OrbitTerminated& e) {
      const long avail = e.steps_done / 2;
      if (shrunk || avail < 1) throw;
      n = avail;
      shrunk = true;
      continue;
    } catch (const Uncertified&) {
      /* no usable contraction yet; a longer product may open the gap */
      if (shrunk || n >= n_cap) throw;
      n = std::min(n_cap, 2 * n);
      continue;
    }
    if (r.residual <= residual_target) return r;
    if (shrunk || n >= n_cap) {
      throw Uncertified("stable-line", "residual after refinement", r.residual,
                        residual_target);
    }
    n = std::min(n_cap, 2 * n);
  }
}

}  // namespace abel
