#include "abel/interval_exchange.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "abel/errors.hpp"

namespace abel {

namespace {

/* Tiling of the base interval is validated more loosely than point
 * coincidence: piece data often comes from decimal strings. */
double tile_tol(double lo, double hi) { return 1e-9 * (hi - lo); }

void check_tiling(double lo, double hi, const std::vector<Piece>& pieces,
                  double tol, const char* what) {
  const double slack = tile_tol(lo, hi);
  double cursor = lo;
  for (const Piece& p : pieces) {
    if (!(p.length > 2.0 * tol)) {
      throw InvalidInput(std::string(what) + ": piece of degenerate length");
    }
    if (std::fabs(p.left - cursor) > slack) {
      throw InvalidInput(std::string(what) + ": pieces leave a gap or overlap");
    }
    cursor = p.left + p.length;
  }
  if (std::fabs(cursor - hi) > slack) {
    throw InvalidInput(std::string(what) + ": pieces do not reach the end");
  }
}

std::vector<double> interior_endpoints(const std::vector<Piece>& pieces) {
  std::vector<double> out;
  for (std::size_t i = 1; i < pieces.size(); ++i) out.push_back(pieces[i].left);
  return out;
}

/* Registered breaks must sit on interior endpoints of their chart; snap
 * them to the matched endpoint so later comparisons are exact. */
std::vector<double> register_breaks(const std::vector<double>& requested,
                                    const std::vector<Piece>& pieces,
                                    double tol, const char* what) {
  const std::vector<double> interior = interior_endpoints(pieces);
  std::vector<double> out;
  for (double b : requested) {
    bool matched = false;
    for (double e : interior) {
      if (std::fabs(b - e) <= tol) {
        out.push_back(e);
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw InvalidInput(std::string(what) +
                         ": registered break is not a piece endpoint");
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

IntervalExchange::IntervalExchange(double lo, double hi,
                                   std::vector<Piece> pieces)
    : IntervalExchange(lo, hi, std::move(pieces), {}, {}) {
  fwd_breaks_ = interior_endpoints(pieces_);
  bwd_breaks_ = interior_endpoints(image_pieces_);
}

IntervalExchange::IntervalExchange(double lo, double hi,
                                   std::vector<Piece> pieces,
                                   std::vector<double> forward_breaks,
                                   std::vector<double> backward_breaks)
    : lo_(lo), hi_(hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw InvalidInput("interval exchange: base interval is empty or not finite");
  }
  if (pieces.empty()) {
    throw InvalidInput("interval exchange: no pieces");
  }
  tol_ = 1e-12 * (hi - lo);
  std::sort(pieces.begin(), pieces.end(),
            [](const Piece& a, const Piece& b) { return a.left < b.left; });
  check_tiling(lo, hi, pieces, tol_, "interval exchange");
  pieces_ = std::move(pieces);

  image_pieces_.reserve(pieces_.size());
  for (const Piece& p : pieces_) {
    image_pieces_.push_back(Piece{p.left + p.shift, p.length, -p.shift});
  }
  std::sort(image_pieces_.begin(), image_pieces_.end(),
            [](const Piece& a, const Piece& b) { return a.left < b.left; });
  check_tiling(lo, hi, image_pieces_, tol_, "interval exchange image");

  const auto fill_chart = [this](Chart& chart, const std::vector<Piece>& ps) {
    chart.lefts.reserve(ps.size());
    chart.shifts.reserve(ps.size());
    for (const Piece& p : ps) {
      chart.lefts.push_back(p.left);
      chart.shifts.push_back(p.shift);
    }
    chart.lefts.front() = lo_;
  };
  fill_chart(fwd_, pieces_);
  fill_chart(bwd_, image_pieces_);

  fwd_breaks_ = register_breaks(forward_breaks, pieces_, tol_, "forward break");
  bwd_breaks_ =
      register_breaks(backward_breaks, image_pieces_, tol_, "backward break");
}

std::optional<LanePoint> IntervalExchange::step(const Chart& chart,
                                                LanePoint p) const {
  const double c = p.coord;
  if (c < lo_ - tol_ || c > hi_ + tol_) {
    throw InvalidInput("interval exchange: point outside the base interval");
  }
  const std::size_t n = chart.lefts.size();
  const auto land = [&](std::size_t piece) -> std::optional<LanePoint> {
    const double image = c + chart.shifts[piece];
    if (image < lo_ - tol_ || image > hi_ + tol_) {
      throw InvalidInput("interval exchange: image left the base interval");
    }
    return LanePoint{image, p.lane};
  };
  if (c <= lo_ + tol_) {
    if (p.lane == Lane::right) return land(0);
    return std::nullopt;
  }
  if (c >= hi_ - tol_) {
    if (p.lane == Lane::left) return land(n - 1);
    return std::nullopt;
  }
  const std::size_t i =
      static_cast<std::size_t>(
          std::upper_bound(chart.lefts.begin(), chart.lefts.end(), c) -
          chart.lefts.begin()) -
      1;
  if (i >= 1 && c - chart.lefts[i] <= tol_) {
    if (p.lane == Lane::left) return land(i - 1);
    if (p.lane == Lane::right) return land(i);
    return std::nullopt;
  }
  if (i + 1 < n && chart.lefts[i + 1] - c <= tol_) {
    if (p.lane == Lane::left) return land(i);
    if (p.lane == Lane::right) return land(i + 1);
    return std::nullopt;
  }
  return land(i);
}

std::optional<LanePoint> IntervalExchange::apply(LanePoint p) const {
  return step(fwd_, p);
}

std::optional<LanePoint> IntervalExchange::apply_inverse(LanePoint p) const {
  return step(bwd_, p);
}

IntervalExchange IntervalExchange::inverse() const {
  return IntervalExchange(lo_, hi_, image_pieces_, bwd_breaks_, fwd_breaks_);
}

std::vector<LanePoint> orbit(const IntervalExchange& iet, LanePoint p, long n) {
  if (n > kOrbitCap || n < -kOrbitCap) {
    throw InvalidInput("orbit: step count exceeds the orbit cap");
  }
  std::vector<LanePoint> out;
  out.push_back(p);
  const long steps = n < 0 ? -n : n;
  for (long k = 0; k < steps; ++k) {
    const std::optional<LanePoint> next =
        n < 0 ? iet.apply_inverse(out.back()) : iet.apply(out.back());
    if (!next) break;
    out.push_back(*next);
  }
  return out;
}

namespace {

struct FamilyWalk {
  const IntervalExchange& iet;
  GradingTable& table;
  const std::vector<double>& grade0;
  bool allow_truncated;

  void stop(CriticalSign sign, int grade, double dist) {
    table.near_saddle = true;
    if (allow_truncated) {
      table.truncated = true;
      return;
    }
    const char* name = sign == CriticalSign::forward_critical
                           ? "forward-critical family"
                           : "backward-critical family";
    throw Uncertified("grading", std::string(name) + " hits a break at grade " +
                                     std::to_string(grade),
                      dist, table.tol);
  }

  void run(double b, CriticalSign sign) {
    double cur = b;
    for (int k = 1; k <= table.max_grade; ++k) {
      const std::optional<LanePoint> next =
          sign == CriticalSign::forward_critical
              ? iet.apply_inverse(LanePoint{cur, Lane::plain})
              : iet.apply(LanePoint{cur, Lane::plain});
      if (!next) {
        stop(sign, k, 0.0);
        return;
      }
      const double x = next->coord;
      for (double g0 : grade0) {
        if (std::fabs(x - g0) <= table.tol) {
          stop(sign, k, std::fabs(x - g0));
          return;
        }
      }
      for (const GradingEntry& e : table.entries) {
        if (e.sign == sign && std::fabs(x - e.coord) <= table.tol) {
          stop(sign, k, std::fabs(x - e.coord));
          return;
        }
      }
      table.entries.push_back(GradingEntry{x, sign, k});
      cur = x;
    }
  }
};

}  // namespace

GradingTable build_grading(const IntervalExchange& iet, double K, int max_grade,
                           GradingOptions options) {
  if (!(K > 1.0)) {
    throw InvalidInput("grading: steepness K must exceed 1");
  }
  if (max_grade < 0 || max_grade > kMaxGradeCap) {
    throw InvalidInput("grading: max_grade out of range");
  }
  GradingTable table;
  table.K = K;
  table.max_grade = max_grade;
  table.lo = iet.lo();
  table.hi = iet.hi();
  table.tol = iet.coincidence_tol();
  table.families = static_cast<int>(iet.forward_breaks().size() +
                                    iet.backward_breaks().size());

  std::vector<double> grade0;
  for (double b : iet.forward_breaks()) {
    grade0.push_back(b);
    table.entries.push_back(GradingEntry{b, CriticalSign::forward_critical, 0});
  }
  for (double c : iet.backward_breaks()) {
    grade0.push_back(c);
    table.entries.push_back(GradingEntry{c, CriticalSign::backward_critical, 0});
  }

  FamilyWalk walk{iet, table, grade0, options.allow_truncated};
  for (double b : iet.forward_breaks()) {
    walk.run(b, CriticalSign::forward_critical);
  }
  for (double c : iet.backward_breaks()) {
    walk.run(c, CriticalSign::backward_critical);
  }

  std::sort(table.entries.begin(), table.entries.end(),
            [](const GradingEntry& a, const GradingEntry& b) {
              if (a.coord != b.coord) return a.coord < b.coord;
              if (a.grade != b.grade) return a.grade < b.grade;
              return static_cast<int>(a.sign) < static_cast<int>(b.sign);
            });
  return table;
}

DivisionDistance division_distance(const GradingTable& table, double a,
                                   double b) {
  if (a == b) {
    throw InvalidInput("division distance: points must be distinct");
  }
  const auto check_point = [&](double x) {
    if (x < table.lo - table.tol || x > table.hi + table.tol) {
      throw InvalidInput("division distance: point outside the base interval");
    }
    for (const GradingEntry& e : table.entries) {
      if (std::fabs(x - e.coord) <= table.tol) {
        throw InvalidInput(
            "division distance: point sits on a critical coordinate");
      }
    }
  };
  check_point(a);
  check_point(b);
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  int best = -1;
  for (const GradingEntry& e : table.entries) {
    if (e.coord <= lo) continue;
    if (e.coord >= hi) break;
    if (best < 0 || e.grade < best) best = e.grade;
  }
  if (best < 0) {
    return DivisionDistance{0.0, -1, true};
  }
  return DivisionDistance{std::pow(table.K, -best), best, false};
}

double gap_function(const GradingTable& table, int n) {
  if (n < 0 || n > table.max_grade) {
    throw InvalidInput("gap function: grade level out of range");
  }
  /* Entries are coordinate-sorted; coincident coordinates (distinct-sign
   * families crossing) count as a single geometric point. */
  std::vector<double> coords;
  for (const GradingEntry& e : table.entries) {
    if (e.grade > n) continue;
    if (!coords.empty() && e.coord - coords.back() <= table.tol) continue;
    coords.push_back(e.coord);
  }
  if (coords.size() < 2) {
    throw InvalidInput("gap function: fewer than two coordinates at this grade");
  }
  double gap = coords[1] - coords[0];
  for (std::size_t i = 2; i < coords.size(); ++i) {
    gap = std::min(gap, coords[i] - coords[i - 1]);
  }
  return gap;
}

std::vector<FatGapRow> fat_gap_report(const GradingTable& table, double lambda,
                                      int n_max) {
  if (lambda < 0.0) {
    throw InvalidInput("fat gap report: lambda must be nonnegative");
  }
  if (n_max < 1 || n_max > table.max_grade) {
    throw InvalidInput("fat gap report: n_max out of range");
  }
  std::vector<FatGapRow> rows;
  double running = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double gap = gap_function(table, n);
    const double scaled = std::pow(table.K, lambda * n) * gap;
    running = rows.empty() ? scaled : std::min(running, scaled);
    rows.push_back(FatGapRow{n, gap, scaled, running});
  }
  return rows;
}

double minimality_diagnostic(const IntervalExchange& iet, LanePoint p, long n,
                             double epsilon) {
  if (!(epsilon > 0.0)) {
    throw InvalidInput("minimality diagnostic: epsilon must be positive");
  }
  if (n < 0) {
    throw InvalidInput("minimality diagnostic: n must be nonnegative");
  }
  std::vector<double> coords;
  for (const LanePoint& q : orbit(iet, p, n)) coords.push_back(q.coord);
  std::sort(coords.begin(), coords.end());
  double covered = 0.0;
  double right = iet.lo();
  for (double c : coords) {
    const double a = std::max(c - epsilon, right);
    const double b = std::min(c + epsilon, iet.hi());
    if (b > a) covered += b - a;
    right = std::max(right, std::min(c + epsilon, iet.hi()));
  }
  return covered / (iet.hi() - iet.lo());
}

}  // namespace abel
