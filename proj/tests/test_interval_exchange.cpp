#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "abel/errors.hpp"
#include "abel/interval_exchange.hpp"
#include "doctest.h"

using namespace abel;

namespace {

const double kGolden = 0.6180339887498949; /* golden rotation amount */

IntervalExchange rotation(double t) {
  return IntervalExchange(0.0, 1.0,
                          {Piece{0.0, 1.0 - t, t}, Piece{1.0 - t, t, t - 1.0}});
}

double rot_forward(double x, double t) {
  const double y = x + t;
  return y >= 1.0 ? y - 1.0 : y;
}

double rot_backward(double x, double t) {
  const double y = x - t;
  return y < 0.0 ? y + 1.0 : y;
}

/* Three-piece exchange on (-1, 0) with one registered break per direction
 * and one unregistered endpoint per chart, shaped like the staircase
 * model's left lean. */
IntervalExchange staircase_like(double m) {
  return IntervalExchange(-1.0, 0.0,
                          {Piece{-1.0, 1.0 - m, m}, Piece{-m, m / 2, m - 1.0},
                           Piece{-m / 2, m / 2, m - 1.0}},
                          {-m / 2}, {-1.0 + m / 2});
}

}  // namespace

TEST_SUITE("interval_exchange") {

TEST_CASE("golden rotation moves plain points like modular addition") {
  const IntervalExchange iet = rotation(kGolden);
  const auto q = iet.apply(LanePoint{0.5, Lane::plain});
  REQUIRE(q.has_value());
  CHECK(q->coord == doctest::Approx(0.1180339887498949).epsilon(1e-13));
  CHECK(q->lane == Lane::plain);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(1e-6, 1.0 - 1e-6);
  for (int i = 0; i < 1000; ++i) {
    const double x = dist(rng);
    if (std::fabs(x - (1.0 - kGolden)) < 1e-6) continue;
    const auto y = iet.apply(LanePoint{x, Lane::plain});
    REQUIRE(y.has_value());
    CHECK(std::fabs(y->coord - rot_forward(x, kGolden)) < 1e-15);
  }
}

TEST_CASE("lane semantics at breaks and base endpoints") {
  const IntervalExchange iet = rotation(kGolden);
  const double br = 1.0 - kGolden;

  CHECK(!iet.apply(LanePoint{br, Lane::plain}).has_value());
  CHECK(!iet.apply(LanePoint{br, Lane::median}).has_value());

  const auto left = iet.apply(LanePoint{br, Lane::left});
  REQUIRE(left.has_value());
  CHECK(left->coord == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(left->lane == Lane::left);

  const auto right = iet.apply(LanePoint{br, Lane::right});
  REQUIRE(right.has_value());
  CHECK(right->coord == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
  CHECK(right->lane == Lane::right);

  /* The one-sided lanes continue through the base endpoints, which is how
   * a circle rotation lives inside an interval chart. */
  const auto wrap_left = iet.apply(*left);
  REQUIRE(wrap_left.has_value());
  CHECK(wrap_left->coord == doctest::Approx(kGolden).epsilon(1e-13));
  const auto wrap_right = iet.apply(*right);
  REQUIRE(wrap_right.has_value());
  CHECK(wrap_right->coord == doctest::Approx(kGolden).epsilon(1e-13));

  CHECK(!iet.apply(LanePoint{0.0, Lane::left}).has_value());
  CHECK(!iet.apply(LanePoint{0.0, Lane::plain}).has_value());
  CHECK(!iet.apply(LanePoint{1.0, Lane::right}).has_value());
  CHECK_THROWS_AS(iet.apply(LanePoint{1.5, Lane::plain}), InvalidInput);
}

TEST_CASE("apply then apply_inverse returns within float noise") {
  const IntervalExchange iet = rotation(kGolden);
  const IntervalExchange inv = iet.inverse();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(1e-6, 1.0 - 1e-6);
  for (int i = 0; i < 2000; ++i) {
    const double x = dist(rng);
    if (std::fabs(x - (1.0 - kGolden)) < 1e-6) continue;
    const auto y = iet.apply(LanePoint{x, Lane::plain});
    REQUIRE(y.has_value());
    const auto back = iet.apply_inverse(*y);
    REQUIRE(back.has_value());
    CHECK(std::fabs(back->coord - x) < 1e-15);

    const auto via_inverse = inv.apply(*y);
    REQUIRE(via_inverse.has_value());
    CHECK(via_inverse->coord == back->coord);
  }
}

TEST_CASE("orbit iterates, stops, and honors the cap") {
  const IntervalExchange iet = rotation(kGolden);
  const LanePoint p{0.5, Lane::plain};

  const auto zero = orbit(iet, p, 0);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].coord == 0.5);

  const auto fwd = orbit(iet, p, 2);
  REQUIRE(fwd.size() == 3);
  double x = 0.5;
  for (std::size_t k = 1; k < fwd.size(); ++k) {
    x = rot_forward(x, kGolden);
    CHECK(std::fabs(fwd[k].coord - x) < 1e-12);
  }

  const auto bwd = orbit(iet, p, -3);
  REQUIRE(bwd.size() == 4);
  x = 0.5;
  for (std::size_t k = 1; k < bwd.size(); ++k) {
    x = rot_backward(x, kGolden);
    CHECK(std::fabs(bwd[k].coord - x) < 1e-12);
  }

  const auto dead = orbit(iet, LanePoint{1.0 - kGolden, Lane::median}, 5);
  CHECK(dead.size() == 1);

  CHECK_THROWS_AS(orbit(iet, p, kOrbitCap + 1), InvalidInput);
}

TEST_CASE("construction rejects inconsistent data") {
  CHECK_THROWS_AS(IntervalExchange(0.0, 1.0, {}), InvalidInput);
  CHECK_THROWS_AS(IntervalExchange(1.0, 0.0, {Piece{0.0, 1.0, 0.0}}),
                  InvalidInput);
  CHECK_THROWS_AS(IntervalExchange(0.0, 1.0,
                                   {Piece{0.0, 0.4, 0.1}, Piece{0.5, 0.5, -0.5}}),
                  InvalidInput);
  CHECK_THROWS_AS(IntervalExchange(0.0, 1.0,
                                   {Piece{0.0, 0.6, 0.2}, Piece{0.5, 0.5, -0.5}}),
                  InvalidInput);
  /* images overlap even though the source pieces tile */
  CHECK_THROWS_AS(IntervalExchange(0.0, 1.0,
                                   {Piece{0.0, 0.5, 0.2}, Piece{0.5, 0.5, -0.2}}),
                  InvalidInput);
  CHECK_THROWS_AS(
      IntervalExchange(0.0, 1.0,
                       {Piece{0.0, 1.0 - kGolden, kGolden},
                        Piece{1.0 - kGolden, kGolden, kGolden - 1.0}},
                       {0.5}, {}),
      InvalidInput);
}

TEST_CASE("default registration takes every interior endpoint") {
  const IntervalExchange iet = rotation(kGolden);
  REQUIRE(iet.forward_breaks().size() == 1);
  CHECK(iet.forward_breaks()[0] == doctest::Approx(1.0 - kGolden));
  REQUIRE(iet.backward_breaks().size() == 1);
  CHECK(iet.backward_breaks()[0] == doctest::Approx(kGolden));

  const IntervalExchange model = staircase_like(0.1);
  REQUIRE(model.forward_breaks().size() == 1);
  CHECK(model.forward_breaks()[0] == -0.05);
  REQUIRE(model.backward_breaks().size() == 1);
  CHECK(model.backward_breaks()[0] == doctest::Approx(-0.95).epsilon(1e-14));
}

TEST_CASE("grading of the golden rotation matches the orbit oracle") {
  const IntervalExchange iet = rotation(kGolden);
  const GradingTable table = build_grading(iet, 2.0, 3);
  CHECK(table.families == 2);
  CHECK(table.entries.size() == 8);
  CHECK(!table.near_saddle);
  CHECK(!table.truncated);

  const GradingTable grade0 = build_grading(iet, 2.0, 0);
  REQUIRE(grade0.entries.size() == 2);
  CHECK(grade0.entries[0].grade == 0);
  CHECK(grade0.entries[1].grade == 0);

  /* forward-critical entries are backward iterates of the forward break */
  double b = 1.0 - kGolden;
  for (int k = 1; k <= 3; ++k) {
    b = rot_backward(b, kGolden);
    bool found = false;
    for (const GradingEntry& e : table.entries) {
      if (e.sign == CriticalSign::forward_critical && e.grade == k) {
        found = found || std::fabs(e.coord - b) < 1e-12;
      }
    }
    CHECK(found);
  }

  /* one step of the map lowers the grade by exactly one */
  for (const GradingEntry& e : table.entries) {
    if (e.grade == 0) continue;
    const auto next = e.sign == CriticalSign::forward_critical
                          ? iet.apply(LanePoint{e.coord, Lane::plain})
                          : iet.apply_inverse(LanePoint{e.coord, Lane::plain});
    REQUIRE(next.has_value());
    bool lands = false;
    for (const GradingEntry& f : table.entries) {
      if (f.sign == e.sign && f.grade == e.grade - 1) {
        lands = lands || std::fabs(f.coord - next->coord) < table.tol * 10;
      }
    }
    CHECK(lands);
  }

  CHECK_THROWS_AS(build_grading(iet, 1.0, 3), InvalidInput);
  CHECK_THROWS_AS(build_grading(iet, 2.0, -1), InvalidInput);
  CHECK_THROWS_AS(build_grading(iet, 2.0, kMaxGradeCap + 1), InvalidInput);
}

TEST_CASE("staircase grading marches in opposite directions") {
  const IntervalExchange iet = staircase_like(0.1);
  const GradingTable table = build_grading(iet, 2.0, 3);
  for (int k = 0; k <= 3; ++k) {
    bool fwd = false, bwd = false;
    for (const GradingEntry& e : table.entries) {
      if (e.grade != k) continue;
      if (e.sign == CriticalSign::forward_critical) {
        fwd = fwd || std::fabs(e.coord - (-0.05 - 0.1 * k)) < 1e-12;
      } else {
        bwd = bwd || std::fabs(e.coord - (-0.95 + 0.1 * k)) < 1e-12;
      }
    }
    CHECK(fwd);
    CHECK(bwd);
  }
}

TEST_CASE("saddle collision refuses by default and truncates on request") {
  const IntervalExchange iet = staircase_like(0.1);
  CHECK_THROWS_AS(build_grading(iet, 2.0, 40), Uncertified);

  const GradingTable table =
      build_grading(iet, 2.0, 40, GradingOptions{true});
  CHECK(table.near_saddle);
  CHECK(table.truncated);
  CHECK(table.entries.size() == 18);

  int max_fwd = 0, max_bwd = 0;
  std::vector<double> coords;
  for (const GradingEntry& e : table.entries) {
    if (e.sign == CriticalSign::forward_critical) {
      max_fwd = std::max(max_fwd, e.grade);
    } else {
      max_bwd = std::max(max_bwd, e.grade);
    }
    if (coords.empty() || e.coord - coords.back() > table.tol) {
      coords.push_back(e.coord);
    }
  }
  CHECK(max_fwd == 8);
  CHECK(max_bwd == 8);
  CHECK(coords.size() == 10);

  /* coincident coordinates host one entry per family, grades adding to the
   * collision depth */
  for (std::size_t i = 0; i + 1 < table.entries.size(); ++i) {
    const GradingEntry& a = table.entries[i];
    const GradingEntry& b = table.entries[i + 1];
    if (std::fabs(a.coord - b.coord) <= table.tol) {
      CHECK(a.sign != b.sign);
      CHECK(a.grade + b.grade == 9);
    }
  }
}

TEST_CASE("division distance reads the smallest grade between the points") {
  const IntervalExchange iet = staircase_like(0.1);
  const GradingTable table = build_grading(iet, 2.0, 40, GradingOptions{true});

  const DivisionDistance d0 = division_distance(table, -0.06, -0.04);
  CHECK(d0.value == 1.0);
  CHECK(d0.grade == 0);
  CHECK(!d0.resolution_exhausted);

  const DivisionDistance d2 = division_distance(table, -0.26, -0.24);
  CHECK(d2.value == 0.25);
  CHECK(d2.grade == 2);

  const DivisionDistance far = division_distance(table, -0.04, -0.001);
  CHECK(far.value == 0.0);
  CHECK(far.grade == -1);
  CHECK(far.resolution_exhausted);

  const DivisionDistance sym = division_distance(table, -0.04, -0.06);
  CHECK(sym.value == d0.value);

  CHECK_THROWS_AS(division_distance(table, -0.3, -0.3), InvalidInput);
  CHECK_THROWS_AS(division_distance(table, -0.05, -0.2), InvalidInput);
  CHECK_THROWS_AS(division_distance(table, -1.5, -0.2), InvalidInput);
}

TEST_CASE("division distance is an exact ultrametric on samples") {
  const IntervalExchange iet = staircase_like(0.1);
  const GradingTable table = build_grading(iet, 2.0, 40, GradingOptions{true});
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dist(-0.999, -0.001);
  const auto clear = [&](double x) {
    for (const GradingEntry& e : table.entries) {
      if (std::fabs(x - e.coord) <= 10 * table.tol) return false;
    }
    return true;
  };
  int done = 0;
  while (done < 500) {
    const double a = dist(rng), b = dist(rng), c = dist(rng);
    if (!clear(a) || !clear(b) || !clear(c)) continue;
    if (a == b || b == c || a == c) continue;
    const double dab = division_distance(table, a, b).value;
    const double dbc = division_distance(table, b, c).value;
    const double dac = division_distance(table, a, c).value;
    CHECK(dac <= std::max(dab, dbc));
    CHECK(division_distance(table, b, a).value == dab);
    ++done;
  }
}

TEST_CASE("one map step is K-Lipschitz for the division distance") {
  const IntervalExchange iet = rotation(kGolden);
  const GradingTable table = build_grading(iet, 2.0, 6);
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> dist(1e-4, 1.0 - 1e-4);
  const auto clear = [&](double x) {
    for (const GradingEntry& e : table.entries) {
      if (std::fabs(x - e.coord) <= 10 * table.tol) return false;
    }
    return true;
  };
  const double br = 1.0 - kGolden;
  int done = 0;
  while (done < 500) {
    double a = dist(rng), b = dist(rng);
    if (!clear(a) || !clear(b) || a == b) continue;
    /* keep the pair inside one exchanged piece */
    if ((a < br) != (b < br)) continue;
    const auto ia = iet.apply(LanePoint{a, Lane::plain});
    const auto ib = iet.apply(LanePoint{b, Lane::plain});
    if (!ia || !ib || !clear(ia->coord) || !clear(ib->coord)) continue;
    const DivisionDistance src = division_distance(table, a, b);
    const DivisionDistance img = division_distance(table, ia->coord, ib->coord);
    ++done;
    /* the comparison is meaningful only while both sides are resolved away
     * from the grade cutoff */
    if (src.resolution_exhausted || img.grade == table.max_grade) continue;
    CHECK(img.value <= table.K * src.value);
  }
}

TEST_CASE("gap function and fat gap report") {
  const IntervalExchange iet = staircase_like(0.1);
  const GradingTable table = build_grading(iet, 2.0, 40, GradingOptions{true});

  CHECK(gap_function(table, 0) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(gap_function(table, 1) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(gap_function(table, 8) == doctest::Approx(0.1).epsilon(1e-12));
  for (int n = 0; n < 8; ++n) {
    CHECK(gap_function(table, n + 1) <= gap_function(table, n));
  }
  CHECK_THROWS_AS(gap_function(table, -1), InvalidInput);
  CHECK_THROWS_AS(gap_function(table, 41), InvalidInput);

  const IntervalExchange one_family =
      IntervalExchange(0.0, 1.0,
                       {Piece{0.0, 1.0 - kGolden, kGolden},
                        Piece{1.0 - kGolden, kGolden, kGolden - 1.0}},
                       {1.0 - kGolden}, {});
  const GradingTable lonely = build_grading(one_family, 2.0, 0);
  CHECK_THROWS_AS(gap_function(lonely, 0), InvalidInput);

  const auto rows = fat_gap_report(table, 0.3, 8);
  REQUIRE(rows.size() == 8);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].n == static_cast<int>(i) + 1);
    CHECK(rows[i].scaled ==
          doctest::Approx(std::pow(2.0, 0.3 * rows[i].n) * rows[i].gap));
    if (i > 0) CHECK(rows[i].scaled >= rows[i - 1].scaled);
    CHECK(rows[i].running_min == doctest::Approx(rows[0].scaled));
  }
  const auto flat = fat_gap_report(table, 0.0, 8);
  for (const FatGapRow& r : flat) CHECK(r.scaled == r.gap);
  CHECK_THROWS_AS(fat_gap_report(table, -0.1, 8), InvalidInput);
  CHECK_THROWS_AS(fat_gap_report(table, 0.3, 0), InvalidInput);
  CHECK_THROWS_AS(fat_gap_report(table, 0.3, 41), InvalidInput);
}

TEST_CASE("minimality diagnostic separates dense from periodic orbits") {
  const IntervalExchange golden = rotation(kGolden);
  CHECK(minimality_diagnostic(golden, LanePoint{0.5, Lane::plain}, 10000,
                              0.01) == doctest::Approx(1.0).epsilon(1e-9));

  const IntervalExchange third =
      rotation(1.0 / 3.0);
  CHECK(minimality_diagnostic(third, LanePoint{0.05, Lane::plain}, 99, 1e-3) ==
        doctest::Approx(0.006).epsilon(1e-4));

  CHECK(minimality_diagnostic(golden, LanePoint{0.5, Lane::plain}, 0, 0.01) ==
        doctest::Approx(0.02).epsilon(1e-12));

  CHECK_THROWS_AS(
      minimality_diagnostic(golden, LanePoint{0.5, Lane::plain}, 10, 0.0),
      InvalidInput);
  CHECK_THROWS_AS(
      minimality_diagnostic(golden, LanePoint{0.5, Lane::plain}, -1, 0.01),
      InvalidInput);
}

}  // TEST_SUITE
