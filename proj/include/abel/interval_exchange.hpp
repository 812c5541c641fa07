#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace abel {

/* A point of the base interval together with a lane tag. The lane only
 * matters at piece endpoints, where the exchange map is discontinuous:
 * left and right lanes follow the one-sided continuous extensions, plain
 * and median points die there. Away from endpoints all lanes translate the
 * same way and the tag rides along unchanged. */
enum class Lane { plain, left, median, right };

struct LanePoint {
  double coord = 0.0;
  Lane lane = Lane::plain;
};

struct Piece {
  double left = 0.0;
  double length = 0.0;
  double shift = 0.0;
};

/* Exchange of finitely many open subintervals of (lo, hi) by translations.
 *
 * Some piece endpoints are registered as breaks: forward breaks for the
 * forward map, backward breaks for the inverse. Registration does not change
 * how apply() treats an endpoint (every interior endpoint is a point of
 * ambiguity); it marks which endpoints count as critical points for grading
 * and saddle-connection detection. The default constructor registers every
 * interior endpoint of the respective chart. */
class IntervalExchange {
 public:
  IntervalExchange(double lo, double hi, std::vector<Piece> pieces);
  IntervalExchange(double lo, double hi, std::vector<Piece> pieces,
                   std::vector<double> forward_breaks,
                   std::vector<double> backward_breaks);

  double lo() const { return lo_; }
  double hi() const { return hi_; }

  /* Coordinates closer than this are treated as coincident everywhere in
   * the module (endpoint hits, break registration, grading dedup). */
  double coincidence_tol() const { return tol_; }

  const std::vector<Piece>& pieces() const { return pieces_; }
  const std::vector<Piece>& image_pieces() const { return image_pieces_; }
  const std::vector<double>& forward_breaks() const { return fwd_breaks_; }
  const std::vector<double>& backward_breaks() const { return bwd_breaks_; }

  /* Partial one-step maps. Absence (nullopt) means the point fell into an
   * endpoint its lane cannot pass: plain and median points at any interior
   * endpoint, left lane at lo, right lane at hi. A left (right) lane point
   * at an interior endpoint continues with the piece ending (starting)
   * there; a left lane at hi and a right lane at lo use the outermost
   * pieces. Points outside [lo, hi] are rejected as invalid input. */
  std::optional<LanePoint> apply(LanePoint p) const;
  std::optional<LanePoint> apply_inverse(LanePoint p) const;

  IntervalExchange inverse() const;

 private:
  struct Chart {
    std::vector<double> lefts;
    std::vector<double> shifts;
  };

  std::optional<LanePoint> step(const Chart& chart, LanePoint p) const;

  double lo_ = 0.0;
  double hi_ = 1.0;
  double tol_ = 1e-12;
  std::vector<Piece> pieces_;
  std::vector<Piece> image_pieces_;
  Chart fwd_;
  Chart bwd_;
  std::vector<double> fwd_breaks_;
  std::vector<double> bwd_breaks_;
};

inline constexpr long kOrbitCap = 1L << 20;

/* Successive images (n > 0) or preimages (n < 0) of p, starting with p
 * itself. Stops early when the point dies at an endpoint, so the result
 * holds between 1 and |n|+1 points. */
std::vector<LanePoint> orbit(const IntervalExchange& iet, LanePoint p, long n);

/* Sign of a critical point: forward-critical coordinates hit a forward
 * break under iterated application of the map, backward-critical ones hit
 * a backward break under the inverse. The grade counts the steps needed. */
enum class CriticalSign { forward_critical, backward_critical };

struct GradingEntry {
  double coord = 0.0;
  CriticalSign sign = CriticalSign::forward_critical;
  int grade = 0;
};

struct GradingOptions {
  /* When a critical family runs into a registered break (a saddle
   * connection at working precision), stop that family and keep the table
   * instead of refusing. Used for rational-parameter sweeps. */
  bool allow_truncated = false;
};

struct GradingTable {
  std::vector<GradingEntry> entries;  /* sorted by (coord, grade, sign) */
  double K = 2.0;
  int max_grade = 0;
  int families = 0;
  bool near_saddle = false;
  bool truncated = false;
  double lo = 0.0;
  double hi = 1.0;
  double tol = 1e-12;
};

inline constexpr int kMaxGradeCap = 200;

/* Critical points up to max_grade: grade 0 is the registered breaks, grade
 * k the k-th preimages of forward breaks and k-th images of backward
 * breaks. A family whose walk lands within coincidence_tol of a chart
 * endpoint or a grade-0 coordinate has found a (near-)saddle connection:
 * by default that is a certification failure; with allow_truncated the
 * family is cut there. Distinct-sign families may pass through a shared
 * coordinate; both entries are kept. */
GradingTable build_grading(const IntervalExchange& iet, double K, int max_grade,
                           GradingOptions options = {});

struct DivisionDistance {
  double value = 0.0;
  int grade = -1;
  bool resolution_exhausted = false;
};

/* K^(-g) where g is the smallest grade strictly between a and b, or zero
 * with the exhausted flag when no tabulated point separates them. Querying
 * at a critical coordinate itself is rejected; resolve such points with
 * lane semantics instead. */
DivisionDistance division_distance(const GradingTable& table, double a, double b);

/* Minimum spacing of the grade <= n coordinates, with coincident entries
 * counted as one point. */
double gap_function(const GradingTable& table, int n);

struct FatGapRow {
  int n = 0;
  double gap = 0.0;
  double scaled = 0.0;      /* K^(lambda n) * gap */
  double running_min = 0.0; /* over scaled, rows 1..n */
};

/* Diagnostic sequence for n = 1..n_max. No verdict is attached: finite
 * data cannot prove the scaled sequence stays bounded below. */
std::vector<FatGapRow> fat_gap_report(const GradingTable& table, double lambda,
                                      int n_max);

/* Fraction of the base interval within epsilon of the first n iterates of
 * p (the starting point included). An empirical density proxy only. */
double minimality_diagnostic(const IntervalExchange& iet, LanePoint p, long n,
                             double epsilon);

}  // namespace abel
