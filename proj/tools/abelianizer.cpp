#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "abel/abelianize.hpp"
#include "abel/cocycle.hpp"
#include "abel/errors.hpp"
#include "abel/euclid_plane.hpp"
#include "abel/interval_exchange.hpp"
#include "abel/io.hpp"
#include "abel/slithering.hpp"
#include "abel/torus_model.hpp"

using namespace abel;

namespace {

int thread_cap() {
  const char* env = std::getenv("ABELIANIZER_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (end == nullptr || *end != '\0' || n < 1)
    throw InvalidInput("ABELIANIZER_THREADS must be a positive integer");
  const long hw = std::max(1L, static_cast<long>(std::thread::hardware_concurrency()));
  return static_cast<int>(std::min(n, hw));
}

void check_grade(int grade) {
  if (grade < 0 || grade > kMaxGradeCap)
    throw InvalidInput("grade must lie in [0, " + std::to_string(kMaxGradeCap) + "]");
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty())
    std::cout << text;
  else
    write_text_file(out_path, text);
}

const char* lean_name(Lean lean) {
  return lean == Lean::left ? "left" : "right";
}

JsonValue line_json(const ProjLine& line) {
  return JsonValue::array().push(JsonValue(line.rep.x)).push(JsonValue(line.rep.y));
}

JsonValue decay_json(const DecaySeries& decay) {
  JsonValue norms = JsonValue::array();
  for (double v : decay.max_norm) norms.push(JsonValue(v));
  return JsonValue::object()
      .set("max_norm", std::move(norms))
      .set("fit_window",
           JsonValue::array().push(JsonValue(decay.fit_lo)).push(JsonValue(decay.fit_hi)))
      .set("slope_defined", JsonValue(decay.slope_defined))
      .set("slope", JsonValue(decay.slope))
      .set("intercept", JsonValue(decay.intercept));
}

JsonValue families_json(const std::vector<FamilyInfo>& families) {
  JsonValue out = JsonValue::array();
  for (const FamilyInfo& f : families)
    out.push(JsonValue::object()
                 .set("root", JsonValue(f.root.coord))
                 .set("sign", JsonValue(f.root.sign == CriticalSign::forward_critical
                                            ? "forward"
                                            : "backward"))
                 .set("depth", JsonValue(f.depth))
                 .set("root_residual", JsonValue(f.root_residual))
                 .set("sharedness", JsonValue(f.sharedness))
                 .set("worst_anchor_residual", JsonValue(f.worst_anchor_residual)));
  return out;
}

JsonValue holonomy_json(const AbelianizedHolonomy& h) {
  return JsonValue::object()
      .set("loop", JsonValue(h.loop_label))
      .set("matrix", JsonValue::matrix(h.matrix))
      .set("diag_plus", JsonValue(h.diag_plus))
      .set("diag_minus", JsonValue(h.diag_minus))
      .set("off_diag_residual", JsonValue(h.off_diag_residual))
      .set("tail_bound", JsonValue(h.tail_bound))
      .set("plus", line_json(h.plus))
      .set("minus", line_json(h.minus));
}

JsonValue splitting_json(const SplittingReport& report) {
  return JsonValue::object()
      .set("grade", JsonValue(report.grade))
      .set("half_grade", JsonValue(report.half_grade))
      .set("samples", JsonValue(report.samples_used))
      .set("max_distance_plus", JsonValue(report.max_distance_plus))
      .set("max_distance_minus", JsonValue(report.max_distance_minus))
      .set("half_max_distance_plus", JsonValue(report.half_max_distance_plus))
      .set("half_max_distance_minus", JsonValue(report.half_max_distance_minus))
      .set("mean_tail", JsonValue(report.mean_tail));
}

JsonValue lyapunov_json(const LyapunovEstimate& est) {
  return JsonValue::object()
      .set("lambda_hat", JsonValue(est.lambda_hat))
      .set("n", JsonValue(static_cast<std::int64_t>(est.n)))
      .set("sample_count", JsonValue(est.sample_count))
      .set("skipped", JsonValue(est.skipped))
      .set("spread", JsonValue(est.spread));
}

/* ---------------------------------------------------------------- torus */

struct TorusArgs {
  std::string config;
  std::string out;
  int grade = 40;
  std::int64_t seed = 1;
  int splitting_samples = 16;
  double line_tol = 1e-7;
  bool allow_truncated = false;
  std::int64_t lyapunov_n = 4096;
  int lyapunov_samples = 32;
  int positivity_nmax = 8;
};

int cmd_torus(const TorusArgs& args) {
  check_grade(args.grade);
  if (args.line_tol <= 0.0) throw InvalidInput("line tolerance must be positive");
  if (args.splitting_samples < 2)
    throw InvalidInput("need at least two splitting samples");
  if (args.lyapunov_n < 1 || args.lyapunov_samples < 1)
    throw InvalidInput("lyapunov parameters must be positive");
  const int threads = thread_cap();

  const TorusParams params = read_torus_file(args.config);
  const TorusSystem sys = build_torus(params);

  GradingOptions gopts;
  gopts.allow_truncated = args.allow_truncated;
  const GradingTable table = build_grading(sys.iet, 2.0, args.grade, gopts);

  const LyapunovEstimate lyap = lyapunov_estimate(
      sys.cocycle,
      low_discrepancy_samples(sys.cocycle,
                              static_cast<std::size_t>(args.lyapunov_samples),
                              static_cast<std::uint64_t>(args.seed)),
      args.lyapunov_n);
  const std::optional<int> positivity =
      eventual_positivity_certificate(sys.cocycle, args.positivity_nmax);

  JumpOptions jopts;
  jopts.line_tol = args.line_tol;
  const JumpAtlas atlas(sys.cocycle, table, jopts);

  const auto [horizontal_loop, vertical_loop] = torus_loops(sys);
  AbelianizedHolonomy horizontal, vertical;
  if (threads >= 2) {
    auto fut = std::async(std::launch::async, [&] {
      return abelianized_holonomy(atlas, horizontal_loop);
    });
    vertical = abelianized_holonomy(atlas, vertical_loop);
    horizontal = fut.get();
  } else {
    horizontal = abelianized_holonomy(atlas, horizontal_loop);
    vertical = abelianized_holonomy(atlas, vertical_loop);
  }

  const SplittingReport splitting = splitting_report(
      atlas,
      low_discrepancy_samples(sys.cocycle,
                              static_cast<std::size_t>(args.splitting_samples),
                              static_cast<std::uint64_t>(args.seed)),
      args.grade);
  const SpectralCoordinates spectral =
      spectral_coordinates(horizontal, vertical, params.lean);
  const PredictedLimits predicted = predicted_limits(params);

  JsonValue report = JsonValue::object();
  report.set("command", JsonValue("torus"))
      .set("seed", JsonValue(args.seed))
      .set("threads", JsonValue(threads))
      .set("params", JsonValue::object()
                         .set("m", JsonValue(params.m))
                         .set("mu", JsonValue(params.mu))
                         .set("nu", JsonValue(params.nu))
                         .set("lambda", JsonValue(params.lambda))
                         .set("lean", JsonValue(lean_name(params.lean)))
                         .set("rho", JsonValue(params.rho())))
      .set("rational_denominator",
           JsonValue(static_cast<std::int64_t>(sys.rational_denominator)))
      .set("rational_error", JsonValue(sys.rational_error))
      .set("grade", JsonValue(args.grade))
      .set("table_truncated", JsonValue(table.truncated))
      .set("lyapunov", lyapunov_json(lyap))
      .set("positivity_n", positivity ? JsonValue(*positivity) : JsonValue())
      .set("uniformity_assumed", JsonValue(!positivity.has_value()))
      .set("decay", decay_json(atlas.decay()))
      .set("families", families_json(atlas.families()))
      .set("holonomies",
           JsonValue::array().push(holonomy_json(horizontal)).push(holonomy_json(vertical)))
      .set("splitting", splitting_json(splitting))
      .set("spectral", JsonValue::object()
                           .set("a_plus", JsonValue(spectral.a_plus))
                           .set("b_plus", JsonValue(spectral.b_plus))
                           .set("lean", JsonValue(lean_name(spectral.lean))))
      .set("predicted", JsonValue::object()
                            .set("a_ab", JsonValue::matrix(predicted.a_ab))
                            .set("b_ab", JsonValue::matrix(predicted.b_ab))
                            .set("jumps", JsonValue::array()
                                              .push(JsonValue::matrix(predicted.jumps[0]))
                                              .push(JsonValue::matrix(predicted.jumps[1]))))
      .set("delta",
           JsonValue::object()
               .set("a_ab", JsonValue(op_norm(horizontal.matrix - predicted.a_ab)))
               .set("b_ab", JsonValue(op_norm(vertical.matrix - predicted.b_ab)))
               .set("a_plus", JsonValue(std::fabs(spectral.a_plus - predicted.a_ab.a)))
               .set("b_plus", JsonValue(std::fabs(spectral.b_plus - predicted.b_ab.a))));
  emit(args.out, report.dump());
  return 0;
}

/* ------------------------------------------------------------- lyapunov */

struct LyapunovArgs {
  std::string cocycle;
  std::string out;
  std::int64_t n = 4096;
  int samples = 32;
  std::int64_t seed = 1;
};

int cmd_lyapunov(const LyapunovArgs& args) {
  if (args.n < 1 || args.samples < 1)
    throw InvalidInput("lyapunov parameters must be positive");
  const IntervalCocycle coc = read_cocycle_file(args.cocycle);
  const LyapunovEstimate est = lyapunov_estimate(
      coc,
      low_discrepancy_samples(coc, static_cast<std::size_t>(args.samples),
                              static_cast<std::uint64_t>(args.seed)),
      args.n);
  JsonValue report = JsonValue::object();
  report.set("command", JsonValue("lyapunov"))
      .set("seed", JsonValue(args.seed))
      .set("lyapunov", lyapunov_json(est));
  emit(args.out, report.dump());
  return 0;
}

/* ---------------------------------------------------------- stable-lines */

struct StableArgs {
  std::string cocycle;
  std::string out;
  double point = 0.0;
  std::string lane = "plain";
  std::string direction = "both";
  std::int64_t n = 0;  /* 0: double automatically until target is met */
  double target = 1e-9;
};

Lane parse_lane(const std::string& name) {
  if (name == "plain") return Lane::plain;
  if (name == "left") return Lane::left;
  if (name == "median") return Lane::median;
  if (name == "right") return Lane::right;
  throw InvalidInput("unknown lane \"" + name + "\"");
}

int cmd_stable_lines(const StableArgs& args) {
  if (args.target <= 0.0) throw InvalidInput("residual target must be positive");
  if (args.n < 0) throw InvalidInput("iteration count must be non-negative");
  if (args.direction != "both" && args.direction != "forward" &&
      args.direction != "backward")
    throw InvalidInput("direction must be forward, backward, or both");
  const IntervalCocycle coc = read_cocycle_file(args.cocycle);
  const LanePoint p{args.point, parse_lane(args.lane)};

  std::vector<Direction> directions;
  if (args.direction != "backward") directions.push_back(Direction::forward);
  if (args.direction != "forward") directions.push_back(Direction::backward);

  JsonValue lines = JsonValue::array();
  for (Direction dir : directions) {
    const StableLineResult res =
        args.n == 0 ? stable_line_auto(coc, p, dir, args.target)
                    : stable_line(coc, p, dir, args.n);
    lines.push(JsonValue::object()
                   .set("direction", JsonValue(dir == Direction::forward
                                                   ? "forward"
                                                   : "backward"))
                   .set("line", line_json(res.line))
                   .set("iterations", JsonValue(static_cast<std::int64_t>(
                                          res.iterations_used)))
                   .set("residual", JsonValue(res.residual)));
  }

  JsonValue report = JsonValue::object();
  report.set("command", JsonValue("stable-lines"))
      .set("point", JsonValue(args.point))
      .set("lane", JsonValue(args.lane))
      .set("lines", std::move(lines));
  emit(args.out, report.dump());
  return 0;
}

/* ----------------------------------------------------------------- fatgap */

struct FatgapArgs {
  std::string iet;
  std::string out;
  double K = 2.0;
  double lambda = 0.0;
  int nmax = 25;
  bool allow_truncated = false;
};

int cmd_fatgap(const FatgapArgs& args) {
  check_grade(args.nmax);
  if (args.K <= 1.0) throw InvalidInput("K must exceed 1");
  if (args.lambda < 0.0) throw InvalidInput("lambda must be non-negative");
  const IntervalExchange iet = read_iet_file(args.iet);
  GradingOptions gopts;
  gopts.allow_truncated = args.allow_truncated;
  const GradingTable table = build_grading(iet, args.K, args.nmax, gopts);
  const std::vector<FatGapRow> rows = fat_gap_report(table, args.lambda, args.nmax);

  CsvTable csv;
  csv.columns = {"n", "gap", "scaled", "running_min"};
  for (const FatGapRow& row : rows)
    csv.rows.push_back({static_cast<double>(row.n), row.gap, row.scaled,
                        row.running_min});
  emit(args.out, to_csv(csv));
  return 0;
}

/* ------------------------------------------------------------------ decay */

struct DecayArgs {
  std::string torus;
  std::string out;
  std::string format = "json";
  int nmax = 30;
  int fit_lo = -1;
  int fit_hi = -1;
  double line_tol = 1e-7;
  bool allow_truncated = false;
};

int cmd_decay(const DecayArgs& args) {
  check_grade(args.nmax);
  if (args.line_tol <= 0.0) throw InvalidInput("line tolerance must be positive");
  if (args.format != "json" && args.format != "csv")
    throw InvalidInput("format must be json or csv");
  const TorusSystem sys = build_torus(read_torus_file(args.torus));
  GradingOptions gopts;
  gopts.allow_truncated = args.allow_truncated;
  const GradingTable table = build_grading(sys.iet, 2.0, args.nmax, gopts);
  JumpOptions jopts;
  jopts.line_tol = args.line_tol;
  const DecaySeries series =
      jump_decay_series(sys.cocycle, table, args.nmax, args.fit_lo, args.fit_hi, jopts);

  if (args.format == "csv") {
    CsvTable csv;
    csv.columns = {"n", "max_norm"};
    for (std::size_t n = 0; n < series.max_norm.size(); ++n)
      csv.rows.push_back({static_cast<double>(n), series.max_norm[n]});
    emit(args.out, to_csv(csv));
    return 0;
  }
  JsonValue report = JsonValue::object();
  report.set("command", JsonValue("decay"))
      .set("nmax", JsonValue(args.nmax))
      .set("decay", decay_json(series));
  emit(args.out, report.dump());
  return 0;
}

/* -------------------------------------------------------------- abelianize */

struct AbelianizeArgs {
  std::string cocycle;
  std::string out;
  int grade = 20;
  double from = 0.0;
  double to = 0.0;
  int samples = 8;
  std::int64_t seed = 1;
  double line_tol = 1e-7;
  bool allow_truncated = false;
};

int cmd_abelianize(const AbelianizeArgs& args) {
  check_grade(args.grade);
  if (args.line_tol <= 0.0) throw InvalidInput("line tolerance must be positive");
  if (args.samples < 2) throw InvalidInput("need at least two samples");
  const IntervalCocycle coc = read_cocycle_file(args.cocycle);
  GradingOptions gopts;
  gopts.allow_truncated = args.allow_truncated;
  const GradingTable table = build_grading(coc.iet(), 2.0, args.grade, gopts);
  JumpOptions jopts;
  jopts.line_tol = args.line_tol;
  const JumpAtlas atlas(coc, table, jopts);

  const DeviationResult dev = atlas.deviation(args.to, args.from);
  const SplittingReport splitting = splitting_report(
      atlas,
      low_discrepancy_samples(coc, static_cast<std::size_t>(args.samples),
                              static_cast<std::uint64_t>(args.seed)),
      args.grade);

  JsonValue report = JsonValue::object();
  report.set("command", JsonValue("abelianize"))
      .set("seed", JsonValue(args.seed))
      .set("grade", JsonValue(args.grade))
      .set("deviation", JsonValue::object()
                            .set("from", JsonValue(args.from))
                            .set("to", JsonValue(args.to))
                            .set("value", JsonValue::matrix(dev.value))
                            .set("tail_bound", JsonValue(dev.tail_bound))
                            .set("truncation_grade", JsonValue(dev.truncation_grade))
                            .set("norm_sum", JsonValue(dev.norm_sum)))
      .set("decay", decay_json(atlas.decay()))
      .set("families", families_json(atlas.families()))
      .set("splitting", splitting_json(splitting));
  emit(args.out, report.dump());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"abelianizer: abelianized holonomy of SL(2) interval cocycles"};
  app.require_subcommand(0, 1);

  TorusArgs targs;
  CLI::App* torus = app.add_subcommand("torus", "full slanted-torus pipeline");
  torus->add_option("--config", targs.config, "torus parameter file")->required();
  torus->add_option("--grade", targs.grade, "grading depth (default 40)");
  torus->add_option("--out", targs.out, "output path (stdout when omitted)");
  torus->add_option("--seed", targs.seed, "sample-point seed");
  torus->add_option("--splitting-samples", targs.splitting_samples,
                    "sample count for the splitting report");
  torus->add_option("--line-tol", targs.line_tol, "stable-line residual target");
  torus->add_flag("--allow-truncated", targs.allow_truncated,
                  "keep truncated grading tables instead of refusing");
  torus->add_option("--lyapunov-n", targs.lyapunov_n, "transport length");
  torus->add_option("--lyapunov-samples", targs.lyapunov_samples,
                    "sample count for the exponent estimate");
  torus->add_option("--positivity-nmax", targs.positivity_nmax,
                    "depth scanned for a positivity certificate");

  LyapunovArgs largs;
  CLI::App* lyap = app.add_subcommand("lyapunov", "top exponent estimate");
  lyap->add_option("--cocycle", largs.cocycle, "cocycle file")->required();
  lyap->add_option("--n", largs.n, "transport length");
  lyap->add_option("--samples", largs.samples, "sample count");
  lyap->add_option("--seed", largs.seed, "sample-point seed");
  lyap->add_option("--out", largs.out, "output path (stdout when omitted)");

  StableArgs slargs;
  CLI::App* stable = app.add_subcommand("stable-lines", "stable lines at a point");
  stable->add_option("--cocycle", slargs.cocycle, "cocycle file")->required();
  stable->add_option("--point", slargs.point, "base coordinate")->required();
  stable->add_option("--lane", slargs.lane, "plain, left, median, or right");
  stable->add_option("--direction", slargs.direction, "forward, backward, or both");
  stable->add_option("--n", slargs.n, "fixed iteration count (0: automatic)");
  stable->add_option("--target", slargs.target, "residual target for automatic mode");
  stable->add_option("--out", slargs.out, "output path (stdout when omitted)");

  FatgapArgs fargs;
  CLI::App* fatgap = app.add_subcommand("fatgap", "scaled gap diagnostic (CSV)");
  fatgap->add_option("--iet", fargs.iet, "exchange file")->required();
  fatgap->add_option("--K", fargs.K, "grading base (default 2)");
  fatgap->add_option("--lambda", fargs.lambda, "scaling exponent")->required();
  fatgap->add_option("--nmax", fargs.nmax, "rows to emit");
  fatgap->add_flag("--allow-truncated", fargs.allow_truncated,
                   "keep truncated grading tables instead of refusing");
  fatgap->add_option("--out", fargs.out, "output path (stdout when omitted)");

  DecayArgs dargs;
  CLI::App* decay = app.add_subcommand("decay", "jump norm decay series");
  decay->add_option("--torus", dargs.torus, "torus parameter file")->required();
  decay->add_option("--nmax", dargs.nmax, "largest grade");
  decay->add_option("--fit-lo", dargs.fit_lo, "fit window start (default nmax/2)");
  decay->add_option("--fit-hi", dargs.fit_hi, "fit window end (default nmax)");
  decay->add_option("--line-tol", dargs.line_tol, "stable-line residual target");
  decay->add_flag("--allow-truncated", dargs.allow_truncated,
                  "keep truncated grading tables instead of refusing");
  decay->add_option("--format", dargs.format, "json or csv");
  decay->add_option("--out", dargs.out, "output path (stdout when omitted)");

  AbelianizeArgs aargs;
  CLI::App* abel_cmd = app.add_subcommand("abelianize", "deviation and splitting report");
  abel_cmd->add_option("--cocycle", aargs.cocycle, "cocycle file")->required();
  abel_cmd->add_option("--grade", aargs.grade, "grading depth");
  abel_cmd->add_option("--from", aargs.from, "transport source coordinate")->required();
  abel_cmd->add_option("--to", aargs.to, "transport target coordinate")->required();
  abel_cmd->add_option("--samples", aargs.samples, "splitting sample count");
  abel_cmd->add_option("--seed", aargs.seed, "sample-point seed");
  abel_cmd->add_option("--line-tol", aargs.line_tol, "stable-line residual target");
  abel_cmd->add_flag("--allow-truncated", aargs.allow_truncated,
                     "keep truncated grading tables instead of refusing");
  abel_cmd->add_option("--out", aargs.out, "output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (torus->parsed()) return cmd_torus(targs);
    if (lyap->parsed()) return cmd_lyapunov(largs);
    if (stable->parsed()) return cmd_stable_lines(slargs);
    if (fatgap->parsed()) return cmd_fatgap(fargs);
    if (decay->parsed()) return cmd_decay(dargs);
    if (abel_cmd->parsed()) return cmd_abelianize(aargs);
    std::cerr << app.help();
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const Uncertified& e) {
    std::cerr << "uncertified: " << e.what() << '\n';
    return 3;
  } catch (const OrbitTerminated& e) {
    std::cerr << "uncertified: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
