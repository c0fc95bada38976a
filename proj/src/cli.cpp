#include "wireshaper/cli.hpp"

#include "wireshaper/calibration.hpp"
#include "wireshaper/eval.hpp"
#include "wireshaper/io.hpp"
#include "wireshaper/machine.hpp"
#include "wireshaper/shape_planner.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace wireshaper {

namespace {

std::string fmt_fixed(double v, int precision) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return std::string(buf, static_cast<size_t>(len));
}

ProjectConfig load_config(const std::string& path) {
  if (path.empty()) return default_config();
  return config_from_json(read_file(path));
}

/// Writes the artifact to `path` when given, otherwise to `out`. Returns the
/// stream human summaries should use so they never mix into a stdout
/// artifact.
std::ostream& emit_artifact(const std::string& artifact, const std::string& path,
                            std::ostream& out, std::ostream& err) {
  if (path.empty()) {
    out << artifact;
    return err;
  }
  write_file(path, artifact);
  return out;
}

double polyline_length(const std::vector<Vec3>& points) {
  double total = 0.0;
  for (size_t i = 1; i < points.size(); ++i) total += (points[i] - points[i - 1]).norm();
  return total;
}

struct PlanCommon {
  std::string config_path;
  std::string out_path;
  double beta = -1.0;    // <0: take the config bend law's nominal beta
  double seglen = -1.0;  // <0: take the config wire's segment length
};

void add_plan_common(CLI::App* cmd, PlanCommon& common) {
  cmd->add_option("--config", common.config_path, "project config JSON");
  cmd->add_option("--out", common.out_path, "output program file (stdout when omitted)");
  cmd->add_option("--beta", common.beta, "normalized pinch command for bent segments");
  cmd->add_option("--seglen", common.seglen, "per-step advance in mm");
}

void finish_plan(const PlanCommon& common, ShapeRecipe recipe, std::ostream& out,
                 std::ostream& err) {
  const ProjectConfig cfg = load_config(common.config_path);
  recipe.segment_length_mm = common.seglen > 0.0 ? common.seglen : cfg.wire.segment_length_mm;
  if (common.beta >= 0.0) {
    recipe.beta_nominal = common.beta;
  } else if (!cfg.bend_law.entries.empty()) {
    recipe.beta_nominal = cfg.bend_law.nominal_beta();
  }
  const ActionProgram program = plan(recipe, cfg.wire);
  std::ostream& note = emit_artifact(action_program_to_json(program), common.out_path, out, err);
  note << "planned " << program.steps.size() << " steps (" << program_fingerprint(program)
       << ")\n";
}

std::vector<CustomStep> parse_custom_steps(const std::string& text) {
  std::vector<CustomStep> steps;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("custom steps: expected 'phi_deg:on|off', got '" + item + "'");
    }
    CustomStep step;
    try {
      step.phi_rad = deg2rad(std::stod(item.substr(0, colon)));
    } catch (const std::exception&) {
      throw std::invalid_argument("custom steps: bad angle in '" + item + "'");
    }
    const std::string state = item.substr(colon + 1);
    if (state == "on") step.pinch = true;
    else if (state == "off") step.pinch = false;
    else throw std::invalid_argument("custom steps: state must be on/off in '" + item + "'");
    steps.push_back(step);
  }
  if (steps.empty()) throw std::invalid_argument("custom steps: empty list");
  return steps;
}

Centerline load_measured_like(const Centerline& predicted, const std::string& meas_path,
                              const ProjectConfig& cfg) {
  Centerline measured = centerline_from_csv(read_file(meas_path));
  if (measured.points.size() != predicted.points.size()) {
    measured = resample(measured.points, static_cast<int>(predicted.points.size()) - 1,
                        cfg.wire.segment_length_mm);
  }
  return measured;
}

void print_report(const ErrorReport& report, const WireSpec& wire, std::ostream& os) {
  os << "shape: " << report.shape_label << " (" << report.per_segment_mm.size() << " joints)\n";
  os << "  e_min  " << fmt_fixed(report.e_min_mm, 4) << " mm\n";
  os << "  e_max  " << fmt_fixed(report.e_max_mm, 4) << " mm\n";
  os << "  e_mean " << fmt_fixed(report.e_mean_mm, 4) << " mm ("
     << fmt_fixed(report.e_mean_mm / wire.shapeable_length_mm * 100.0, 2) << "% of shapeable)\n";
  os << "  e_rms  " << fmt_fixed(report.e_rms_mm, 4) << " mm\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"wireshaper: model, plan, compile and evaluate guidewire tip shaping runs"};
  app.require_subcommand(1);

  // ---- calibrate ----------------------------------------------------------
  auto* cal = app.add_subcommand("calibrate", "identify the wire's bend angle from measured chords");
  struct {
    std::string config_path, chords_path, out_path;
    double beta = -1.0;
  } cal_opts;
  cal->add_option("--config", cal_opts.config_path, "project config JSON");
  cal->add_option("--chords", cal_opts.chords_path, "chord measurements, one per line (mm)")
      ->required();
  cal->add_option("--beta", cal_opts.beta, "pinch command the chords were measured at");
  cal->add_option("--out", cal_opts.out_path, "where to write the updated config");
  cal->callback([&] {
    ProjectConfig cfg = load_config(cal_opts.config_path);
    CalibrationInput input;
    input.segment_length_mm = cfg.wire.segment_length_mm;
    input.segments = cfg.wire.segments;
    input.measured_chords_mm = parse_chords(read_file(cal_opts.chords_path));
    const CalibrationResult result = solve_bend_angle(input);

    out << "theta_star: " << fmt_fixed(rad2deg(result.theta_star_rad), 6) << " deg ("
        << fmt_double(result.theta_star_rad) << " rad)\n";
    out << "chord mean: " << fmt_fixed(result.chord_mean_mm, 4) << " mm, std "
        << fmt_fixed(result.chord_std_mm, 4) << " mm over " << input.measured_chords_mm.size()
        << " trial(s)\n";
    out << "residual: " << fmt_double(result.residual_mm) << " mm\n";
    if (result.theta_star_rad == 0.0) {
      out << "warning: mean chord equals the straight wire length; theta_star = 0 "
             "(shape deviates neither from straight nor toward a bend)\n";
    }

    double beta = cal_opts.beta;
    if (beta < 0.0) beta = cfg.bend_law.entries.empty() ? 0.8 : cfg.bend_law.nominal_beta();
    cfg.bend_law.entries = {{beta, result.theta_star_rad}};
    const std::string target =
        cal_opts.out_path.empty() ? cal_opts.config_path : cal_opts.out_path;
    if (!target.empty()) {
      write_file(target, config_to_json(cfg));
      out << "bend law written to " << target << "\n";
    }
  });

  // ---- plan ---------------------------------------------------------------
  auto* plan_cmd = app.add_subcommand("plan", "generate an action program for a tip recipe");
  plan_cmd->require_subcommand(1);

  PlanCommon pc_c, pc_s, pc_angled, pc_hook, pc_helix, pc_custom;
  int c_segments = 0;
  auto* plan_c = plan_cmd->add_subcommand("c", "single constant-curvature arc");
  add_plan_common(plan_c, pc_c);
  plan_c->add_option("--segments", c_segments, "number of bent segments")->required();
  plan_c->callback([&] {
    finish_plan(pc_c, ShapeRecipe::c(c_segments, 1.0, 0.8), out, err);
  });

  int s_first = 0, s_second = 0;
  auto* plan_s = plan_cmd->add_subcommand("s", "opposed double arc");
  add_plan_common(plan_s, pc_s);
  plan_s->add_option("first", s_first, "segments in the first arc")->required();
  plan_s->add_option("second", s_second, "segments in the flipped arc")->required();
  plan_s->callback([&] {
    finish_plan(pc_s, ShapeRecipe::s(s_first, s_second, 1.0, 0.8), out, err);
  });

  int angled_straight = 0, angled_bent = 0;
  auto* plan_angled = plan_cmd->add_subcommand("angled", "straight run then a single bend");
  add_plan_common(plan_angled, pc_angled);
  plan_angled->add_option("straight", angled_straight, "unbent segments")->required();
  plan_angled->add_option("bent", angled_bent, "bent segments")->required();
  plan_angled->callback([&] {
    finish_plan(pc_angled, ShapeRecipe::angled(angled_straight, angled_bent, 1.0, 0.8), out, err);
  });

  int hook_straight = 0, hook_primary = 0, hook_recurve = 0;
  auto* plan_hook = plan_cmd->add_subcommand("hook", "straight, primary bend, opposed recurve");
  add_plan_common(plan_hook, pc_hook);
  plan_hook->add_option("straight", hook_straight, "unbent segments")->required();
  plan_hook->add_option("primary", hook_primary, "primary bend segments")->required();
  plan_hook->add_option("recurve", hook_recurve, "recurve segments")->required();
  plan_hook->callback([&] {
    finish_plan(pc_hook, ShapeRecipe::hook(hook_straight, hook_primary, hook_recurve, 1.0, 0.8),
                out, err);
  });

  int helix_segments = 0;
  double helix_dphi_deg = 0.0;
  auto* plan_helix = plan_cmd->add_subcommand("helix", "constant per-segment roll increment");
  add_plan_common(plan_helix, pc_helix);
  plan_helix->add_option("--segments", helix_segments, "number of turns")->required();
  plan_helix->add_option("--dphi", helix_dphi_deg, "roll increment per segment, degrees")
      ->required();
  plan_helix->callback([&] {
    finish_plan(pc_helix, ShapeRecipe::helix(helix_segments, deg2rad(helix_dphi_deg), 1.0, 0.8),
                out, err);
  });

  std::string custom_steps_text;
  auto* plan_custom = plan_cmd->add_subcommand("custom", "explicit per-segment roll/pinch list");
  add_plan_common(plan_custom, pc_custom);
  plan_custom
      ->add_option("--steps", custom_steps_text, "comma list of phi_deg:on|off, base joint first")
      ->required();
  plan_custom->callback([&] {
    finish_plan(pc_custom, ShapeRecipe::custom_steps(parse_custom_steps(custom_steps_text), 1.0, 0.8),
                out, err);
  });

  // ---- shape --------------------------------------------------------------
  auto* shape_cmd = app.add_subcommand("shape", "predict the centerline of an action program");
  struct {
    std::string program_path, config_path, out_path, mode = "rigid";
  } shape_opts;
  shape_cmd->add_option("program", shape_opts.program_path, "action program JSON")->required();
  shape_cmd->add_option("--config", shape_opts.config_path, "project config JSON");
  shape_cmd->add_option("--mode", shape_opts.mode, "rigid | arc")
      ->check(CLI::IsMember({"rigid", "arc"}));
  shape_cmd->add_option("--out", shape_opts.out_path, "centerline CSV (stdout when omitted)");
  shape_cmd->callback([&] {
    const ProjectConfig cfg = load_config(shape_opts.config_path);
    const ActionProgram program = action_program_from_json(read_file(shape_opts.program_path));
    const ForwardMode mode =
        shape_opts.mode == "arc" ? ForwardMode::Arc : ForwardMode::RigidLink;
    const Centerline line = forward_shape(program, cfg.bend_law, mode);
    std::ostream& note = emit_artifact(centerline_to_csv(line), shape_opts.out_path, out, err);
    note << "centerline: " << line.points.size() << " joints, chord "
         << fmt_fixed(chord_of(line), 4) << " mm\n";
  });

  // ---- fit ----------------------------------------------------------------
  auto* fit_cmd = app.add_subcommand("fit", "recover an action program from a target centerline");
  struct {
    std::string target_path, config_path, out_path, mode = "binary";
    double threshold_deg = -1.0;
  } fit_opts;
  fit_cmd->add_option("target", fit_opts.target_path, "target centerline CSV")->required();
  fit_cmd->add_option("--config", fit_opts.config_path, "project config JSON");
  fit_cmd->add_option("--fit-mode", fit_opts.mode, "binary | continuous")
      ->check(CLI::IsMember({"binary", "continuous"}));
  fit_cmd->add_option("--threshold-deg", fit_opts.threshold_deg,
                      "turning below this is treated as unbent");
  fit_cmd->add_option("--out", fit_opts.out_path, "output program file (stdout when omitted)");
  fit_cmd->callback([&] {
    const ProjectConfig cfg = load_config(fit_opts.config_path);
    const Centerline raw = centerline_from_csv(read_file(fit_opts.target_path));
    const double l = cfg.wire.segment_length_mm;
    const int n_eff = std::min<int>(
        cfg.wire.segments, static_cast<int>(std::floor(polyline_length(raw.points) / l + 1e-9)));
    if (n_eff < 2) throw std::invalid_argument("fit: target is too short for two segments");
    const Centerline target = resample(raw.points, n_eff, l);

    FitOptions options;
    options.pinch_mode = fit_opts.mode == "continuous" ? FitOptions::PinchMode::Continuous
                                                       : FitOptions::PinchMode::Binary;
    if (fit_opts.threshold_deg > 0.0) {
      options.curvature_threshold_rad = deg2rad(fit_opts.threshold_deg);
    }
    const FitResult result = fit_actions(target, cfg.wire, cfg.bend_law, options);
    std::ostream& note =
        emit_artifact(action_program_to_json(result.program), fit_opts.out_path, out, err);
    note << "fit residual rms: " << fmt_double(result.residual_rms_mm) << " mm over "
         << result.per_joint_residual_mm.size() << " joints\n";
  });

  // ---- compile ------------------------------------------------------------
  auto* compile_cmd = app.add_subcommand("compile", "expand a program into machine commands");
  struct {
    std::string program_path, config_path, out_path;
  } compile_opts;
  compile_cmd->add_option("program", compile_opts.program_path, "action program JSON")->required();
  compile_cmd->add_option("--config", compile_opts.config_path, "project config JSON");
  compile_cmd->add_option("--out", compile_opts.out_path, "machine program file (stdout when omitted)");
  compile_cmd->callback([&] {
    const ProjectConfig cfg = load_config(compile_opts.config_path);
    const ActionProgram program = action_program_from_json(read_file(compile_opts.program_path));
    const CompileResult result = compile_program(program, cfg.machine);
    double max_roll = 0.0, max_feed = 0.0;
    for (const StepResidual& r : result.residuals) {
      max_roll = std::max(max_roll, std::abs(r.roll_residual_deg));
      max_feed = std::max(max_feed, std::abs(r.feed_residual_mm));
    }
    std::ostream& note = emit_artifact(print_machine_program(result.program),
                                       compile_opts.out_path, out, err);
    note << "compiled " << program.steps.size() << " steps into "
         << result.program.commands.size() << " commands\n";
    note << "max quantization residual: roll " << fmt_double(max_roll) << " deg, feed "
         << fmt_double(max_feed) << " mm\n";
  });

  // ---- simulate -----------------------------------------------------------
  auto* sim_cmd = app.add_subcommand("simulate", "replay a machine program with interlock checks");
  struct {
    std::string program_path, config_path, out_path;
  } sim_opts;
  sim_cmd->add_option("program", sim_opts.program_path, "machine program file")->required();
  sim_cmd->add_option("--config", sim_opts.config_path, "project config JSON");
  sim_cmd->add_option("--out", sim_opts.out_path, "achieved action program JSON");
  sim_cmd->callback([&] {
    const ProjectConfig cfg = load_config(sim_opts.config_path);
    const MachineProgram mp = parse_machine_program(read_file(sim_opts.program_path));
    const ActuatorTrace trace = simulate(mp);
    const ActionProgram achieved = achieved_program(trace, cfg.wire);
    std::ostream& note =
        emit_artifact(action_program_to_json(achieved), sim_opts.out_path, out, err);
    note << "replayed " << mp.commands.size() << " commands, achieved " << achieved.steps.size()
         << " steps, no interlock violations\n";
  });

  // ---- eval ---------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "compare measured and predicted centerlines");
  struct {
    std::string pred_path, meas_path, out_path, config_path, label = "shape", align_mode = "base";
    bool planar = false, spatial = false;
    std::vector<std::string> aggregate_paths;
  } eval_opts;
  eval_cmd->add_option("--config", eval_opts.config_path, "project config JSON");
  eval_cmd->add_option("--pred", eval_opts.pred_path, "predicted centerline CSV");
  eval_cmd->add_option("--meas", eval_opts.meas_path, "measured centerline CSV");
  eval_cmd->add_option("--align", eval_opts.align_mode, "base | base-roll")
      ->check(CLI::IsMember({"base", "base-roll"}));
  eval_cmd->add_flag("--2d", eval_opts.planar, "project onto the prediction's bending plane");
  eval_cmd->add_flag("--3d", eval_opts.spatial, "full 3D errors (default)");
  eval_cmd->add_option("--label", eval_opts.label, "shape label for the report");
  eval_cmd->add_option("--out", eval_opts.out_path, "report CSV (stdout when omitted)");
  eval_cmd->add_option("--aggregate", eval_opts.aggregate_paths,
                       "aggregate existing report CSVs instead of comparing curves");
  eval_cmd->callback([&] {
    const ProjectConfig config = load_config(eval_opts.config_path);
    if (!eval_opts.aggregate_paths.empty()) {
      std::vector<ErrorReport> reports;
      for (const std::string& path : eval_opts.aggregate_paths) {
        reports.push_back(report_from_csv(read_file(path), config.wire));
      }
      const AggregateSummary summary = aggregate(reports);
      for (const ErrorReport& r : reports) {
        out << r.shape_label << ": mean " << fmt_fixed(r.e_mean_mm, 2) << " mm (min "
            << fmt_fixed(r.e_min_mm, 2) << ", max " << fmt_fixed(r.e_max_mm, 2) << ")\n";
      }
      out << "aggregate over " << summary.shape_count
          << " shapes: mean-of-means " << fmt_fixed(summary.mean_of_means_mm, 2)
          << " mm, rms-of-means " << fmt_fixed(summary.rms_of_means_mm, 2) << " mm\n";
      return;
    }
    if (eval_opts.pred_path.empty() || eval_opts.meas_path.empty()) {
      throw std::invalid_argument("eval: need --pred and --meas (or --aggregate)");
    }
    if (eval_opts.planar && eval_opts.spatial) {
      throw std::invalid_argument("eval: pick one of --2d / --3d");
    }
    const Centerline predicted = centerline_from_csv(read_file(eval_opts.pred_path));
    const Centerline measured = load_measured_like(predicted, eval_opts.meas_path, config);
    AlignmentOptions align_options;
    align_options.mode = eval_opts.align_mode == "base-roll" ? AlignMode::BaseFrameRoll
                                                             : AlignMode::BaseFrame;
    const Centerline aligned = align(measured, predicted, align_options);
    std::vector<double> errors = eval_opts.planar ? per_segment_error_planar(aligned, predicted)
                                                  : per_segment_error(aligned, predicted);
    errors.erase(errors.begin());  // the base joint is pinned by the alignment
    const ErrorReport report = summarize(errors, config.wire, eval_opts.label);
    std::ostream& note = emit_artifact(report_to_csv(report), eval_opts.out_path, out, err);
    print_report(report, config.wire, note);
  });

  // ---- plot ---------------------------------------------------------------
  auto* plot_cmd = app.add_subcommand("plot", "SVG overlay of measured vs predicted centerlines");
  struct {
    std::string pred_path, meas_path, out_path, config_path, align_mode = "base";
  } plot_opts;
  plot_cmd->add_option("--config", plot_opts.config_path, "project config JSON");
  plot_cmd->add_option("--pred", plot_opts.pred_path, "predicted centerline CSV")->required();
  plot_cmd->add_option("--meas", plot_opts.meas_path, "measured centerline CSV")->required();
  plot_cmd->add_option("--align", plot_opts.align_mode, "base | base-roll")
      ->check(CLI::IsMember({"base", "base-roll"}));
  plot_cmd->add_option("--out", plot_opts.out_path, "output SVG (stdout when omitted)");
  plot_cmd->callback([&] {
    const ProjectConfig config = load_config(plot_opts.config_path);
    const Centerline predicted = centerline_from_csv(read_file(plot_opts.pred_path));
    const Centerline measured = load_measured_like(predicted, plot_opts.meas_path, config);
    AlignmentOptions align_options;
    align_options.mode = plot_opts.align_mode == "base-roll" ? AlignMode::BaseFrameRoll
                                                             : AlignMode::BaseFrame;
    const Centerline aligned = align(measured, predicted, align_options);
    std::ostream& note =
        emit_artifact(overlay_svg(predicted, aligned), plot_opts.out_path, out, err);
    note << "overlay with " << (predicted.points.size() - 1) << " whiskers\n";
  });

  // ---- dispatch -----------------------------------------------------------
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("wireshaper");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const SimulationFault& fault) {
    err << "error: " << fault.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace wireshaper
