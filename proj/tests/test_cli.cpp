#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wireshaper/cli.hpp"
#include "wireshaper/io.hpp"

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

using namespace wireshaper;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch(const char* name) {
    dir = fs::temp_directory_path() / (std::string("wireshaper_test_") + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  std::string path(const char* file) const { return (dir / file).string(); }
};

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

size_t count_occurrences(const std::string& text, const std::string& needle) {
  size_t count = 0;
  for (size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

size_t count_lines(const std::string& text) { return count_occurrences(text, "\n"); }

}  // namespace

TEST_CASE("calibrate reports degrees and writes the bend law back") {
  Scratch scratch("calibrate");
  write_file(scratch.path("chords.txt"), "18.49\n18.7\n18.91\n");
  write_file(scratch.path("config.json"), config_to_json(default_config()));

  const CliRun r = run({"calibrate", "--config", scratch.path("config.json"), "--chords",
                        scratch.path("chords.txt")});
  CHECK(r.code == 0);
  CHECK(r.out.find("theta_star: 7.263233 deg") != std::string::npos);
  CHECK(r.out.find("chord mean: 18.7000 mm, std 0.2100 mm over 3 trial(s)") != std::string::npos);

  const ProjectConfig cfg = config_from_json(read_file(scratch.path("config.json")));
  REQUIRE(cfg.bend_law.entries.size() == 1);
  CHECK(cfg.bend_law.entries[0].theta_rad == doctest::Approx(0.12676733707782939).epsilon(1e-9));
}

TEST_CASE("calibrate flags a straight wire and rejects impossible chords") {
  Scratch scratch("calibrate_edge");
  write_file(scratch.path("straight.txt"), "20.0\n");
  const CliRun straight = run({"calibrate", "--chords", scratch.path("straight.txt")});
  CHECK(straight.code == 0);
  CHECK(straight.out.find("theta_star: 0.000000 deg") != std::string::npos);
  CHECK(straight.out.find("warning") != std::string::npos);

  write_file(scratch.path("toolong.txt"), "25.0\n");
  const CliRun bad = run({"calibrate", "--chords", scratch.path("toolong.txt")});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("exceeds n*l") != std::string::npos);
}

TEST_CASE("plan emits the documented patterns") {
  const CliRun c = run({"plan", "c", "--segments", "10"});
  CHECK(c.code == 0);
  const ActionProgram pc = action_program_from_json(c.out);
  REQUIRE(pc.steps.size() == 10);
  for (const ActionStep& s : pc.steps) {
    CHECK(s.phi_rad == 0.0);
    CHECK(s.pinch);
  }

  const CliRun helix = run({"plan", "helix", "--segments", "10", "--dphi", "45"});
  const ActionProgram ph = action_program_from_json(helix.out);
  for (int i = 0; i < 10; ++i) {
    CHECK(rad2deg(ph.steps[i].phi_rad) == doctest::Approx(45.0 * (i + 1)).epsilon(1e-12));
  }

  const CliRun hook = run({"plan", "hook", "2", "4", "4"});
  const ActionProgram pk = action_program_from_json(hook.out);
  REQUIRE(pk.steps.size() == 10);
  for (int i = 0; i < 2; ++i) CHECK_FALSE(pk.steps[i].pinch);
  for (int i = 2; i < 6; ++i) {
    CHECK(pk.steps[i].pinch);
    CHECK(rad2deg(pk.steps[i].phi_rad) == 0.0);
  }
  for (int i = 6; i < 10; ++i) {
    CHECK(pk.steps[i].pinch);
    CHECK(rad2deg(pk.steps[i].phi_rad) == doctest::Approx(180.0).epsilon(1e-12));
  }

  const CliRun over = run({"plan", "c", "--segments", "11"});
  CHECK(over.code == 2);
}

TEST_CASE("shape writes an 11-row centerline whose tip matches the chord") {
  Scratch scratch("shape");
  CHECK(run({"plan", "c", "--segments", "10", "--out", scratch.path("c.json")}).code == 0);
  const CliRun r = run({"shape", scratch.path("c.json"), "--out", scratch.path("c.csv")});
  CHECK(r.code == 0);

  const std::string csv = read_file(scratch.path("c.csv"));
  CHECK(count_lines(csv) == 12);  // header + 11 joints
  const Centerline line = centerline_from_csv(csv);
  REQUIRE(line.points.size() == 11);
  // default config carries the calibrated bend; chord of the reference arc
  CHECK((line.points.back() - line.points.front()).norm() == doctest::Approx(18.7).epsilon(1e-9));
}

TEST_CASE("full pipeline: plan, shape, fit, compile, simulate, eval, plot") {
  Scratch scratch("pipeline");
  CHECK(run({"plan", "s", "5", "5", "--out", scratch.path("s.json")}).code == 0);
  CHECK(run({"shape", scratch.path("s.json"), "--out", scratch.path("s.csv")}).code == 0);

  const CliRun fit = run({"fit", scratch.path("s.csv"), "--out", scratch.path("s_fit.json")});
  CHECK(fit.code == 0);
  const ActionProgram original = action_program_from_json(read_file(scratch.path("s.json")));
  const ActionProgram fitted = action_program_from_json(read_file(scratch.path("s_fit.json")));
  REQUIRE(fitted.steps.size() == original.steps.size());
  for (size_t i = 0; i < original.steps.size(); ++i) {
    CHECK(fitted.steps[i].pinch == original.steps[i].pinch);
  }

  CHECK(run({"compile", scratch.path("s.json"), "--out", scratch.path("s.mp")}).code == 0);
  const CliRun sim = run({"simulate", scratch.path("s.mp"), "--out", scratch.path("s_ach.json")});
  CHECK(sim.code == 0);
  const ActionProgram achieved = action_program_from_json(read_file(scratch.path("s_ach.json")));
  CHECK(achieved.steps.size() == original.steps.size());

  const CliRun eval_same = run({"eval", "--pred", scratch.path("s.csv"), "--meas",
                                scratch.path("s.csv"), "--label", "s", "--out",
                                scratch.path("s_report.csv")});
  CHECK(eval_same.code == 0);
  const std::string report = read_file(scratch.path("s_report.csv"));
  CHECK(count_lines(report) == 11);  // header + 10 joints
  for (const std::string& row : {std::string("s,1,0,0"), std::string("s,10,0,0")}) {
    CHECK(report.find(row) != std::string::npos);
  }

  const CliRun plot = run({"plot", "--pred", scratch.path("s.csv"), "--meas", scratch.path("s.csv"),
                           "--out", scratch.path("s.svg")});
  CHECK(plot.code == 0);
  const std::string svg = read_file(scratch.path("s.svg"));
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(count_occurrences(svg, "<polyline") == 2);
  CHECK(count_occurrences(svg, "class=\"whisker\"") == 10);
}

TEST_CASE("every artifact is byte-identical across repeated runs") {
  Scratch scratch("determinism");
  for (const char* round : {"a", "b"}) {
    const std::string tag = round;
    CHECK(run({"plan", "hook", "2", "4", "4", "--out", scratch.path(("hook_" + tag + ".json").c_str())}).code == 0);
    CHECK(run({"shape", scratch.path(("hook_" + tag + ".json").c_str()), "--out",
               scratch.path(("hook_" + tag + ".csv").c_str())}).code == 0);
    CHECK(run({"compile", scratch.path(("hook_" + tag + ".json").c_str()), "--out",
               scratch.path(("hook_" + tag + ".mp").c_str())}).code == 0);
    CHECK(run({"eval", "--pred", scratch.path(("hook_" + tag + ".csv").c_str()), "--meas",
               scratch.path(("hook_" + tag + ".csv").c_str()), "--out",
               scratch.path(("hook_" + tag + "_report.csv").c_str())}).code == 0);
  }
  for (const char* ext : {".json", ".csv", ".mp", "_report.csv"}) {
    CHECK(read_file(scratch.path((std::string("hook_a") + ext).c_str())) ==
          read_file(scratch.path((std::string("hook_b") + ext).c_str())));
  }
}

TEST_CASE("file formats round-trip exactly") {
  Scratch scratch("roundtrip");

  // action program JSON
  const CliRun plan_run = run({"plan", "helix", "--segments", "10", "--dphi", "45"});
  const ActionProgram program = action_program_from_json(plan_run.out);
  const std::string json1 = action_program_to_json(program);
  CHECK(json1 == plan_run.out);
  CHECK(action_program_to_json(action_program_from_json(json1)) == json1);
  CHECK(program_fingerprint(action_program_from_json(json1)) == program_fingerprint(program));

  // centerline CSV
  write_file(scratch.path("h.json"), json1);
  CHECK(run({"shape", scratch.path("h.json"), "--out", scratch.path("h.csv")}).code == 0);
  const std::string csv = read_file(scratch.path("h.csv"));
  CHECK(centerline_to_csv(centerline_from_csv(csv)) == csv);

  // machine program text
  CHECK(run({"compile", scratch.path("h.json"), "--out", scratch.path("h.mp")}).code == 0);
  const std::string mp_text = read_file(scratch.path("h.mp"));
  CHECK(print_machine_program(parse_machine_program(mp_text)) == mp_text);

  // config JSON
  const std::string cfg_text = config_to_json(default_config());
  CHECK(config_to_json(config_from_json(cfg_text)) == cfg_text);
}

TEST_CASE("simulate rejects a tampered program with exit code 3") {
  Scratch scratch("fault");
  CHECK(run({"plan", "c", "--segments", "3", "--out", scratch.path("c.json")}).code == 0);
  CHECK(run({"compile", scratch.path("c.json"), "--out", scratch.path("c.mp")}).code == 0);

  // Splice a feed in right after the stabilizer closes.
  std::string text = read_file(scratch.path("c.mp"));
  const size_t pos = text.find("STAB CLOSE\n");
  REQUIRE(pos != std::string::npos);
  text.insert(pos + std::string("STAB CLOSE\n").size(), "CARRIAGE CLOSE 0\nFEED 100\n");
  write_file(scratch.path("tampered.mp"), text);

  const CliRun r = run({"simulate", scratch.path("tampered.mp")});
  CHECK(r.code == 3);
  CHECK(r.err.find("feed-requires-stabilizer-open") != std::string::npos);
}

TEST_CASE("parse failures exit with code 2 and a location") {
  Scratch scratch("badparse");
  write_file(scratch.path("bad.json"), "{ not json");
  const CliRun r = run({"shape", scratch.path("bad.json")});
  CHECK(r.code == 2);
  CHECK(r.err.find("error:") != std::string::npos);

  write_file(scratch.path("bad.csv"), "k,x_mm,y_mm,z_mm\n0,0,0,zero\n");
  const CliRun r2 = run({"fit", scratch.path("bad.csv")});
  CHECK(r2.code == 2);
  CHECK(r2.err.find("line 2") != std::string::npos);

  const CliRun r3 = run({"frobnicate"});
  CHECK(r3.code == 2);
}

TEST_CASE("remaining flag wiring: custom plans, arc mode, roll alignment, planar errors") {
  Scratch scratch("flags");
  const CliRun custom = run({"plan", "custom", "--steps", "0:on,45:on,90:off", "--out",
                             scratch.path("custom.json")});
  CHECK(custom.code == 0);
  const ActionProgram pc = action_program_from_json(read_file(scratch.path("custom.json")));
  REQUIRE(pc.steps.size() == 3);
  CHECK(rad2deg(pc.steps[1].phi_rad) == doctest::Approx(45.0).epsilon(1e-12));
  CHECK_FALSE(pc.steps[2].pinch);
  CHECK(run({"plan", "custom", "--steps", "0:sideways"}).code == 2);

  CHECK(run({"shape", scratch.path("custom.json"), "--mode", "arc", "--out",
             scratch.path("custom_arc.csv")}).code == 0);
  CHECK(run({"shape", scratch.path("custom.json"), "--out", scratch.path("custom_rigid.csv")})
            .code == 0);
  const Centerline arc = centerline_from_csv(read_file(scratch.path("custom_arc.csv")));
  const Centerline rigid = centerline_from_csv(read_file(scratch.path("custom_rigid.csv")));
  CHECK((arc.points.back() - rigid.points.back()).norm() > 1e-6);  // modes differ

  // A rolled copy evaluates clean only with roll alignment.
  Centerline rolled = rigid;
  for (Vec3& p : rolled.points) p = rot_z(deg2rad(25.0)) * p;
  write_file(scratch.path("rolled.csv"), centerline_to_csv(rolled));
  const CliRun base = run({"eval", "--pred", scratch.path("custom_rigid.csv"), "--meas",
                           scratch.path("rolled.csv"), "--out", scratch.path("r1.csv")});
  const CliRun with_roll =
      run({"eval", "--pred", scratch.path("custom_rigid.csv"), "--meas", scratch.path("rolled.csv"),
           "--align", "base-roll", "--out", scratch.path("r2.csv")});
  CHECK(base.code == 0);
  CHECK(with_roll.code == 0);
  const ErrorReport rep_base = report_from_csv(read_file(scratch.path("r1.csv")), WireSpec{});
  const ErrorReport rep_roll = report_from_csv(read_file(scratch.path("r2.csv")), WireSpec{});
  CHECK(rep_base.e_max_mm > 1e-3);
  CHECK(rep_roll.e_max_mm < 1e-9);

  // Planar errors ignore an out-of-plane shift of a planar prediction.
  CHECK(run({"plan", "c", "--segments", "10", "--out", scratch.path("c.json")}).code == 0);
  CHECK(run({"shape", scratch.path("c.json"), "--out", scratch.path("c.csv")}).code == 0);
  Centerline lifted = centerline_from_csv(read_file(scratch.path("c.csv")));
  for (size_t i = 0; i < lifted.points.size(); ++i) lifted.points[i] += Vec3(0.3, 0, 0);
  write_file(scratch.path("lifted.csv"), centerline_to_csv(lifted));
  CHECK(run({"eval", "--pred", scratch.path("c.csv"), "--meas", scratch.path("lifted.csv"), "--2d",
             "--out", scratch.path("r3.csv")}).code == 0);
  const ErrorReport rep_2d = report_from_csv(read_file(scratch.path("r3.csv")), WireSpec{});
  CHECK(rep_2d.e_max_mm < 1e-9);
}

TEST_CASE("eval aggregates per-shape reports") {
  Scratch scratch("aggregate");
  // Synthesize four reports whose means are the reference per-shape errors.
  const std::vector<std::pair<std::string, double>> shapes = {
      {"c", 0.33}, {"s", 0.70}, {"angled", 0.61}, {"hook", 0.59}};
  std::vector<std::string> args = {"eval", "--aggregate"};
  for (const auto& [label, mean] : shapes) {
    std::ostringstream csv;
    csv << "shape,k,e_mm,e_pct\n";
    csv << label << ",1," << fmt_double(mean) << ",0\n";
    const std::string path = scratch.path((label + ".csv").c_str());
    write_file(path, csv.str());
    args.push_back(path);
  }
  const CliRun r = run(args);
  CHECK(r.code == 0);
  CHECK(r.out.find("mean-of-means 0.56 mm") != std::string::npos);
}
