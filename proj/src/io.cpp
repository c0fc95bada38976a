#include "wireshaper/io.hpp"

#include "wireshaper/geometry.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wireshaper {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;

[[noreturn]] void format_fail(const std::string& what) { throw std::invalid_argument(what); }

double require_number(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    format_fail(std::string("missing or non-numeric field '") + key + "'");
  }
  return j[key].get<double>();
}

int require_int(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    format_fail(std::string("missing or non-integer field '") + key + "'");
  }
  return j[key].get<int>();
}

/// Angle field with a canonical radian key and a derived degree key.
double read_angle(const ordered_json& j, const std::string& name) {
  const std::string rad_key = name + "_rad";
  const std::string deg_key = name + "_deg";
  if (j.contains(rad_key)) {
    if (!j[rad_key].is_number()) format_fail("non-numeric field '" + rad_key + "'");
    return j[rad_key].get<double>();
  }
  if (j.contains(deg_key)) {
    if (!j[deg_key].is_number()) format_fail("non-numeric field '" + deg_key + "'");
    return deg2rad(j[deg_key].get<double>());
  }
  format_fail("missing angle field '" + deg_key + "'");
}

void write_angle(ordered_json& j, const std::string& name, double rad) {
  j[name + "_deg"] = rad2deg(rad);
  j[name + "_rad"] = rad;
}

ordered_json wire_to_json(const WireSpec& wire) {
  ordered_json j;
  j["diameter_mm"] = wire.diameter_mm;
  j["shapeable_length_mm"] = wire.shapeable_length_mm;
  j["total_length_mm"] = wire.total_length_mm;
  j["segment_length_mm"] = wire.segment_length_mm;
  j["segments"] = wire.segments;
  return j;
}

WireSpec wire_from_json(const ordered_json& j) {
  WireSpec wire;
  wire.diameter_mm = require_number(j, "diameter_mm");
  wire.shapeable_length_mm = require_number(j, "shapeable_length_mm");
  wire.total_length_mm = require_number(j, "total_length_mm");
  wire.segment_length_mm = require_number(j, "segment_length_mm");
  wire.segments = require_int(j, "segments");
  wire.validate();
  return wire;
}

ordered_json parse_json(const std::string& text) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    format_fail(std::string("invalid JSON: ") + e.what());
  }
}

void check_kind(const ordered_json& j, const char* kind) {
  if (require_int(j, "schema_version") != kSchemaVersion) format_fail("unsupported schema version");
  if (!j.contains("kind") || j["kind"] != kind) {
    format_fail(std::string("expected a '") + kind + "' document");
  }
}

}  // namespace

ProjectConfig default_config() {
  ProjectConfig config;
  config.wire = WireSpec{};
  config.bend_law.entries = {{0.8, 0.12676733707782939}};
  config.machine = MachineLimits{};
  return config;
}

std::string fmt_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string action_program_to_json(const ActionProgram& program) {
  program.validate();
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "action_program";
  j["wire"] = wire_to_json(program.wire);
  ordered_json steps = ordered_json::array();
  for (const ActionStep& s : program.steps) {
    ordered_json js;
    js["k"] = s.k;
    write_angle(js, "phi", s.phi_rad);
    js["pinch"] = s.pinch;
    js["beta"] = s.beta;
    js["delta_mm"] = s.delta_mm;
    steps.push_back(js);
  }
  j["steps"] = steps;
  return j.dump(2) + "\n";
}

ActionProgram action_program_from_json(const std::string& text) {
  const ordered_json j = parse_json(text);
  check_kind(j, "action_program");
  ActionProgram program;
  program.wire = wire_from_json(j.at("wire"));
  if (!j.contains("steps") || !j["steps"].is_array()) format_fail("missing 'steps' array");
  for (const auto& js : j["steps"]) {
    ActionStep s;
    s.k = require_int(js, "k");
    s.phi_rad = read_angle(js, "phi");
    if (!js.contains("pinch") || !js["pinch"].is_boolean()) format_fail("missing 'pinch' flag");
    s.pinch = js["pinch"].get<bool>();
    s.beta = require_number(js, "beta");
    s.delta_mm = require_number(js, "delta_mm");
    program.steps.push_back(s);
  }
  program.validate();
  return program;
}

std::string config_to_json(const ProjectConfig& config) {
  config.wire.validate();
  config.bend_law.validate();
  config.machine.validate();
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "wireshaper_config";
  j["wire"] = wire_to_json(config.wire);
  ordered_json entries = ordered_json::array();
  for (const BendLawEntry& e : config.bend_law.entries) {
    ordered_json je;
    je["beta"] = e.beta;
    write_angle(je, "theta", e.theta_rad);
    entries.push_back(je);
  }
  j["bend_law"]["entries"] = entries;
  ordered_json jm;
  jm["stepper_step_deg"] = config.machine.stepper_step_deg;
  jm["roll_reduction"] = config.machine.roll_reduction;
  jm["stage_resolution_mm"] = config.machine.stage_resolution_mm;
  jm["stage_travel_mm"] = config.machine.stage_travel_mm;
  jm["microstepping"] = config.machine.microstepping;
  j["machine"] = jm;
  return j.dump(2) + "\n";
}

ProjectConfig config_from_json(const std::string& text) {
  const ordered_json j = parse_json(text);
  check_kind(j, "wireshaper_config");
  ProjectConfig config;
  config.wire = wire_from_json(j.at("wire"));
  if (!j.contains("bend_law") || !j["bend_law"].contains("entries")) {
    format_fail("missing 'bend_law.entries'");
  }
  config.bend_law.entries.clear();
  for (const auto& je : j["bend_law"]["entries"]) {
    BendLawEntry e;
    e.beta = require_number(je, "beta");
    e.theta_rad = read_angle(je, "theta");
    config.bend_law.entries.push_back(e);
  }
  const auto& jm = j.at("machine");
  config.machine.stepper_step_deg = require_number(jm, "stepper_step_deg");
  config.machine.roll_reduction = require_number(jm, "roll_reduction");
  config.machine.stage_resolution_mm = require_number(jm, "stage_resolution_mm");
  config.machine.stage_travel_mm = require_number(jm, "stage_travel_mm");
  config.machine.microstepping = require_int(jm, "microstepping");
  config.bend_law.validate();
  config.machine.validate();
  return config;
}

std::string centerline_to_csv(const Centerline& centerline) {
  std::ostringstream os;
  os << "k,x_mm,y_mm,z_mm\n";
  for (size_t k = 0; k < centerline.points.size(); ++k) {
    const Vec3& p = centerline.points[k];
    os << k << ',' << fmt_double(p.x()) << ',' << fmt_double(p.y()) << ',' << fmt_double(p.z())
       << '\n';
  }
  return os.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  return fields;
}

double parse_csv_double(const std::string& token, size_t line_no, size_t col) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    std::ostringstream os;
    os << "csv line " << line_no << ", column " << col << ": bad number '" << token << "'";
    throw std::invalid_argument(os.str());
  }
  return value;
}

}  // namespace

Centerline centerline_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  size_t line_no = 0;
  Centerline out;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "k,x_mm,y_mm,z_mm") {
        throw std::invalid_argument("csv line 1: expected header 'k,x_mm,y_mm,z_mm'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      throw std::invalid_argument("csv line " + std::to_string(line_no) + ": expected 4 columns");
    }
    out.points.emplace_back(parse_csv_double(fields[1], line_no, 2),
                            parse_csv_double(fields[2], line_no, 3),
                            parse_csv_double(fields[3], line_no, 4));
  }
  if (out.points.size() < 2) throw std::invalid_argument("csv: centerline needs at least 2 points");
  return out;
}

std::string report_to_csv(const ErrorReport& report) {
  std::ostringstream os;
  os << "shape,k,e_mm,e_pct\n";
  for (size_t i = 0; i < report.per_segment_mm.size(); ++i) {
    os << report.shape_label << ',' << (i + 1) << ',' << fmt_double(report.per_segment_mm[i])
       << ',' << fmt_double(report.percent_of_shapeable[i]) << '\n';
  }
  return os.str();
}

ErrorReport report_from_csv(const std::string& text, const WireSpec& wire) {
  std::istringstream is(text);
  std::string line;
  size_t line_no = 0;
  bool header_seen = false;
  std::string label;
  std::vector<double> errors;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "shape,k,e_mm,e_pct") {
        throw std::invalid_argument("csv line 1: expected header 'shape,k,e_mm,e_pct'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      throw std::invalid_argument("csv line " + std::to_string(line_no) + ": expected 4 columns");
    }
    if (label.empty()) label = fields[0];
    errors.push_back(parse_csv_double(fields[2], line_no, 3));
  }
  return summarize(errors, wire, label);
}

std::vector<double> parse_chords(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  size_t line_no = 0;
  std::vector<double> chords;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t");
    chords.push_back(parse_csv_double(line.substr(first, last - first + 1), line_no, 1));
  }
  if (chords.empty()) throw std::invalid_argument("chords file: no measurements found");
  return chords;
}

namespace {

std::string fmt_svg(double v) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof(buf), "%.3f", v);
  return std::string(buf, static_cast<size_t>(len));
}

// Least-squares plane normal of the prediction, matching the planar error
// projection so the overlay shows the same geometry the report measures.
Vec3 svg_plane_normal(const std::vector<Vec3>& points) {
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : points) {
    const Vec3 d = p - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> solver(cov);
  Vec3 normal = solver.eigenvectors().col(0);
  int imax = 0;
  normal.cwiseAbs().maxCoeff(&imax);
  if (normal[imax] < 0.0) normal = -normal;
  return normal;
}

}  // namespace

std::string overlay_svg(const Centerline& predicted, const Centerline& measured) {
  if (predicted.points.size() < 2 || measured.points.size() != predicted.points.size()) {
    throw std::invalid_argument("overlay_svg: curves must have equal point counts (>= 2)");
  }
  const Vec3 base = predicted.points.front();
  const Vec3 normal = svg_plane_normal(predicted.points);
  Vec3 axis_u = predicted.points[1] - base;
  axis_u -= normal * normal.dot(axis_u);
  if (axis_u.norm() < 1e-12) axis_u = (Vec3::UnitZ() - normal * normal.z()).normalized();
  axis_u.normalize();
  const Vec3 axis_v = normal.cross(axis_u);

  auto to_plane = [&](const Vec3& p) {
    const Vec3 d = p - base;
    return std::pair<double, double>{d.dot(axis_u), d.dot(axis_v)};
  };

  const double scale = 10.0;  // 1 mm = 10 svg units
  double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
  auto extend = [&](const std::vector<Vec3>& pts) {
    for (const Vec3& p : pts) {
      const auto [u, v] = to_plane(p);
      min_x = std::min(min_x, u); max_x = std::max(max_x, u);
      min_y = std::min(min_y, v); max_y = std::max(max_y, v);
    }
  };
  extend(predicted.points);
  extend(measured.points);
  const double margin = 2.0;
  const double w = (max_x - min_x + 2 * margin) * scale;
  const double h = (max_y - min_y + 2 * margin) * scale;
  auto sx = [&](double u) { return (u - min_x + margin) * scale; };
  auto sy = [&](double v) { return h - (v - min_y + margin) * scale; };

  auto polyline = [&](const std::vector<Vec3>& pts, const char* cls, const char* color) {
    std::ostringstream os;
    os << "  <polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"2\" points=\"";
    for (size_t i = 0; i < pts.size(); ++i) {
      const auto [u, v] = to_plane(pts[i]);
      if (i) os << ' ';
      os << fmt_svg(sx(u)) << ',' << fmt_svg(sy(v));
    }
    os << "\"/>\n";
    return os.str();
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << fmt_svg(w) << ' '
     << fmt_svg(h) << "\">\n";
  os << polyline(predicted.points, "predicted", "#1f77b4");
  os << polyline(measured.points, "measured", "#d62728");
  for (size_t k = 1; k < predicted.points.size(); ++k) {
    const auto [pu, pv] = to_plane(predicted.points[k]);
    const auto [mu, mv] = to_plane(measured.points[k]);
    os << "  <line class=\"whisker\" stroke=\"#555555\" stroke-width=\"1\" x1=\""
       << fmt_svg(sx(pu)) << "\" y1=\"" << fmt_svg(sy(pv)) << "\" x2=\"" << fmt_svg(sx(mu))
       << "\" y2=\"" << fmt_svg(sy(mv)) << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << contents;
  if (!out) throw std::invalid_argument("write failed: " + path);
}

}  // namespace wireshaper
