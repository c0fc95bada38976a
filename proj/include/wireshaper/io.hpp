// File formats and project configuration.
//
// Action programs and configs are JSON with explicit units in the key names.
// Angles carry a human-readable degree field plus a canonical radian field;
// writers emit both, readers prefer the radian value and fall back to
// degrees for hand-written files. All writers are deterministic: identical
// values produce identical bytes.

#pragma once

#include "wireshaper/eval.hpp"
#include "wireshaper/machine.hpp"
#include "wireshaper/wire_model.hpp"

#include <string>
#include <vector>

namespace wireshaper {

struct ProjectConfig {
  WireSpec wire;
  BendLaw bend_law;
  MachineLimits machine;
};

/// Reference configuration: the 0.64 mm spring guidewire with a 20 mm
/// shapeable tip discretized into ten 2 mm segments, and the bench robot's
/// stock drive resolutions. The bend law holds the wire's calibrated
/// characteristic angle at the nominal pinch command.
ProjectConfig default_config();

// Shortest decimal representation that parses back to the same double.
std::string fmt_double(double value);

std::string action_program_to_json(const ActionProgram& program);
ActionProgram action_program_from_json(const std::string& text);

std::string config_to_json(const ProjectConfig& config);
ProjectConfig config_from_json(const std::string& text);

// Centerline CSV: header `k,x_mm,y_mm,z_mm`, base joint first.
std::string centerline_to_csv(const Centerline& centerline);
Centerline centerline_from_csv(const std::string& text);

// Error report CSV: header `shape,k,e_mm,e_pct`, one row per joint (k >= 1).
std::string report_to_csv(const ErrorReport& report);
ErrorReport report_from_csv(const std::string& text, const WireSpec& wire);

/// One chord measurement per line, millimeters; blank lines and `#` comments
/// are skipped.
std::vector<double> parse_chords(const std::string& text);

/// Standalone SVG overlaying the two centerlines in the prediction's bending
/// plane, with one error whisker per joint (base joint excluded).
std::string overlay_svg(const Centerline& predicted, const Centerline& measured);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace wireshaper
