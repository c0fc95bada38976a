#include "wireshaper/machine.hpp"

#include "wireshaper/geometry.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace wireshaper {

namespace {

std::string shortest_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

void MachineLimits::validate() const {
  if (!(stepper_step_deg > 0.0) || !(roll_reduction > 0.0) || !(stage_resolution_mm > 0.0) ||
      !(stage_travel_mm > 0.0) || microstepping < 1) {
    throw std::invalid_argument("machine limits: all parameters must be positive");
  }
}

SimulationFault::SimulationFault(size_t command_index, std::string rule)
    : std::runtime_error("simulation fault at command " + std::to_string(command_index) + ": " +
                         rule),
      command_index_(command_index),
      rule_(std::move(rule)) {}

CompileResult compile_program(const ActionProgram& program, const MachineLimits& limits) {
  program.validate();
  limits.validate();

  const double roll_res = limits.roll_resolution_deg();
  const double stage_res = limits.stage_resolution_mm;

  CompileResult result;
  result.program.limits = limits;
  result.program.provenance = program_fingerprint(program);
  auto& cmds = result.program.commands;

  long long nozzle_steps = 0;
  for (const ActionStep& step : program.steps) {
    if (step.delta_mm > limits.stage_travel_mm) {
      std::ostringstream os;
      os << "compile: step " << step.k << ": advance of " << step.delta_mm
         << " mm exceeds stage travel " << limits.stage_travel_mm << " mm";
      throw std::invalid_argument(os.str());
    }
    const double phi_deg = rad2deg(step.phi_rad);
    const long long target_steps = std::llround(phi_deg / roll_res);
    const long long stroke = std::llround(step.delta_mm / stage_res);

    StepResidual residual;
    residual.k = step.k;
    residual.roll_residual_deg = phi_deg - static_cast<double>(target_steps) * roll_res;
    residual.feed_residual_mm = step.delta_mm - static_cast<double>(stroke) * stage_res;
    result.residuals.push_back(residual);

    // (i) release everything
    cmds.push_back(MachineCommand::stab_open());
    cmds.push_back(MachineCommand::carriage_open());
    // (ii) roll to the commanded bending plane
    cmds.push_back(MachineCommand::roll(target_steps - nozzle_steps));
    nozzle_steps = target_steps;
    // (iii) hold the shaft
    cmds.push_back(MachineCommand::stab_close());
    if (step.pinch) {
      // (iv) pinch and bend
      cmds.push_back(MachineCommand::carriage_close(step.beta));
      cmds.push_back(MachineCommand::bend_advance(stroke));
      // (v) release the bend and free the shaft
      cmds.push_back(MachineCommand::carriage_open());
      cmds.push_back(MachineCommand::bend_advance(-stroke));
      cmds.push_back(MachineCommand::stab_open());
    } else {
      // (v) nothing was pinched; just free the shaft
      cmds.push_back(MachineCommand::stab_open());
    }
    // (vi) grip the wire, feed the next segment, reopen and rehome
    cmds.push_back(MachineCommand::carriage_close(0.0));
    cmds.push_back(MachineCommand::feed(stroke));
    cmds.push_back(MachineCommand::carriage_open());
    cmds.push_back(MachineCommand::home());
  }
  return result;
}

namespace {

// Shared replay core for simulate() and validate_program().
ActuatorTrace replay(const MachineProgram& program,
                     const std::function<void(size_t, const char*)>& report) {
  program.limits.validate();
  const double roll_res = program.limits.roll_resolution_deg();
  const double stage_res = program.limits.stage_resolution_mm;
  const long long travel_incr =
      static_cast<long long>(std::floor(program.limits.stage_travel_mm / stage_res + 1e-9));

  ActuatorTrace trace;
  trace.states.reserve(program.commands.size());

  bool stab_closed = false;
  bool carriage_closed = false;
  long long position = 0;
  long long nozzle_steps = 0;

  double pending_beta = 0.0;
  bool cycle_pinched = false;
  double cycle_beta = 0.0;
  int achieved_k = 0;

  for (size_t i = 0; i < program.commands.size(); ++i) {
    const MachineCommand& cmd = program.commands[i];
    switch (cmd.kind) {
      case MachineCommand::Kind::StabOpen:
        stab_closed = false;
        break;
      case MachineCommand::Kind::StabClose:
        stab_closed = true;
        break;
      case MachineCommand::Kind::CarriageOpen:
        carriage_closed = false;
        break;
      case MachineCommand::Kind::CarriageClose:
        carriage_closed = true;
        pending_beta = cmd.beta;
        break;
      case MachineCommand::Kind::Roll:
        if (stab_closed) report(i, "roll-requires-stabilizer-open");
        nozzle_steps += cmd.arg;
        break;
      case MachineCommand::Kind::BendAdvance:
        if (!stab_closed) report(i, "bend-advance-requires-stabilizer-closed");
        position += cmd.arg;
        if (position < 0 || position > travel_incr) report(i, "stage-travel-exceeded");
        if (cmd.arg > 0) {
          cycle_pinched = true;
          cycle_beta = pending_beta;
        }
        break;
      case MachineCommand::Kind::Feed: {
        if (stab_closed) report(i, "feed-requires-stabilizer-open");
        if (!carriage_closed) report(i, "feed-requires-carriage-closed");
        position += cmd.arg;
        if (position < 0 || position > travel_incr) report(i, "stage-travel-exceeded");
        ActionStep step;
        step.k = ++achieved_k;
        step.phi_rad = deg2rad(static_cast<double>(nozzle_steps) * roll_res);
        step.pinch = cycle_pinched;
        step.beta = cycle_pinched ? cycle_beta : 0.0;
        step.delta_mm = static_cast<double>(cmd.arg) * stage_res;
        trace.achieved_steps.push_back(step);
        cycle_pinched = false;
        break;
      }
      case MachineCommand::Kind::Home:
        position = 0;
        break;
    }
    TraceEntry entry;
    entry.command_index = i;
    entry.nozzle_angle_deg = static_cast<double>(nozzle_steps) * roll_res;
    entry.stabilizer_closed = stab_closed;
    entry.carriage_closed = carriage_closed;
    entry.carriage_position_mm = static_cast<double>(position) * stage_res;
    trace.states.push_back(entry);
  }
  return trace;
}

}  // namespace

ActuatorTrace simulate(const MachineProgram& program) {
  return replay(program, [](size_t index, const char* rule) {
    throw SimulationFault(index, rule);
  });
}

std::vector<Violation> validate_program(const MachineProgram& program) {
  std::vector<Violation> violations;
  replay(program, [&](size_t index, const char* rule) {
    violations.push_back({index, rule});
  });
  return violations;
}

ActionProgram achieved_program(const ActuatorTrace& trace, const WireSpec& wire) {
  ActionProgram program;
  program.wire = wire;
  program.steps = trace.achieved_steps;
  program.validate();
  return program;
}

std::string print_machine_program(const MachineProgram& program) {
  std::ostringstream os;
  os << "# wireshaper machine program v1\n";
  os << "# limits: stepper_step_deg=" << shortest_double(program.limits.stepper_step_deg)
     << " roll_reduction=" << shortest_double(program.limits.roll_reduction)
     << " stage_resolution_mm=" << shortest_double(program.limits.stage_resolution_mm)
     << " stage_travel_mm=" << shortest_double(program.limits.stage_travel_mm)
     << " microstepping=" << program.limits.microstepping << "\n";
  if (!program.provenance.empty()) {
    os << "# provenance: " << program.provenance << "\n";
  }
  for (const MachineCommand& cmd : program.commands) {
    switch (cmd.kind) {
      case MachineCommand::Kind::StabOpen: os << "STAB OPEN\n"; break;
      case MachineCommand::Kind::StabClose: os << "STAB CLOSE\n"; break;
      case MachineCommand::Kind::CarriageOpen: os << "CARRIAGE OPEN\n"; break;
      case MachineCommand::Kind::CarriageClose:
        os << "CARRIAGE CLOSE " << shortest_double(cmd.beta) << "\n";
        break;
      case MachineCommand::Kind::Roll: os << "ROLL " << cmd.arg << "\n"; break;
      case MachineCommand::Kind::Feed: os << "FEED " << cmd.arg << "\n"; break;
      case MachineCommand::Kind::BendAdvance: os << "BEND ADVANCE " << cmd.arg << "\n"; break;
      case MachineCommand::Kind::Home: os << "HOME\n"; break;
    }
  }
  return os.str();
}

namespace {

[[noreturn]] void parse_fail(size_t line_no, const std::string& message) {
  throw std::invalid_argument("machine program line " + std::to_string(line_no) + ": " + message);
}

double parse_double_token(const std::string& token, size_t line_no) {
  double value = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    parse_fail(line_no, "bad numeric argument '" + token + "'");
  }
  return value;
}

long long parse_int_token(const std::string& token, size_t line_no) {
  long long value = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    parse_fail(line_no, "bad integer argument '" + token + "'");
  }
  return value;
}

void parse_limits_header(const std::string& body, MachineLimits& limits, size_t line_no) {
  std::istringstream is(body);
  std::string pair;
  while (is >> pair) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos) parse_fail(line_no, "bad limits entry '" + pair + "'");
    const std::string key = pair.substr(0, eq);
    const std::string value = pair.substr(eq + 1);
    if (key == "stepper_step_deg") limits.stepper_step_deg = parse_double_token(value, line_no);
    else if (key == "roll_reduction") limits.roll_reduction = parse_double_token(value, line_no);
    else if (key == "stage_resolution_mm") limits.stage_resolution_mm = parse_double_token(value, line_no);
    else if (key == "stage_travel_mm") limits.stage_travel_mm = parse_double_token(value, line_no);
    else if (key == "microstepping") limits.microstepping = static_cast<int>(parse_int_token(value, line_no));
    else parse_fail(line_no, "unknown limits key '" + key + "'");
  }
}

}  // namespace

MachineProgram parse_machine_program(const std::string& text) {
  MachineProgram program;
  std::istringstream is(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# limits:", 0) == 0) {
        parse_limits_header(line.substr(9), program.limits, line_no);
      } else if (line.rfind("# provenance:", 0) == 0) {
        std::string p = line.substr(13);
        const auto first = p.find_first_not_of(' ');
        program.provenance = first == std::string::npos ? "" : p.substr(first);
      }
      continue;
    }
    std::istringstream ls(line);
    std::string word;
    std::vector<std::string> tokens;
    while (ls >> word) tokens.push_back(word);
    if (tokens.empty()) continue;

    const std::string& head = tokens[0];
    auto expect_tokens = [&](size_t count) {
      if (tokens.size() != count) parse_fail(line_no, "wrong argument count for '" + head + "'");
    };
    if (head == "STAB") {
      expect_tokens(2);
      if (tokens[1] == "OPEN") program.commands.push_back(MachineCommand::stab_open());
      else if (tokens[1] == "CLOSE") program.commands.push_back(MachineCommand::stab_close());
      else parse_fail(line_no, "unknown stabilizer state '" + tokens[1] + "'");
    } else if (head == "CARRIAGE") {
      if (tokens.size() == 2 && tokens[1] == "OPEN") {
        program.commands.push_back(MachineCommand::carriage_open());
      } else if (tokens.size() == 3 && tokens[1] == "CLOSE") {
        program.commands.push_back(MachineCommand::carriage_close(parse_double_token(tokens[2], line_no)));
      } else {
        parse_fail(line_no, "bad carriage command");
      }
    } else if (head == "ROLL") {
      expect_tokens(2);
      program.commands.push_back(MachineCommand::roll(parse_int_token(tokens[1], line_no)));
    } else if (head == "FEED") {
      expect_tokens(2);
      program.commands.push_back(MachineCommand::feed(parse_int_token(tokens[1], line_no)));
    } else if (head == "BEND") {
      expect_tokens(3);
      if (tokens[1] != "ADVANCE") parse_fail(line_no, "unknown command 'BEND " + tokens[1] + "'");
      program.commands.push_back(MachineCommand::bend_advance(parse_int_token(tokens[2], line_no)));
    } else if (head == "HOME") {
      expect_tokens(1);
      program.commands.push_back(MachineCommand::home());
    } else {
      parse_fail(line_no, "unknown command '" + head + "'");
    }
  }
  program.limits.validate();
  return program;
}

}  // namespace wireshaper
