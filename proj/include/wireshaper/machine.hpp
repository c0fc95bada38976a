// Low-level actuator view of a shaping run: compiling action programs into
// quantized machine commands, replaying them with interlock checking, and
// recovering the achieved (quantized) program from a replay trace.
//
// Each pinched action step expands to the six-phase shaping cycle:
//   (i)   open the stabilizer and the shaping carriage
//   (ii)  roll the drive nozzle to the step's absolute angle
//   (iii) close the stabilizer
//   (iv)  close the carriage jaws to beta and bend-advance
//   (v)   open the jaws, retract the carriage, open the stabilizer
//   (vi)  close the jaws to grip, feed one segment, reopen, home
// Unpinched steps run the same cycle with the bend phase (iv/v retract)
// omitted.
//
// Text format: one command per line, uppercase mnemonics with integer
// arguments (stepper steps and stage increments); the jaw command carries the
// un-quantized beta. `#` starts a comment; `# limits:` and `# provenance:`
// are structured headers restored by the parser, so parse/print round-trips
// are bit-exact.

#pragma once

#include "wireshaper/wire_model.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wireshaper {

struct MachineLimits {
  double stepper_step_deg = 1.8;     // roll motor, degrees per full step
  double roll_reduction = 3.0;       // nozzle gear reduction (nozzle : motor)
  double stage_resolution_mm = 0.003;
  double stage_travel_mm = 100.0;
  int microstepping = 1;

  void validate() const;
  double roll_resolution_deg() const {
    return stepper_step_deg / (roll_reduction * microstepping);
  }
};

struct MachineCommand {
  enum class Kind {
    StabOpen,
    StabClose,
    CarriageOpen,
    CarriageClose,  // beta argument
    Roll,           // signed stepper steps, relative
    Feed,           // signed stage increments
    BendAdvance,    // signed stage increments
    Home
  };

  Kind kind = Kind::StabOpen;
  long long arg = 0;
  double beta = 0.0;

  static MachineCommand stab_open() { return {Kind::StabOpen, 0, 0.0}; }
  static MachineCommand stab_close() { return {Kind::StabClose, 0, 0.0}; }
  static MachineCommand carriage_open() { return {Kind::CarriageOpen, 0, 0.0}; }
  static MachineCommand carriage_close(double beta) { return {Kind::CarriageClose, 0, beta}; }
  static MachineCommand roll(long long steps) { return {Kind::Roll, steps, 0.0}; }
  static MachineCommand feed(long long increments) { return {Kind::Feed, increments, 0.0}; }
  static MachineCommand bend_advance(long long increments) {
    return {Kind::BendAdvance, increments, 0.0};
  }
  static MachineCommand home() { return {Kind::Home, 0, 0.0}; }

  bool operator==(const MachineCommand&) const = default;
};

struct MachineProgram {
  std::vector<MachineCommand> commands;
  MachineLimits limits;
  std::string provenance;  // fingerprint of the source action program
};

struct StepResidual {
  int k = 0;
  double roll_residual_deg = 0.0;  // commanded minus achieved
  double feed_residual_mm = 0.0;
};

struct CompileResult {
  MachineProgram program;
  std::vector<StepResidual> residuals;
};

/// Expands an action program into the quantized command sequence. Rolls are
/// quantized to the nearest achievable absolute step count, feeds to the
/// nearest stage increment; per-step residuals are returned alongside.
/// Throws when a step's travel exceeds the stage, naming the step.
CompileResult compile_program(const ActionProgram& program, const MachineLimits& limits);

struct Violation {
  size_t command_index = 0;
  std::string rule;
};

class SimulationFault : public std::runtime_error {
 public:
  SimulationFault(size_t command_index, std::string rule);
  size_t command_index() const { return command_index_; }
  const std::string& rule() const { return rule_; }

 private:
  size_t command_index_;
  std::string rule_;
};

struct TraceEntry {
  size_t command_index = 0;
  double nozzle_angle_deg = 0.0;
  bool stabilizer_closed = false;
  bool carriage_closed = false;
  double carriage_position_mm = 0.0;
};

struct ActuatorTrace {
  std::vector<TraceEntry> states;           // one entry per executed command
  std::vector<ActionStep> achieved_steps;   // quantized program, one per feed
};

/// Deterministic replay. Throws SimulationFault on the first interlock
/// violation:
///   roll-requires-stabilizer-open
///   bend-advance-requires-stabilizer-closed
///   feed-requires-stabilizer-open
///   feed-requires-carriage-closed
///   stage-travel-exceeded
ActuatorTrace simulate(const MachineProgram& program);

/// Static interlock check; collects every violation instead of throwing.
/// Empty result iff simulate() succeeds.
std::vector<Violation> validate_program(const MachineProgram& program);

/// Achieved program recovered from a replay trace, attached to a wire spec.
ActionProgram achieved_program(const ActuatorTrace& trace, const WireSpec& wire);

std::string print_machine_program(const MachineProgram& program);
MachineProgram parse_machine_program(const std::string& text);

}  // namespace wireshaper
