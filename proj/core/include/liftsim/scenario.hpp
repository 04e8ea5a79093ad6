#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "liftsim/retargeting.hpp"
#include "liftsim/simulation.hpp"

namespace liftsim::harness {

struct Knot {
  double t = 0.0;
  double value = 0.0;
  bool operator==(const Knot&) const = default;
};

// Piecewise cubic through knots: each segment is a smoothstep between the
// neighbouring values, so the rate vanishes at every knot. Constant before
// the first and after the last knot; `fallback` when there are no knots.
struct Profile {
  std::vector<Knot> knots;
  double fallback = 0.0;

  double value(double t) const;
  double rate(double t) const;
  // The fallback only matters without knots.
  bool operator==(const Profile& other) const;
};

struct SwitchKnot {
  double t = 0.0;
  bool value = false;
  bool operator==(const SwitchKnot&) const = default;
};

// Step function: the value of the latest knot at or before t, else false.
struct Switch {
  std::vector<SwitchKnot> knots;

  bool value(double t) const;
  bool operator==(const Switch&) const = default;
};

struct PilotScript {
  Profile theta_H;
  Profile h_H{{}, 1.0};
  Profile p_H;
  Profile phi_1;
  Profile phi_2;
  Switch grasp;
  Switch comp;

  // Samples the script; thetadot_H is the analytic profile rate.
  retarget::HumanState sample(double t, retarget::ControlMode mode) const;
  bool operator==(const PilotScript&) const = default;
};

struct ModeSwitch {
  double t = 0.0;
  retarget::ControlMode mode = retarget::ControlMode::DcmAuto;
  bool operator==(const ModeSwitch&) const = default;
};

// Rectangular horizontal force pulse at the end effector.
struct Push {
  double start = 0.0;
  double duration = 0.0;
  double force = 0.0;  // [N]
  bool operator==(const Push&) const = default;
};

struct Scenario {
  std::string name;
  std::string description;
  double duration = 5.0;  // [s]
  bool must_not_fall = false;
  std::optional<double> target_x;  // reposition goal for metrics [m]
  double settle_tolerance = 0.01;  // [rad]
  SimulationSetup sim;
  std::vector<ModeSwitch> modes;  // after t = 0; sim.initial_mode applies first
  PilotScript pilot;
  std::vector<Push> pushes;

  retarget::ControlMode mode_at(double t) const;
  retarget::HumanState human_at(double t) const;
  double external_force(double t) const;
  std::size_t tick_count() const;

  // Throws ConfigError.
  void validate() const;
  bool operator==(const Scenario&) const = default;
};

// Parses the YAML scenario format. Throws ParseError with the line and the
// dotted field path on unknown fields, wrong types or invalid values.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

// Dotted-path overrides ("robot.m_R" = "12.5") applied to the document
// before parsing.
Scenario parse_scenario(const std::string& text,
                        const std::vector<std::pair<std::string, std::string>>& overrides);

std::string emit_scenario(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

}  // namespace liftsim::harness
