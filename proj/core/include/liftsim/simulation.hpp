#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "liftsim/controller.hpp"
#include "liftsim/log.hpp"
#include "liftsim/plant.hpp"
#include "liftsim/retargeting.hpp"

namespace liftsim {

struct PayloadSetup {
  double mass = 0.0;             // [kg], 0 means no object
  bool attached = false;         // start with the object in hand
  bool compensated = false;      // with attached: compensation latched from t = 0
  double object_x = 0.0;         // world x of the grasp point [m]
  double grasp_tolerance = 0.05; // [m]
  double estimate_scale = 1.0;   // controller's mass belief / true mass

  bool operator==(const PayloadSetup&) const = default;
};

struct NoiseConfig {
  double theta_std = 0.0;     // [rad]
  double thetadot_std = 0.0;  // [rad/s]

  bool enabled() const { return theta_std > 0.0 || thetadot_std > 0.0; }
  bool operator==(const NoiseConfig&) const = default;
};

struct SimulationSetup {
  RobotParams robot;
  retarget::HumanParams human;
  plant::PlantConfig plant;
  control::ControllerConfig controller;
  double dt = 0.001;
  double leg_activity_threshold = 1e-3;  // [m] |h_des - h_R| above which d_w is applied
  RobotState initial;
  retarget::ControlMode initial_mode = retarget::ControlMode::DcmAuto;
  PayloadSetup payload;
  NoiseConfig noise;
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void validate() const;
  bool operator==(const SimulationSetup&) const = default;
};

enum class EventKind { PayloadAttached, PayloadReleased, ModeChanged, CompensationLatched, Fell };

std::string_view to_string(EventKind kind);

struct Event {
  double t = 0.0;
  EventKind kind = EventKind::Fell;
  std::string detail;

  bool operator==(const Event&) const = default;
};

// Closed-loop plant + controller + retargeting, advanced one control tick at
// a time. The harness and the live service both drive this class, so their
// trajectories agree for identical inputs.
class Simulation {
 public:
  // Builds the gain schedule unless one is supplied.
  explicit Simulation(SimulationSetup setup,
                      std::shared_ptr<const control::GainSchedule> schedule = nullptr);

  // Records the state at the current time, then advances by dt.
  LogRecord tick(const retarget::HumanState& human, double F_ext_x = 0.0);

  void reset();

  double time() const { return static_cast<double>(ticks_) * setup_.dt; }
  std::uint64_t ticks() const { return ticks_; }
  const plant::PlantState& state() const { return state_; }
  const PayloadSpec& payload() const { return payload_; }
  double object_x() const { return object_x_; }
  bool fallen() const { return state_.fallen; }
  const SimulationSetup& setup() const { return setup_; }
  const control::GainSchedule& schedule() const { return *schedule_; }
  std::shared_ptr<const control::GainSchedule> shared_schedule() const { return schedule_; }
  const retarget::Retargeter& retargeter() const { return retargeter_; }
  const std::vector<Event>& events() const { return events_; }
  std::vector<Event> drain_events();

  void set_haptic_gain(double K_fb);

 private:
  double end_effector_world() const;

  SimulationSetup setup_;
  std::shared_ptr<const control::GainSchedule> schedule_;
  retarget::Retargeter retargeter_;
  retarget::Debouncer grasp_;
  plant::PlantState state_;
  PayloadSpec payload_;
  double object_x_ = 0.0;
  std::uint64_t ticks_ = 0;
  std::mt19937_64 rng_;
  std::vector<Event> events_;
  std::size_t drained_ = 0;
};

}  // namespace liftsim
