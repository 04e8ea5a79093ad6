#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "liftsim/controller.hpp"
#include "liftsim/scenario.hpp"
#include "liftsim/service/wire.hpp"
#include "liftsim/simulation.hpp"

namespace liftsim::service {

struct SessionConfig {
  double telemetry_hz = 50.0;
  double staleness_timeout = 0.5;  // [s] of simulation time
  double decay_tau = 0.2;          // [s]
  bool lockstep = false;
  int ticks_per_input = 10;        // lockstep: physics ticks per pilot_input
  std::filesystem::path scenario_dir;

  // Throws ConfigError.
  void validate(double dt) const;
};

// A server message before sequence numbering. Broadcast messages go to
// every connection, the rest only to the sender of the triggering message.
struct Outgoing {
  ServerPayload payload;
  bool broadcast = false;
};

// Checks that client sequence numbers strictly increase.
class SeqTracker {
 public:
  // False (and unchanged state) for a repeated or decreasing number.
  bool accept(std::uint64_t seq);

 private:
  std::optional<std::uint64_t> last_;
};

// One live simulation. Not thread-safe: the owning loop calls every member.
//
// Pilot input is sampled and held. Once no pilot_input has arrived for
// staleness_timeout, theta_H and p_H decay to 0 and h_H to its nominal
// value with time constant decay_tau; arm commands and triggers hold.
class Session {
 public:
  Session(harness::Scenario scenario, SessionConfig config);

  // Processes one message from the pilot connection.
  std::vector<Outgoing> handle(const ClientMessage& message);

  // Advances one physics tick unless paused (lockstep sessions advance only
  // on pilot input or explicit steps).
  std::vector<Outgoing> tick();
  std::vector<Outgoing> advance(int ticks);

  // With no clients left, the session pauses once the input goes stale.
  void set_client_count(int count);
  int client_count() const { return clients_; }

  StateSnapshot snapshot() const;
  retarget::HumanState effective_input() const;
  double time() const { return sim_->time(); }
  double last_input_time() const { return last_input_t_; }
  bool paused() const { return paused_; }
  const SessionConfig& config() const { return config_; }
  const harness::Scenario& scenario() const { return scenario_; }
  const Simulation& simulation() const { return *sim_; }
  int telemetry_decimation() const { return decimation_; }

 private:
  void reset();
  void load(harness::Scenario scenario);
  void step_once(std::vector<Outgoing>& out);

  harness::Scenario scenario_;
  SessionConfig config_;
  std::unique_ptr<Simulation> sim_;
  retarget::HumanState held_;
  bool held_has_rate_ = false;
  retarget::RateEstimator rate_;
  double last_input_t_ = 0.0;
  bool paused_ = false;
  int clients_ = 0;
  int decimation_ = 20;
  LogRecord last_record_;
  bool have_record_ = false;
};

// FNV-1a over the schedule's heights and gains (IEEE-754 bit patterns).
std::uint64_t schedule_checksum(const control::GainSchedule& schedule);

}  // namespace liftsim::service
