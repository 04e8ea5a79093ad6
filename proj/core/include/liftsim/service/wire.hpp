#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "liftsim/log.hpp"
#include "liftsim/retargeting.hpp"
#include "liftsim/simulation.hpp"

// JSON wire protocol. Every message is an envelope
//   {"type": <tag>, "seq": <uint>, "data": {...}}
// with SI units and radians throughout.
namespace liftsim::service {

// Schema violation. `field` is a JSON-pointer-like path ("data.theta_H").
class WireError : public std::runtime_error {
 public:
  WireError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Client -> server.

struct PilotInput {
  double theta_H = 0.0;
  double h_H = 1.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
  double p_H = 0.0;
  bool grasp = false;
  bool comp = false;
  std::optional<double> thetadot_H;  // estimated server-side when absent

  bool operator==(const PilotInput&) const = default;
};

struct SetMode {
  retarget::ControlMode mode = retarget::ControlMode::DcmAuto;
  bool operator==(const SetMode&) const = default;
};

struct SetGain {
  double K_fb = 1.0;
  bool operator==(const SetGain&) const = default;
};

enum class SimCommand { Pause, Resume, Reset, Step };

struct SimControl {
  SimCommand command = SimCommand::Pause;
  int ticks = 1;  // Step only
  bool operator==(const SimControl&) const = default;
};

struct LoadScenario {
  std::string name;
  bool operator==(const LoadScenario&) const = default;
};

using ClientPayload = std::variant<PilotInput, SetMode, SetGain, SimControl, LoadScenario>;

struct ClientMessage {
  std::uint64_t seq = 0;
  ClientPayload payload;
  bool operator==(const ClientMessage&) const = default;
};

// Server -> client.

struct StateSnapshot {
  std::uint64_t tick = 0;
  LogRecord record;
  bool paused = false;
  bool fallen = false;
  bool operator==(const StateSnapshot&) const = default;
};

struct EventNotice {
  Event event;
  bool operator==(const EventNotice&) const = default;
};

struct ErrorNotice {
  std::string message;
  std::string field;
  std::optional<std::uint64_t> ref_seq;
  bool operator==(const ErrorNotice&) const = default;
};

struct Ack {
  std::uint64_t ref_seq = 0;
  std::string type;
  bool operator==(const Ack&) const = default;
};

using ServerPayload = std::variant<StateSnapshot, EventNotice, ErrorNotice, Ack>;

struct ServerMessage {
  std::uint64_t seq = 0;
  ServerPayload payload;
  bool operator==(const ServerMessage&) const = default;
};

std::string_view type_name(const ClientPayload& payload);
std::string_view type_name(const ServerPayload& payload);

// Throw WireError. decode_client rejects unknown types, missing or unknown
// fields, wrong JSON types and non-finite numbers.
ClientMessage decode_client(std::string_view text);
ServerMessage decode_server(std::string_view text);

std::string encode(const ClientMessage& message);
std::string encode(const ServerMessage& message);

// Best-effort sequence number of a message that failed to decode.
std::optional<std::uint64_t> peek_seq(std::string_view text);

}  // namespace liftsim::service
