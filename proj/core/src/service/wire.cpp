#include "liftsim/service/wire.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

namespace liftsim::service {

using nlohmann::json;
using retarget::ControlMode;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string_view command_name(SimCommand c) {
  switch (c) {
    case SimCommand::Pause: return "pause";
    case SimCommand::Resume: return "resume";
    case SimCommand::Reset: return "reset";
    case SimCommand::Step: return "step";
  }
  return "?";
}

// Field access with path-qualified errors; finish() rejects leftovers.
class Reader {
 public:
  Reader(const json& object, std::string path) : j_(object), path_(std::move(path)) {
    if (!j_.is_object()) throw WireError(path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& require(const std::string& key) {
    const json* v = find(key);
    if (!v) throw WireError(at(key), "missing required field");
    return *v;
  }

  double number(const std::string& key) { return as_number(require(key), at(key)); }

  std::optional<double> optional_number(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    return as_number(*v, at(key));
  }

  bool boolean(const std::string& key) {
    const json& v = require(key);
    if (!v.is_boolean()) throw WireError(at(key), "expected a boolean");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = require(key);
    if (!v.is_string()) throw WireError(at(key), "expected a string");
    return v.get<std::string>();
  }

  std::uint64_t unsigned_integer(const std::string& key) {
    const json& v = require(key);
    if (!v.is_number_unsigned()) throw WireError(at(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw WireError(at(key), "unknown field");
    }
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw WireError(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw WireError(path, "must be finite");
    return d;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ControlMode read_mode(Reader& r, const std::string& key) {
  const std::string name = r.string(key);
  const auto mode = retarget::parse_mode(name);
  if (!mode) throw WireError(r.at(key), "unknown control mode '" + name + "'");
  return *mode;
}

json parse(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw WireError("", "malformed JSON");
  return j;
}

struct Envelope {
  std::string type;
  std::uint64_t seq = 0;
  json data;
};

Envelope open(std::string_view text) {
  const json j = parse(text);
  Reader r(j, "");
  Envelope e;
  e.type = r.string("type");
  e.seq = r.unsigned_integer("seq");
  e.data = r.require("data");
  if (!e.data.is_object()) throw WireError("data", "expected an object");
  r.finish();
  return e;
}

// Numeric LogRecord columns in wire order (the log column names).
template <class Record, class F>
void for_each_numeric(Record& r, F&& f) {
  f("t", r.t);
  f("x_R", r.x_R);
  f("theta_R", r.theta_R);
  f("xdot_R", r.xdot_R);
  f("thetadot_R", r.thetadot_R);
  f("h_R", r.h_R);
  f("phi1", r.phi1);
  f("phi2", r.phi2);
  f("theta_H", r.theta_H);
  f("thetadot_H", r.thetadot_H);
  f("h_H", r.h_H);
  f("p_H", r.p_H);
  f("theta_star", r.theta_star);
  f("thetadot_star", r.thetadot_star);
  f("xi_R", r.xi_R);
  f("xi_H", r.xi_H);
  f("xi_star", r.xi_star);
  f("u", r.u);
  f("F_fb", r.F_fb);
  f("F_ff", r.F_ff);
  f("M_ext", r.M_ext);
}

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (EventKind k : {EventKind::PayloadAttached, EventKind::PayloadReleased,
                      EventKind::ModeChanged, EventKind::CompensationLatched, EventKind::Fell}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

}  // namespace

std::string_view type_name(const ClientPayload& payload) {
  return std::visit(overloaded{[](const PilotInput&) { return std::string_view("pilot_input"); },
                               [](const SetMode&) { return std::string_view("set_mode"); },
                               [](const SetGain&) { return std::string_view("set_gain"); },
                               [](const SimControl&) { return std::string_view("sim_control"); },
                               [](const LoadScenario&) {
                                 return std::string_view("load_scenario");
                               }},
                    payload);
}

std::string_view type_name(const ServerPayload& payload) {
  return std::visit(overloaded{[](const StateSnapshot&) { return std::string_view("state"); },
                               [](const EventNotice&) { return std::string_view("event"); },
                               [](const ErrorNotice&) { return std::string_view("error"); },
                               [](const Ack&) { return std::string_view("ack"); }},
                    payload);
}

ClientMessage decode_client(std::string_view text) {
  const Envelope e = open(text);
  ClientMessage m;
  m.seq = e.seq;
  Reader d(e.data, "data");
  if (e.type == "pilot_input") {
    PilotInput p;
    p.theta_H = d.number("theta_H");
    p.h_H = d.number("h_H");
    p.phi1 = d.number("phi1");
    p.phi2 = d.number("phi2");
    p.p_H = d.number("p_H");
    p.grasp = d.boolean("grasp");
    p.comp = d.boolean("comp");
    p.thetadot_H = d.optional_number("thetadot_H");
    if (!(p.h_H > 0.0)) throw WireError("data.h_H", "must be > 0");
    m.payload = p;
  } else if (e.type == "set_mode") {
    m.payload = SetMode{read_mode(d, "mode")};
  } else if (e.type == "set_gain") {
    const double k = d.number("K_fb");
    if (!(k >= 0.0 && k <= 1.0)) throw WireError("data.K_fb", "must lie in [0, 1]");
    m.payload = SetGain{k};
  } else if (e.type == "sim_control") {
    SimControl c;
    const std::string cmd = d.string("command");
    if (cmd == "pause") c.command = SimCommand::Pause;
    else if (cmd == "resume") c.command = SimCommand::Resume;
    else if (cmd == "reset") c.command = SimCommand::Reset;
    else if (cmd == "step") c.command = SimCommand::Step;
    else throw WireError("data.command", "expected pause, resume, reset or step");
    if (const json* t = d.find("ticks")) {
      if (!t->is_number_integer() || t->get<long long>() < 1) {
        throw WireError("data.ticks", "expected a positive integer");
      }
      c.ticks = static_cast<int>(t->get<long long>());
    }
    m.payload = c;
  } else if (e.type == "load_scenario") {
    const std::string name = d.string("name");
    if (name.empty() || name.find('/') != std::string::npos || name.find('\\') != std::string::npos ||
        name.find("..") != std::string::npos) {
      throw WireError("data.name", "expected a bare scenario name");
    }
    m.payload = LoadScenario{name};
  } else {
    throw WireError("type", "unknown message type '" + e.type + "'");
  }
  d.finish();
  return m;
}

ServerMessage decode_server(std::string_view text) {
  const Envelope e = open(text);
  ServerMessage m;
  m.seq = e.seq;
  Reader d(e.data, "data");
  if (e.type == "state") {
    StateSnapshot s;
    s.tick = d.unsigned_integer("tick");
    for_each_numeric(s.record, [&](const char* key, double& v) { v = d.number(key); });
    s.record.mode = read_mode(d, "mode");
    s.record.payload_attached = d.boolean("payload_attached");
    s.paused = d.boolean("paused");
    s.fallen = d.boolean("fallen");
    m.payload = s;
  } else if (e.type == "event") {
    EventNotice n;
    n.event.t = d.number("t");
    const std::string kind = d.string("kind");
    const auto k = parse_event_kind(kind);
    if (!k) throw WireError("data.kind", "unknown event kind '" + kind + "'");
    n.event.kind = *k;
    n.event.detail = d.string("detail");
    m.payload = n;
  } else if (e.type == "error") {
    ErrorNotice n;
    n.message = d.string("message");
    n.field = d.string("field");
    if (const json* r = d.find("ref_seq"); r && !r->is_null()) {
      if (!r->is_number_unsigned()) throw WireError("data.ref_seq", "expected a non-negative integer");
      n.ref_seq = r->get<std::uint64_t>();
    }
    m.payload = n;
  } else if (e.type == "ack") {
    m.payload = Ack{d.unsigned_integer("ref_seq"), d.string("type")};
  } else {
    throw WireError("type", "unknown message type '" + e.type + "'");
  }
  d.finish();
  return m;
}

std::string encode(const ClientMessage& message) {
  json data = std::visit(
      overloaded{[](const PilotInput& p) {
                   json d = {{"theta_H", p.theta_H}, {"h_H", p.h_H},   {"phi1", p.phi1},
                             {"phi2", p.phi2},       {"p_H", p.p_H},   {"grasp", p.grasp},
                             {"comp", p.comp}};
                   if (p.thetadot_H) d["thetadot_H"] = *p.thetadot_H;
                   return d;
                 },
                 [](const SetMode& s) {
                   return json{{"mode", std::string(retarget::to_string(s.mode))}};
                 },
                 [](const SetGain& s) { return json{{"K_fb", s.K_fb}}; },
                 [](const SimControl& c) {
                   json d = {{"command", std::string(command_name(c.command))}};
                   if (c.command == SimCommand::Step) d["ticks"] = c.ticks;
                   return d;
                 },
                 [](const LoadScenario& l) { return json{{"name", l.name}}; }},
      message.payload);
  return json{{"type", std::string(type_name(message.payload))},
              {"seq", message.seq},
              {"data", std::move(data)}}
      .dump();
}

std::string encode(const ServerMessage& message) {
  json data = std::visit(
      overloaded{[](const StateSnapshot& s) {
                   json d;
                   d["tick"] = s.tick;
                   for_each_numeric(s.record, [&](const char* key, const double& v) { d[key] = v; });
                   d["mode"] = std::string(retarget::to_string(s.record.mode));
                   d["payload_attached"] = s.record.payload_attached;
                   d["paused"] = s.paused;
                   d["fallen"] = s.fallen;
                   return d;
                 },
                 [](const EventNotice& n) {
                   return json{{"t", n.event.t},
                               {"kind", std::string(to_string(n.event.kind))},
                               {"detail", n.event.detail}};
                 },
                 [](const ErrorNotice& n) {
                   json d = {{"message", n.message}, {"field", n.field}};
                   d["ref_seq"] = n.ref_seq ? json(*n.ref_seq) : json(nullptr);
                   return d;
                 },
                 [](const Ack& a) { return json{{"ref_seq", a.ref_seq}, {"type", a.type}}; }},
      message.payload);
  return json{{"type", std::string(type_name(message.payload))},
              {"seq", message.seq},
              {"data", std::move(data)}}
      .dump();
}

std::optional<std::uint64_t> peek_seq(std::string_view text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  const auto it = j.find("seq");
  if (it == j.end() || !it->is_number_unsigned()) return std::nullopt;
  return it->get<std::uint64_t>();
}

}  // namespace liftsim::service
