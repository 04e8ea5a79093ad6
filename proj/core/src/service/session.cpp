#include "liftsim/service/session.hpp"

#include <bit>
#include <cmath>
#include <variant>

#include "liftsim/errors.hpp"

namespace liftsim::service {

void SessionConfig::validate(double dt) const {
  if (!(telemetry_hz > 0.0) || telemetry_hz > 1.0 / dt + 1e-9) {
    throw ConfigError("telemetry rate must lie in (0, 1/dt]");
  }
  if (!(staleness_timeout > 0.0)) throw ConfigError("staleness timeout must be > 0");
  if (!(decay_tau > 0.0)) throw ConfigError("decay time constant must be > 0");
  if (ticks_per_input < 1) throw ConfigError("ticks per input must be >= 1");
}

bool SeqTracker::accept(std::uint64_t seq) {
  if (last_ && seq <= *last_) return false;
  last_ = seq;
  return true;
}

Session::Session(harness::Scenario scenario, SessionConfig config) : config_(std::move(config)) {
  load(std::move(scenario));
}

void Session::load(harness::Scenario scenario) {
  scenario.validate();
  config_.validate(scenario.sim.dt);
  auto sim = std::make_unique<Simulation>(scenario.sim);
  scenario_ = std::move(scenario);
  sim_ = std::move(sim);
  decimation_ = std::max(1, static_cast<int>(std::lround(1.0 / (config_.telemetry_hz * scenario_.sim.dt))));
  reset();
}

void Session::reset() {
  sim_->reset();
  held_ = retarget::HumanState{};
  held_.h_H = scenario_.sim.human.h_H_nom;
  held_.phi_1_cmd = scenario_.sim.initial.phi_1;
  held_.phi_2_cmd = scenario_.sim.initial.phi_2;
  held_.grasp_trigger = scenario_.sim.payload.attached;
  held_.comp_trigger = scenario_.sim.payload.attached && scenario_.sim.payload.compensated;
  held_.mode_request = scenario_.sim.initial_mode;
  held_has_rate_ = true;
  rate_ = retarget::RateEstimator(scenario_.sim.human.rate_cutoff_hz);
  last_input_t_ = 0.0;
  have_record_ = false;
}

retarget::HumanState Session::effective_input() const {
  retarget::HumanState h = held_;
  const double quiet = sim_->time() - last_input_t_ - config_.staleness_timeout;
  if (quiet > 0.0) {
    const double decay = std::exp(-quiet / config_.decay_tau);
    const double nominal = scenario_.sim.human.h_H_nom;
    h.theta_H *= decay;
    h.thetadot_H = -h.theta_H / config_.decay_tau;
    h.p_H *= decay;
    h.h_H = nominal + (h.h_H - nominal) * decay;
  }
  return h;
}

void Session::set_client_count(int count) { clients_ = count; }

void Session::step_once(std::vector<Outgoing>& out) {
  retarget::HumanState h = effective_input();
  const bool stale = sim_->time() - last_input_t_ > config_.staleness_timeout;
  const double estimated = rate_.update(h.theta_H, scenario_.sim.dt);
  if (!held_has_rate_ && !stale) h.thetadot_H = estimated;

  const std::uint64_t index = sim_->ticks();
  last_record_ = sim_->tick(h, 0.0);
  have_record_ = true;
  for (Event& e : sim_->drain_events()) out.push_back({EventNotice{std::move(e)}, true});
  if (index % static_cast<std::uint64_t>(decimation_) == 0) out.push_back({snapshot(), true});
}

std::vector<Outgoing> Session::tick() {
  std::vector<Outgoing> out;
  if (clients_ == 0 && sim_->time() - last_input_t_ > config_.staleness_timeout) paused_ = true;
  if (paused_ || config_.lockstep) return out;
  step_once(out);
  return out;
}

std::vector<Outgoing> Session::advance(int ticks) {
  std::vector<Outgoing> out;
  for (int i = 0; i < ticks; ++i) step_once(out);
  return out;
}

StateSnapshot Session::snapshot() const {
  StateSnapshot s;
  s.tick = have_record_ ? sim_->ticks() - 1 : 0;
  if (have_record_) {
    s.record = last_record_;
  } else {
    const RobotState& r = sim_->state().robot;
    s.record.t = sim_->time();
    s.record.x_R = r.x_R;
    s.record.theta_R = r.theta_R;
    s.record.xdot_R = r.xdot_R;
    s.record.thetadot_R = r.thetadot_R;
    s.record.h_R = r.h_R;
    s.record.phi1 = r.phi_1;
    s.record.phi2 = r.phi_2;
    s.record.h_H = held_.h_H;
    s.record.mode = sim_->retargeter().mode();
    s.record.payload_attached = sim_->payload().attached;
  }
  s.paused = paused_;
  s.fallen = sim_->fallen();
  return s;
}

std::vector<Outgoing> Session::handle(const ClientMessage& message) {
  std::vector<Outgoing> out;
  const auto ack = [&] {
    out.push_back({Ack{message.seq, std::string(type_name(message.payload))}, false});
  };
  const auto error = [&](const std::string& field, const std::string& what) {
    out.push_back({ErrorNotice{what, field, message.seq}, false});
  };

  if (const auto* p = std::get_if<PilotInput>(&message.payload)) {
    held_.theta_H = p->theta_H;
    held_.h_H = p->h_H;
    held_.phi_1_cmd = p->phi1;
    held_.phi_2_cmd = p->phi2;
    held_.p_H = p->p_H;
    held_.grasp_trigger = p->grasp;
    held_.comp_trigger = p->comp;
    held_has_rate_ = p->thetadot_H.has_value();
    held_.thetadot_H = p->thetadot_H.value_or(0.0);
    last_input_t_ = sim_->time();
    ack();
    if (config_.lockstep && !paused_) {
      auto ticks = advance(config_.ticks_per_input);
      out.insert(out.end(), std::make_move_iterator(ticks.begin()),
                 std::make_move_iterator(ticks.end()));
    }
  } else if (const auto* m = std::get_if<SetMode>(&message.payload)) {
    held_.mode_request = m->mode;
    ack();
  } else if (const auto* g = std::get_if<SetGain>(&message.payload)) {
    try {
      sim_->set_haptic_gain(g->K_fb);
      ack();
    } catch (const ConfigError& e) {
      error("data.K_fb", e.what());
    }
  } else if (const auto* c = std::get_if<SimControl>(&message.payload)) {
    switch (c->command) {
      case SimCommand::Pause:
        paused_ = true;
        ack();
        break;
      case SimCommand::Resume:
        paused_ = false;
        last_input_t_ = sim_->time();
        ack();
        break;
      case SimCommand::Reset:
        reset();
        ack();
        out.push_back({snapshot(), true});
        break;
      case SimCommand::Step: {
        ack();
        auto ticks = advance(c->ticks);
        out.insert(out.end(), std::make_move_iterator(ticks.begin()),
                   std::make_move_iterator(ticks.end()));
        break;
      }
    }
  } else if (const auto* l = std::get_if<LoadScenario>(&message.payload)) {
    std::filesystem::path path = config_.scenario_dir / l->name;
    if (path.extension() != ".yaml") path += ".yaml";
    try {
      load(harness::load_scenario(path));
      ack();
      out.push_back({snapshot(), true});
    } catch (const std::exception& e) {
      error("data.name", e.what());
    }
  }
  return out;
}

std::uint64_t schedule_checksum(const control::GainSchedule& schedule) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  const auto mix = [&](double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      hash ^= (bits >> (8 * i)) & 0xffU;
      hash *= 0x100000001b3ULL;
    }
  };
  for (double h : schedule.heights) mix(h);
  for (const auto& k : schedule.gains) {
    for (int i = 0; i < 4; ++i) mix(k(i));
  }
  return hash;
}

}  // namespace liftsim::service
