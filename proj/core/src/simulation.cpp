#include "liftsim/simulation.hpp"

#include <cmath>
#include <numbers>

#include "liftsim/errors.hpp"
#include "liftsim/model.hpp"

namespace liftsim {

using retarget::ControlMode;

void SimulationSetup::validate() const {
  robot.validate();
  human.validate();
  if (!(dt > 0.0 && dt <= plant.max_dt)) {
    throw ConfigError("dt must lie in (0, " + std::to_string(plant.max_dt) + "] s");
  }
  if (!(plant.tau_h > 0.0) || !(plant.tau_arm > 0.0)) {
    throw ConfigError("plant time constants must be > 0");
  }
  if (controller.n_points < 2) throw ConfigError("controller.n_points must be >= 2");
  if (!(controller.R > 0.0)) throw ConfigError("controller.R must be > 0");
  for (double q : controller.Q_diag) {
    if (!(q >= 0.0)) throw ConfigError("controller.Q entries must be >= 0");
  }
  if (!(controller.u_max > 0.0)) throw ConfigError("controller.u_max must be > 0");
  if (!(payload.mass >= 0.0)) throw ConfigError("payload.mass must be >= 0");
  if (!(payload.grasp_tolerance > 0.0)) throw ConfigError("payload.grasp_tolerance must be > 0");
  if (!(payload.estimate_scale > 0.0)) throw ConfigError("payload.estimate_scale must be > 0");
  if (!(noise.theta_std >= 0.0) || !(noise.thetadot_std >= 0.0)) {
    throw ConfigError("noise standard deviations must be >= 0");
  }
  if (!(initial.h_R >= robot.h_min && initial.h_R <= robot.h_max)) {
    throw ConfigError("initial.h_R must lie in [h_min, h_max]");
  }
  if (!(std::abs(initial.theta_R) < std::numbers::pi / 2)) throw ConfigError("initial.theta_R must be upright");
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::PayloadAttached: return "payload_attached";
    case EventKind::PayloadReleased: return "payload_released";
    case EventKind::ModeChanged: return "mode_changed";
    case EventKind::CompensationLatched: return "compensation_latched";
    case EventKind::Fell: return "fell";
  }
  return "unknown";
}

Simulation::Simulation(SimulationSetup setup, std::shared_ptr<const control::GainSchedule> schedule)
    : setup_(std::move(setup)),
      schedule_(std::move(schedule)),
      retargeter_(setup_.robot, setup_.human),
      grasp_(setup_.human.trigger_debounce) {
  setup_.validate();
  if (!schedule_) {
    schedule_ = std::make_shared<const control::GainSchedule>(
        control::build_schedule(setup_.robot, setup_.controller));
  }
  reset();
}

void Simulation::reset() {
  state_ = plant::PlantState{};
  state_.robot = setup_.initial;
  payload_ = PayloadSpec{setup_.payload.mass, setup_.payload.attached, 0.0};
  object_x_ = setup_.payload.object_x;
  ticks_ = 0;
  rng_.seed(setup_.seed);
  events_.clear();
  drained_ = 0;
  retargeter_ = retarget::Retargeter(setup_.robot, setup_.human);
  retargeter_.reset(state_.robot, setup_.initial_mode, 0.0,
                    setup_.payload.attached && setup_.payload.compensated);
  grasp_ = retarget::Debouncer(setup_.human.trigger_debounce);
  grasp_.reset(setup_.payload.attached);
}

void Simulation::set_haptic_gain(double K_fb) {
  if (!(K_fb >= 0.0 && K_fb <= 1.0)) throw ConfigError("K_fb must lie in [0, 1]");
  setup_.human.K_fb = K_fb;
  retargeter_.human_params().K_fb = K_fb;
}

std::vector<Event> Simulation::drain_events() {
  std::vector<Event> out(events_.begin() + static_cast<std::ptrdiff_t>(drained_), events_.end());
  drained_ = events_.size();
  return out;
}

double Simulation::end_effector_world() const {
  const RobotState& r = state_.robot;
  return r.x_R + model::arm_x_ee(r.theta_R, r.phi_1, r.phi_2, setup_.robot);
}

LogRecord Simulation::tick(const retarget::HumanState& human, double F_ext_x) {
  const double t = time();
  const double dt = setup_.dt;
  const RobotParams& params = setup_.robot;

  // Event-based grasping: attach on a debounced grasp with the hand at the
  // object, drop the object where the hand is on release.
  const bool grasp = grasp_.update(t, human.grasp_trigger);
  if (!state_.fallen) {
    if (grasp && !payload_.attached && payload_.mass > 0.0 &&
        std::abs(end_effector_world() - object_x_) < setup_.payload.grasp_tolerance) {
      payload_.attached = true;
      payload_.attach_time = t;
      events_.push_back({t, EventKind::PayloadAttached, ""});
    } else if (!grasp && payload_.attached) {
      payload_.attached = false;
      object_x_ = end_effector_world();
      retargeter_.release_compensation();
      events_.push_back({t, EventKind::PayloadReleased, ""});
    }
  }

  RobotState measured = state_.robot;
  if (setup_.noise.enabled()) {
    std::normal_distribution<double> n(0.0, 1.0);
    measured.theta_R += setup_.noise.theta_std * n(rng_);
    measured.thetadot_R += setup_.noise.thetadot_std * n(rng_);
  }
  PayloadSpec belief = payload_;
  belief.mass *= setup_.payload.estimate_scale;

  const ControlMode before = retargeter_.mode();
  const auto step = retargeter_.update(t, dt, human, measured, belief, F_ext_x);
  const retarget::Reference& ref = step.reference;
  if (step.mode_changed) {
    events_.push_back({t, EventKind::ModeChanged,
                       std::string(retarget::to_string(before)) + "->" +
                           std::string(retarget::to_string(retargeter_.mode()))});
  }
  if (step.latched_now) events_.push_back({t, EventKind::CompensationLatched, ""});

  const double h_des = retarget::height_map(human.h_H, setup_.human, params);
  const bool legs_active = std::abs(h_des - state_.robot.h_R) > setup_.leg_activity_threshold;
  const double supported = params.m_R + payload_.mass * (payload_.attached ? 1.0 : 0.0);
  plant::Disturbance ctrl_dist;
  plant::Disturbance plant_dist;
  if (legs_active) {
    const double belief_supported = params.m_R + belief.mass * (belief.attached ? 1.0 : 0.0);
    ctrl_dist = plant::leg_disturbance(
        measured, plant::estimate_leg_force(measured.theta_R, belief_supported, params.g));
    plant_dist = plant::leg_disturbance(
        state_.robot, plant::estimate_leg_force(state_.robot.theta_R, supported, params.g));
  }
  plant_dist.F_ext_x = F_ext_x;

  const control::ControlCommand cmd =
      control::control(ref.q_des, plant::wip_vector(measured), measured.h_R, ctrl_dist,
                       *schedule_, params, setup_.controller.u_max);

  const RobotState& r = state_.robot;
  LogRecord rec;
  rec.t = t;
  rec.x_R = r.x_R;
  rec.theta_R = r.theta_R;
  rec.xdot_R = r.xdot_R;
  rec.thetadot_R = r.thetadot_R;
  rec.h_R = r.h_R;
  rec.phi1 = r.phi_1;
  rec.phi2 = r.phi_2;
  rec.theta_H = human.theta_H;
  rec.thetadot_H = human.thetadot_H;
  rec.h_H = human.h_H;
  rec.p_H = human.p_H;
  rec.theta_star = ref.equilibrium.theta_star;
  rec.thetadot_star = ref.equilibrium.thetadot_star;
  rec.xi_R = model::dcm(r.theta_R, r.thetadot_R, ref.omega_R);
  rec.xi_H = ref.xi_H;
  rec.xi_star = ref.equilibrium.xi_star;
  rec.u = state_.fallen ? 0.0 : cmd.u;
  rec.F_fb = ref.haptic.F_applied;
  rec.F_ff = ref.haptic.F_ff;
  rec.M_ext = ref.M_ext;
  rec.mode = retargeter_.mode();
  rec.payload_attached = payload_.attached;

  if (!state_.fallen) {
    plant::PlantInput input;
    input.u = cmd.u;
    input.h_des = h_des;
    input.arm_cmd = {human.phi_1_cmd, human.phi_2_cmd};
    state_ = plant::step(state_, input, plant_dist, payload_, dt, params, setup_.plant);
    if (state_.fallen) events_.push_back({t + dt, EventKind::Fell, ""});
  }
  ++ticks_;
  return rec;
}

}  // namespace liftsim
