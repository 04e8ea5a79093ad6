#include "liftsim/retargeting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "liftsim/errors.hpp"
#include "liftsim/model.hpp"
#include "liftsim/plant.hpp"

namespace liftsim::retarget {

std::string_view to_string(ControlMode mode) {
  switch (mode) {
    case ControlMode::VelocityAuto:
      return "VelocityAuto";
    case ControlMode::DcmAuto:
      return "DcmAuto";
    case ControlMode::DcmManual:
      return "DcmManual";
  }
  return "?";
}

std::optional<ControlMode> parse_mode(std::string_view name) {
  for (ControlMode m : {ControlMode::VelocityAuto, ControlMode::DcmAuto, ControlMode::DcmManual}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

bool is_dcm_mode(ControlMode mode) { return mode != ControlMode::VelocityAuto; }

HumanParams HumanParams::with_force_scales(double m_H, const RobotParams& robot) {
  HumanParams hp;
  hp.m_H = m_H;
  hp.gamma_H = m_H * robot.g;
  hp.gamma_R = robot.m_R * robot.g;
  return hp;
}

void HumanParams::validate() const {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string("human parameter ") + name + " must be > 0");
  };
  positive(m_H, "m_H");
  positive(h_H_nom, "h_H_nom");
  positive(gamma_H, "gamma_H");
  positive(gamma_R, "gamma_R");
  positive(foot_half_length, "foot_half_length");
  positive(rate_cutoff_hz, "rate_cutoff_hz");
  if (!(beta_z >= 0.0 && beta_z <= 1.0)) throw ConfigError("beta_z must lie in [0, 1]");
  if (!(K_fb >= 0.0 && K_fb <= 1.0)) throw ConfigError("K_fb must lie in [0, 1]");
  if (!(deadband >= 0.0)) throw ConfigError("deadband must be >= 0");
  if (!(trigger_debounce >= 0.0)) throw ConfigError("trigger_debounce must be >= 0");
}

double height_map(double h_H, const HumanParams& human, const RobotParams& robot) {
  const double delta_H = h_H - human.h_H_nom;
  const double h_des = robot.h_R_nom + human.beta_z * (robot.h_R_nom / human.h_H_nom) * delta_H;
  return std::clamp(h_des, robot.h_min, robot.h_max);
}

double velocity_map(double theta_H, const HumanParams& human) {
  const double magnitude = std::abs(theta_H) - human.deadband;
  if (magnitude <= 0.0) return 0.0;
  return human.k_v * std::copysign(magnitude, theta_H);
}

double haptic_basic(double xi_R, double xi_H, double F_ext_x, const HumanParams& human) {
  return human.gamma_H * (xi_R - xi_H) + (human.gamma_H / human.gamma_R) * F_ext_x;
}

double dcm_error_feedback(const RobotState& robot, const HumanState& human,
                          const EquilibriumSetpoint& sp, double omega_R, double omega_H,
                          const HumanParams& human_params) {
  if (!(omega_R > 0.0) || !(omega_H > 0.0)) {
    throw DomainError("dcm_error_feedback: natural frequencies must be > 0");
  }
  const double angle_term = robot.theta_R - sp.theta_star - human.theta_H;
  const double rate_term =
      (robot.thetadot_R - sp.thetadot_star) / omega_R - human.thetadot_H / omega_H;
  return human_params.gamma_H * (angle_term + rate_term);
}

double feedforward(double p_H, double h_H, double F_ff_star, const HumanParams& human) {
  if (!(h_H > 0.0)) throw DomainError("feedforward: h_H must be > 0");
  return human.gamma_R * (F_ff_star + p_H / h_H);
}

double manual_moment_feedback(double M_ext_y, double h_H, const HumanParams& human) {
  if (!(h_H > 0.0)) throw DomainError("manual_moment_feedback: h_H must be > 0");
  return (human.gamma_H / human.gamma_R) * M_ext_y / h_H;
}

Reference build_reference(ControlMode mode, const HumanState& human, const RobotState& robot,
                          const PayloadSpec& payload, const ReferenceContext& context,
                          const RobotParams& params, const HumanParams& hp) {
  Reference ref;
  const double h = std::clamp(robot.h_R, params.h_min, params.h_max);
  ref.omega_R = model::natural_frequency(h, params.g);
  ref.omega_H = model::natural_frequency(human.h_H, params.g);
  ref.xi_R = model::dcm(robot.theta_R, robot.thetadot_R, ref.omega_R);
  ref.xi_H = model::dcm(human.theta_H, human.thetadot_H, ref.omega_H);

  const double F_obj = payload.force(params.g);
  const EquilibriumSetpoint physical =
      model::equilibrium_setpoint(robot.arm(), robot.arm_rate(), F_obj, h, params);
  ref.equilibrium = physical;
  const bool compensate = mode != ControlMode::DcmManual && context.compensation_latched;
  if (compensate) {
    ref.setpoint = physical;
  } else {
    ref.setpoint.xi_star = 0.0;
  }
  ref.M_ext = model::payload_moment(
      F_obj, model::arm_x_ee(robot.theta_R, robot.phi_1, robot.phi_2, params));

  if (mode == ControlMode::VelocityAuto) {
    ref.base_velocity = velocity_map(human.theta_H, hp);
    ref.q_des << context.base.x, ref.setpoint.theta_star, ref.base_velocity,
        ref.setpoint.thetadot_star;
    ref.haptic.F_fb = haptic_basic(ref.xi_R - ref.setpoint.xi_star, ref.xi_H, context.F_ext_x, hp);
  } else {
    const double a_lean = plant::linearize(h, params).lean_acceleration();
    ref.haptic.F_ff = feedforward(human.p_H, human.h_H, context.F_ff_star, hp);
    const double lean_ff = (ref.haptic.F_ff / params.m_R) / a_lean;
    const double theta_des = ref.setpoint.theta_star + human.theta_H + lean_ff;
    const double thetadot_des =
        ref.setpoint.thetadot_star + human.thetadot_H * ref.omega_R / ref.omega_H;
    ref.base_accel = a_lean * (theta_des - physical.theta_star);
    ref.q_des << context.base.x, theta_des, context.base.xdot, thetadot_des;
    ref.haptic.F_fb =
        dcm_error_feedback(robot, human, ref.setpoint, ref.omega_R, ref.omega_H, hp);
    if (mode == ControlMode::DcmManual) {
      ref.haptic.F_fb += manual_moment_feedback(ref.M_ext, human.h_H, hp);
    }
  }
  ref.haptic.F_applied = hp.K_fb * ref.haptic.F_fb;
  return ref;
}

BaseReference advance_base(const BaseReference& base, ControlMode mode, const Reference& ref,
                           double dt) {
  BaseReference next = base;
  if (mode == ControlMode::VelocityAuto) {
    next.xdot = ref.base_velocity;
    next.x += ref.base_velocity * dt;
  } else {
    next.xdot += ref.base_accel * dt;
    next.x += next.xdot * dt;
  }
  return next;
}

bool Debouncer::update(double t, bool raw) {
  if (raw != candidate_) {
    candidate_ = raw;
    since_ = t;
  }
  if (candidate_ != output_ && t - since_ >= hold_ - 1e-12) output_ = candidate_;
  return output_;
}

void Debouncer::reset(bool value) {
  output_ = value;
  candidate_ = value;
  since_ = 0.0;
}

double RateEstimator::update(double value, double dt) {
  if (!primed_ || !(dt > 0.0)) {
    primed_ = true;
    last_ = value;
    rate_ = 0.0;
    return rate_;
  }
  const double alpha = std::exp(-2.0 * std::numbers::pi * cutoff_hz_ * dt);
  rate_ = alpha * rate_ + (1.0 - alpha) * (value - last_) / dt;
  last_ = value;
  return rate_;
}

void RateEstimator::reset() {
  primed_ = false;
  last_ = 0.0;
  rate_ = 0.0;
}

Retargeter::Retargeter(const RobotParams& robot, const HumanParams& human)
    : robot_(robot),
      human_(human),
      comp_(human.trigger_debounce) {}

void Retargeter::reset(const RobotState& robot, ControlMode mode, double, bool latched) {
  mode_ = mode;
  latched_ = latched;
  comp_ = Debouncer(human_.trigger_debounce);
  comp_.reset(latched);
  base_ = {robot.x_R, robot.xdot_R};
  transitions_.clear();
}

Retargeter::Tick Retargeter::update(double t, double dt, const HumanState& human,
                                    const RobotState& robot, const PayloadSpec& belief,
                                    double F_ext_x) {
  Tick tick;
  const bool comp_before = comp_.value();
  const bool comp_now = comp_.update(t, human.comp_trigger);
  if (comp_now && !comp_before && !latched_) {
    latched_ = true;
    tick.latched_now = true;
  }
  if (human.mode_request != mode_) {
    transitions_.push_back({t, mode_, human.mode_request});
    mode_ = human.mode_request;
    base_ = {robot.x_R, robot.xdot_R};
    tick.mode_changed = true;
  }

  ReferenceContext ctx;
  ctx.compensation_latched = latched_;
  ctx.base = base_;
  ctx.F_ext_x = F_ext_x;
  tick.reference = build_reference(mode_, human, robot, belief, ctx, robot_, human_);
  base_ = advance_base(base_, mode_, tick.reference, dt);
  return tick;
}

}  // namespace liftsim::retarget
