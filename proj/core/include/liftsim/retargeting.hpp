#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "liftsim/params.hpp"

namespace liftsim::retarget {

enum class ControlMode {
  VelocityAuto,  // pilot pitch -> base velocity, automatic payload lean
  DcmAuto,       // pilot DCM -> robot DCM about the payload equilibrium
  DcmManual,     // pilot DCM -> robot DCM, payload moment fed back to the pilot
};

std::string_view to_string(ControlMode mode);
std::optional<ControlMode> parse_mode(std::string_view name);
bool is_dcm_mode(ControlMode mode);

struct HumanParams {
  double m_H = 71.4;                          // [kg]
  double h_H_nom = 1.0;                       // ankle to CoM [m]
  double gamma_H = 71.4 * kStandardGravity;   // [N]
  double gamma_R = 11.9 * kStandardGravity;   // [N]
  double beta_z = 0.5;
  double k_v = 1.5;          // [m/s per rad]
  double K_fb = 1.0;         // haptic gain in [0, 1]
  double deadband = 0.02;    // velocity mapping deadband [rad]
  double foot_half_length = 0.12;   // CoP limit [m]
  double trigger_debounce = 0.05;   // [s]
  double rate_cutoff_hz = 10.0;     // pitch-rate estimator cutoff

  // gamma_H = m_H g and gamma_R = m_R g.
  static HumanParams with_force_scales(double m_H, const RobotParams& robot);
  void validate() const;

  bool operator==(const HumanParams&) const = default;
};

struct HumanState {
  double theta_H = 0.0;
  double thetadot_H = 0.0;
  double h_H = 1.0;
  double p_H = 0.0;
  double phi_1_cmd = 0.0;
  double phi_2_cmd = 0.0;
  bool grasp_trigger = false;
  bool comp_trigger = false;
  ControlMode mode_request = ControlMode::DcmAuto;

  bool operator==(const HumanState&) const = default;
};

struct HapticOutput {
  double F_fb = 0.0;
  double F_ff = 0.0;
  double F_applied = 0.0;  // K_fb * F_fb
};

// Eq. h_R_des = h_R_nom + beta_z (h_R_nom / h_H_nom)(h_H - h_H_nom), clamped
// to the robot's height range.
double height_map(double h_H, const HumanParams& human, const RobotParams& robot);

// xdot_des = k_v * (theta_H - deadband) outside the deadband, 0 inside.
double velocity_map(double theta_H, const HumanParams& human);

// gamma_H (xi_R - xi_H) + (gamma_H / gamma_R) F_ext_x.
double haptic_basic(double xi_R, double xi_H, double F_ext_x, const HumanParams& human);

// DCM error of the robot about its payload setpoint against the pilot DCM,
// scaled by gamma_H.
double dcm_error_feedback(const RobotState& robot, const HumanState& human,
                          const EquilibriumSetpoint& sp, double omega_R, double omega_H,
                          const HumanParams& human_params);

// gamma_R (F_ff* + p_H / h_H). Throws DomainError for h_H <= 0.
double feedforward(double p_H, double h_H, double F_ff_star, const HumanParams& human);

// (gamma_H / gamma_R) M_ext / h_H: the scaled axle moment expressed as a
// force at the pilot's CoM.
double manual_moment_feedback(double M_ext_y, double h_H, const HumanParams& human);

// Base channel of the reference: position and velocity the controller
// regulates toward.
struct BaseReference {
  double x = 0.0;
  double xdot = 0.0;
};

struct ReferenceContext {
  bool compensation_latched = false;
  BaseReference base;
  double F_ext_x = 0.0;
  double F_ff_star = 0.0;  // passive reference model by default
};

struct Reference {
  Eigen::Vector4d q_des = Eigen::Vector4d::Zero();
  HapticOutput haptic;
  EquilibriumSetpoint setpoint;  // applied to the pitch channel (zero without compensation)
  EquilibriumSetpoint equilibrium;  // payload equilibrium, independent of the latch
  double M_ext = 0.0;
  double xi_R = 0.0;
  double xi_H = 0.0;
  double omega_R = 0.0;
  double omega_H = 0.0;
  double base_accel = 0.0;       // DCM modes: reference cart acceleration
  double base_velocity = 0.0;    // VelocityAuto: commanded base velocity
};

// Setpoint and pilot feedback for one control tick.
//
// VelocityAuto: q_des = [x_ref, theta*, velocity_map(theta_H), thetadot*],
//   haptic about xi*.
// DcmAuto: pitch reference theta* + theta_H (+ feedforward lean), rate
//   thetadot* + thetadot_H omega_R / omega_H, haptic from the DCM error.
// DcmManual: as DcmAuto with theta* = 0; the haptic adds the scaled payload
//   moment.
// In DCM modes x_ref/xdot_ref follow a passive reference cart that
// accelerates with the commanded lean relative to the payload equilibrium.
// Throws InfeasibleEquilibrium when the payload cannot be balanced.
Reference build_reference(ControlMode mode, const HumanState& human, const RobotState& robot,
                          const PayloadSpec& payload, const ReferenceContext& context,
                          const RobotParams& params, const HumanParams& human_params);

// Integrates the base reference over one tick.
BaseReference advance_base(const BaseReference& base, ControlMode mode, const Reference& ref,
                           double dt);

// Level must hold for `hold` seconds before the output follows it.
class Debouncer {
 public:
  explicit Debouncer(double hold = 0.05) : hold_(hold) {}
  bool update(double t, bool raw);
  bool value() const { return output_; }
  void reset(bool value = false);

 private:
  double hold_;
  bool output_ = false;
  bool candidate_ = false;
  double since_ = 0.0;
};

// First-order low-pass filtered finite difference.
class RateEstimator {
 public:
  explicit RateEstimator(double cutoff_hz = 10.0) : cutoff_hz_(cutoff_hz) {}
  double update(double value, double dt);
  void reset();

 private:
  double cutoff_hz_;
  bool primed_ = false;
  double last_ = 0.0;
  double rate_ = 0.0;
};

struct ModeTransition {
  double t;
  ControlMode from;
  ControlMode to;
};

// Mode state machine, trigger debouncing, compensation latch and base
// reference integration. Owned by a single control loop.
class Retargeter {
 public:
  Retargeter(const RobotParams& robot, const HumanParams& human);

  // `latched` starts with compensation already engaged (payload in hand).
  void reset(const RobotState& robot, ControlMode mode, double t, bool latched = false);

  struct Tick {
    Reference reference;
    bool mode_changed = false;
    bool latched_now = false;
  };

  Tick update(double t, double dt, const HumanState& human, const RobotState& robot,
              const PayloadSpec& belief, double F_ext_x);

  // Clears the compensation latch (payload released).
  void release_compensation() { latched_ = false; }

  ControlMode mode() const { return mode_; }
  bool compensation_latched() const { return latched_; }
  const BaseReference& base() const { return base_; }
  const std::vector<ModeTransition>& transitions() const { return transitions_; }
  HumanParams& human_params() { return human_; }
  const HumanParams& human_params() const { return human_; }

 private:
  RobotParams robot_;
  HumanParams human_;
  ControlMode mode_ = ControlMode::DcmAuto;
  bool latched_ = false;
  Debouncer comp_;
  BaseReference base_;
  std::vector<ModeTransition> transitions_;
};

}  // namespace liftsim::retarget
