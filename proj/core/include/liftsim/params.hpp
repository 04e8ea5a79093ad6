#pragma once

namespace liftsim {

inline constexpr double kStandardGravity = 9.81;

// Physical parameters of the wheeled humanoid. m_R is the mass carried above
// the wheel axle (the pendulum); the wheel mass is accounted for separately.
// Defaults are desk-scale values; m_R follows from a 2.5 kg payload being 21%
// of the robot mass.
struct RobotParams {
  double m_R = 11.9;        // [kg]
  double m_wheel = 1.0;     // [kg]
  double r_wheel = 0.08;    // [m]
  double I_wheel = 0.0032;  // [kg m^2]
  double I_body = 0.35;     // [kg m^2] about the CoM, pitch axis
  double h_R_nom = 0.5;     // [m] axle to CoM
  double h_min = 0.35;      // [m]
  double h_max = 0.65;      // [m]
  double L_b = 0.2;         // [m] base to shoulder
  double L_1 = 0.25;        // [m] upper arm
  double L_2 = 0.25;        // [m] forearm
  double g = kStandardGravity;

  // Robot weight F_g = m_R g.
  double weight() const { return m_R * g; }

  // Throws ConfigError naming the first violated invariant.
  void validate() const;

  bool operator==(const RobotParams&) const = default;
};

struct ArmAngles {
  double phi_1 = 0.0;  // shoulder, from the body axis [rad]
  double phi_2 = 0.0;  // elbow, relative to the upper arm [rad]
};

// Reduced-order robot state. Positive theta_R leans the CoM forward (+x).
struct RobotState {
  double x_R = 0.0;
  double theta_R = 0.0;
  double xdot_R = 0.0;
  double thetadot_R = 0.0;
  double h_R = 0.5;
  double phi_1 = 0.0;
  double phi_2 = 0.0;
  double phidot_1 = 0.0;
  double phidot_2 = 0.0;

  ArmAngles arm() const { return {phi_1, phi_2}; }
  ArmAngles arm_rate() const { return {phidot_1, phidot_2}; }

  bool operator==(const RobotState&) const = default;
};

struct PayloadSpec {
  double mass = 0.0;  // [kg]
  bool attached = false;
  double attach_time = 0.0;  // [s]

  // Vertical load on the end effector, zero unless attached.
  double force(double g = kStandardGravity) const {
    return attached ? mass * g : 0.0;
  }

  bool operator==(const PayloadSpec&) const = default;
};

// Payload-equilibrium pitch reference. xi_star = theta_star +
// thetadot_star / omega_R by construction.
struct EquilibriumSetpoint {
  double theta_star = 0.0;
  double thetadot_star = 0.0;
  double xi_star = 0.0;
};

}  // namespace liftsim
