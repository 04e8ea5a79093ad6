#pragma once

#include <Eigen/Dense>

#include "liftsim/params.hpp"

// Nonlinear wheel + variable-length pendulum simulation.
//
// Generalized coordinates are the wheel position x_R (no slip) and the body
// pitch theta_R. The pendulum length h_R is a kinematic input that follows
// a first-order lag toward the commanded height; the arm joints follow their
// commands with a first-order lag as well. A payload is a point weight at
// the end effector (no inertia).
namespace liftsim::plant {

struct PlantConfig {
  double tau_h = 0.15;    // height channel time constant [s]
  double tau_arm = 0.1;   // arm joint time constant [s]
  double max_dt = 0.005;  // largest accepted integration step [s]

  bool operator==(const PlantConfig&) const = default;
};

struct PlantState {
  RobotState robot;
  double hdot_R = 0.0;
  bool contact = true;
  bool fallen = false;
};

// External loads. M_ext_y follows the payload_moment convention (the
// moment the robot's weight must supply); d_w is the leg term applied as
// generalized forces [N on x_R, N m on theta_R].
struct Disturbance {
  double F_ext_x = 0.0;
  double M_ext_y = 0.0;
  Eigen::Vector2d d_w = Eigen::Vector2d::Zero();
};

struct PlantInput {
  double u = 0.0;      // wheel torque [N m], positive drives the wheel forward
  double h_des = 0.5;  // commanded height, clamped to [h_min, h_max]
  ArmAngles arm_cmd;
};

struct StateDerivative {
  double xdot = 0.0;
  double thetadot = 0.0;
  double xddot = 0.0;
  double thetaddot = 0.0;
  double hdot = 0.0;
  double phidot_1 = 0.0;
  double phidot_2 = 0.0;
};

// Linearization about the upright equilibrium at fixed height h:
// qdot = A q + B u + E d_w with q = [x_R, theta_R, xdot_R, thetadot_R].
struct LinearModel {
  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
  Eigen::Vector4d B = Eigen::Vector4d::Zero();
  Eigen::Matrix<double, 4, 2> E = Eigen::Matrix<double, 4, 2>::Zero();
  double h = 0.0;

  // Steady base acceleration per radian of lean with the pitch held still.
  double lean_acceleration() const;
  // Moore-Penrose pseudo-inverse of B applied to v: B^T v / (B^T B).
  double pinv_B(const Eigen::Vector4d& v) const;
};

Eigen::Vector4d wip_vector(const RobotState& s);

// Second-order dynamics and lag channels. A fallen state has a zero
// derivative.
StateDerivative derivative(const PlantState& state, const PlantInput& input,
                           const Disturbance& dist, const PayloadSpec& payload,
                           const RobotParams& params, const PlantConfig& config = {});

// Classical RK4 step with inputs held over the step. Throws ConfigError
// unless 0 < dt <= config.max_dt. Latches `fallen` once |theta_R| >= pi/2.
PlantState step(const PlantState& state, const PlantInput& input, const Disturbance& dist,
                const PayloadSpec& payload, double dt, const RobotParams& params,
                const PlantConfig& config = {});

// Analytic A(h), B(h), E(h). Throws DomainError outside [h_min, h_max].
LinearModel linearize(double h, const RobotParams& params);

// Quasi-static leg force supporting robot plus payload, F/cos(theta),
// capped at twice the static load.
double estimate_leg_force(double theta_R, double supported_mass, double g);

// d_w = [F_L sin(theta_R), 0].
Disturbance leg_disturbance(const RobotState& state, double F_L);

// Axle moment injected by the payload plus any external M_ext_y, in the
// payload_moment convention.
double axle_moment(const PlantState& state, const Disturbance& dist,
                   const PayloadSpec& payload, const RobotParams& params);

}  // namespace liftsim::plant
