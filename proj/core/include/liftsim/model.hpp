#pragma once

#include "liftsim/params.hpp"

/// Reduced-order kinematics of the robot/pilot pendulum pair and the static
/// payload balance. All functions are pure.
namespace liftsim::model {

/// Pendulum natural frequency sqrt(g / h). Throws DomainError for h <= 0.
double natural_frequency(double h, double g = kStandardGravity);

/// Divergent component of motion, theta + thetadot / omega.
/// Throws DomainError for omega <= 0.
double dcm(double theta, double thetadot, double omega);

/// Horizontal end-effector offset from the wheel axle for a planar
/// two-link arm mounted L_b above the axle along the body axis.
double arm_x_ee(double theta_R, double phi_1, double phi_2, const RobotParams& params);

/// Vertical end-effector offset above the axle (same chain as arm_x_ee).
double arm_z_ee(double theta_R, double phi_1, double phi_2, const RobotParams& params);

/// Moment the robot's weight must supply to balance a payload hanging at
/// horizontal offset x_ee: M_ext = -F_obj * x_ee. At equilibrium
/// m_R g h_R sin(theta) = M_ext.
double payload_moment(double F_obj, double x_ee);

/// Lean angle at which the payload moment is balanced by the robot's offset
/// CoM. Closed form atan2(f_1, f_2) with
///   f_1 = -F_obj (L_1 sin phi_1 + L_2 sin(phi_1 + phi_2))
///   f_2 = F_g h_R + F_obj (L_b + L_1 cos phi_1 + L_2 cos(phi_1 + phi_2)).
/// Throws InfeasibleEquilibrium when f_2 <= 0.
double equilibrium_pitch(double phi_1, double phi_2, double F_obj, double h_R,
                         const RobotParams& params);

/// Time derivative of equilibrium_pitch along the arm motion, with h_R held
/// constant: (f_2 f_1' - f_1 f_2') / (f_1^2 + f_2^2).
double equilibrium_pitch_rate(ArmAngles phi, ArmAngles phidot, double F_obj, double h_R,
                              const RobotParams& params);

/// xi* = theta* + thetadot* / omega_R.
double desired_dcm(double theta_star, double thetadot_star, double omega_R);

/// Pitch, pitch rate and DCM setpoint for the current arm state and payload.
EquilibriumSetpoint equilibrium_setpoint(ArmAngles phi, ArmAngles phidot, double F_obj,
                                         double h_R, const RobotParams& params);

}  // namespace liftsim::model
