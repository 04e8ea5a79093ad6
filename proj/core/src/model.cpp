#include "liftsim/model.hpp"

#include <cmath>
#include <string>

#include "liftsim/errors.hpp"

namespace liftsim::model {

namespace {

// Terms of the closed-form balance and their partial derivatives in the arm
// angles.
struct BalanceTerms {
  double f_1;
  double f_2;
  double df1_dphi1;
  double df1_dphi2;
  double df2_dphi1;
  double df2_dphi2;
};

BalanceTerms balance_terms(double phi_1, double phi_2, double F_obj, double h_R,
                           const RobotParams& p) {
  const double s1 = std::sin(phi_1);
  const double c1 = std::cos(phi_1);
  const double s12 = std::sin(phi_1 + phi_2);
  const double c12 = std::cos(phi_1 + phi_2);
  BalanceTerms t{};
  t.f_1 = -F_obj * (p.L_1 * s1 + p.L_2 * s12);
  t.f_2 = p.weight() * h_R + F_obj * (p.L_b + p.L_1 * c1 + p.L_2 * c12);
  t.df1_dphi1 = -F_obj * (p.L_1 * c1 + p.L_2 * c12);
  t.df1_dphi2 = -F_obj * p.L_2 * c12;
  t.df2_dphi1 = -F_obj * (p.L_1 * s1 + p.L_2 * s12);
  t.df2_dphi2 = -F_obj * p.L_2 * s12;
  return t;
}

void require_feasible(const BalanceTerms& t) {
  if (!(t.f_2 > 0.0)) {
    throw InfeasibleEquilibrium("payload cannot be balanced by leaning (f_2 = " +
                                std::to_string(t.f_2) + " N m)");
  }
}

}  // namespace

double natural_frequency(double h, double g) {
  if (!(h > 0.0)) {
    throw DomainError("natural_frequency: pendulum height must be > 0 (got " +
                      std::to_string(h) + ")");
  }
  return std::sqrt(g / h);
}

double dcm(double theta, double thetadot, double omega) {
  if (!(omega > 0.0)) {
    throw DomainError("dcm: natural frequency must be > 0 (got " + std::to_string(omega) + ")");
  }
  return theta + thetadot / omega;
}

double arm_x_ee(double theta_R, double phi_1, double phi_2, const RobotParams& p) {
  return p.L_b * std::sin(theta_R) + p.L_1 * std::sin(theta_R + phi_1) +
         p.L_2 * std::sin(theta_R + phi_1 + phi_2);
}

double arm_z_ee(double theta_R, double phi_1, double phi_2, const RobotParams& p) {
  return p.L_b * std::cos(theta_R) + p.L_1 * std::cos(theta_R + phi_1) +
         p.L_2 * std::cos(theta_R + phi_1 + phi_2);
}

double payload_moment(double F_obj, double x_ee) { return -F_obj * x_ee; }

double equilibrium_pitch(double phi_1, double phi_2, double F_obj, double h_R,
                         const RobotParams& params) {
  const BalanceTerms t = balance_terms(phi_1, phi_2, F_obj, h_R, params);
  require_feasible(t);
  return std::atan2(t.f_1, t.f_2);
}

double equilibrium_pitch_rate(ArmAngles phi, ArmAngles phidot, double F_obj, double h_R,
                              const RobotParams& params) {
  const BalanceTerms t = balance_terms(phi.phi_1, phi.phi_2, F_obj, h_R, params);
  require_feasible(t);
  const double norm2 = t.f_1 * t.f_1 + t.f_2 * t.f_2;
  if (norm2 == 0.0) {
    throw InfeasibleEquilibrium("equilibrium_pitch_rate: degenerate balance (f_1 = f_2 = 0)");
  }
  const double f1_dot = t.df1_dphi1 * phidot.phi_1 + t.df1_dphi2 * phidot.phi_2;
  const double f2_dot = t.df2_dphi1 * phidot.phi_1 + t.df2_dphi2 * phidot.phi_2;
  return (t.f_2 * f1_dot - t.f_1 * f2_dot) / norm2;
}

double desired_dcm(double theta_star, double thetadot_star, double omega_R) {
  return dcm(theta_star, thetadot_star, omega_R);
}

EquilibriumSetpoint equilibrium_setpoint(ArmAngles phi, ArmAngles phidot, double F_obj,
                                         double h_R, const RobotParams& params) {
  EquilibriumSetpoint sp;
  sp.theta_star = equilibrium_pitch(phi.phi_1, phi.phi_2, F_obj, h_R, params);
  sp.thetadot_star = equilibrium_pitch_rate(phi, phidot, F_obj, h_R, params);
  sp.xi_star = desired_dcm(sp.theta_star, sp.thetadot_star,
                           natural_frequency(h_R, params.g));
  return sp;
}

}  // namespace liftsim::model
