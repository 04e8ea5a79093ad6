#include "liftsim/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "liftsim/errors.hpp"
#include "liftsim/model.hpp"

namespace liftsim::plant {

namespace {

using Vector7d = Eigen::Matrix<double, 7, 1>;

Vector7d pack(const PlantState& s) {
  const RobotState& r = s.robot;
  Vector7d v;
  v << r.x_R, r.theta_R, r.xdot_R, r.thetadot_R, r.h_R, r.phi_1, r.phi_2;
  return v;
}

PlantState unpack(const Vector7d& v, const PlantState& like) {
  PlantState out = like;
  out.robot.x_R = v[0];
  out.robot.theta_R = v[1];
  out.robot.xdot_R = v[2];
  out.robot.thetadot_R = v[3];
  out.robot.h_R = v[4];
  out.robot.phi_1 = v[5];
  out.robot.phi_2 = v[6];
  return out;
}

Vector7d to_vector(const StateDerivative& d) {
  Vector7d v;
  v << d.xdot, d.thetadot, d.xddot, d.thetaddot, d.hdot, d.phidot_1, d.phidot_2;
  return v;
}

double clamp_height(double h, const RobotParams& p) { return std::clamp(h, p.h_min, p.h_max); }

double total_translational_mass(const RobotParams& p) {
  return p.m_wheel + p.I_wheel / (p.r_wheel * p.r_wheel) + p.m_R;
}

}  // namespace

Eigen::Vector4d wip_vector(const RobotState& s) {
  return {s.x_R, s.theta_R, s.xdot_R, s.thetadot_R};
}

double axle_moment(const PlantState& state, const Disturbance& dist, const PayloadSpec& payload,
                   const RobotParams& params) {
  const RobotState& r = state.robot;
  const double x_ee = model::arm_x_ee(r.theta_R, r.phi_1, r.phi_2, params);
  return dist.M_ext_y + model::payload_moment(payload.force(params.g), x_ee);
}

StateDerivative derivative(const PlantState& state, const PlantInput& input,
                           const Disturbance& dist, const PayloadSpec& payload,
                           const RobotParams& p, const PlantConfig& config) {
  StateDerivative d;
  if (state.fallen) return d;

  const RobotState& r = state.robot;
  const double m = p.m_R;
  const double h = r.h_R;
  const double s = std::sin(r.theta_R);
  const double c = std::cos(r.theta_R);

  const double hdot = (clamp_height(input.h_des, p) - h) / config.tau_h;
  const double hddot = -hdot / config.tau_h;

  const double z_ee = model::arm_z_ee(r.theta_R, r.phi_1, r.phi_2, p);
  const double M_ext = axle_moment(state, dist, payload, p);

  // Mass matrix of (x_R, theta_R) and right-hand side of the Lagrange
  // equations with the prescribed height trajectory.
  const double M11 = total_translational_mass(p);
  const double M12 = m * h * c;
  const double M22 = m * h * h + p.I_body;
  const double f_x = input.u / p.r_wheel + dist.F_ext_x + dist.d_w[0] - m * hddot * s -
                     2.0 * m * hdot * c * r.thetadot_R + m * h * s * r.thetadot_R * r.thetadot_R;
  const double f_th = -input.u + dist.F_ext_x * z_ee - M_ext + dist.d_w[1] + m * p.g * h * s -
                      2.0 * m * h * hdot * r.thetadot_R;
  const double det = M11 * M22 - M12 * M12;

  d.xdot = r.xdot_R;
  d.thetadot = r.thetadot_R;
  d.xddot = (M22 * f_x - M12 * f_th) / det;
  d.thetaddot = (M11 * f_th - M12 * f_x) / det;
  d.hdot = hdot;
  d.phidot_1 = (input.arm_cmd.phi_1 - r.phi_1) / config.tau_arm;
  d.phidot_2 = (input.arm_cmd.phi_2 - r.phi_2) / config.tau_arm;
  return d;
}

PlantState step(const PlantState& state, const PlantInput& input, const Disturbance& dist,
                const PayloadSpec& payload, double dt, const RobotParams& params,
                const PlantConfig& config) {
  if (!(dt > 0.0) || dt > config.max_dt) {
    throw ConfigError("plant step: dt must satisfy 0 < dt <= " + std::to_string(config.max_dt) +
                      " (got " + std::to_string(dt) + ")");
  }
  if (state.fallen) return state;

  const auto f = [&](const Vector7d& y) {
    return to_vector(derivative(unpack(y, state), input, dist, payload, params, config));
  };
  const Vector7d y0 = pack(state);
  const Vector7d k1 = f(y0);
  const Vector7d k2 = f(y0 + 0.5 * dt * k1);
  const Vector7d k3 = f(y0 + 0.5 * dt * k2);
  const Vector7d k4 = f(y0 + dt * k3);
  const Vector7d y1 = y0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  PlantState next = unpack(y1, state);
  next.robot.h_R = clamp_height(next.robot.h_R, params);
  next.hdot_R = (clamp_height(input.h_des, params) - next.robot.h_R) / config.tau_h;
  next.robot.phidot_1 = (input.arm_cmd.phi_1 - next.robot.phi_1) / config.tau_arm;
  next.robot.phidot_2 = (input.arm_cmd.phi_2 - next.robot.phi_2) / config.tau_arm;
  if (std::abs(next.robot.theta_R) >= std::numbers::pi / 2.0) next.fallen = true;
  return next;
}

LinearModel linearize(double h, const RobotParams& p) {
  if (!(h >= p.h_min && h <= p.h_max)) {
    throw DomainError("linearize: height " + std::to_string(h) + " outside [" +
                      std::to_string(p.h_min) + ", " + std::to_string(p.h_max) + "]");
  }
  const double m = p.m_R;
  Eigen::Matrix2d M;
  M << total_translational_mass(p), m * h, m * h, m * h * h + p.I_body;
  const Eigen::Matrix2d M_inv = M.inverse();
  const Eigen::Vector2d gravity_column = M_inv * Eigen::Vector2d(0.0, m * p.g * h);
  const Eigen::Vector2d input_column = M_inv * Eigen::Vector2d(1.0 / p.r_wheel, -1.0);

  LinearModel lin;
  lin.h = h;
  lin.A(0, 2) = 1.0;
  lin.A(1, 3) = 1.0;
  lin.A.block<2, 1>(2, 1) = gravity_column;
  lin.B.segment<2>(2) = input_column;
  lin.E.block<2, 2>(2, 0) = M_inv;
  return lin;
}

double LinearModel::lean_acceleration() const {
  return A(2, 1) - B[2] * A(3, 1) / B[3];
}

double LinearModel::pinv_B(const Eigen::Vector4d& v) const { return B.dot(v) / B.squaredNorm(); }

double estimate_leg_force(double theta_R, double supported_mass, double g) {
  const double static_load = supported_mass * g;
  const double c = std::cos(theta_R);
  if (c <= 0.5) return 2.0 * static_load;
  return std::min(static_load / c, 2.0 * static_load);
}

Disturbance leg_disturbance(const RobotState& state, double F_L) {
  Disturbance d;
  d.d_w = Eigen::Vector2d(F_L * std::sin(state.theta_R), 0.0);
  return d;
}

}  // namespace liftsim::plant
