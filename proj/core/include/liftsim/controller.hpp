#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "liftsim/params.hpp"
#include "liftsim/plant.hpp"

namespace liftsim::control {

struct CareOptions {
  double tolerance = 1e-10;    // Newton-Kleinman gain update tolerance
  int max_iterations = 200;
  double residual_bound = 1e-8;
};

struct CareSolution {
  Eigen::MatrixXd P;
  Eigen::RowVectorXd K;
  double residual = 0.0;  // Frobenius norm of the Riccati residual
  int iterations = 0;
};

// Stabilizing solution of A'P + PA - P B R^-1 B' P + Q = 0 for a
// single-input system, K = R^-1 B' P. Newton-Kleinman iteration seeded by a
// pole-placement gain. Throws SynthesisError (with the residual) when the
// iteration does not converge, the residual bound is missed, or A - BK is
// not Hurwitz.
CareSolution solve_care(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                        const Eigen::MatrixXd& Q, double R, const CareOptions& options = {});

// Largest real part of the eigenvalues of M.
double spectral_abscissa(const Eigen::MatrixXd& M);

// Ackermann pole placement for a controllable single-input pair.
Eigen::RowVectorXd place_poles(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                               const Eigen::VectorXd& real_poles);

struct GainSchedule {
  std::vector<double> heights;              // strictly ascending
  std::vector<Eigen::RowVector4d> gains;    // one per height
  std::vector<double> residuals;            // CARE residual per height
  Eigen::Matrix4d Q = Eigen::Matrix4d::Identity();
  double R = 1.0;

  struct Lookup {
    Eigen::RowVector4d gain;
    bool clamped = false;
  };

  // Elementwise linear interpolation; heights outside the grid are clamped
  // to the end points and flagged.
  Lookup lookup(double h) const;
};

struct ControllerConfig {
  std::array<double, 4> Q_diag{100.0, 200.0, 50.0, 10.0};
  double R = 1.0;
  int n_points = 21;
  double u_max = 20.0;  // [N m]

  Eigen::Matrix4d Q() const;
  bool operator==(const ControllerConfig&) const = default;
};

// Gains at n_points uniformly spaced heights over [h_min, h_max]. Synthesis
// errors are rethrown with the offending height in the message.
GainSchedule build_schedule(const RobotParams& params, int n_points, const Eigen::Matrix4d& Q,
                            double R);
GainSchedule build_schedule(const RobotParams& params, const ControllerConfig& config);

Eigen::RowVector4d gain_at(const GainSchedule& schedule, double h);

struct ControlCommand {
  double u = 0.0;          // saturated wheel torque [N m]
  double u_ff_comp = 0.0;  // -B^+ d_w before saturation
  bool saturated = false;
};

// u = -K(h) (q - q_des) - B^+(h) E(h) d_w, saturated to +-u_max.
//
// The published law reads -K (q_des - q); with K from the standard CARE
// convention (u = -K q) only the error q - q_des is stabilizing, so that is
// the sign used here.
ControlCommand control(const Eigen::Vector4d& q_des, const Eigen::Vector4d& q, double h,
                       const plant::Disturbance& dist, const GainSchedule& schedule,
                       const RobotParams& params, double u_max);

}  // namespace liftsim::control
