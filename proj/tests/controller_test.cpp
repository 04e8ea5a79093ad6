#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "liftsim/controller.hpp"
#include "liftsim/errors.hpp"
#include "liftsim/model.hpp"
#include "liftsim/plant.hpp"

namespace liftsim {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Riccati residual computed here, not taken from the solver.
double care_residual(const MatrixXd& A, const VectorXd& B, const MatrixXd& Q, double R,
                     const MatrixXd& P) {
  return (A.transpose() * P + P * A - P * B * B.transpose() * P / R + Q).norm();
}

double max_real_eig(const MatrixXd& M) {
  return Eigen::EigenSolver<MatrixXd>(M).eigenvalues().real().maxCoeff();
}

const control::GainSchedule& default_schedule() {
  static const control::GainSchedule s = control::build_schedule(RobotParams{}, {});
  return s;
}

TEST(SolveCare, DoubleIntegratorAnalytic) {
  MatrixXd A(2, 2);
  A << 0, 1, 0, 0;
  VectorXd B(2);
  B << 0, 1;
  const auto sol = control::solve_care(A, B, MatrixXd::Identity(2, 2), 1.0);
  EXPECT_NEAR(sol.K(0), 1.0, 1e-9);
  EXPECT_NEAR(sol.K(1), std::sqrt(3.0), 1e-9);
  MatrixXd P(2, 2);
  P << std::sqrt(3.0), 1, 1, std::sqrt(3.0);
  EXPECT_LT(care_residual(A, B, MatrixXd::Identity(2, 2), 1.0, P), 1e-12);
  EXPECT_LT((sol.P - P).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SolveCare, HurwitzWithZeroCostGivesZeroGain) {
  MatrixXd A(2, 2);
  A << -1, 0.5, 0, -2;
  VectorXd B(2);
  B << 0, 1;
  const auto sol = control::solve_care(A, B, MatrixXd::Zero(2, 2), 1.0);
  EXPECT_LT(sol.K.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveCare, WheeledPendulumAtNominalHeight) {
  const RobotParams p;
  const control::ControllerConfig cfg;
  const auto lin = plant::linearize(0.5, p);
  const auto sol = control::solve_care(lin.A, lin.B, cfg.Q(), cfg.R);
  EXPECT_LT(care_residual(lin.A, lin.B, cfg.Q(), cfg.R, sol.P), 1e-8);
  EXPECT_LT(max_real_eig(lin.A - lin.B * sol.K), 0.0);
  EXPECT_LT((sol.P - sol.P.transpose()).norm(), 1e-9);
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<MatrixXd>(sol.P).eigenvalues().minCoeff(), 0.0);
}

TEST(SolveCare, UncontrollableUnstableModeThrows) {
  MatrixXd A(2, 2);
  A << 1, 0, 0, -1;
  VectorXd B(2);
  B << 0, 1;
  EXPECT_THROW(control::solve_care(A, B, MatrixXd::Identity(2, 2), 1.0), SynthesisError);
}

TEST(PlacePoles, PlacesRequestedPoles) {
  const auto lin = plant::linearize(0.5, RobotParams{});
  VectorXd poles(4);
  poles << -1, -2, -3, -4;
  const auto K = control::place_poles(lin.A, lin.B, poles);
  Eigen::VectorXd eig = Eigen::EigenSolver<MatrixXd>(lin.A - lin.B * K).eigenvalues().real();
  std::sort(eig.data(), eig.data() + eig.size());
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(eig[i], -4 + i, 1e-6);
}

TEST(Schedule, EveryGainSatisfiesResidualAndHurwitz) {
  const RobotParams p;
  const auto& s = default_schedule();
  ASSERT_EQ(s.heights.size(), 21u);
  EXPECT_DOUBLE_EQ(s.heights.front(), p.h_min);
  EXPECT_DOUBLE_EQ(s.heights.back(), p.h_max);
  for (std::size_t i = 0; i < s.heights.size(); ++i) {
    const auto lin = plant::linearize(s.heights[i], p);
    EXPECT_LT(s.residuals[i], 1e-8);
    EXPECT_LT(max_real_eig(lin.A - lin.B * s.gains[i]), 0.0) << "h=" << s.heights[i];
    if (i > 0) EXPECT_GT(s.heights[i], s.heights[i - 1]);
  }
}

TEST(Schedule, TwoPointsSpanRange) {
  const RobotParams p;
  const control::ControllerConfig cfg;
  const auto s = control::build_schedule(p, 2, cfg.Q(), cfg.R);
  ASSERT_EQ(s.heights.size(), 2u);
  EXPECT_DOUBLE_EQ(s.heights[0], p.h_min);
  EXPECT_DOUBLE_EQ(s.heights[1], p.h_max);
}

TEST(Schedule, GainsVaryContinuously) {
  const auto& s = default_schedule();
  for (std::size_t i = 1; i < s.gains.size(); ++i) {
    for (int j = 0; j < 4; ++j) {
      const double prev = s.gains[i - 1](j);
      EXPECT_LT(std::abs(s.gains[i](j) - prev), 0.15 * std::abs(prev))
          << "h=" << s.heights[i] << " k" << j;
    }
  }
}

TEST(GainAt, ExactAtGridAndMeanAtMidpoint) {
  const auto& s = default_schedule();
  for (std::size_t i = 0; i < s.heights.size(); ++i) {
    EXPECT_EQ(control::gain_at(s, s.heights[i]), s.gains[i]);
  }
  for (std::size_t i = 1; i < s.heights.size(); ++i) {
    const double mid = 0.5 * (s.heights[i - 1] + s.heights[i]);
    const Eigen::RowVector4d mean = 0.5 * (s.gains[i - 1] + s.gains[i]);
    EXPECT_LT((control::gain_at(s, mid) - mean).cwiseAbs().maxCoeff(),
              1e-12 * mean.cwiseAbs().maxCoeff());
  }
}

TEST(GainAt, ClampsOutsideRange) {
  const auto& s = default_schedule();
  const auto below = s.lookup(0.2);
  EXPECT_TRUE(below.clamped);
  EXPECT_EQ(below.gain, s.gains.front());
  const auto above = s.lookup(0.9);
  EXPECT_TRUE(above.clamped);
  EXPECT_EQ(above.gain, s.gains.back());
  EXPECT_FALSE(s.lookup(0.5).clamped);
}

TEST(GainAt, InterpolatedGainsStabilize) {
  const RobotParams p;
  const auto& s = default_schedule();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> h(p.h_min, p.h_max);
  for (int i = 0; i < 200; ++i) {
    const double hh = h(rng);
    const auto lin = plant::linearize(hh, p);
    ASSERT_LT(max_real_eig(lin.A - lin.B * control::gain_at(s, hh)), 0.0) << "h=" << hh;
  }
}

TEST(Control, ZeroErrorZeroTorque) {
  const RobotParams p;
  const Eigen::Vector4d q(0.3, 0.1, -0.2, 0.05);
  const auto cmd = control::control(q, q, 0.5, {}, default_schedule(), p, 20.0);
  EXPECT_EQ(cmd.u, 0.0);
  EXPECT_FALSE(cmd.saturated);
}

TEST(Control, PureDisturbanceCompensation) {
  const RobotParams p;
  const Eigen::Vector4d q(0.0, 0.05, 0.0, 0.0);
  plant::Disturbance d;
  d.d_w = {8.0, 0.0};
  const auto lin = plant::linearize(0.45, p);
  const Eigen::Vector4d Ed = lin.E * d.d_w;
  const double expected = -lin.B.dot(Ed) / lin.B.dot(lin.B);
  const auto cmd = control::control(q, q, 0.45, d, default_schedule(), p, 20.0);
  EXPECT_EQ(cmd.u, expected);
  EXPECT_EQ(cmd.u_ff_comp, expected);
}

TEST(Control, Saturates) {
  const RobotParams p;
  const auto cmd = control::control({0, 0, 0, 0}, {0, 1.0, 0, 0}, 0.5, {}, default_schedule(), p,
                                    20.0);
  EXPECT_EQ(std::abs(cmd.u), 20.0);
  EXPECT_TRUE(cmd.saturated);
}

// Closed-loop rollout against the nonlinear plant.
plant::PlantState rollout(double theta0, double theta_des, double h, double seconds,
                          const PayloadSpec& payload = {}, double phi_1 = 0.0) {
  const RobotParams p;
  plant::PlantState s;
  s.robot.theta_R = theta0;
  s.robot.h_R = h;
  s.robot.phi_1 = phi_1;
  plant::PlantInput in;
  in.h_des = h;
  in.arm_cmd.phi_1 = phi_1;
  const Eigen::Vector4d q_des(0, theta_des, 0, 0);
  for (int i = 0; i < static_cast<int>(seconds / 0.001); ++i) {
    in.u = control::control(q_des, plant::wip_vector(s.robot), h, {}, default_schedule(), p, 20.0)
               .u;
    s = plant::step(s, in, {}, payload, 0.001, p);
  }
  return s;
}

TEST(Control, SignConvergesTowardBackwardLean) {
  // Payload held in front: the setpoint pitch lies below the current pitch
  // and the loop must settle onto it.
  const RobotParams p;
  const PayloadSpec payload{2.5, true, 0.0};
  const double phi_1 = std::numbers::pi / 2;
  const double theta_star = model::equilibrium_pitch(phi_1, 0, payload.force(p.g), 0.5, p);
  ASSERT_LT(theta_star, 0.0);
  const auto s = rollout(0.0, theta_star, 0.5, 2.0, payload, phi_1);
  EXPECT_FALSE(s.fallen);
  EXPECT_NEAR(s.robot.theta_R, theta_star, 0.01);
}

TEST(Control, RecoversFromLeanAtEveryScheduledHeight) {
  for (double h : default_schedule().heights) {
    const auto s = rollout(0.15, 0.0, h, 2.0);
    EXPECT_FALSE(s.fallen) << "h=" << h;
    EXPECT_LT(std::abs(s.robot.theta_R), 0.01) << "h=" << h;
  }
}

}  // namespace
}  // namespace liftsim
