#include "liftsim/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "liftsim/errors.hpp"

namespace liftsim::control {

namespace {

// Solves Acl' P + P Acl + W = 0 through its Kronecker form.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& Acl, const Eigen::MatrixXd& W) {
  const Eigen::Index n = Acl.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n * n, n * n);
  const Eigen::MatrixXd At = Acl.transpose();
  // vec(At P) = (I kron At) vec(P), vec(P Acl) = (Acl' kron I) vec(P)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      L.block(i * n, j * n, n, n) += I(i, j) * At;
      L.block(i * n, j * n, n, n) += At(i, j) * I;
    }
  }
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(W.data(), n * n);
  const Eigen::VectorXd vec_p = L.fullPivLu().solve(rhs);
  Eigen::MatrixXd P = Eigen::Map<const Eigen::MatrixXd>(vec_p.data(), n, n);
  return 0.5 * (P + P.transpose());
}

double riccati_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                        const Eigen::MatrixXd& Q, double R, const Eigen::MatrixXd& P) {
  const Eigen::MatrixXd PB = P * B;
  const Eigen::MatrixXd res = A.transpose() * P + P * A - PB * PB.transpose() / R + Q;
  return res.norm();
}

Eigen::RowVectorXd stabilizing_seed(const Eigen::MatrixXd& A, const Eigen::VectorXd& B) {
  const Eigen::Index n = A.rows();
  if (spectral_abscissa(A) < 0.0) return Eigen::RowVectorXd::Zero(n);
  const double radius = A.eigenvalues().cwiseAbs().maxCoeff();
  const double base = 1.0 + radius;
  Eigen::VectorXd poles(n);
  for (Eigen::Index i = 0; i < n; ++i) poles[i] = -base * (1.0 + 0.5 * static_cast<double>(i));
  return place_poles(A, B, poles);
}

}  // namespace

double spectral_abscissa(const Eigen::MatrixXd& M) {
  return M.eigenvalues().real().maxCoeff();
}

Eigen::RowVectorXd place_poles(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                               const Eigen::VectorXd& real_poles) {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd C(n, n);
  Eigen::VectorXd col = B;
  for (Eigen::Index i = 0; i < n; ++i) {
    C.col(i) = col;
    col = A * col;
  }
  const auto lu = C.fullPivLu();
  if (lu.rank() < n) {
    throw SynthesisError("pole placement: (A, B) is not controllable",
                         std::numeric_limits<double>::infinity());
  }
  Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    phi = phi * (A - real_poles[i] * Eigen::MatrixXd::Identity(n, n));
  }
  Eigen::RowVectorXd last = Eigen::RowVectorXd::Zero(n);
  last[n - 1] = 1.0;
  return last * lu.inverse() * phi;
}

CareSolution solve_care(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                        const Eigen::MatrixXd& Q, double R, const CareOptions& options) {
  if (!(R > 0.0)) throw SynthesisError("solve_care: R must be > 0", 0.0);
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.size() != n || Q.rows() != n || Q.cols() != n) {
    throw SynthesisError("solve_care: dimension mismatch", 0.0);
  }

  CareSolution sol;
  Eigen::RowVectorXd K = stabilizing_seed(A, B);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  bool converged = false;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Eigen::MatrixXd Acl = A - B * K;
    const Eigen::MatrixXd W = Q + R * K.transpose() * K;
    P = solve_lyapunov(Acl, W);
    const Eigen::RowVectorXd K_next = (B.transpose() * P) / R;
    const double change = (K_next - K).norm();
    K = K_next;
    sol.iterations = it;
    if (change <= options.tolerance * std::max(1.0, K.norm())) {
      converged = true;
      break;
    }
  }

  sol.P = P;
  sol.K = K;
  sol.residual = riccati_residual(A, B, Q, R, P);
  if (!converged) {
    throw SynthesisError("solve_care: Newton-Kleinman did not converge in " +
                             std::to_string(options.max_iterations) + " iterations (residual " +
                             std::to_string(sol.residual) + ")",
                         sol.residual);
  }
  if (!(sol.residual < options.residual_bound)) {
    throw SynthesisError("solve_care: Riccati residual " + std::to_string(sol.residual) +
                             " exceeds bound",
                         sol.residual);
  }
  const double abscissa = spectral_abscissa(A - B * K);
  if (!(abscissa < 0.0)) {
    throw SynthesisError("solve_care: closed loop is not Hurwitz (spectral abscissa " +
                             std::to_string(abscissa) + ")",
                         sol.residual);
  }
  return sol;
}

GainSchedule build_schedule(const RobotParams& params, int n_points, const Eigen::Matrix4d& Q,
                            double R) {
  if (n_points < 2) throw ConfigError("build_schedule: n_points must be >= 2");
  params.validate();
  GainSchedule schedule;
  schedule.Q = Q;
  schedule.R = R;
  const double span = params.h_max - params.h_min;
  for (int i = 0; i < n_points; ++i) {
    const double h = i == n_points - 1
                         ? params.h_max
                         : params.h_min + span * static_cast<double>(i) / (n_points - 1);
    const plant::LinearModel lin = plant::linearize(h, params);
    CareSolution sol;
    try {
      sol = solve_care(lin.A, lin.B, Q, R);
    } catch (const SynthesisError& e) {
      throw SynthesisError("at height " + std::to_string(h) + " m: " + e.what(), e.residual());
    }
    schedule.heights.push_back(h);
    schedule.gains.emplace_back(sol.K);
    schedule.residuals.push_back(sol.residual);
  }
  return schedule;
}

GainSchedule build_schedule(const RobotParams& params, const ControllerConfig& config) {
  return build_schedule(params, config.n_points, config.Q(), config.R);
}

Eigen::Matrix4d ControllerConfig::Q() const {
  return Eigen::Vector4d(Q_diag[0], Q_diag[1], Q_diag[2], Q_diag[3]).asDiagonal();
}

GainSchedule::Lookup GainSchedule::lookup(double h) const {
  Lookup out;
  if (h <= heights.front()) {
    out.gain = gains.front();
    out.clamped = h < heights.front();
    return out;
  }
  if (h >= heights.back()) {
    out.gain = gains.back();
    out.clamped = h > heights.back();
    return out;
  }
  const auto hi_it = std::upper_bound(heights.begin(), heights.end(), h);
  const auto hi = static_cast<std::size_t>(hi_it - heights.begin());
  const std::size_t lo = hi - 1;
  if (h == heights[lo]) {
    out.gain = gains[lo];
    return out;
  }
  const double w = (h - heights[lo]) / (heights[hi] - heights[lo]);
  out.gain = (1.0 - w) * gains[lo] + w * gains[hi];
  return out;
}

Eigen::RowVector4d gain_at(const GainSchedule& schedule, double h) {
  return schedule.lookup(h).gain;
}

ControlCommand control(const Eigen::Vector4d& q_des, const Eigen::Vector4d& q, double h,
                       const plant::Disturbance& dist, const GainSchedule& schedule,
                       const RobotParams& params, double u_max) {
  const double h_lin = std::clamp(h, params.h_min, params.h_max);
  const plant::LinearModel lin = plant::linearize(h_lin, params);
  ControlCommand cmd;
  const Eigen::Vector4d d4 = lin.E * dist.d_w;
  cmd.u_ff_comp = d4.isZero(0.0) ? 0.0 : -lin.pinv_B(d4);
  const double u = -gain_at(schedule, h_lin).dot(q - q_des) + cmd.u_ff_comp;
  cmd.u = std::clamp(u, -u_max, u_max);
  cmd.saturated = cmd.u != u;
  return cmd;
}

}  // namespace liftsim::control
