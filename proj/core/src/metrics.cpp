#include "liftsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace liftsim::harness {

Metrics compute_metrics(const Log& log, const MetricsContext& ctx) {
  Metrics m;
  if (log.empty()) return m;

  double sq = 0.0;
  for (const LogRecord& r : log) {
    const double target = r.xi_star + (retarget::is_dcm_mode(r.mode) ? r.xi_H : 0.0);
    sq += (r.xi_R - target) * (r.xi_R - target);
    m.peak_haptic = std::max(m.peak_haptic, std::abs(r.F_fb));
    m.max_excursion = std::max(m.max_excursion, std::abs(r.x_R - log.front().x_R));
    if (std::abs(r.theta_R) >= std::numbers::pi / 2) m.fell = true;
  }
  m.dcm_rmse = std::sqrt(sq / static_cast<double>(log.size()));

  // Settled from the last sample outside the band onwards.
  double last_out = -1.0;
  bool any = false;
  for (const LogRecord& r : log) {
    if (r.t < ctx.settle_from) continue;
    any = true;
    if (!(std::abs(r.theta_R - r.theta_star) < ctx.settle_tolerance)) last_out = r.t;
  }
  if (!any || last_out >= log.back().t || m.fell) {
    m.settle_time = std::numeric_limits<double>::infinity();
  } else if (last_out < 0.0) {
    m.settle_time = 0.0;
  } else {
    const double dt = log.size() > 1 ? log[1].t - log[0].t : 0.0;
    m.settle_time = last_out + dt - ctx.settle_from;
  }

  const double t_end = log.back().t;
  for (const LogRecord& r : log) {
    if (r.t < t_end - 1.0) continue;
    const double h_des = retarget::height_map(r.h_H, ctx.human, ctx.robot);
    m.height_tracking_err = std::max(m.height_tracking_err, std::abs(r.h_R - h_des));
  }

  for (std::size_t i = 1; i < log.size(); ++i) {
    const double dt = log[i].t - log[i - 1].t;
    if (dt > 0.0) {
      m.peak_base_accel =
          std::max(m.peak_base_accel, std::abs(log[i].xdot_R - log[i - 1].xdot_R) / dt);
    }
  }

  const double goal = ctx.target_x.value_or(log.front().x_R);
  m.wheel_drift = std::abs(log.back().x_R - goal);
  return m;
}

std::vector<std::pair<std::string, double>> metric_fields(const Metrics& m) {
  return {{"dcm_rmse", m.dcm_rmse},
          {"settle_time", m.settle_time},
          {"peak_haptic", m.peak_haptic},
          {"height_tracking_err", m.height_tracking_err},
          {"wheel_drift", m.wheel_drift},
          {"max_excursion", m.max_excursion},
          {"peak_base_accel", m.peak_base_accel},
          {"fell", m.fell ? 1.0 : 0.0}};
}

}  // namespace liftsim::harness
