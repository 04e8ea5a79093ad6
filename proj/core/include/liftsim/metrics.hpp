#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "liftsim/log.hpp"
#include "liftsim/params.hpp"
#include "liftsim/retargeting.hpp"

namespace liftsim::harness {

struct Metrics {
  double dcm_rmse = 0.0;             // [rad] xi_R against its mode-specific target
  double settle_time = 0.0;          // [s] after settle_from; +inf if never settled
  double peak_haptic = 0.0;          // [N] max |F_fb| as rendered
  double height_tracking_err = 0.0;  // [m] max |h_R - h_R_des| over the final second
  double wheel_drift = 0.0;          // [m] |x_R(end) - goal|, goal = target_x or x_R(0)
  double max_excursion = 0.0;        // [m] max |x_R - x_R(0)|
  double peak_base_accel = 0.0;      // [m/s^2]
  bool fell = false;

  bool operator==(const Metrics&) const = default;
};

struct MetricsContext {
  RobotParams robot;
  retarget::HumanParams human;
  double settle_from = 0.0;  // [s]
  double settle_tolerance = 0.01;  // [rad] on |theta_R - theta_star|
  std::optional<double> target_x;
};

Metrics compute_metrics(const Log& log, const MetricsContext& context);

// Name/value pairs in a fixed order, for reports.
std::vector<std::pair<std::string, double>> metric_fields(const Metrics& m);

}  // namespace liftsim::harness
