#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "liftsim/controller.hpp"
#include "liftsim/log.hpp"
#include "liftsim/metrics.hpp"
#include "liftsim/scenario.hpp"
#include "liftsim/simulation.hpp"

namespace liftsim::harness {

struct RunResult {
  Log log;
  Metrics metrics;
  std::vector<Event> events;
};

// Settling is measured from the first debounced comp trigger in the script
// (t = 0 without one).
MetricsContext metrics_context(const Scenario& scenario);

// Closed-loop rollout of the whole scenario. Validation errors are thrown
// before the first step; a fall is recorded in the metrics and the log runs
// to the scenario duration with the frozen state.
RunResult run(const Scenario& scenario,
              std::shared_ptr<const control::GainSchedule> schedule = nullptr);

struct CompareRow {
  retarget::ControlMode mode;
  Metrics metrics;
};

struct CompareReport {
  std::string scenario;
  std::vector<CompareRow> rows;
  // peak_haptic(DcmManual) / peak_haptic(DcmAuto) when both were run.
  std::optional<double> haptic_ratio;

  const CompareRow* find(retarget::ControlMode mode) const;
  std::string to_text() const;
};

// Runs the template once per mode (the template's mode schedule is
// dropped).
CompareReport compare(const Scenario& scenario_template,
                      const std::vector<retarget::ControlMode>& modes);

}  // namespace liftsim::harness
