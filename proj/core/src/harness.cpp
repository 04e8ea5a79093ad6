#include "liftsim/harness.hpp"

#include <cstdio>
#include <sstream>

namespace liftsim::harness {

using retarget::ControlMode;

MetricsContext metrics_context(const Scenario& sc) {
  MetricsContext ctx;
  ctx.robot = sc.sim.robot;
  ctx.human = sc.sim.human;
  ctx.settle_tolerance = sc.settle_tolerance;
  ctx.target_x = sc.target_x;
  for (const SwitchKnot& k : sc.pilot.comp.knots) {
    if (k.value) {
      ctx.settle_from = k.t + sc.sim.human.trigger_debounce;
      break;
    }
  }
  return ctx;
}

RunResult run(const Scenario& scenario, std::shared_ptr<const control::GainSchedule> schedule) {
  scenario.validate();
  Simulation sim(scenario.sim, std::move(schedule));
  RunResult result;
  const std::size_t n = scenario.tick_count();
  result.log.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = sim.time();
    result.log.push_back(sim.tick(scenario.human_at(t), scenario.external_force(t)));
  }
  result.events = sim.events();
  result.metrics = compute_metrics(result.log, metrics_context(scenario));
  result.metrics.fell = result.metrics.fell || sim.fallen();
  return result;
}

const CompareRow* CompareReport::find(ControlMode mode) const {
  for (const CompareRow& row : rows) {
    if (row.mode == mode) return &row;
  }
  return nullptr;
}

std::string CompareReport::to_text() const {
  std::ostringstream out;
  out << "scenario: " << scenario << "\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-20s", "metric");
  out << buf;
  for (const CompareRow& row : rows) {
    std::snprintf(buf, sizeof(buf), " %14s", std::string(retarget::to_string(row.mode)).c_str());
    out << buf;
  }
  out << "\n";
  if (!rows.empty()) {
    const auto names = metric_fields(rows.front().metrics);
    for (std::size_t i = 0; i < names.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%-20s", names[i].first.c_str());
      out << buf;
      for (const CompareRow& row : rows) {
        std::snprintf(buf, sizeof(buf), " %14.6g", metric_fields(row.metrics)[i].second);
        out << buf;
      }
      out << "\n";
    }
  }
  if (haptic_ratio) {
    std::snprintf(buf, sizeof(buf),
                  "peak haptic ratio manual/auto: %.3f (project threshold >= 3, not from hardware)\n",
                  *haptic_ratio);
    out << buf;
  }
  return out.str();
}

CompareReport compare(const Scenario& tmpl, const std::vector<ControlMode>& modes) {
  tmpl.validate();
  CompareReport report;
  report.scenario = tmpl.name;
  auto schedule = std::make_shared<const control::GainSchedule>(
      control::build_schedule(tmpl.sim.robot, tmpl.sim.controller));
  for (ControlMode mode : modes) {
    Scenario sc = tmpl;
    sc.sim.initial_mode = mode;
    sc.modes.clear();
    report.rows.push_back({mode, run(sc, schedule).metrics});
  }
  const CompareRow* manual = report.find(ControlMode::DcmManual);
  const CompareRow* automatic = report.find(ControlMode::DcmAuto);
  if (manual && automatic && automatic->metrics.peak_haptic > 0.0) {
    report.haptic_ratio = manual->metrics.peak_haptic / automatic->metrics.peak_haptic;
  }
  return report;
}

}  // namespace liftsim::harness
