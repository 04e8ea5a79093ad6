// liftsim command line: scenario runs, mode comparisons, parameter sweeps,
// gain schedule inspection and the live session server.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "liftsim/errors.hpp"
#include "liftsim/harness.hpp"

#ifdef LIFTSIM_WITH_SERVICE
#include "liftsim/service/server.hpp"
#endif

namespace {

using namespace liftsim;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitFell = 2;

void print_metrics(const harness::Metrics& m, std::ostream& out) {
  for (const auto& [name, value] : harness::metric_fields(m)) {
    out << name << ": " << value << "\n";
  }
}

std::vector<retarget::ControlMode> parse_modes(const std::string& list) {
  std::vector<retarget::ControlMode> modes;
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto mode = retarget::parse_mode(item);
    if (!mode) throw ConfigError("unknown mode '" + item + "'");
    modes.push_back(*mode);
  }
  if (modes.empty()) throw ConfigError("--modes needs at least one mode");
  return modes;
}

struct Range {
  double first;
  double last;
  int count;
};

// "a:b:n" -> n evenly spaced values from a to b inclusive.
Range parse_range(const std::string& text) {
  Range r{};
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &r.first, &r.last, &r.count, &tail) != 3 ||
      r.count < 1) {
    throw ConfigError("range must look like start:stop:count, got '" + text + "'");
  }
  return r;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_run(const std::string& path, const std::string& out_dir, bool metrics_only) {
  const harness::Scenario sc = harness::load_scenario(path);
  const harness::RunResult result = harness::run(sc);
  if (!metrics_only) {
    const std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
    std::filesystem::create_directories(dir);
    const auto log_path = dir / (sc.name + ".csv");
    write_log(result.log, log_path);
    std::cout << "log: " << log_path.string() << "\n";
  }
  std::cout << "scenario: " << sc.name << "\n";
  print_metrics(result.metrics, std::cout);
  if (result.metrics.fell && sc.must_not_fall) {
    std::cerr << "fall detected in a must_not_fall scenario\n";
    return kExitFell;
  }
  return kExitOk;
}

int cmd_compare(const std::string& path, const std::string& modes) {
  const harness::Scenario sc = harness::load_scenario(path);
  const auto report = harness::compare(sc, parse_modes(modes));
  std::cout << report.to_text();
  return kExitOk;
}

int cmd_schedule_dump(const std::string& scenario_path) {
  harness::Scenario sc;
  if (!scenario_path.empty()) sc = harness::load_scenario(scenario_path);
  const auto schedule = control::build_schedule(sc.sim.robot, sc.sim.controller);
  std::printf("%-8s %14s %14s %14s %14s %12s\n", "h", "K_x", "K_theta", "K_xdot", "K_thetadot",
              "residual");
  for (std::size_t i = 0; i < schedule.heights.size(); ++i) {
    const auto& k = schedule.gains[i];
    std::printf("%-8.4f %14.6f %14.6f %14.6f %14.6f %12.3e\n", schedule.heights[i], k(0), k(1),
                k(2), k(3), schedule.residuals[i]);
  }
  return kExitOk;
}

int cmd_sweep(const std::string& param, const std::string& range_text,
              const std::string& scenario_path) {
  const Range range = parse_range(range_text);
  const std::string text = read_file(scenario_path);
  std::cout << param;
  for (const auto& [name, value] : harness::metric_fields({})) std::cout << "," << name;
  std::cout << "\n";
  bool any_fall = false;
  bool must_not_fall = false;
  for (int i = 0; i < range.count; ++i) {
    const double v = range.count == 1
                         ? range.first
                         : range.first + (range.last - range.first) * i / (range.count - 1);
    std::ostringstream value;
    value.precision(17);
    value << v;
    const harness::Scenario sc = harness::parse_scenario(text, {{param, value.str()}});
    must_not_fall = sc.must_not_fall;
    const auto result = harness::run(sc);
    any_fall = any_fall || result.metrics.fell;
    std::cout << v;
    for (const auto& [name, m] : harness::metric_fields(result.metrics)) std::cout << "," << m;
    std::cout << "\n";
  }
  return any_fall && must_not_fall ? kExitFell : kExitOk;
}

#ifdef LIFTSIM_WITH_SERVICE
std::atomic<bool> g_interrupted{false};

int cmd_serve(const std::string& scenario_path, service::ServerConfig config) {
  harness::Scenario sc;
  sc.name = "default";
  if (!scenario_path.empty()) sc = harness::load_scenario(scenario_path);
  service::Server server(sc, config);
  const unsigned short port = server.start();
  std::cout << "listening on " << config.address << ":" << port
            << (config.session.lockstep ? " (lockstep)" : "") << std::endl;
  std::signal(SIGINT, [](int) { g_interrupted = true; });
  std::signal(SIGTERM, [](int) { g_interrupted = true; });
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  return kExitOk;
}
#endif

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wheeled humanoid teleoperation simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("liftsim ") + LIFTSIM_VERSION);

  std::string scenario_path;
  std::string out_dir;
  bool metrics_only = false;
  auto* run = app.add_subcommand("run", "Run a scenario, write its log and print metrics");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("--out", out_dir, "Directory for the log (default: current directory)");
  run->add_flag("--metrics-only", metrics_only, "Skip writing the log");

  std::string modes = "VelocityAuto,DcmAuto,DcmManual";
  auto* compare = app.add_subcommand("compare", "Run a scenario template under several modes");
  compare->add_option("template", scenario_path, "Scenario file")->required();
  compare->add_option("--modes", modes, "Comma-separated control modes");

  auto* dump = app.add_subcommand("schedule-dump", "Print the LQR gain schedule");
  dump->add_option("--scenario", scenario_path, "Take parameters from this scenario");

  std::string param;
  std::string range;
  auto* sweep = app.add_subcommand("sweep", "Sweep one scenario field over a range");
  sweep->add_option("param", param, "Dotted scenario field, e.g. payload.mass")->required();
  sweep->add_option("range", range, "start:stop:count")->required();
  sweep->add_option("--scenario", scenario_path, "Base scenario file")->required();

#ifdef LIFTSIM_WITH_SERVICE
  service::ServerConfig server_config;
  server_config.build = std::string("liftsim ") + LIFTSIM_VERSION;
  server_config.session.scenario_dir = LIFTSIM_DEFAULT_SCENARIO_DIR;
  std::string scenario_dir = server_config.session.scenario_dir.string();
  auto* serve = app.add_subcommand("serve", "Start the live session server");
  serve->add_option("--scenario", scenario_path, "Initial scenario file");
  serve->add_option("--address", server_config.address, "Listen address")
      ->envname("LIFTSIM_ADDRESS")
      ->capture_default_str();
  serve->add_option("--port", server_config.port, "Listen port (0 = any)")
      ->envname("LIFTSIM_PORT")
      ->capture_default_str();
  serve->add_option("--telemetry-hz", server_config.session.telemetry_hz, "Telemetry rate")
      ->envname("LIFTSIM_TELEMETRY_HZ")
      ->capture_default_str();
  serve->add_option("--staleness-timeout", server_config.session.staleness_timeout,
                    "Seconds without pilot input before decay starts")
      ->envname("LIFTSIM_STALENESS_TIMEOUT")
      ->capture_default_str();
  serve->add_flag("--lockstep", server_config.session.lockstep,
                  "Advance physics only on pilot input")
      ->envname("LIFTSIM_LOCKSTEP");
  serve->add_option("--ticks-per-input", server_config.session.ticks_per_input,
                    "Lockstep ticks per pilot_input")
      ->capture_default_str();
  serve->add_option("--scenario-dir", scenario_dir, "Directory served by /scenarios")
      ->envname("LIFTSIM_SCENARIO_DIR")
      ->capture_default_str();
#endif

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scenario_path, out_dir, metrics_only);
    if (*compare) return cmd_compare(scenario_path, modes);
    if (*dump) return cmd_schedule_dump(scenario_path);
    if (*sweep) return cmd_sweep(param, range, scenario_path);
#ifdef LIFTSIM_WITH_SERVICE
    if (*serve) {
      server_config.session.scenario_dir = scenario_dir;
      return cmd_serve(scenario_path, server_config);
    }
#endif
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitOk;
}
