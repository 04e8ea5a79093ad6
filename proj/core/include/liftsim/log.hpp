#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "liftsim/retargeting.hpp"

namespace liftsim {

// One control tick. F_fb holds the force rendered to the pilot, i.e. after
// the K_fb scaling.
struct LogRecord {
  double t = 0.0;
  double x_R = 0.0;
  double theta_R = 0.0;
  double xdot_R = 0.0;
  double thetadot_R = 0.0;
  double h_R = 0.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
  double theta_H = 0.0;
  double thetadot_H = 0.0;
  double h_H = 0.0;
  double p_H = 0.0;
  double theta_star = 0.0;
  double thetadot_star = 0.0;
  double xi_R = 0.0;
  double xi_H = 0.0;
  double xi_star = 0.0;
  double u = 0.0;
  double F_fb = 0.0;
  double F_ff = 0.0;
  double M_ext = 0.0;
  retarget::ControlMode mode = retarget::ControlMode::DcmAuto;
  bool payload_attached = false;

  bool operator==(const LogRecord&) const = default;
};

using Log = std::vector<LogRecord>;

inline constexpr std::array<std::string_view, 23> kLogColumns = {
    "t",          "x_R",     "theta_R",  "xdot_R",     "thetadot_R",    "h_R",
    "phi1",       "phi2",    "theta_H",  "thetadot_H", "h_H",           "p_H",
    "theta_star", "thetadot_star", "xi_R", "xi_H",     "xi_star",       "u",
    "F_fb",       "F_ff",    "M_ext",    "mode",       "payload_attached"};

// Comma-separated, one header row, shortest round-trip number formatting.
std::string format_log(const Log& log);
std::string format_log_row(const LogRecord& record);
Log parse_log(std::string_view text);

// Writes through a temporary file in the target directory and renames it
// into place; a failed write leaves no partial file behind.
void write_log(const Log& log, const std::filesystem::path& path);
Log read_log(const std::filesystem::path& path);

}  // namespace liftsim
