#include "liftsim/log.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "liftsim/errors.hpp"

namespace liftsim {

namespace {

void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

double parse_number(std::string_view field, std::string_view column, int line) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw ParseError(std::string(column), line, "not a number: '" + std::string(field) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

std::string format_log_row(const LogRecord& r) {
  std::string out;
  out.reserve(400);
  for (double v : {r.t, r.x_R, r.theta_R, r.xdot_R, r.thetadot_R, r.h_R, r.phi1, r.phi2,
                   r.theta_H, r.thetadot_H, r.h_H, r.p_H, r.theta_star, r.thetadot_star, r.xi_R,
                   r.xi_H, r.xi_star, r.u, r.F_fb, r.F_ff, r.M_ext}) {
    append_number(out, v);
    out.push_back(',');
  }
  out.append(retarget::to_string(r.mode));
  out.push_back(',');
  out.push_back(r.payload_attached ? '1' : '0');
  return out;
}

std::string format_log(const Log& log) {
  std::string out;
  for (std::size_t i = 0; i < kLogColumns.size(); ++i) {
    if (i) out.push_back(',');
    out.append(kLogColumns[i]);
  }
  out.push_back('\n');
  for (const LogRecord& r : log) {
    out += format_log_row(r);
    out.push_back('\n');
  }
  return out;
}

Log parse_log(std::string_view text) {
  Log log;
  int line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = split(line);
    if (!header_seen) {
      if (fields.size() != kLogColumns.size()) {
        throw ParseError("", line_no, "log header must have " +
                                          std::to_string(kLogColumns.size()) + " columns");
      }
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] != kLogColumns[i]) {
          throw ParseError(std::string(fields[i]), line_no,
                           "expected column '" + std::string(kLogColumns[i]) + "'");
        }
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != kLogColumns.size()) {
      throw ParseError("", line_no, "row has " + std::to_string(fields.size()) + " fields");
    }
    LogRecord r;
    double* numeric[] = {&r.t,          &r.x_R,        &r.theta_R,       &r.xdot_R,
                         &r.thetadot_R, &r.h_R,        &r.phi1,          &r.phi2,
                         &r.theta_H,    &r.thetadot_H, &r.h_H,           &r.p_H,
                         &r.theta_star, &r.thetadot_star, &r.xi_R,       &r.xi_H,
                         &r.xi_star,    &r.u,          &r.F_fb,          &r.F_ff,
                         &r.M_ext};
    for (std::size_t i = 0; i < std::size(numeric); ++i) {
      *numeric[i] = parse_number(fields[i], kLogColumns[i], line_no);
    }
    const auto mode = retarget::parse_mode(fields[21]);
    if (!mode) throw ParseError("mode", line_no, "unknown mode '" + std::string(fields[21]) + "'");
    r.mode = *mode;
    if (fields[22] != "0" && fields[22] != "1") {
      throw ParseError("payload_attached", line_no, "expected 0 or 1");
    }
    r.payload_attached = fields[22] == "1";
    log.push_back(r);
  }
  if (!header_seen) throw ParseError("", 0, "empty log");
  return log;
}

void write_log(const Log& log, const std::filesystem::path& path) {
  const std::string text = format_log(log);
  std::filesystem::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("write failed for " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot move log into place at " + path.string());
  }
}

Log read_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_log(ss.str());
}

}  // namespace liftsim
