#include "liftsim/errors.hpp"

namespace liftsim {

namespace {

std::string format_parse_error(const std::string& field, int line, const std::string& message) {
  std::string out;
  if (line > 0) out += "line " + std::to_string(line) + ": ";
  if (!field.empty()) out += "field '" + field + "': ";
  out += message;
  return out;
}

}  // namespace

ParseError::ParseError(const std::string& field, int line, const std::string& message)
    : std::runtime_error(format_parse_error(field, line, message)), field_(field), line_(line) {}

}  // namespace liftsim
