#include "liftsim/params.hpp"

#include <string>

#include "liftsim/errors.hpp"

namespace liftsim {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0)) {
    throw ConfigError(std::string("robot parameter ") + name + " must be > 0 (got " +
                      std::to_string(value) + ")");
  }
}

}  // namespace

void RobotParams::validate() const {
  require_positive(m_R, "m_R");
  require_positive(m_wheel, "m_wheel");
  require_positive(r_wheel, "r_wheel");
  require_positive(I_wheel, "I_wheel");
  require_positive(I_body, "I_body");
  require_positive(h_R_nom, "h_R_nom");
  require_positive(h_min, "h_min");
  require_positive(h_max, "h_max");
  require_positive(L_b, "L_b");
  require_positive(L_1, "L_1");
  require_positive(L_2, "L_2");
  require_positive(g, "g");
  if (!(h_min <= h_R_nom && h_R_nom <= h_max)) {
    throw ConfigError("robot parameters require h_min <= h_R_nom <= h_max");
  }
}

}  // namespace liftsim
