#include "liftsim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "liftsim/errors.hpp"

namespace liftsim::harness {

using retarget::ControlMode;

double Profile::value(double t) const {
  if (knots.empty()) return fallback;
  if (t <= knots.front().t) return knots.front().value;
  if (t >= knots.back().t) return knots.back().value;
  const auto next = std::upper_bound(knots.begin(), knots.end(), t,
                                     [](double tt, const Knot& k) { return tt < k.t; });
  const Knot& a = *(next - 1);
  const Knot& b = *next;
  const double s = (t - a.t) / (b.t - a.t);
  return a.value + (b.value - a.value) * s * s * (3.0 - 2.0 * s);
}

double Profile::rate(double t) const {
  if (knots.size() < 2 || t <= knots.front().t || t >= knots.back().t) return 0.0;
  const auto next = std::upper_bound(knots.begin(), knots.end(), t,
                                     [](double tt, const Knot& k) { return tt < k.t; });
  const Knot& a = *(next - 1);
  const Knot& b = *next;
  const double span = b.t - a.t;
  const double s = (t - a.t) / span;
  return (b.value - a.value) * 6.0 * s * (1.0 - s) / span;
}

bool Profile::operator==(const Profile& other) const {
  if (knots != other.knots) return false;
  return !knots.empty() || fallback == other.fallback;
}

bool Switch::value(double t) const {
  bool v = false;
  for (const SwitchKnot& k : knots) {
    if (k.t > t) break;
    v = k.value;
  }
  return v;
}

retarget::HumanState PilotScript::sample(double t, ControlMode mode) const {
  retarget::HumanState h;
  h.theta_H = theta_H.value(t);
  h.thetadot_H = theta_H.rate(t);
  h.h_H = h_H.value(t);
  h.p_H = p_H.value(t);
  h.phi_1_cmd = phi_1.value(t);
  h.phi_2_cmd = phi_2.value(t);
  h.grasp_trigger = grasp.value(t);
  h.comp_trigger = comp.value(t);
  h.mode_request = mode;
  return h;
}

ControlMode Scenario::mode_at(double t) const {
  ControlMode m = sim.initial_mode;
  for (const ModeSwitch& s : modes) {
    if (s.t > t) break;
    m = s.mode;
  }
  return m;
}

retarget::HumanState Scenario::human_at(double t) const { return pilot.sample(t, mode_at(t)); }

double Scenario::external_force(double t) const {
  double f = 0.0;
  for (const Push& p : pushes) {
    if (t >= p.start && t < p.start + p.duration) f += p.force;
  }
  return f;
}

std::size_t Scenario::tick_count() const {
  return static_cast<std::size_t>(std::llround(duration / sim.dt));
}

namespace {

void check_knots(const std::vector<Knot>& knots, const std::string& field) {
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i].t) || !std::isfinite(knots[i].value)) {
      throw ConfigError("pilot." + field + ": knots must be finite");
    }
    if (i > 0 && !(knots[i].t > knots[i - 1].t)) {
      throw ConfigError("pilot." + field + ": knot times must be strictly ascending");
    }
  }
}

void check_switch(const std::vector<SwitchKnot>& knots, const std::string& field) {
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i].t > knots[i - 1].t)) {
      throw ConfigError("pilot." + field + ": switch times must be strictly ascending");
    }
  }
}

}  // namespace

void Scenario::validate() const {
  if (name.empty()) throw ConfigError("scenario name must not be empty");
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("duration must be > 0");
  if (!(settle_tolerance > 0.0)) throw ConfigError("settle_tolerance must be > 0");
  if (target_x && !std::isfinite(*target_x)) throw ConfigError("target_x must be finite");
  sim.validate();
  check_knots(pilot.theta_H.knots, "theta_H");
  check_knots(pilot.h_H.knots, "h_H");
  check_knots(pilot.p_H.knots, "p_H");
  check_knots(pilot.phi_1.knots, "phi_1");
  check_knots(pilot.phi_2.knots, "phi_2");
  check_switch(pilot.grasp.knots, "grasp");
  check_switch(pilot.comp.knots, "comp");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (!(modes[i].t >= 0.0) || (i > 0 && !(modes[i].t > modes[i - 1].t))) {
      throw ConfigError("modes: times must be >= 0 and strictly ascending");
    }
  }
  for (const Push& p : pushes) {
    if (!(p.duration > 0.0) || !std::isfinite(p.start) || !std::isfinite(p.force)) {
      throw ConfigError("pushes: each push needs a finite start and force and duration > 0");
    }
  }
}

// ---------------------------------------------------------------------------
// YAML reading

namespace {

int line_of(const YAML::Node& node) {
  const int line = node.Mark().line;
  return line >= 0 ? line + 1 : 0;
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& path, const std::string& msg) {
  throw ParseError(path, line_of(node), msg);
}

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

double read_double(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) fail(node, path, "expected a number");
  double v = 0.0;
  try {
    v = node.as<double>();
  } catch (const YAML::Exception&) {
    fail(node, path, "expected a number, got '" + node.Scalar() + "'");
  }
  if (!std::isfinite(v)) fail(node, path, "must be finite");
  return v;
}

bool read_bool(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) fail(node, path, "expected true or false");
  try {
    return node.as<bool>();
  } catch (const YAML::Exception&) {
    fail(node, path, "expected true or false, got '" + node.Scalar() + "'");
  }
}

std::string read_string(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) fail(node, path, "expected a string");
  return node.Scalar();
}

ControlMode read_mode(const YAML::Node& node, const std::string& path) {
  const std::string s = read_string(node, path);
  const auto mode = retarget::parse_mode(s);
  if (!mode) fail(node, path, "unknown control mode '" + s + "'");
  return *mode;
}

// A mapping whose keys are checked against the fields consumed from it.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (!node_.IsMap()) fail(node_, path_.empty() ? "<document>" : path_, "expected a mapping");
  }

  YAML::Node get(const std::string& key) {
    known_.insert(key);
    return node_[key];
  }

  void number(const std::string& key, double& out) {
    const YAML::Node n = get(key);
    if (n) out = read_double(n, join(path_, key));
  }
  void flag(const std::string& key, bool& out) {
    const YAML::Node n = get(key);
    if (n) out = read_bool(n, join(path_, key));
  }
  void text(const std::string& key, std::string& out) {
    const YAML::Node n = get(key);
    if (n) out = read_string(n, join(path_, key));
  }
  bool has(const std::string& key) {
    known_.insert(key);
    return static_cast<bool>(node_[key]);
  }
  std::string path(const std::string& key) const { return join(path_, key); }

  // Rejects keys nobody asked for.
  void finish() const {
    for (const auto& kv : node_) {
      const std::string key = kv.first.Scalar();
      if (!known_.count(key)) fail(kv.first, join(path_, key), "unknown field");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> known_;
};

Profile read_profile(const YAML::Node& node, const std::string& path, double fallback) {
  Profile p;
  p.fallback = fallback;
  if (node.IsScalar()) {
    p.fallback = read_double(node, path);
    return p;
  }
  if (!node.IsSequence()) fail(node, path, "expected a number or a list of [t, value] knots");
  for (std::size_t i = 0; i < node.size(); ++i) {
    const YAML::Node k = node[i];
    const std::string kp = path + "[" + std::to_string(i) + "]";
    if (!k.IsSequence() || k.size() != 2) fail(k, kp, "expected [t, value]");
    p.knots.push_back({read_double(k[0], kp), read_double(k[1], kp)});
  }
  return p;
}

Switch read_switch(const YAML::Node& node, const std::string& path) {
  Switch s;
  if (!node.IsSequence()) fail(node, path, "expected a list of [t, bool] knots");
  for (std::size_t i = 0; i < node.size(); ++i) {
    const YAML::Node k = node[i];
    const std::string kp = path + "[" + std::to_string(i) + "]";
    if (!k.IsSequence() || k.size() != 2) fail(k, kp, "expected [t, bool]");
    s.knots.push_back({read_double(k[0], kp), read_bool(k[1], kp)});
  }
  return s;
}

void read_robot(Section s, RobotParams& r) {
  s.number("m_R", r.m_R);
  s.number("m_wheel", r.m_wheel);
  s.number("r_wheel", r.r_wheel);
  s.number("I_wheel", r.I_wheel);
  s.number("I_body", r.I_body);
  s.number("h_R_nom", r.h_R_nom);
  s.number("h_min", r.h_min);
  s.number("h_max", r.h_max);
  s.number("L_b", r.L_b);
  s.number("L_1", r.L_1);
  s.number("L_2", r.L_2);
  s.number("g", r.g);
  s.finish();
}

// gamma_H and gamma_R default to m_H g and m_R g.
void read_human(Section s, retarget::HumanParams& h, const RobotParams& robot) {
  s.number("m_H", h.m_H);
  s.number("h_H_nom", h.h_H_nom);
  h.gamma_H = h.m_H * robot.g;
  h.gamma_R = robot.weight();
  s.number("gamma_H", h.gamma_H);
  s.number("gamma_R", h.gamma_R);
  s.number("beta_z", h.beta_z);
  s.number("k_v", h.k_v);
  s.number("K_fb", h.K_fb);
  s.number("deadband", h.deadband);
  s.number("foot_half_length", h.foot_half_length);
  s.number("trigger_debounce", h.trigger_debounce);
  s.number("rate_cutoff_hz", h.rate_cutoff_hz);
  s.finish();
}

void read_controller(Section s, control::ControllerConfig& c) {
  if (const YAML::Node q = s.get("Q")) {
    if (!q.IsSequence() || q.size() != 4) fail(q, s.path("Q"), "expected a list of 4 numbers");
    for (std::size_t i = 0; i < 4; ++i) c.Q_diag[i] = read_double(q[i], s.path("Q"));
  }
  s.number("R", c.R);
  double n = c.n_points;
  s.number("n_points", n);
  if (n != std::floor(n)) throw ParseError(s.path("n_points"), 0, "expected an integer");
  c.n_points = static_cast<int>(n);
  s.number("u_max", c.u_max);
  s.finish();
}

void read_initial(Section s, RobotState& r) {
  s.number("x_R", r.x_R);
  s.number("theta_R", r.theta_R);
  s.number("xdot_R", r.xdot_R);
  s.number("thetadot_R", r.thetadot_R);
  s.number("h_R", r.h_R);
  s.number("phi_1", r.phi_1);
  s.number("phi_2", r.phi_2);
  s.finish();
}

Scenario read_document(const YAML::Node& root) {
  Scenario sc;
  Section top(root, "");
  if (!top.has("name")) fail(root, "name", "missing required field");
  top.text("name", sc.name);
  top.text("description", sc.description);
  top.number("duration", sc.duration);
  top.number("dt", sc.sim.dt);
  if (const YAML::Node seed = top.get("seed")) {
    try {
      sc.sim.seed = seed.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      fail(seed, "seed", "expected a non-negative integer");
    }
  }
  top.flag("must_not_fall", sc.must_not_fall);
  if (const YAML::Node tx = top.get("target_x")) sc.target_x = read_double(tx, "target_x");
  top.number("settle_tolerance", sc.settle_tolerance);
  top.number("leg_activity_threshold", sc.sim.leg_activity_threshold);
  if (const YAML::Node m = top.get("mode")) sc.sim.initial_mode = read_mode(m, "mode");

  if (const YAML::Node n = top.get("robot")) read_robot(Section(n, "robot"), sc.sim.robot);
  if (const YAML::Node n = top.get("human")) {
    read_human(Section(n, "human"), sc.sim.human, sc.sim.robot);
  } else {
    sc.sim.human = retarget::HumanParams::with_force_scales(sc.sim.human.m_H, sc.sim.robot);
  }
  if (const YAML::Node n = top.get("plant")) {
    Section s(n, "plant");
    s.number("tau_h", sc.sim.plant.tau_h);
    s.number("tau_arm", sc.sim.plant.tau_arm);
    s.number("max_dt", sc.sim.plant.max_dt);
    s.finish();
  }
  if (const YAML::Node n = top.get("controller")) {
    read_controller(Section(n, "controller"), sc.sim.controller);
  }
  sc.sim.initial.h_R = sc.sim.robot.h_R_nom;
  if (const YAML::Node n = top.get("initial")) read_initial(Section(n, "initial"), sc.sim.initial);
  if (const YAML::Node n = top.get("payload")) {
    Section s(n, "payload");
    s.number("mass", sc.sim.payload.mass);
    s.flag("attached", sc.sim.payload.attached);
    s.flag("compensated", sc.sim.payload.compensated);
    s.number("object_x", sc.sim.payload.object_x);
    s.number("grasp_tolerance", sc.sim.payload.grasp_tolerance);
    s.number("estimate_scale", sc.sim.payload.estimate_scale);
    s.finish();
  }
  if (const YAML::Node n = top.get("noise")) {
    Section s(n, "noise");
    s.number("theta_std", sc.sim.noise.theta_std);
    s.number("thetadot_std", sc.sim.noise.thetadot_std);
    s.finish();
  }
  if (const YAML::Node n = top.get("modes")) {
    if (!n.IsSequence()) fail(n, "modes", "expected a list of {t, mode}");
    for (std::size_t i = 0; i < n.size(); ++i) {
      Section s(n[i], "modes[" + std::to_string(i) + "]");
      ModeSwitch m;
      s.number("t", m.t);
      if (const YAML::Node mode = s.get("mode")) m.mode = read_mode(mode, s.path("mode"));
      else fail(n[i], s.path("mode"), "missing required field");
      s.finish();
      sc.modes.push_back(m);
    }
  }
  sc.pilot.h_H.fallback = sc.sim.human.h_H_nom;
  if (const YAML::Node n = top.get("pilot")) {
    Section s(n, "pilot");
    if (const YAML::Node p = s.get("theta_H")) sc.pilot.theta_H = read_profile(p, "pilot.theta_H", 0.0);
    if (const YAML::Node p = s.get("h_H")) {
      sc.pilot.h_H = read_profile(p, "pilot.h_H", sc.sim.human.h_H_nom);
    }
    if (const YAML::Node p = s.get("p_H")) sc.pilot.p_H = read_profile(p, "pilot.p_H", 0.0);
    if (const YAML::Node p = s.get("phi_1")) sc.pilot.phi_1 = read_profile(p, "pilot.phi_1", 0.0);
    if (const YAML::Node p = s.get("phi_2")) sc.pilot.phi_2 = read_profile(p, "pilot.phi_2", 0.0);
    if (const YAML::Node p = s.get("grasp")) sc.pilot.grasp = read_switch(p, "pilot.grasp");
    if (const YAML::Node p = s.get("comp")) sc.pilot.comp = read_switch(p, "pilot.comp");
    s.finish();
  }
  if (const YAML::Node n = top.get("pushes")) {
    if (!n.IsSequence()) fail(n, "pushes", "expected a list of {start, duration, force}");
    for (std::size_t i = 0; i < n.size(); ++i) {
      Section s(n[i], "pushes[" + std::to_string(i) + "]");
      Push p;
      s.number("start", p.start);
      s.number("duration", p.duration);
      s.number("force", p.force);
      s.finish();
      sc.pushes.push_back(p);
    }
  }
  top.finish();

  try {
    sc.validate();
  } catch (const ConfigError& e) {
    throw ParseError("", 0, e.what());
  }
  return sc;
}

YAML::Node load_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError("", e.mark.line + 1, e.msg);
  }
}

void apply_override(YAML::Node root, const std::string& dotted, const std::string& value) {
  std::vector<std::string> parts;
  std::stringstream ss(dotted);
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  if (parts.empty()) throw ConfigError("empty override path");
  YAML::Node node = root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    const std::string& key = parts[i];
    if (node.IsSequence()) {
      node.reset(node[std::stoul(key)]);
    } else {
      if (!node[key]) node[key] = YAML::Node(YAML::NodeType::Map);
      node.reset(node[key]);
    }
  }
  const YAML::Node v = load_yaml(value);
  if (node.IsSequence()) node[std::stoul(parts.back())] = v;
  else node[parts.back()] = v;
}

}  // namespace

Scenario parse_scenario(const std::string& text) { return parse_scenario(text, {}); }

Scenario parse_scenario(const std::string& text,
                        const std::vector<std::pair<std::string, std::string>>& overrides) {
  YAML::Node root = load_yaml(text);
  if (!root || root.IsNull()) throw ParseError("", 0, "empty scenario");
  for (const auto& [path, value] : overrides) apply_override(root, path, value);
  return read_document(root);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

// ---------------------------------------------------------------------------
// YAML writing

namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void emit_profile(YAML::Emitter& out, const char* key, const Profile& p) {
  out << YAML::Key << key << YAML::Value;
  if (p.knots.empty()) {
    out << num(p.fallback);
    return;
  }
  out << YAML::Flow << YAML::BeginSeq;
  for (const Knot& k : p.knots) out << YAML::BeginSeq << num(k.t) << num(k.value) << YAML::EndSeq;
  out << YAML::EndSeq;
}

void emit_switch(YAML::Emitter& out, const char* key, const Switch& s) {
  out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const SwitchKnot& k : s.knots) {
    out << YAML::BeginSeq << num(k.t) << (k.value ? "true" : "false") << YAML::EndSeq;
  }
  out << YAML::EndSeq;
}

struct Field {
  const char* key;
  double value;
};

void emit_section(YAML::Emitter& out, const char* key, std::initializer_list<Field> fields) {
  out << YAML::Key << key << YAML::Value << YAML::BeginMap;
  for (const Field& f : fields) out << YAML::Key << f.key << YAML::Value << num(f.value);
  out << YAML::EndMap;
}

}  // namespace

std::string emit_scenario(const Scenario& sc) {
  const SimulationSetup& sim = sc.sim;
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << sc.name;
  if (!sc.description.empty()) out << YAML::Key << "description" << YAML::Value << sc.description;
  out << YAML::Key << "duration" << YAML::Value << num(sc.duration);
  out << YAML::Key << "dt" << YAML::Value << num(sim.dt);
  out << YAML::Key << "seed" << YAML::Value << std::to_string(sim.seed);
  out << YAML::Key << "must_not_fall" << YAML::Value << (sc.must_not_fall ? "true" : "false");
  if (sc.target_x) out << YAML::Key << "target_x" << YAML::Value << num(*sc.target_x);
  out << YAML::Key << "settle_tolerance" << YAML::Value << num(sc.settle_tolerance);
  out << YAML::Key << "leg_activity_threshold" << YAML::Value << num(sim.leg_activity_threshold);
  out << YAML::Key << "mode" << YAML::Value << std::string(retarget::to_string(sim.initial_mode));

  const RobotParams& r = sim.robot;
  emit_section(out, "robot",
               {{"m_R", r.m_R}, {"m_wheel", r.m_wheel}, {"r_wheel", r.r_wheel},
                {"I_wheel", r.I_wheel}, {"I_body", r.I_body}, {"h_R_nom", r.h_R_nom},
                {"h_min", r.h_min}, {"h_max", r.h_max}, {"L_b", r.L_b}, {"L_1", r.L_1},
                {"L_2", r.L_2}, {"g", r.g}});
  const retarget::HumanParams& h = sim.human;
  emit_section(out, "human",
               {{"m_H", h.m_H}, {"h_H_nom", h.h_H_nom}, {"gamma_H", h.gamma_H},
                {"gamma_R", h.gamma_R}, {"beta_z", h.beta_z}, {"k_v", h.k_v},
                {"K_fb", h.K_fb}, {"deadband", h.deadband},
                {"foot_half_length", h.foot_half_length},
                {"trigger_debounce", h.trigger_debounce}, {"rate_cutoff_hz", h.rate_cutoff_hz}});
  emit_section(out, "plant",
               {{"tau_h", sim.plant.tau_h}, {"tau_arm", sim.plant.tau_arm},
                {"max_dt", sim.plant.max_dt}});

  const control::ControllerConfig& c = sim.controller;
  out << YAML::Key << "controller" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "Q" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double q : c.Q_diag) out << num(q);
  out << YAML::EndSeq;
  out << YAML::Key << "R" << YAML::Value << num(c.R);
  out << YAML::Key << "n_points" << YAML::Value << std::to_string(c.n_points);
  out << YAML::Key << "u_max" << YAML::Value << num(c.u_max);
  out << YAML::EndMap;

  const RobotState& s = sim.initial;
  emit_section(out, "initial",
               {{"x_R", s.x_R}, {"theta_R", s.theta_R}, {"xdot_R", s.xdot_R},
                {"thetadot_R", s.thetadot_R}, {"h_R", s.h_R}, {"phi_1", s.phi_1},
                {"phi_2", s.phi_2}});

  const PayloadSetup& p = sim.payload;
  out << YAML::Key << "payload" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mass" << YAML::Value << num(p.mass);
  out << YAML::Key << "attached" << YAML::Value << (p.attached ? "true" : "false");
  out << YAML::Key << "compensated" << YAML::Value << (p.compensated ? "true" : "false");
  out << YAML::Key << "object_x" << YAML::Value << num(p.object_x);
  out << YAML::Key << "grasp_tolerance" << YAML::Value << num(p.grasp_tolerance);
  out << YAML::Key << "estimate_scale" << YAML::Value << num(p.estimate_scale);
  out << YAML::EndMap;

  emit_section(out, "noise",
               {{"theta_std", sim.noise.theta_std}, {"thetadot_std", sim.noise.thetadot_std}});

  if (!sc.modes.empty()) {
    out << YAML::Key << "modes" << YAML::Value << YAML::BeginSeq;
    for (const ModeSwitch& m : sc.modes) {
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "t" << YAML::Value << num(m.t)
          << YAML::Key << "mode" << YAML::Value << std::string(retarget::to_string(m.mode))
          << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }

  out << YAML::Key << "pilot" << YAML::Value << YAML::BeginMap;
  emit_profile(out, "theta_H", sc.pilot.theta_H);
  emit_profile(out, "h_H", sc.pilot.h_H);
  emit_profile(out, "p_H", sc.pilot.p_H);
  emit_profile(out, "phi_1", sc.pilot.phi_1);
  emit_profile(out, "phi_2", sc.pilot.phi_2);
  emit_switch(out, "grasp", sc.pilot.grasp);
  emit_switch(out, "comp", sc.pilot.comp);
  out << YAML::EndMap;

  if (!sc.pushes.empty()) {
    out << YAML::Key << "pushes" << YAML::Value << YAML::BeginSeq;
    for (const Push& push : sc.pushes) {
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "start" << YAML::Value
          << num(push.start) << YAML::Key << "duration" << YAML::Value << num(push.duration)
          << YAML::Key << "force" << YAML::Value << num(push.force) << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  const std::string text = emit_scenario(scenario);
  std::filesystem::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << text;
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("cannot write " + path.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace liftsim::harness
