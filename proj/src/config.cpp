#include "adiabatica/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <fstream>
#include <set>
#include <sstream>

#include "adiabatica/csv.hpp"

namespace adiabatica {

using nlohmann::json;

namespace {

const std::vector<std::pair<Experiment, std::string>>& experiment_table() {
  static const std::vector<std::pair<Experiment, std::string>> table = {
      {Experiment::A0Map, "a0-map"},
      {Experiment::MaxLocus, "max-locus"},
      {Experiment::FidelityMap, "fidelity-map"},
      {Experiment::ATrace, "atrace"},
      {Experiment::EffectiveModel, "effective-model"},
      {Experiment::Snapshot, "snapshot"},
  };
  return table;
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

}  // namespace

std::string to_string(Experiment e) {
  for (const auto& [k, v] : experiment_table()) {
    if (k == e) return v;
  }
  return "unknown";
}

std::optional<Experiment> parse_experiment(const std::string& tag) {
  for (const auto& [k, v] : experiment_table()) {
    if (v == tag) return k;
  }
  return std::nullopt;
}

const std::vector<std::string>& experiment_tags() {
  static const std::vector<std::string> tags = [] {
    std::vector<std::string> t;
    for (const auto& kv : experiment_table()) t.push_back(kv.second);
    return t;
  }();
  return tags;
}

ModelParams ModelBlock::params(double detuning) const {
  ModelParams p;
  p.mass = mass;
  p.detuning = detuning;
  p.photon_number = photon_number;
  p.frame = frame;
  p.mode = mode;
  return p;
}

std::string ScenarioConfig::canonical() const { return resolved.dump(); }

std::map<std::string, int> locate_keys(const std::string& text) {
  struct Ctx {
    bool object;
    std::string path;
    std::size_t index = 0;
    bool expect_key = true;
    std::string current;
  };
  std::map<std::string, int> lines;
  std::vector<Ctx> stack;
  int line = 1;

  auto value_path = [&]() -> std::string {
    if (stack.empty()) return "";
    Ctx& top = stack.back();
    if (top.object) return top.current;
    std::string p = top.path + "[" + std::to_string(top.index) + "]";
    lines.emplace(p, line);
    return p;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
    } else if (c == '"') {
      std::string s;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\' && i + 1 < text.size()) ++i;
        if (text[i] == '\n') ++line;
        s += text[i];
      }
      if (!stack.empty() && stack.back().object && stack.back().expect_key) {
        Ctx& top = stack.back();
        top.current = join(top.path, s);
        top.expect_key = false;
        lines.emplace(top.current, line);
      } else {
        value_path();
      }
    } else if (c == '{' || c == '[') {
      const std::string p = value_path();
      stack.push_back(Ctx{c == '{', p, 0, true, ""});
    } else if (c == '}' || c == ']') {
      if (!stack.empty()) stack.pop_back();
    } else if (c == ',') {
      if (!stack.empty()) {
        if (stack.back().object) {
          stack.back().expect_key = true;
        } else {
          ++stack.back().index;
        }
      }
    } else if (c == '-' || c == '+' || c == '.' || std::isalnum(static_cast<unsigned char>(c))) {
      value_path();
      while (i + 1 < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i + 1])) || text[i + 1] == '.' ||
              text[i + 1] == '-' || text[i + 1] == '+')) {
        ++i;
      }
    }
  }
  return lines;
}

std::pair<std::string, json> parse_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value", assignment, 0);
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  return {key, value};
}

namespace {

class Validator {
 public:
  Validator(std::map<std::string, int> lines, std::set<std::string> overridden)
      : lines_(std::move(lines)), overridden_(std::move(overridden)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    int line = 0;
    std::string where;
    if (overridden_.count(path) != 0) {
      where = "override";
    } else {
      // Nearest enclosing key that appears in the file.
      std::string p = path;
      while (!p.empty()) {
        auto it = lines_.find(p);
        if (it != lines_.end()) {
          line = it->second;
          break;
        }
        const auto cut = p.find_last_of(".[");
        p = cut == std::string::npos ? "" : p.substr(0, cut);
      }
      where = line > 0 ? "line " + std::to_string(line) : "config";
    }
    throw ConfigError(where + ": " + path + ": " + message, path, line);
  }

 private:
  std::map<std::string, int> lines_;
  std::set<std::string> overridden_;
};

// Typed access to one JSON object; finish() rejects keys that were never read.
class Object {
 public:
  Object(const json& j, std::string path, const Validator& v, json& out)
      : j_(j), path_(std::move(path)), v_(v), out_(out) {
    if (!j_.is_object()) v_.fail(path_.empty() ? "(root)" : path_, "expected an object");
  }

  std::string path(const std::string& key) const { return join(path_, key); }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    out_[key] = j_.at(key);
    return j_.at(key);
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    used_.insert(key);
    if (!j_.contains(key)) {
      if (!fallback) v_.fail(path(key), "required key is missing");
      out_[key] = *fallback;
      return *fallback;
    }
    const json& x = j_.at(key);
    if (!x.is_number()) v_.fail(path(key), "expected a number");
    const double d = x.get<double>();
    if (!std::isfinite(d)) v_.fail(path(key), "must be finite");
    out_[key] = d;
    return d;
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!j_.contains(key)) return std::nullopt;
    return number(key);
  }

  long long integer(const std::string& key, std::optional<long long> fallback = std::nullopt) {
    used_.insert(key);
    if (!j_.contains(key)) {
      if (!fallback) v_.fail(path(key), "required key is missing");
      out_[key] = *fallback;
      return *fallback;
    }
    const json& x = j_.at(key);
    if (!x.is_number_integer()) v_.fail(path(key), "expected an integer");
    const long long n = x.get<long long>();
    out_[key] = n;
    return n;
  }

  std::string string(const std::string& key, const std::vector<std::string>& allowed,
                     std::optional<std::string> fallback = std::nullopt) {
    used_.insert(key);
    std::string s;
    if (!j_.contains(key)) {
      if (!fallback) v_.fail(path(key), "required key is missing");
      s = *fallback;
    } else {
      if (!j_.at(key).is_string()) v_.fail(path(key), "expected a string");
      s = j_.at(key).get<std::string>();
    }
    bool ok = allowed.empty();
    for (const auto& a : allowed) ok = ok || a == s;
    if (!ok) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      v_.fail(path(key), "'" + s + "' is not one of: " + list);
    }
    out_[key] = s;
    return s;
  }

  Object child(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) v_.fail(path(key), "required block is missing");
    return Object(j_.at(key), path(key), v_, out_[key]);
  }

  void finish() const {
    for (const auto& [k, value] : j_.items()) {
      if (used_.count(k) == 0) v_.fail(path(k), "unknown key");
    }
  }

  const Validator& validator() const { return v_; }

 private:
  const json& j_;
  std::string path_;
  const Validator& v_;
  json& out_;
  std::set<std::string> used_;
};

bool is_power_of_two(long long n) { return n >= 4 && (n & (n - 1)) == 0; }

ModeShape read_mode(Object& mode) {
  const std::string shape =
      mode.string("shape", {"gaussian", "standing_wave", "linear", "none", "tabulated"});
  const Validator& v = mode.validator();
  ModeShape out;
  if (shape == "gaussian") {
    const double a = mode.number("amplitude");
    const double w = mode.number("width");
    if (!(w > 0.0)) v.fail(mode.path("width"), "must be positive");
    out = ModeShape::gaussian(a, w);
  } else if (shape == "standing_wave") {
    const double a = mode.number("amplitude");
    const bool has_q = mode.has("wavenumber");
    const bool has_l = mode.has("wavelength");
    if (has_q == has_l) v.fail(mode.path("wavenumber"), "give exactly one of wavenumber, wavelength");
    double q;
    if (has_q) {
      q = mode.number("wavenumber");
      if (!(q > 0.0)) v.fail(mode.path("wavenumber"), "must be positive");
    } else {
      const double l = mode.number("wavelength");
      if (!(l > 0.0)) v.fail(mode.path("wavelength"), "must be positive");
      q = 2.0 * std::numbers::pi / l;
    }
    out = ModeShape::standing_wave(a, q);
  } else if (shape == "linear") {
    out = ModeShape::linear(mode.number("slope"));
  } else if (shape == "none") {
    out = ModeShape::none();
  } else {
    const double x0 = mode.number("x_min");
    const double dx = mode.number("dx");
    if (!(dx > 0.0)) v.fail(mode.path("dx"), "must be positive");
    const json& s = mode.raw("samples");
    if (!s.is_array() || s.size() < 4) v.fail(mode.path("samples"), "expected an array of at least 4 numbers");
    std::vector<double> samples;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s[i].is_number()) v.fail(mode.path("samples") + "[" + std::to_string(i) + "]", "expected a number");
      samples.push_back(s[i].get<double>());
    }
    try {
      out = ModeShape(TabulatedMode(x0, dx, std::move(samples)));
    } catch (const Error& e) {
      v.fail(mode.path("samples"), e.what());
    }
  }
  mode.finish();
  return out;
}

std::vector<double> read_detunings(Object& model) {
  const Validator& v = model.validator();
  const int given = int(model.has("detuning")) + int(model.has("detuning_sweep")) + int(model.has("detunings"));
  if (given != 1) v.fail(model.path("detuning"), "give exactly one of detuning, detunings, detuning_sweep");
  if (model.has("detuning")) return {model.number("detuning")};
  if (model.has("detunings")) {
    const json& arr = model.raw("detunings");
    if (!arr.is_array() || arr.empty()) v.fail(model.path("detunings"), "expected a nonempty array");
    std::vector<double> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number()) v.fail(model.path("detunings") + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(arr[i].get<double>());
    }
    return out;
  }
  Object sweep = model.child("detuning_sweep");
  const double start = sweep.number("start");
  const double stop = sweep.number("stop");
  const long long count = sweep.integer("count");
  const std::string spacing = sweep.string("spacing", {"linear", "log"}, std::string("linear"));
  sweep.finish();
  if (count < 1) v.fail(sweep.path("count"), "must be at least 1");
  if (count == 1 && start != stop) v.fail(sweep.path("count"), "a single point needs start == stop");
  if (spacing == "log" && !(start > 0.0 && stop > 0.0)) {
    v.fail(sweep.path("spacing"), "log spacing needs positive start and stop");
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) {
    const double s = count == 1 ? 0.0 : double(i) / double(count - 1);
    out[static_cast<std::size_t>(i)] =
        spacing == "log" ? std::exp(std::log(start) + s * (std::log(stop) - std::log(start)))
                         : start + s * (stop - start);
  }
  out.front() = start;
  out.back() = stop;
  return out;
}

void set_path(json& root, const std::string& dotted, const json& value) {
  json* node = &root;
  std::size_t begin = 0;
  while (true) {
    const auto dot = dotted.find('.', begin);
    const std::string key = dotted.substr(begin, dot == std::string::npos ? std::string::npos : dot - begin);
    if (key.empty()) throw ConfigError("override key '" + dotted + "' has an empty component", dotted, 0);
    if (!node->is_object()) throw ConfigError("override key '" + dotted + "' descends into a non-object", dotted, 0);
    if (dot == std::string::npos) {
      if (value.is_null()) {
        node->erase(key);
      } else {
        (*node)[key] = value;
      }
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    begin = dot + 1;
  }
}

bool needs(Experiment e, const char* block) {
  const std::string b = block;
  switch (e) {
    case Experiment::A0Map:
    case Experiment::MaxLocus:
      return b == "state" || b == "sweep";
    case Experiment::FidelityMap:
      return b == "grid" || b == "state" || b == "run" || b == "sweep";
    case Experiment::ATrace:
    case Experiment::Snapshot:
      return b == "grid" || b == "state" || b == "run";
    case Experiment::EffectiveModel:
      return b == "state" || b == "run";
  }
  return false;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::vector<std::string>& overrides,
                            std::optional<Experiment> experiment) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1;
    std::size_t col = 0;
    const std::size_t end = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n' && i + 1 < end) {
        ++line;
        col = 0;
      } else {
        ++col;
      }
    }
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                          ": parse error: " + e.what(),
                      "", line);
  }
  if (!root.is_object()) throw ConfigError("line 1: the configuration must be a JSON object", "", 1);

  std::set<std::string> overridden;
  for (const std::string& o : overrides) {
    auto [key, value] = parse_override(o);
    set_path(root, key, value);
    overridden.insert(key);
  }
  const Validator v(locate_keys(text), overridden);

  ScenarioConfig cfg;
  json& out = cfg.resolved;
  out = json::object();
  Object top(root, "", v, out);

  if (top.has("experiment")) {
    std::string tag = top.string("experiment", experiment_tags());
    if (!experiment) experiment = parse_experiment(tag);
  }
  if (experiment) out["experiment"] = to_string(*experiment);
  cfg.experiment = experiment;

  {
    Object m = top.child("model");
    cfg.model.mass = m.number("mass", 1.0);
    if (!(cfg.model.mass > 0.0)) v.fail(m.path("mass"), "must be positive");
    cfg.model.detunings = read_detunings(m);
    const long long n = m.integer("photon_number", 1);
    if (n < 1 || n > 1000000000) v.fail(m.path("photon_number"), "must be a positive integer");
    cfg.model.photon_number = static_cast<int>(n);
    cfg.model.frame = m.string("frame", {"case1", "case2"}, std::string("case1")) == "case1"
                          ? FrameCase::Case1
                          : FrameCase::Case2;
    Object mode = m.child("mode");
    cfg.model.mode = read_mode(mode);
    m.finish();
    try {
      cfg.model.params(cfg.model.detunings.front()).validate();
    } catch (const Error& e) {
      v.fail("model", e.what());
    }
  }

  auto want = [&](const char* block) {
    return top.has(block) || (experiment && needs(*experiment, block));
  };

  if (want("grid")) {
    Object g = top.child("grid");
    GridBlock gb;
    const long long pts = g.integer("points");
    if (!is_power_of_two(pts)) v.fail(g.path("points"), "must be a power of two >= 4");
    gb.points = static_cast<std::size_t>(pts);
    gb.x_min = g.number("x_min");
    gb.x_max = g.number("x_max");
    if (!(gb.x_max > gb.x_min)) v.fail(g.path("x_max"), "must exceed x_min");
    g.finish();
    cfg.grid = gb;
  }

  if (want("state")) {
    Object s = top.child("state");
    StateBlock sb;
    sb.x0 = s.number("x0", 0.0);
    sb.p0 = s.number("p0");
    sb.width = s.number("width", 1.0);
    if (!(sb.width > 0.0)) v.fail(s.path("width"), "must be positive");
    sb.basis = s.string("basis", {"bare", "adiabatic"}, std::string("bare")) == "bare" ? Basis::Bare
                                                                                     : Basis::Adiabatic;
    sb.upper = s.number("upper", 1.0);
    sb.lower = s.number("lower", 0.0);
    if (sb.upper == 0.0 && sb.lower == 0.0) v.fail(s.path("upper"), "upper and lower cannot both vanish");
    if (cfg.grid) {
      if (sb.x0 - 5.0 * sb.width < cfg.grid->x_min || sb.x0 + 5.0 * sb.width > cfg.grid->x_max) {
        v.fail(s.path("x0"), "packet is closer than 5 widths to the grid edge");
      }
      const double dx = (cfg.grid->x_max - cfg.grid->x_min) / double(cfg.grid->points);
      if (std::numbers::pi / dx <= std::abs(sb.p0) + 6.0 / sb.width) {
        v.fail("grid.points", "grid too coarse: Nyquist momentum " + csv::number(std::numbers::pi / dx) +
                                  " does not exceed |p0| + 6/width");
      }
    }
    s.finish();
    cfg.state = sb;
  }

  if (want("run")) {
    Object r = top.child("run");
    RunBlock rb;
    rb.t_final = r.optional_number("t_final");
    rb.x_stop = r.optional_number("x_stop");
    rb.dt = r.optional_number("dt");
    const long long stride = r.integer("stride", 1);
    if (stride < 1) v.fail(r.path("stride"), "must be at least 1");
    rb.stride = static_cast<std::size_t>(stride);
    if (rb.t_final && !(*rb.t_final > 0.0)) v.fail(r.path("t_final"), "must be positive");
    if (rb.dt && !(*rb.dt > 0.0)) v.fail(r.path("dt"), "must be positive");
    if (!rb.t_final && !rb.x_stop) v.fail(r.path("t_final"), "give t_final or x_stop");
    if (experiment == Experiment::EffectiveModel && !rb.t_final) {
      v.fail(r.path("t_final"), "effective-model needs t_final");
    }
    if (rb.x_stop && cfg.grid && !(*rb.x_stop < cfg.grid->x_max && *rb.x_stop > cfg.grid->x_min)) {
      v.fail(r.path("x_stop"), "must lie inside the grid");
    }
    if (rb.x_stop && cfg.state && *rb.x_stop <= cfg.state->x0 && cfg.state->p0 >= 0.0) {
      v.fail(r.path("x_stop"), "must lie ahead of x0 in the direction of p0");
    }
    r.finish();
    cfg.run = rb;
  }

  if (want("sweep")) {
    Object s = top.child("sweep");
    SweepBlock sb;
    sb.x_min = s.number("x_min");
    sb.x_max = s.number("x_max");
    if (!(sb.x_max > sb.x_min)) v.fail(s.path("x_max"), "must exceed x_min");
    const long long pts = s.integer("points");
    if (pts < 3) v.fail(s.path("points"), "must be at least 3");
    sb.points = static_cast<std::size_t>(pts);
    sb.abscissa = s.string("abscissa", {"measured", "nominal"}, std::string("measured")) == "measured"
                      ? Abscissa::Measured
                      : Abscissa::Nominal;
    s.finish();
    cfg.sweep = sb;
  }

  top.finish();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides,
                           std::optional<Experiment> experiment) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string(), "", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), overrides, experiment);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what(), e.key(), e.line());
  }
}

Scenario make_scenario(const ScenarioConfig& config, double detuning, ExecutionPolicy policy) {
  if (!config.grid || !config.state || !config.run) {
    throw InvalidArgument("make_scenario: config needs grid, state and run blocks");
  }
  Scenario sc;
  sc.params = config.model.params(detuning);
  sc.grid = make_grid(config.grid->points, config.grid->x_min, config.grid->x_max);
  const StateBlock& s = *config.state;
  const double norm = std::hypot(s.upper, s.lower);
  sc.state = {s.x0, s.p0, s.width, s.basis, s.upper / norm, s.lower / norm};
  sc.dt = config.run->dt ? *config.run->dt : default_time_step(sc.params, *sc.grid, s.p0, s.width);
  sc.t_final = config.run->t_final;
  sc.x_stop = config.run->x_stop;
  sc.stride = config.run->stride;
  sc.policy = policy;
  return sc;
}

}  // namespace adiabatica
