#include "wqc/cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace wqc::cli {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

// Reads one mapping, reporting unknown keys and ill-typed values into a shared
// list so that a single pass surfaces every problem in the file.
class Section {
 public:
  Section(const YAML::Node& node, std::string path, std::vector<std::string>& errors)
      : node_(node), path_(std::move(path)), errors_(errors) {
    if (present(node_) && !node_.IsMap()) {
      errors_.push_back(path_ + ": expected a mapping");
      node_ = YAML::Node();
    }
  }

  ~Section() {
    if (!node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) errors_.push_back(where(key) + ": unknown key");
    }
  }

  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  /// The value under `key`; a null node when absent or explicitly null.
  [[nodiscard]] YAML::Node child(const std::string& key) {
    seen_.insert(key);
    if (node_.IsMap())
      if (auto n = node_[key]; n.IsDefined()) return n;
    return YAML::Node();
  }

  static bool present(const YAML::Node& n) { return n.IsDefined() && !n.IsNull(); }

  [[nodiscard]] std::string where(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void number(const std::string& key, double& out) {
    if (auto n = child(key); present(n)) {
      if (auto v = as_double(n)) out = *v;
      else errors_.push_back(where(key) + ": expected a number");
    }
  }

  void optional_number(const std::string& key, std::optional<double>& out) {
    if (auto n = child(key); present(n)) {
      if (auto v = as_double(n)) out = *v;
      else errors_.push_back(where(key) + ": expected a number");
    }
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (auto n = child(key); present(n)) {
      try {
        const auto v = n.as<long long>();
        if (v < 0) {
          errors_.push_back(where(key) + ": must be >= 0");
          return;
        }
        out = static_cast<Int>(v);
      } catch (const YAML::Exception&) {
        errors_.push_back(where(key) + ": expected a non-negative integer");
      }
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (auto n = child(key); present(n)) {
      try {
        out = n.as<bool>();
      } catch (const YAML::Exception&) {
        errors_.push_back(where(key) + ": expected true or false");
      }
    }
  }

  void string(const std::string& key, std::string& out) {
    if (auto n = child(key); present(n)) {
      if (n.IsScalar()) out = n.as<std::string>();
      else errors_.push_back(where(key) + ": expected a string");
    }
  }

  void number_list(const std::string& key, std::vector<double>& out) {
    auto n = child(key);
    if (!present(n)) return;
    if (!n.IsSequence()) {
      errors_.push_back(where(key) + ": expected a list of numbers");
      return;
    }
    out.clear();
    for (std::size_t i = 0; i < n.size(); ++i) {
      if (auto v = as_double(n[i])) out.push_back(*v);
      else errors_.push_back(where(key) + "[" + std::to_string(i) + "]: expected a number");
    }
  }

  static std::optional<double> as_double(const YAML::Node& n) {
    if (!n.IsScalar()) return std::nullopt;
    const auto s = n.as<std::string>();
    if (s == "inf" || s == "infinity" || s == "Infinity") return kInfinity;
    try {
      return n.as<double>();
    } catch (const YAML::Exception&) {
      return std::nullopt;
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

RunConfig from_yaml(const YAML::Node& root) {
  std::vector<std::string> errors;
  RunConfig c;
  {
    Section top(root, "", errors);
    {
      Section s(top.child("billiard"), "billiard", errors);
      auto& b = c.billiard;
      s.number("Lx", b.Lx);
      s.number("Ly", b.Ly);
      s.number("R", b.R);
      s.number("eps", b.eps);
      s.number("mass", b.mass);
      s.number("energy", b.energy);
      s.number("gamma0", b.gamma0);
    }
    {
      Section s(top.child("window"), "window", errors);
      s.optional_number("center", c.window.center);
      s.number("levels", c.window.levels);
      s.number("buffer_fraction", c.window.buffer_fraction);
      s.boolean("recenter", c.window.recenter);
    }
    {
      Section s(top.child("classical"), "classical", errors);
      s.integer("piston_hits", c.classical.piston_hits);
      s.integer("segments", c.classical.segments);
      s.number("omega_max", c.classical.omega_max);
      s.integer("grid_points", c.classical.grid_points);
      s.number_list("count_windows", c.classical.count_windows);
    }
    {
      Section s(top.child("measures"), "measures", errors);
      std::string kind(measures::to_string(c.measures.weight));
      s.string("weight", kind);
      try {
        c.measures.weight = measures::weight_kind_from_string(kind);
      } catch (const std::exception&) {
        errors.push_back("measures.weight: expected exponential or rectangular, got '" + kind + "'");
      }
      s.optional_number("b_c", c.measures.b_c);
      std::string rule(to_string(c.measures.bc_rule));
      s.string("bc_rule", rule);
      if (rule == "detect") c.measures.bc_rule = BcRule::Detect;
      else if (rule == "deltaR") c.measures.bc_rule = BcRule::DeltaR;
      else if (rule == "driving") c.measures.bc_rule = BcRule::Driving;
      else errors.push_back("measures.bc_rule: expected detect, deltaR or driving, got '" + rule + "'");
      s.number("alpha", c.measures.alpha);
      s.number("probe_fraction", c.measures.probe_fraction);
    }
    {
      Section s(top.child("stats"), "stats", errors);
      s.integer("histogram_bins", c.stats.histogram_bins);
      s.number("min_spacing", c.stats.min_spacing);
    }
    {
      Section s(top.child("driving"), "driving", errors);
      s.number("fdot_rms", c.driving.fdot_rms);
      s.optional_number("omega_c", c.driving.omega_c);
      s.number("amplitude", c.driving.amplitude);
      s.number("temperature", c.driving.temperature);
      s.optional_number("g_c", c.driving.g_c);
      s.optional_number("g_s", c.driving.g_s);
    }
    {
      Section s(top.child("sweep"), "sweep", errors);
      s.number_list("u", c.sweep.u);
      s.number_list("hbar", c.sweep.hbar);
    }
    std::uint64_t seed = c.seed;
    top.integer("seed", seed);
    c.seed = seed;
    top.string("out_dir", c.out_dir);
    unsigned jobs = c.jobs;
    top.integer("jobs", jobs);
    c.jobs = jobs;
  }
  for (auto& e : validate(c)) errors.push_back(std::move(e));
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

}  // namespace

std::string_view to_string(BcRule r) {
  switch (r) {
    case BcRule::Detect: return "detect";
    case BcRule::DeltaR: return "deltaR";
    case BcRule::Driving: return "driving";
  }
  return "detect";
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error("invalid configuration: " + join(violations)),
      violations_(std::move(violations)) {}

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> e;
  for (const auto& v : c.billiard.violations()) e.push_back("billiard." + v);
  if (c.window.center && !(*c.window.center > 0)) e.emplace_back("window.center: must be positive");
  if (!(c.window.levels >= 2)) e.emplace_back("window.levels: must be >= 2");
  if (!(c.window.buffer_fraction >= 0)) e.emplace_back("window.buffer_fraction: must be >= 0");
  if (c.classical.piston_hits < 2) e.emplace_back("classical.piston_hits: must be >= 2");
  if (c.classical.segments < 1) e.emplace_back("classical.segments: must be >= 1");
  if (!(c.classical.omega_max > 0)) e.emplace_back("classical.omega_max: must be positive");
  if (c.classical.grid_points < 2) e.emplace_back("classical.grid_points: must be >= 2");
  for (double w : c.classical.count_windows)
    if (!(w > 0)) e.emplace_back("classical.count_windows: entries must be positive");
  if (c.measures.b_c && !(*c.measures.b_c > 0)) e.emplace_back("measures.b_c: must be positive");
  if (c.measures.b_c && c.measures.weight == measures::BandWeight::Kind::Rectangular && *c.measures.b_c < 1)
    e.emplace_back("measures.b_c: rectangular weight needs b_c >= 1");
  if (!(c.measures.alpha >= 1)) e.emplace_back("measures.alpha: must be >= 1");
  if (!(c.measures.probe_fraction >= 0 && c.measures.probe_fraction < 0.5))
    e.emplace_back("measures.probe_fraction: must lie in [0, 0.5)");
  if (c.stats.histogram_bins < 1) e.emplace_back("stats.histogram_bins: must be >= 1");
  if (!(c.stats.min_spacing >= 0)) e.emplace_back("stats.min_spacing: must be >= 0");
  if (!(c.driving.fdot_rms > 0)) e.emplace_back("driving.fdot_rms: must be positive");
  if (c.driving.omega_c && !(*c.driving.omega_c > 0)) e.emplace_back("driving.omega_c: must be positive");
  if (!(c.driving.amplitude > 0)) e.emplace_back("driving.amplitude: must be positive");
  if (c.driving.g_c && !(*c.driving.g_c >= 0)) e.emplace_back("driving.g_c: must be >= 0");
  if (c.driving.g_s && !(*c.driving.g_s >= 0)) e.emplace_back("driving.g_s: must be >= 0");
  if (c.driving.g_c.has_value() != c.driving.g_s.has_value())
    e.emplace_back("driving: give both g_c and g_s or neither");
  for (double u : c.sweep.u)
    if (!(u > 0)) e.emplace_back("sweep.u: entries must be positive");
  for (double h : c.sweep.hbar)
    if (!(h > 0)) e.emplace_back("sweep.hbar: entries must be positive");
  if (c.out_dir.empty()) e.emplace_back("out_dir: must not be empty");
  if (c.jobs < 1) e.emplace_back("jobs: must be >= 1");
  return e;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read config file '" + path + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

RunConfig parse_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& ex) {
    throw ConfigError({std::string("syntax error: ") + ex.what()});
  }
  return from_yaml(root);
}

nlohmann::json to_json(const RunConfig& c) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  const auto& b = c.billiard;
  json j;
  j["billiard"] = {{"Lx", b.Lx},
                   {"Ly", b.Ly},
                   {"R", b.integrable() ? json("inf") : json(b.R)},
                   {"eps", b.eps},
                   {"mass", b.mass},
                   {"energy", b.energy},
                   {"gamma0", b.gamma0}};
  j["window"] = {{"center", opt(c.window.center)},
                 {"levels", c.window.levels},
                 {"buffer_fraction", c.window.buffer_fraction},
                 {"recenter", c.window.recenter}};
  j["classical"] = {{"piston_hits", c.classical.piston_hits},
                    {"segments", c.classical.segments},
                    {"omega_max", c.classical.omega_max},
                    {"grid_points", c.classical.grid_points},
                    {"count_windows", c.classical.count_windows}};
  j["measures"] = {{"weight", std::string(measures::to_string(c.measures.weight))},
                   {"b_c", opt(c.measures.b_c)},
                   {"bc_rule", std::string(to_string(c.measures.bc_rule))},
                   {"alpha", c.measures.alpha},
                   {"probe_fraction", c.measures.probe_fraction}};
  j["stats"] = {{"histogram_bins", c.stats.histogram_bins}, {"min_spacing", c.stats.min_spacing}};
  j["driving"] = {{"fdot_rms", c.driving.fdot_rms},
                  {"omega_c", opt(c.driving.omega_c)},
                  {"amplitude", c.driving.amplitude},
                  {"temperature", c.driving.temperature},
                  {"g_c", opt(c.driving.g_c)},
                  {"g_s", opt(c.driving.g_s)}};
  j["sweep"] = {{"u", c.sweep.u}, {"hbar", c.sweep.hbar}};
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  j["jobs"] = c.jobs;
  return j;
}

std::string config_hash(const RunConfig& c) {
  // The output location and thread count do not change any numeric result.
  auto j = to_json(c);
  j.erase("out_dir");
  j.erase("jobs");
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace wqc::cli
