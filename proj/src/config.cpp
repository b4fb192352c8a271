#include "mcbound/config.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "mcbound/errors.hpp"

namespace mcbound {
namespace {

[[noreturn]] void fail(const std::string& key, const YAML::Node& node, const std::string& msg) {
  std::ostringstream os;
  os << "config key '" << key << "'";
  if (node.IsDefined() && node.Mark().line >= 0) os << " (line " << node.Mark().line + 1 << ")";
  os << ": " << msg;
  throw ConfigurationError("config: " + key, os.str());
}

// Reads one mapping, remembering which keys were consumed so that typos are
// reported instead of silently ignored.
class Section {
 public:
  Section(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_.IsDefined() && !node_.IsNull() && !node_.IsMap()) {
      fail(path_, node_, "expected a mapping");
    }
  }

  bool has(const std::string& key) const { return node_.IsMap() && node_[key].IsDefined(); }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!has(key)) return;
    const YAML::Node v = node_[key];
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      fail(full(key), v, "value '" + YAML::Dump(v) + "' has the wrong type");
    }
  }

  template <class T>
  void get_list(const std::string& key, std::vector<T>& out) {
    seen_.insert(key);
    if (!has(key)) return;
    const YAML::Node v = node_[key];
    try {
      if (v.IsSequence()) {
        out = v.as<std::vector<T>>();
      } else {
        out = {v.as<T>()};
      }
    } catch (const YAML::Exception&) {
      fail(full(key), v, "expected a value or a list of values");
    }
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    return Section(node_.IsMap() ? node_[key] : YAML::Node(), full(key));
  }

  const YAML::Node& node() const { return node_; }
  std::string full(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void reject_unknown() const {
    if (!node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) fail(full(key), kv.first, "unknown key");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

ExperimentKind parse_kind(const std::string& s, const YAML::Node& node) {
  if (s == "mg1") return ExperimentKind::kMg1;
  if (s == "isampler") return ExperimentKind::kIsampler;
  if (s == "custom-discrete") return ExperimentKind::kCustomDiscrete;
  fail("kind", node, "expected one of mg1, isampler, custom-discrete; got '" + s + "'");
}

}  // namespace

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kMg1: return "mg1";
    case ExperimentKind::kIsampler: return "isampler";
    case ExperimentKind::kCustomDiscrete: return "custom-discrete";
  }
  return "mg1";
}

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << "YAML syntax error at line " << e.mark.line + 1 << ", column " << e.mark.column + 1
       << ": " << e.msg;
    throw ConfigurationError("config: parse", os.str());
  }
  Section top(root, "");
  ExperimentConfig cfg;
  top.get("name", cfg.name);
  std::string kind;
  top.get("kind", kind);
  if (kind.empty()) fail("kind", root, "missing; expected mg1, isampler or custom-discrete");
  cfg.kind = parse_kind(kind, root["kind"]);
  top.get("seed", cfg.seed);
  top.get("threads", cfg.threads);

  if (cfg.kind == ExperimentKind::kIsampler) cfg.bound.start_x = 1.0;

  {
    Section s = top.child("mg1");
    s.get_list("rho", cfg.mg1.rho);
    s.get("alpha", cfg.mg1.alpha);
    s.get("b_tail", cfg.mg1.b_tail);
    s.get_list("x0", cfg.mg1.x0);
    std::size_t trunc = 0;
    s.get("truncation", trunc);
    if (trunc) cfg.mg1.truncation = trunc;
    s.get("tail_tolerance", cfg.mg1.tail_tolerance);
    s.reject_unknown();
    for (double rho : cfg.mg1.rho) {
      if (!(rho > 0.0 && rho < 1.0)) fail(s.full("rho"), s.node()["rho"], "each rho must lie in (0, 1)");
    }
    if (!(cfg.mg1.alpha > 1.0)) fail(s.full("alpha"), s.node()["alpha"], "alpha must exceed 1");
    for (std::size_t x0 : cfg.mg1.x0) {
      if (x0 < 1) fail(s.full("x0"), s.node()["x0"], "x0 = 1 is the atom; smaller values are not small sets");
    }
  }
  {
    Section s = top.child("isampler");
    s.get("r", cfg.isampler.r);
    s.get("alpha", cfg.isampler.alpha);
    s.get("eta_star", cfg.isampler.eta_star);
    s.get("grid_n", cfg.isampler.grid_n);
    s.get("pi_cells", cfg.isampler.pi_cells);
    std::string mode = isampler::to_string(cfg.isampler.rate_mode);
    s.get("rate_mode", mode);
    try {
      cfg.isampler.rate_mode = isampler::rate_mode_from_string(mode);
    } catch (const ConfigurationError& e) {
      fail(s.full("rate_mode"), s.node()["rate_mode"], e.what());
    }
    s.reject_unknown();
    if (cfg.kind == ExperimentKind::kIsampler) {
      try {
        cfg.isampler.validate();
      } catch (const ConfigurationError& e) {
        std::string key = "alpha";
        if (e.invariant() == "r > 0") key = "r";
        if (e.invariant() == "0 < eta* < r + 1") key = "eta_star";
        fail(s.full(key), s.node()[key], e.what());
      }
    }
  }
  {
    Section s = top.child("custom");
    s.get("kernel_csv", cfg.custom.kernel_csv);
    s.get("x0", cfg.custom.x0);
    s.get_list("w0", cfg.custom.w0);
    s.get("w0_slope", cfg.custom.w0_slope);
    s.get("phi", cfg.custom.phi);
    s.get("phi_c", cfg.custom.phi_c);
    s.get("phi_alpha", cfg.custom.phi_alpha);
    s.get("b0", cfg.custom.b0);
    s.reject_unknown();
    if (!cfg.custom.kernel_csv.empty() &&
        std::filesystem::path(cfg.custom.kernel_csv).is_relative()) {
      cfg.custom.kernel_csv = (std::filesystem::path(base_dir) / cfg.custom.kernel_csv).string();
    }
    if (cfg.custom.phi != "constant" && cfg.custom.phi != "polynomial") {
      fail(s.full("phi"), s.node()["phi"], "expected constant or polynomial");
    }
    if (cfg.kind == ExperimentKind::kCustomDiscrete && cfg.custom.kernel_csv.empty()) {
      fail(s.full("kernel_csv"), s.node(), "required for kind custom-discrete");
    }
  }
  {
    Section s = top.child("bound");
    s.get("nmax", cfg.bound.nmax);
    s.get("threshold", cfg.bound.threshold);
    s.get("young_p", cfg.bound.young_p);
    s.get("young_rho", cfg.bound.young_rho);
    s.get("x", cfg.bound.start_x);
    s.reject_unknown();
    if (cfg.bound.nmax < 1) fail(s.full("nmax"), s.node()["nmax"], "must be at least 1");
  }
  {
    Section s = top.child("verify");
    s.get("enabled", cfg.verify.enabled);
    s.get("nmax", cfg.verify.nmax);
    s.get("coupling", cfg.verify.coupling);
    s.get("replicas", cfg.verify.replicas);
    s.get("coupling_kind", cfg.verify.coupling_kind);
    s.get("x_prime", cfg.verify.x_prime);
    s.reject_unknown();
    if (cfg.verify.coupling_kind != "ordered" && cfg.verify.coupling_kind != "independent") {
      fail(s.full("coupling_kind"), s.node()["coupling_kind"], "expected ordered or independent");
    }
  }
  {
    Section s = top.child("output");
    s.get("dir", cfg.output.dir);
    s.get("prefix", cfg.output.prefix);
    s.get("svg", cfg.output.svg);
    s.reject_unknown();
  }
  top.reject_unknown();
  if (cfg.output.prefix.empty()) cfg.output.prefix = cfg.name;
  cfg.isampler.start_x = cfg.bound.start_x;
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("config: readable", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), dir.empty() ? "." : dir.string());
}

}  // namespace mcbound
