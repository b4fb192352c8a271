#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcbound/isampler.hpp"

namespace mcbound {

enum class ExperimentKind { kMg1, kIsampler, kCustomDiscrete };

const char* to_string(ExperimentKind k);

struct Mg1Section {
  std::vector<double> rho{0.5};
  double alpha = 2.5;
  double b_tail = 1.0;
  std::vector<std::size_t> x0{1, 3, 6};
  std::optional<std::size_t> truncation;  // default depends on rho
  double tail_tolerance = 1e-6;
};

struct CustomSection {
  std::string kernel_csv;  // resolved relative to the config file
  std::size_t x0 = 0;
  /// W0 on states; either listed or 1 + slope (x - x0)_+.
  std::vector<double> w0;
  double w0_slope = 0.0;
  /// Drift generator: "constant" (phi = 1, r = 1) or "polynomial".
  std::string phi = "constant";
  double phi_c = 1.0;
  double phi_alpha = 2.0;
  double b0 = 0.0;
};

struct BoundSection {
  std::size_t nmax = 10000;
  double threshold = 0.1;
  double young_p = 2.0;
  double young_rho = 0.5;
  double start_x = 10.0;
};

struct VerifySection {
  bool enabled = true;
  std::size_t nmax = 200;
  bool coupling = false;
  std::size_t replicas = 10000;
  std::string coupling_kind = "ordered";
  std::size_t x_prime = 0;
};

struct OutputSection {
  std::string dir = "out";
  std::string prefix;  // defaults to the experiment name
  bool svg = true;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ExperimentKind kind = ExperimentKind::kMg1;
  std::uint64_t seed = 42;
  unsigned threads = 1;
  Mg1Section mg1;
  isampler::Config isampler;
  CustomSection custom;
  BoundSection bound;
  VerifySection verify;
  OutputSection output;
};

/// Parses a YAML experiment file. Unknown keys, wrong types and out-of-range
/// values raise ConfigurationError whose message carries the key path and
/// line number.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = ".");

}  // namespace mcbound
