#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcbound/bounds.hpp"
#include "mcbound/config.hpp"
#include "mcbound/isampler.hpp"
#include "mcbound/mg1.hpp"
#include "mcbound/verify.hpp"

namespace mcbound {

/// One declared check of a run (dominance, coupling consistency, grid drift).
struct CheckResult {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct Mg1Run {
  mg1::SolvedChain solved;
  std::vector<mg1::FigureCurve> curves;
  std::optional<ExactTvCurve> exact_l1;
  std::optional<ExactTvCurve> exact_distance;
  std::vector<CheckResult> checks;
  nlohmann::json meta;
};

struct IsamplerRun {
  isampler::SamplerResult result;
  std::optional<isampler::GridChecks> grid;
  std::vector<CheckResult> checks;
  nlohmann::json meta;
};

struct CustomRun {
  DiscreteKernel kernel;
  std::vector<double> pi;
  BoundCurve curve;
  BoundConstants constants;
  std::optional<ExactTvCurve> exact_distance;
  std::vector<CheckResult> checks;
  nlohmann::json meta;
};

/// Computations behind `run`, one per experiment kind. They do not write
/// files; `log` receives one line per stage.
std::vector<Mg1Run> compute_mg1(const ExperimentConfig& cfg, std::ostream& log);
IsamplerRun compute_isampler(const ExperimentConfig& cfg, std::ostream& log);
CustomRun compute_custom(const ExperimentConfig& cfg, std::ostream& log);

struct RunResult {
  std::vector<std::string> artifacts;
  std::vector<CheckResult> checks;

  bool all_passed() const;
};

/// Runs the experiment and writes its CSV, JSON and SVG artifacts under
/// cfg.output.dir. Identical configs produce identical bytes.
RunResult run_experiment(const ExperimentConfig& cfg, std::ostream& log);

/// Writes `text` to `path`, creating parent directories.
void write_file(const std::string& path, const std::string& text);
std::string curve_csv(const BoundCurve& curve);
/// Stable number formatting for file names (0.5 -> "0.5").
std::string format_number(double v);

}  // namespace mcbound
