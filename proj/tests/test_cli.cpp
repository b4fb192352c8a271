#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "mcbound/config.hpp"
#include "mcbound/errors.hpp"
#include "mcbound/pipeline.hpp"
#include "mcbound/svg.hpp"

using namespace mcbound;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mcbound_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string message_of(const std::string& yaml) {
  try {
    parse_config(yaml);
  } catch (const ConfigurationError& e) {
    return e.what();
  }
  return "";
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(Config, Defaults) {
  const auto cfg = parse_config("kind: mg1\nname: q\n");
  EXPECT_EQ(cfg.kind, ExperimentKind::kMg1);
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.mg1.x0, (std::vector<std::size_t>{1, 3, 6}));
  EXPECT_EQ(cfg.output.prefix, "q");
  EXPECT_EQ(parse_config("kind: isampler\n").bound.start_x, 1.0);
}

TEST(Config, ScalarOrListValues) {
  const auto cfg = parse_config("kind: mg1\nmg1:\n  rho: [0.5, 0.9]\n  x0: 6\n");
  EXPECT_EQ(cfg.mg1.rho, (std::vector<double>{0.5, 0.9}));
  EXPECT_EQ(cfg.mg1.x0, (std::vector<std::size_t>{6}));
}

TEST(Config, DiagnosticsNameKeyAndLine) {
  const auto typo = message_of("kind: mg1\nmg1:\n  rho: 0.5\n  alpah: 2\n");
  EXPECT_NE(typo.find("mg1.alpah"), std::string::npos) << typo;
  EXPECT_NE(typo.find("line 4"), std::string::npos) << typo;

  const auto type = message_of("kind: mg1\nbound:\n  nmax: many\n");
  EXPECT_NE(type.find("bound.nmax"), std::string::npos) << type;
  EXPECT_NE(type.find("line 3"), std::string::npos) << type;

  const auto syntax = message_of("kind: mg1\nmg1: [unclosed\n");
  EXPECT_NE(syntax.find("line"), std::string::npos) << syntax;

  EXPECT_NE(message_of("name: x\n").find("kind"), std::string::npos);
  EXPECT_NE(message_of("kind: mg1\nmg1:\n  rho: 1.2\n").find("(0, 1)"), std::string::npos);
}

TEST(Config, IsamplerBoundaryAlphaIsRejected) {
  // alpha = 1 + 1/r exactly.
  const auto msg = message_of("kind: isampler\nisampler:\n  r: 2\n  alpha: 1.5\n");
  EXPECT_NE(msg.find("strict inequality"), std::string::npos) << msg;
}

TEST(Config, RateModeDiagnostic) {
  const auto msg = message_of("kind: isampler\nisampler:\n  rate_mode: quick\n");
  EXPECT_NE(msg.find("isampler.rate_mode"), std::string::npos) << msg;
}

TEST(Svg, ConstantCurveIsAHorizontalPolyline) {
  const std::string svg = render_svg({{"flat", {1, 10, 100}, {0.5, 0.5, 0.5}}});
  EXPECT_EQ(count(svg, "<polyline"), 1u);
  const auto pts_at = svg.find("points=\"");
  ASSERT_NE(pts_at, std::string::npos);
  const auto pts = svg.substr(pts_at + 8, svg.find('"', pts_at + 8) - pts_at - 8);
  std::stringstream ss(pts);
  std::string p;
  std::set<std::string> ys;
  while (ss >> p) ys.insert(p.substr(p.find(',') + 1));
  EXPECT_EQ(ys.size(), 1u) << pts;
  EXPECT_NE(svg.find(">flat<"), std::string::npos);
}

TEST(Svg, TwoCurvesTwoLegendEntries) {
  const std::string svg =
      render_svg({{"a", {1, 2, 3}, {1, 0.5, 0.25}}, {"b & c", {1, 2, 3}, {0.9, 0.8, 0.7}}});
  EXPECT_EQ(count(svg, "<polyline"), 2u);
  EXPECT_NE(svg.find(">a<"), std::string::npos);
  EXPECT_NE(svg.find(">b &amp; c<"), std::string::npos);
  EXPECT_EQ(svg, render_svg({{"a", {1, 2, 3}, {1, 0.5, 0.25}}, {"b & c", {1, 2, 3}, {0.9, 0.8, 0.7}}}));
}

TEST(Svg, EmptyInputIsAnError) {
  EXPECT_THROW(render_svg({}), ConfigurationError);
  EXPECT_THROW(render_svg({{"zero", {1, 2}, {0.0, 0.0}}}), ConfigurationError);
}

TEST(Pipeline, MinimalMg1RunWritesCurveCsv) {
  const auto dir = scratch("minimal");
  auto cfg = parse_config("kind: mg1\nname: minimal\nmg1:\n  x0: [1]\nbound:\n  nmax: 50\n"
                          "verify:\n  enabled: false\noutput:\n  svg: false\n");
  cfg.output.dir = dir.string();
  std::ostringstream log;
  const auto res = run_experiment(cfg, log);
  EXPECT_TRUE(res.all_passed());
  const auto csv = slurp(dir / "minimal_rho0.5_atom.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,bound_tv,bound_f,bound_g");
  EXPECT_EQ(count(csv, "\n"), 51u);
  EXPECT_TRUE(fs::exists(dir / "minimal.json"));
}

TEST(Pipeline, FigureOneConfigProducesFourCsvAndOneSvg) {
  const auto dir = scratch("figure1");
  auto cfg = load_config(std::string(MCBOUND_SOURCE_DIR) + "/configs/figure1_mg1_rho05.yaml");
  cfg.output.dir = dir.string();
  std::ostringstream log;
  const auto res = run_experiment(cfg, log);
  EXPECT_TRUE(res.all_passed()) << log.str();
  std::size_t csv = 0, svg = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    csv += e.path().extension() == ".csv";
    svg += e.path().extension() == ".svg";
  }
  EXPECT_EQ(csv, 4u);
  EXPECT_EQ(svg, 1u);
  const auto exact = slurp(dir / "figure1_rho0.5_exact.csv");
  EXPECT_EQ(exact.substr(0, exact.find('\n')), "n,exact_tv_l1,exact_tv_distance");

  // Identical configs reproduce every artifact byte for byte.
  const auto dir2 = scratch("figure1_again");
  cfg.output.dir = dir2.string();
  run_experiment(cfg, log);
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".json") continue;  // holds the directory name
    EXPECT_EQ(slurp(e.path()), slurp(dir2 / e.path().filename())) << e.path();
  }
}

TEST(Pipeline, HeavyTrafficMetadataRecordsCrossover) {
  const auto dir = scratch("figure2");
  auto cfg = load_config(std::string(MCBOUND_SOURCE_DIR) + "/configs/figure2_mg1_rho09.yaml");
  cfg.output.dir = dir.string();
  std::ostringstream log;
  run_experiment(cfg, log);
  const auto meta = nlohmann::json::parse(slurp(dir / "figure2.json"));
  const auto& cross = meta["runs"][0]["crossover_vs_atom"]["x0=6"];
  ASSERT_TRUE(cross.is_number());
  EXPECT_LE(cross.get<std::size_t>(), 10000u);
  EXPECT_NE(slurp(dir / "figure2_rho0.9.svg").find("stroke-dasharray"), std::string::npos);
}

TEST(Pipeline, CustomKernelRun) {
  const auto dir = scratch("custom");
  auto cfg = load_config(std::string(MCBOUND_SOURCE_DIR) + "/configs/custom_birth_death.yaml");
  cfg.output.dir = dir.string();
  std::ostringstream log;
  const auto res = run_experiment(cfg, log);
  EXPECT_TRUE(res.all_passed()) << log.str();
  EXPECT_TRUE(fs::exists(dir / "birth_death.csv"));
}

TEST(Pipeline, FailedCheckIsReported) {
  // A weak drift slope is rejected before any artifact is written.
  const auto dir = scratch("weak");
  auto cfg = load_config(std::string(MCBOUND_SOURCE_DIR) + "/configs/custom_birth_death.yaml");
  cfg.output.dir = dir.string();
  cfg.custom.w0_slope = 4.0;
  std::ostringstream log;
  EXPECT_THROW(run_experiment(cfg, log), CertificateError);
  EXPECT_TRUE(fs::is_empty(dir));
}
