// mcbound: command-line front end for the convergence-bound library.
//
// Exit status: 0 success, 1 a declared check failed, 2 bad configuration or
// arguments, 3 certificate rejected, 4 numerical failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mcbound/bounds.hpp"
#include "mcbound/config.hpp"
#include "mcbound/errors.hpp"
#include "mcbound/isampler.hpp"
#include "mcbound/mg1.hpp"
#include "mcbound/monotone.hpp"
#include "mcbound/pipeline.hpp"
#include "mcbound/rates.hpp"
#include "mcbound/svg.hpp"
#include "mcbound/verify.hpp"

namespace {

using namespace mcbound;
using nlohmann::json;

constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCertificate = 3;
constexpr int kExitNumeric = 4;

struct Globals {
  std::uint64_t seed = 42;
  std::string out_dir;
  unsigned threads = 1;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_dir_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
};

// Relative output paths land under --out-dir when one is given.
std::string resolve_out(const Globals& g, const std::string& path) {
  if (g.out_dir.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(g.out_dir) / path).string();
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

RateSequence make_rate(const std::string& family, double c, double alpha) {
  if (family == "constant") return RateSequence::constant();
  if (family == "polynomial") return RateSequence::polynomial(c, alpha);
  throw ConfigurationError("rate family", "unknown rate family '" + family +
                                              "'; expected constant or polynomial");
}

std::string sidecar_path(const std::string& out) {
  auto p = std::filesystem::path(out);
  p.replace_extension(".json");
  return p.string();
}

// ---- rates ---------------------------------------------------------------

struct RatesArgs {
  std::string family = "polynomial";
  double c = 1.0;
  double alpha = 2.0;
  std::size_t nmax = 20;
  std::string out = "-";
};

int cmd_rates(const Globals& g, const RatesArgs& a) {
  const RateSequence r = make_rate(a.family, a.c, a.alpha);
  std::string csv = "n,r,R\n";
  char buf[96];
  for (std::size_t n = 0; n <= a.nmax; ++n) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", n, r(n), r.cumulative(n));
    csv += buf;
  }
  emit(a.out == "-" ? a.out : resolve_out(g, a.out), csv);
  return 0;
}

// ---- bound ---------------------------------------------------------------

struct BoundArgs {
  double u = 1.0;
  double v = 1.0;
  double b_u = 1.0;
  double b_v = 0.0;
  double epsilon = 1.0;
  std::string family = "constant";
  double c = 1.0;
  double alpha = 2.0;
  double young_p = 2.0;
  double young_rho = 0.5;
  std::size_t nmax = 1000;
  std::string out = "-";
};

int cmd_bound(const Globals& g, const BoundArgs& a) {
  const RateSequence r = make_rate(a.family, a.c, a.alpha);
  MomentBounds mb;
  const double u = a.u, v = a.v;
  mb.u_fn = [u](double, double) { return u; };
  mb.v_fn = [v](double, double) { return v; };
  mb.b_u = a.b_u;
  mb.b_v = a.b_v;
  const BoundConstants bc = make_bound_constants(r, a.b_u, a.b_v, a.epsilon);
  const YoungPair young = YoungPair::power(a.young_p, a.young_rho);
  CurveInputs in{mb, bc, r, young, 0.0, a.nmax};
  BoundCurve curve = pair_curve(in, 0.0);
  std::cerr << "M_U = " << bc.m_u << ", M_V = " << bc.m_v << "\n";
  emit(a.out == "-" ? a.out : resolve_out(g, a.out), curve_csv(curve));
  return 0;
}

// ---- mg1 -----------------------------------------------------------------

struct Mg1Args {
  double rho = 0.5;
  double alpha = 2.5;
  double b = 1.0;
  std::size_t x0 = 1;
  std::size_t x = 10;
  std::size_t nmax = 10000;
  std::size_t truncation = 0;
  std::string out = "curves.csv";
};

int cmd_mg1(const Globals& g, const Mg1Args& a) {
  mg1::Config cfg = mg1::Config::from_traffic(a.rho, a.alpha, a.b);
  cfg.start_x = a.x;
  if (a.truncation) cfg.truncation = a.truncation;
  const auto solved = mg1::solve(cfg, 1e-6, 6400, g.threads);
  const auto curves = mg1::figure_curves(solved, {a.x0}, a.nmax, g.threads);
  const auto& fc = curves.front();
  const std::string out = resolve_out(g, a.out);
  emit(out, curve_csv(fc.curve));
  if (out != "-") {
    const auto exact = exact_tv_curve(solved.chain.kernel, a.x, solved.pi,
                                      std::min<std::size_t>(a.nmax, 200), TvConvention::kDistance);
    json meta{{"rho", a.rho},
              {"alpha", a.alpha},
              {"b_tail", a.b},
              {"lambda", solved.config.lambda_arrival},
              {"x0", a.x0},
              {"x", a.x},
              {"certificate", fc.cert.label},
              {"epsilon", fc.cert.constants.epsilon},
              {"b_u", fc.cert.constants.b_u},
              {"m_u", fc.cert.constants.m_u},
              {"truncation", solved.config.truncation},
              {"pi_last_state", solved.pi_last},
              {"truncation_tail_mass", exact.boundary_mass}};
    write_file(sidecar_path(out), meta.dump(2) + "\n");
  }
  return 0;
}

// ---- isampler ------------------------------------------------------------

struct IsArgs {
  double r = 2.0;
  double alpha = 1.1;
  double eta_star = 0.25;
  std::size_t nmax = 2000;
  double threshold = 0.1;
  std::string rate_mode = "effective";
  std::string out = "is_curve.csv";
};

int cmd_isampler(const Globals& g, const IsArgs& a) {
  isampler::Config cfg;
  cfg.r = a.r;
  cfg.alpha = a.alpha;
  cfg.eta_star = a.eta_star;
  cfg.rate_mode = isampler::rate_mode_from_string(a.rate_mode);
  const auto res = isampler::sampler_curves(cfg, a.nmax, a.threshold);
  const std::string out = resolve_out(g, a.out);
  emit(out, curve_csv(res.curve));
  std::cerr << "n* (TV bound <= " << a.threshold << ") = "
            << (res.n_star ? std::to_string(*res.n_star) : "not reached") << "\n";
  if (out != "-") {
    json meta{{"r", a.r},
              {"alpha", a.alpha},
              {"eta_star", a.eta_star},
              {"x_star", res.constants.x_star},
              {"epsilon", res.bound.epsilon},
              {"b_u", res.bound.b_u},
              {"m_u", res.bound.m_u},
              {"rate_mode", a.rate_mode},
              {"rate", res.certified.rate.describe()}};
    meta["n_star"] = res.n_star ? json(*res.n_star) : json(nullptr);
    write_file(sidecar_path(out), meta.dump(2) + "\n");
  }
  return 0;
}

// ---- verify --------------------------------------------------------------

void apply_globals(const Globals& g, ExperimentConfig& cfg) {
  if (g.seed_opt->count()) cfg.seed = g.seed;
  if (g.threads_opt->count()) cfg.threads = g.threads;
  if (g.out_dir_opt->count()) cfg.output.dir = g.out_dir;
}

int report_checks(const std::vector<CheckResult>& checks) {
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    ok = ok && c.pass;
  }
  return ok ? 0 : kExitCheckFailed;
}

std::string margin_csv(const std::vector<const BoundCurve*>& curves, const std::vector<double>& exact) {
  std::ostringstream os;
  os << "n,exact_tv";
  for (const auto* c : curves) os << ',' << c->label << "_bound," << c->label << "_margin";
  os << '\n';
  char buf[64];
  for (std::size_t i = 0; i < exact.size(); ++i) {
    os << i + 1;
    std::snprintf(buf, sizeof buf, ",%.17g", exact[i]);
    os << buf;
    for (const auto* c : curves) {
      const double b = i < c->size() ? c->tv[i] : std::nan("");
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g", b, b - exact[i]);
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

int cmd_verify_dominance(const Globals& g, const std::string& config_path) {
  ExperimentConfig cfg = load_config(config_path);
  apply_globals(g, cfg);
  cfg.verify.enabled = true;
  const std::filesystem::path dir(cfg.output.dir);
  std::vector<CheckResult> checks;
  switch (cfg.kind) {
    case ExperimentKind::kMg1: {
      for (const auto& run : compute_mg1(cfg, std::cerr)) {
        std::vector<const BoundCurve*> cs;
        for (const auto& fc : run.curves) cs.push_back(&fc.curve);
        const std::string path = (dir / (cfg.output.prefix + "_rho" +
                                         format_number(run.solved.config.traffic()) +
                                         "_dominance.csv")).string();
        write_file(path, margin_csv(cs, run.exact_distance->tv));
        checks.insert(checks.end(), run.checks.begin(), run.checks.end());
      }
      break;
    }
    case ExperimentKind::kCustomDiscrete: {
      const auto run = compute_custom(cfg, std::cerr);
      write_file((dir / (cfg.output.prefix + "_dominance.csv")).string(),
                 margin_csv({&run.curve}, run.exact_distance->tv));
      checks = run.checks;
      break;
    }
    case ExperimentKind::kIsampler: {
      // No finite exact oracle exists for the continuous chain; the grid
      // checks are the available verification.
      checks = compute_isampler(cfg, std::cerr).checks;
      break;
    }
  }
  return report_checks(checks);
}

struct CouplingArgs {
  double rho = 0.5;
  double alpha = 2.5;
  std::size_t x0 = 1;
  std::size_t x = 10;
  std::size_t x_prime = 0;
  std::size_t replicas = 10000;
  std::string kind = "ordered";
  std::string out = "coupling.csv";
};

int cmd_verify_coupling(const Globals& g, const CouplingArgs& a) {
  mg1::Config cfg = mg1::Config::from_traffic(a.rho, a.alpha);
  cfg.x0 = a.x0;
  cfg.start_x = a.x;
  const auto solved = mg1::solve(cfg, 1e-6, 6400, g.threads);
  const auto cert = mg1::certificate(solved.config, solved.chain);
  CouplingSpec spec;
  spec.kind = a.kind == "independent" ? CouplingKind::kIndependent : CouplingKind::kOrdered;
  spec.x = a.x;
  spec.x_prime = a.x_prime;
  spec.replicas = a.replicas;
  spec.seed = g.seed;
  spec.threads = g.threads;
  const auto& u = cert.moments.u_fn;
  const auto est = simulate_coupling(solved.chain.kernel, cert.minorisation, spec, cert.rate,
                                     [&u](std::size_t p, std::size_t q) {
                                       return u(static_cast<double>(p), static_cast<double>(q));
                                     });
  const double bound = u(static_cast<double>(a.x), static_cast<double>(a.x_prime));
  const double margin = bound + 3.0 * est.se_rate_sum - est.mean_rate_sum;
  std::ostringstream os;
  os << "statistic,value\n";
  char buf[64];
  auto row = [&](const char* name, double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << name << ',' << buf << '\n';
  };
  row("mean_rate_sum", est.mean_rate_sum);
  row("se_rate_sum", est.se_rate_sum);
  row("u_bound", bound);
  row("margin_3se", margin);
  row("mean_v_sum", est.mean_v_sum);
  row("se_v_sum", est.se_v_sum);
  row("mean_coupling_time", est.mean_coupling_time);
  row("censored_fraction", est.censored_fraction());
  for (std::size_t j = 0; j < est.visits_at_coupling.size(); ++j) {
    if (est.visits_at_coupling[j] == 0) continue;
    os << "visits_at_coupling_" << j << ',' << est.visits_at_coupling[j] << '\n';
  }
  emit(resolve_out(g, a.out), os.str());
  const bool ok = margin >= 0.0 && est.censored == 0;
  std::ostringstream detail;
  detail << "mean " << est.mean_rate_sum << " (se " << est.se_rate_sum << ") vs U = " << bound;
  return report_checks({{"coupling moment " + cert.label, ok, detail.str()}});
}

// ---- render --------------------------------------------------------------

struct RenderArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> labels;
  std::string column = "bound_tv";
  std::string title;
  std::string out = "plot.svg";
  bool linear_x = false;
};

SvgSeries read_series(const std::string& path, const std::string& column, const std::string& label) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("render: readable input", "cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    for (std::string h; std::getline(ss, h, ',');) header.push_back(h);
  }
  const auto it = std::find(header.begin(), header.end(), column);
  if (header.empty() || it == header.end()) {
    throw ConfigurationError("render: column present", "'" + path + "' has no column '" + column + "'");
  }
  const auto col = static_cast<std::size_t>(it - header.begin());
  SvgSeries s;
  s.label = label.empty() ? std::filesystem::path(path).stem().string() : label;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<std::string> cells;
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (cells.size() <= col) continue;
    s.x.push_back(std::stod(cells[0]));
    s.y.push_back(std::stod(cells[col]));
  }
  return s;
}

int cmd_render(const Globals& g, const RenderArgs& a) {
  std::vector<SvgSeries> series;
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    series.push_back(read_series(a.inputs[i], a.column, i < a.labels.size() ? a.labels[i] : ""));
  }
  SvgOptions opts;
  opts.title = a.title;
  opts.y_label = a.column;
  opts.log_x = !a.linear_x;
  emit(resolve_out(g, a.out), render_svg(series, opts));
  return 0;
}

// ---- run -----------------------------------------------------------------

int cmd_run(const Globals& g, const std::string& config_path) {
  ExperimentConfig cfg = load_config(config_path);
  apply_globals(g, cfg);
  const RunResult res = run_experiment(cfg, std::cerr);
  for (const auto& p : res.artifacts) std::cout << p << "\n";
  return res.all_passed() ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified subgeometric convergence bounds for Markov chains"};
  app.require_subcommand(1);
  // Subcommands inherit this, so global flags may follow the subcommand name.
  app.fallthrough();
  Globals g;
  g.seed_opt = app.add_option("--seed", g.seed, "Random seed for Monte Carlo checks")
                   ->envname("MCBOUND_SEED");
  g.out_dir_opt = app.add_option("--out-dir", g.out_dir, "Directory for output artifacts")
                      ->envname("MCBOUND_OUT_DIR");
  g.threads_opt = app.add_option("--threads", g.threads, "Worker threads")
                      ->envname("MCBOUND_THREADS")
                      ->check(CLI::Range(1u, 256u));

  RatesArgs ra;
  auto* rates = app.add_subcommand("rates", "Tabulate a rate sequence r(n) and R(n)");
  rates->add_option("--family", ra.family, "constant | polynomial")->capture_default_str();
  rates->add_option("--c", ra.c, "Polynomial coefficient")->capture_default_str();
  rates->add_option("--alpha", ra.alpha, "Polynomial exponent alpha > 1")->capture_default_str();
  rates->add_option("--nmax", ra.nmax)->capture_default_str();
  rates->add_option("--out", ra.out, "CSV path, - for stdout")->capture_default_str();

  BoundArgs ba;
  auto* bound = app.add_subcommand("bound", "Bound curves for a fixed pair from moment bounds");
  bound->add_option("--u", ba.u, "U(x, x')")->required();
  bound->add_option("--v", ba.v, "V(x, x')")->capture_default_str();
  bound->add_option("--b-u", ba.b_u, "sup over C x C of the one-step U moment")->capture_default_str();
  bound->add_option("--b-v", ba.b_v)->capture_default_str();
  bound->add_option("--epsilon", ba.epsilon, "Minorisation constant")->capture_default_str();
  bound->add_option("--family", ba.family, "constant | polynomial")->capture_default_str();
  bound->add_option("--c", ba.c)->capture_default_str();
  bound->add_option("--alpha", ba.alpha)->capture_default_str();
  bound->add_option("--young-p", ba.young_p)->capture_default_str();
  bound->add_option("--young-rho", ba.young_rho)->capture_default_str();
  bound->add_option("--nmax", ba.nmax)->capture_default_str();
  bound->add_option("--out", ba.out, "CSV path, - for stdout")->capture_default_str();

  Mg1Args ma;
  auto* mg1c = app.add_subcommand("mg1", "M/G/1 embedded chain bound vs stationarity");
  mg1c->add_option("--rho", ma.rho, "Traffic intensity in (0, 1)")->capture_default_str();
  mg1c->add_option("--alpha", ma.alpha, "Service tail index > 1")->capture_default_str();
  mg1c->add_option("--b", ma.b, "Service scale B")->capture_default_str();
  mg1c->add_option("--x0", ma.x0, "Small set {0..x0}; 1 is the atom")->capture_default_str();
  mg1c->add_option("--x", ma.x, "Start state")->capture_default_str();
  mg1c->add_option("--nmax", ma.nmax)->capture_default_str();
  mg1c->add_option("--truncation", ma.truncation, "Initial number of states (0: by rho)");
  mg1c->add_option("--out", ma.out)->capture_default_str();

  IsArgs ia;
  auto* is = app.add_subcommand("isampler", "Independence sampler bound vs stationarity");
  is->add_option("--r", ia.r)->capture_default_str();
  is->add_option("--alpha", ia.alpha)->capture_default_str();
  is->add_option("--eta-star", ia.eta_star)->capture_default_str();
  is->add_option("--nmax", ia.nmax)->capture_default_str();
  is->add_option("--threshold", ia.threshold)->capture_default_str();
  is->add_option("--rate-mode", ia.rate_mode, "effective | conservative | exact")->capture_default_str();
  is->add_option("--out", ia.out)->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Check bounds against exact or simulated values");
  verify->require_subcommand(1);
  std::string dom_config;
  auto* dom = verify->add_subcommand("dominance", "Bound >= exact TV for every n");
  dom->add_option("--config", dom_config, "Experiment config (YAML)")->required();
  CouplingArgs ca;
  auto* coup = verify->add_subcommand("coupling", "Coupling moment vs its bound (M/G/1)");
  coup->add_option("--rho", ca.rho)->capture_default_str();
  coup->add_option("--alpha", ca.alpha)->capture_default_str();
  coup->add_option("--x0", ca.x0)->capture_default_str();
  coup->add_option("--x", ca.x)->capture_default_str();
  coup->add_option("--x-prime", ca.x_prime)->capture_default_str();
  coup->add_option("--replicas", ca.replicas)->capture_default_str();
  coup->add_option("--kind", ca.kind)->check(CLI::IsMember({"ordered", "independent"}))->capture_default_str();
  coup->add_option("--out", ca.out)->capture_default_str();

  RenderArgs rna;
  auto* render = app.add_subcommand("render", "SVG overlay of curve CSVs");
  render->add_option("--in", rna.inputs, "Curve CSV (repeatable)")->required();
  render->add_option("--label", rna.labels, "Legend label per input");
  render->add_option("--column", rna.column)->capture_default_str();
  render->add_option("--title", rna.title);
  render->add_flag("--linear-x", rna.linear_x, "Linear instead of log x axis");
  render->add_option("--out", rna.out)->capture_default_str();

  std::string run_config;
  auto* run = app.add_subcommand("run", "Run an experiment config and write its artifacts");
  run->add_option("config", run_config, "Experiment config (YAML)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*rates) return cmd_rates(g, ra);
    if (*bound) return cmd_bound(g, ba);
    if (*mg1c) return cmd_mg1(g, ma);
    if (*is) return cmd_isampler(g, ia);
    if (*dom) return cmd_verify_dominance(g, dom_config);
    if (*coup) return cmd_verify_coupling(g, ca);
    if (*render) return cmd_render(g, rna);
    if (*run) return cmd_run(g, run_config);
  } catch (const CertificateError& e) {
    std::cerr << "certificate rejected [" << e.invariant() << "]: " << e.what() << "\n";
    return kExitCertificate;
  } catch (const ConfigurationError& e) {
    std::cerr << "configuration error [" << e.invariant() << "]: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "domain error [" << e.invariant() << "]: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "numerical failure [" << e.invariant() << "]: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
