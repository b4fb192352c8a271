#include "mcbound/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "mcbound/drift.hpp"
#include "mcbound/errors.hpp"
#include "mcbound/monotone.hpp"
#include "mcbound/svg.hpp"

namespace mcbound {
namespace {

using nlohmann::json;

json constants_json(const BoundConstants& bc) {
  return {{"epsilon", bc.epsilon}, {"b_u", bc.b_u}, {"b_v", bc.b_v}, {"m_u", bc.m_u},
          {"m_v", bc.m_v}};
}

json dominance_json(const DominanceReport& rep) {
  json j{{"pass", rep.pass},
         {"checked", rep.checked},
         {"min_margin", rep.min_margin},
         {"argmin_n", rep.argmin_n},
         {"mean_margin", rep.mean_margin}};
  j["first_violation"] = rep.first_violation ? json(*rep.first_violation) : json(nullptr);
  return j;
}

CheckResult dominance_check(const std::string& name, const DominanceReport& rep) {
  std::ostringstream os;
  if (rep.pass) {
    os << "min margin " << rep.min_margin << " at n=" << rep.argmin_n << " over " << rep.checked
       << " steps";
  } else {
    os << "bound below exact TV first at n=" << *rep.first_violation;
  }
  return {name, rep.pass, os.str()};
}

std::string exact_csv(const ExactTvCurve& l1, const ExactTvCurve& dist) {
  std::string out = "n,exact_tv_l1,exact_tv_distance\n";
  char buf[96];
  for (std::size_t i = 0; i < l1.tv.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i + 1, l1.tv[i], dist.tv[i]);
    out += buf;
  }
  return out;
}

SvgSeries series_of(const BoundCurve& c) {
  SvgSeries s;
  s.label = c.label;
  s.x.reserve(c.size());
  for (std::size_t n : c.n) s.x.push_back(static_cast<double>(n));
  s.y = c.tv;
  return s;
}

CouplingKind coupling_kind(const std::string& s) {
  return s == "independent" ? CouplingKind::kIndependent : CouplingKind::kOrdered;
}

}  // namespace

bool RunResult::all_passed() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("output writable", "cannot write '" + path + "'");
  out << text;
  if (!out) throw ConfigurationError("output writable", "write to '" + path + "' failed");
}

std::string curve_csv(const BoundCurve& curve) {
  std::ostringstream os;
  write_curve_csv(os, curve);
  return os.str();
}

std::vector<Mg1Run> compute_mg1(const ExperimentConfig& cfg, std::ostream& log) {
  std::vector<Mg1Run> runs;
  const auto& m = cfg.mg1;
  for (double rho : m.rho) {
    mg1::Config base = mg1::Config::from_traffic(rho, m.alpha, m.b_tail);
    if (m.truncation) base.truncation = *m.truncation;
    base.start_x = static_cast<std::size_t>(std::lround(cfg.bound.start_x));
    Mg1Run run;
    run.solved = mg1::solve(base, m.tail_tolerance, 6400, cfg.threads);
    const auto& solved = run.solved;
    log << "mg1 rho=" << rho << ": " << solved.config.truncation << " states, lambda="
        << solved.config.lambda_arrival << ", pi(last)=" << solved.pi_last << "\n";
    run.curves = mg1::figure_curves(solved, m.x0, cfg.bound.nmax, cfg.threads);

    json meta{{"rho", rho},
              {"alpha", m.alpha},
              {"b_tail", m.b_tail},
              {"lambda", solved.config.lambda_arrival},
              {"m1", mg1::service_moment_m1(m.b_tail, m.alpha)},
              {"truncation", solved.config.truncation},
              {"pi_last_state", solved.pi_last},
              {"max_row_deficit", solved.chain.max_deficit},
              {"start_x", solved.config.start_x},
              {"nmax", cfg.bound.nmax},
              {"tv_convention", "distance sup_A |mu(A) - nu(A)|, clipped at 1"}};
    json certs = json::array();
    for (const auto& fc : run.curves) {
      json c = constants_json(fc.cert.constants);
      c["label"] = fc.cert.label;
      c["x0"] = fc.x0;
      c["sup_pu0_on_c"] = fc.cert.sup_pu0_on_c;
      c["nu_u0"] = fc.cert.nu_u0;
      const auto nstar = first_below(fc.curve, cfg.bound.threshold);
      c["n_star"] = nstar ? json(*nstar) : json(nullptr);
      certs.push_back(c);
    }
    meta["certificates"] = certs;

    // Crossovers of every enlarged set against the atom, when both are present.
    const mg1::FigureCurve* atom = nullptr;
    for (const auto& fc : run.curves) {
      if (fc.x0 == 1) atom = &fc;
    }
    json cross = json::object();
    if (atom != nullptr) {
      for (const auto& fc : run.curves) {
        if (fc.x0 == 1) continue;
        const auto n = mg1::crossover(fc.curve, atom->curve);
        cross[fc.cert.label] = n ? json(*n) : json(nullptr);
      }
    }
    meta["crossover_vs_atom"] = cross;

    if (cfg.verify.enabled) {
      const std::size_t nv = std::min(cfg.verify.nmax, cfg.bound.nmax);
      run.exact_l1 = exact_tv_curve(solved.chain.kernel, solved.config.start_x, solved.pi, nv,
                                    TvConvention::kL1);
      run.exact_distance = exact_tv_curve(solved.chain.kernel, solved.config.start_x, solved.pi,
                                          nv, TvConvention::kDistance);
      const bool tail_ok = run.exact_distance->boundary_mass < m.tail_tolerance;
      run.checks.push_back({"mg1 rho=" + format_number(rho) + " truncation boundary mass", tail_ok,
                            "max_n P^n(x, last) = " + format_number(run.exact_distance->boundary_mass)});
      json dom = json::object();
      for (const auto& fc : run.curves) {
        const auto rep = dominance_report(fc.curve, run.exact_distance->tv);
        dom[fc.cert.label] = dominance_json(rep);
        run.checks.push_back(
            dominance_check("mg1 rho=" + format_number(rho) + " " + fc.cert.label + " dominance", rep));
      }
      meta["dominance"] = dom;
      meta["boundary_mass"] = run.exact_distance->boundary_mass;
    }

    if (cfg.verify.coupling) {
      json sims = json::object();
      for (const auto& fc : run.curves) {
        CouplingSpec spec;
        spec.kind = coupling_kind(cfg.verify.coupling_kind);
        spec.x = solved.config.start_x;
        spec.x_prime = cfg.verify.x_prime;
        spec.replicas = cfg.verify.replicas;
        spec.seed = cfg.seed;
        spec.threads = cfg.threads;
        const auto& u = fc.cert.moments.u_fn;
        const auto est = simulate_coupling(
            solved.chain.kernel, fc.cert.minorisation, spec, fc.cert.rate,
            [&u](std::size_t a, std::size_t b) {
              return u(static_cast<double>(a), static_cast<double>(b));
            });
        const double bound = u(static_cast<double>(spec.x), static_cast<double>(spec.x_prime));
        const bool ok = est.mean_rate_sum <= bound + 3.0 * est.se_rate_sum && est.censored == 0;
        std::ostringstream os;
        os << "mean " << est.mean_rate_sum << " (se " << est.se_rate_sum << ") vs U = " << bound;
        run.checks.push_back({"mg1 rho=" + format_number(rho) + " " + fc.cert.label +
                                  " coupling moment",
                              ok, os.str()});
        sims[fc.cert.label] = {{"mean_rate_sum", est.mean_rate_sum},
                               {"se_rate_sum", est.se_rate_sum},
                               {"u_bound", bound},
                               {"mean_coupling_time", est.mean_coupling_time},
                               {"visits_at_coupling", est.visits_at_coupling},
                               {"censored", est.censored},
                               {"replicas", est.replicas}};
      }
      meta["coupling"] = sims;
    }
    run.meta = std::move(meta);
    runs.push_back(std::move(run));
  }
  return runs;
}

IsamplerRun compute_isampler(const ExperimentConfig& cfg, std::ostream& log) {
  IsamplerRun run;
  const auto& ic = cfg.isampler;
  run.result = isampler::sampler_curves(ic, cfg.bound.nmax, cfg.bound.threshold);
  const auto& c = run.result.constants;
  log << "isampler r=" << ic.r << " alpha=" << ic.alpha << " eta*=" << ic.eta_star
      << ": n* = " << (run.result.n_star ? std::to_string(*run.result.n_star) : "none") << "\n";
  json meta{{"r", ic.r},
            {"alpha", ic.alpha},
            {"eta_star", ic.eta_star},
            {"x_star", c.x_star},
            {"int_u_k", c.int_u_k},
            {"int_min_k", c.int_min_k},
            {"phi_coeff", c.phi_coeff},
            {"phi0_at_1", c.phi0_at_1},
            {"sup_pw0_on_c", c.sup_pw0_on_c},
            {"nu_w0", c.nu_w0},
            {"rate_mode", isampler::to_string(ic.rate_mode)},
            {"rate", run.result.certified.rate.describe()},
            {"slope", run.result.certified.slope},
            {"start_x", ic.start_x},
            {"threshold", cfg.bound.threshold},
            {"nmax", cfg.bound.nmax}};
  meta["constants"] = constants_json(run.result.bound);
  meta["n_star"] = run.result.n_star ? json(*run.result.n_star) : json(nullptr);
  if (cfg.verify.enabled) {
    const auto grid = isampler::discretized_kernel(ic);
    run.grid = isampler::grid_checks(ic, grid);
    const auto& g = *run.grid;
    run.checks.push_back({"isampler grid monotone", g.monotone, "q/pi order on the grid"});
    run.checks.push_back({"isampler grid drift", g.worst_drift_excess <= g.slack,
                          "worst excess " + format_number(g.worst_drift_excess) + " vs slack " +
                              format_number(g.slack)});
    run.checks.push_back({"isampler grid minorisation", g.minorisation_shortfall <= g.slack,
                          "worst shortfall " + format_number(g.minorisation_shortfall)});
    meta["grid"] = {{"grid_n", ic.grid_n},
                    {"slack", g.slack},
                    {"worst_drift_excess", g.worst_drift_excess},
                    {"worst_drift_x", g.worst_drift_x},
                    {"minorisation_shortfall", g.minorisation_shortfall},
                    {"stationarity_residual_l1", g.stationarity_residual},
                    {"monotone", g.monotone}};
  }
  run.meta = std::move(meta);
  return run;
}

CustomRun compute_custom(const ExperimentConfig& cfg, std::ostream& log) {
  const auto& cc = cfg.custom;
  std::ifstream in(cc.kernel_csv);
  if (!in) throw ConfigurationError("config: custom.kernel_csv", "cannot open '" + cc.kernel_csv + "'");
  CustomRun run;
  run.kernel = read_kernel_csv(in);
  const auto& k = run.kernel;
  const std::size_t n = k.size();
  if (const auto bad = check_monotone(k)) {
    std::ostringstream os;
    os << "P(x, {0.." << bad->a << "}) increases from x=" << bad->x << " to x=" << bad->x_next;
    throw CertificateError("kernel stochastically monotone", os.str());
  }
  if (cc.x0 + 1 >= n) throw ConfigurationError("config: custom.x0", "small set must leave states above it");
  const MinorisationCert minor = find_minorisation(k, cc.x0);

  std::vector<double> w(n);
  if (!cc.w0.empty()) {
    if (cc.w0.size() != n) {
      throw ConfigurationError("config: custom.w0", "w0 needs one value per state (" +
                                                        std::to_string(n) + ")");
    }
    w = cc.w0;
  } else {
    for (std::size_t x = 0; x < n; ++x) {
      w[x] = 1.0 + cc.w0_slope * (x > cc.x0 ? static_cast<double>(x - cc.x0) : 0.0);
    }
  }
  for (double v : w) {
    if (!(v >= 1.0)) throw CertificateError("W0 >= 1", "drift function must be at least 1");
  }

  UnivariateDriftCert cert;
  cert.w0 = [w](double x) {
    const auto i = static_cast<std::size_t>(std::clamp(std::lround(x), 0L, static_cast<long>(w.size() - 1)));
    return w[i];
  };
  cert.phi0 = cc.phi == "polynomial"
                  ? PhiGenerator::polynomial(cc.phi_c, cc.phi_alpha)
                  : PhiGenerator::custom([](double) { return 1.0; }, [](double) { return 0.0; },
                                         "constant");
  const std::size_t x0 = cc.x0;
  cert.small_set.contains = [x0](double x) { return x <= static_cast<double>(x0) + 0.5; };
  cert.small_set.epsilon = minor.epsilon;
  const auto pw = k.apply(w);
  double b0 = 0.0;
  for (std::size_t x = 0; x <= x0; ++x) {
    cert.sup_pw0_on_c = std::max(cert.sup_pw0_on_c, pw[x]);
    cert.sup_phi_w0_on_c = std::max(cert.sup_phi_w0_on_c, cert.phi0(w[x]));
    cert.sup_w0_on_c = std::max(cert.sup_w0_on_c, w[x]);
    b0 = std::max(b0, pw[x] - w[x] + cert.phi0(w[x]));
  }
  cert.b0 = cc.b0 > 0.0 ? cc.b0 : b0;
  cert.d0 = *std::min_element(w.begin() + static_cast<long>(x0) + 1, w.end());
  for (std::size_t y = 0; y < n; ++y) cert.nu_w0 += minor.nu[y] * w[y];

  const CertifiedMoments cm = moments_from_monotone_drift(cert, &k);
  run.constants = make_bound_constants(cm.rate, cm.moments.b_u, cm.moments.b_v, cm.epsilon);
  run.pi = stationary(k);
  std::vector<double> support(n);
  for (std::size_t y = 0; y < n; ++y) support[y] = static_cast<double>(y);
  const YoungPair young = YoungPair::power(cfg.bound.young_p, cfg.bound.young_rho);
  CurveInputs inputs{cm.moments, run.constants, cm.rate, young, cfg.bound.start_x, cfg.bound.nmax};
  run.curve = bound_vs_stationary(inputs, support, run.pi, cfg.threads);
  run.curve.label = "x0=" + std::to_string(x0);
  const auto nstar = first_below(run.curve, cfg.bound.threshold);
  log << "custom kernel " << n << " states, x0=" << x0 << ": eps=" << minor.epsilon
      << ", n* = " << (nstar ? std::to_string(*nstar) : "none") << "\n";

  json meta{{"states", n}, {"x0", x0}, {"rate", cm.rate.describe()}, {"start_x", cfg.bound.start_x}};
  meta["constants"] = constants_json(run.constants);
  meta["n_star"] = nstar ? json(*nstar) : json(nullptr);
  if (cfg.verify.enabled) {
    const auto start = static_cast<std::size_t>(std::lround(cfg.bound.start_x));
    run.exact_distance = exact_tv_curve(k, start, run.pi, std::min(cfg.verify.nmax, cfg.bound.nmax),
                                        TvConvention::kDistance);
    const auto rep = dominance_report(run.curve, run.exact_distance->tv);
    run.checks.push_back(dominance_check("custom dominance", rep));
    meta["dominance"] = dominance_json(rep);
  }
  run.meta = std::move(meta);
  return run;
}

RunResult run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  RunResult res;
  const std::filesystem::path dir(cfg.output.dir);
  const std::string prefix = cfg.output.prefix;
  auto emit = [&](const std::string& name, const std::string& text) {
    const std::string path = (dir / name).string();
    write_file(path, text);
    res.artifacts.push_back(path);
  };
  json meta{{"name", cfg.name}, {"kind", to_string(cfg.kind)}, {"seed", cfg.seed}};

  switch (cfg.kind) {
    case ExperimentKind::kMg1: {
      auto runs = compute_mg1(cfg, log);
      json per = json::array();
      for (auto& run : runs) {
        const std::string stem = prefix + "_rho" + format_number(run.solved.config.traffic());
        std::vector<SvgSeries> series;
        for (const auto& fc : run.curves) {
          const std::string tag = fc.x0 == 1 ? "atom" : "x0_" + std::to_string(fc.x0);
          emit(stem + "_" + tag + ".csv", curve_csv(fc.curve));
          series.push_back(series_of(fc.curve));
        }
        if (run.exact_l1) {
          emit(stem + "_exact.csv", exact_csv(*run.exact_l1, *run.exact_distance));
          SvgSeries ex;
          ex.label = "exact TV distance";
          for (std::size_t i = 0; i < run.exact_distance->tv.size(); ++i) {
            ex.x.push_back(static_cast<double>(i + 1));
            ex.y.push_back(run.exact_distance->tv[i]);
          }
          series.push_back(std::move(ex));
        }
        if (cfg.output.svg) {
          SvgOptions opts;
          opts.title = "M/G/1, rho = " + format_number(run.solved.config.traffic()) +
                       ", alpha = " + format_number(cfg.mg1.alpha);
          opts.y_label = "TV bound vs pi";
          std::optional<std::size_t> first_cross;
          for (const auto& [label, n] : run.meta["crossover_vs_atom"].items()) {
            if (!n.is_null() && (!first_cross || n.get<std::size_t>() < *first_cross)) {
              first_cross = n.get<std::size_t>();
            }
          }
          if (first_cross) opts.marker_x = static_cast<double>(*first_cross);
          emit(stem + ".svg", render_svg(series, opts));
        }
        per.push_back(run.meta);
        res.checks.insert(res.checks.end(), run.checks.begin(), run.checks.end());
      }
      meta["runs"] = per;
      break;
    }
    case ExperimentKind::kIsampler: {
      auto run = compute_isampler(cfg, log);
      emit(prefix + ".csv", curve_csv(run.result.curve));
      if (cfg.output.svg) {
        SvgOptions opts;
        opts.title = "Independence sampler, " + run.result.curve.label;
        opts.y_label = "TV bound vs pi";
        if (run.result.n_star) opts.marker_x = static_cast<double>(*run.result.n_star);
        emit(prefix + ".svg", render_svg({series_of(run.result.curve)}, opts));
      }
      meta["run"] = run.meta;
      res.checks = run.checks;
      break;
    }
    case ExperimentKind::kCustomDiscrete: {
      auto run = compute_custom(cfg, log);
      emit(prefix + ".csv", curve_csv(run.curve));
      std::vector<SvgSeries> series{series_of(run.curve)};
      if (run.exact_distance) {
        SvgSeries ex;
        ex.label = "exact TV distance";
        for (std::size_t i = 0; i < run.exact_distance->tv.size(); ++i) {
          ex.x.push_back(static_cast<double>(i + 1));
          ex.y.push_back(run.exact_distance->tv[i]);
        }
        series.push_back(std::move(ex));
      }
      if (cfg.output.svg) emit(prefix + ".svg", render_svg(series, {}));
      meta["run"] = run.meta;
      res.checks = run.checks;
      break;
    }
  }

  json checks = json::array();
  for (const auto& c : res.checks) {
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    log << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  }
  meta["checks"] = checks;
  meta["artifacts"] = res.artifacts;
  emit(prefix + ".json", meta.dump(2) + "\n");
  return res;
}

}  // namespace mcbound
