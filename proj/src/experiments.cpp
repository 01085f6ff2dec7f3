#include "hwave/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "hwave/decay.hpp"
#include "hwave/duhamel.hpp"
#include "hwave/errors.hpp"
#include "hwave/fixtures.hpp"
#include "hwave/oracle.hpp"
#include "hwave/propagator.hpp"
#include "hwave/report.hpp"

namespace hwave {

namespace {

namespace fs = std::filesystem;

std::string out_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

json model_json(const ModelParams& p) {
  json j;
  j["n"] = p.n;
  j["b"] = p.b;
  j["m"] = p.m;
  j["alpha"] = p.alpha;
  j["Q"] = p.Q();
  return j;
}

json header(const RunConfig& c, const char* check, std::uint64_t seed) {
  json j;
  j["experiment"] = experiment_name(c.experiment);
  j["check"] = check;
  j["model"] = model_json(c.model);
  j["seed"] = seed;
  return j;
}

GridPtr build_grid(const SpectralGridSpec& spec, const PhysicalGrid& pgrid, const RunConfig& c,
                   PlancherelCalibration* cal) {
  if (c.calibrate) return calibrated_grid(spec, pgrid, c.calibration_family, cal);
  return std::make_shared<const SpectralGrid>(make_spectral_grid(spec));
}

double relative_change(double coarse, double fine) {
  if (coarse == fine) return 0.0;
  if (!(coarse > 0.0)) return std::numeric_limits<double>::infinity();
  return std::abs(fine - coarse) / coarse;
}

EnvelopeKind linear_kind(Envelope e, const ModelParams& p) {
  switch (e) {
    case Envelope::HALPHA_MASS:
    case Envelope::HALPHA_L1: return {e, 0, p.alpha};
    case Envelope::DT_MASS:
    case Envelope::DT_L1: return {e, 1, 0.0};
    default: return {e, 0, 0.0};
  }
}

const std::vector<Envelope>& linear_envelopes() {
  static const std::vector<Envelope> all{Envelope::L2_MASS, Envelope::HALPHA_MASS, Envelope::DT_MASS,
                                         Envelope::L2_L1,   Envelope::HALPHA_L1,   Envelope::DT_L1};
  return all;
}

// dominance over the split window and the full window, plus their relative change
json window_json(const DecayReport& r, double split, double tol, bool& pass) {
  const double d_split = dominance_over(r, split);
  const double d_full = r.times.empty() ? 0.0 : dominance_over(r, r.times.back());
  const double change = relative_change(d_split, d_full);
  const bool ok = std::isfinite(d_full) && change < tol;
  pass = pass && ok;
  json j = to_json(r);
  j["window_split"] = split;
  j["dominance_split"] = d_split;
  j["window_change"] = std::isfinite(change) ? json(change) : json("inf");
  j["verdict"] = ok;
  return j;
}

// ---------------------------------------------------------------- roundtrip

int run_roundtrip(const RunConfig& c, const std::string& dir, std::uint64_t seed, std::ostream& log) {
  const PhysicalGrid pgrid = make_cube_grid(c.model.n, c.half_width, c.count);
  PlancherelCalibration cal;
  GridPtr grid = build_grid(c.spectral, pgrid, c, &cal);
  TransformPlan plan(grid, pgrid);
  const std::vector<double> origin(pgrid.dim(), 0.0);

  json out = header(c, "Plancherel identity, pointwise inversion and the coefficient sup bound", seed);
  out["plancherel_constant"] = grid->plancherel_constant;
  out["reference_constant"] = reference_plancherel_constant(c.model.n);
  bool pass = true;
  json members = json::array();
  std::vector<std::vector<double>> family = c.calibration_family;
  if (is_physical_family(c.data.family)) family.push_back(c.data.widths);
  for (const auto& widths : family) {
    PhysicalField f = gaussian_field(pgrid, widths);
    CoefficientField F = plan.forward(f);
    const double phys = physical_l2_norm(f), spec = plancherel_norm(F);
    const double rel = std::abs(spec - phys) / phys;
    const double at0 = inverse_transform(F, origin).real();
    const double orel = std::abs(at0 - 1.0);
    double sup = 0.0;
    for (const auto& v : F.values) sup = std::max(sup, std::abs(v));
    const double l1 = l1_norm(f);
    const bool rl = check_riemann_lebesgue(f, F);
    const bool ok = rel <= c.norm_tol && orel <= c.origin_tol && rl;
    pass = pass && ok;
    json m;
    m["widths"] = widths;
    m["physical_l2"] = phys;
    m["plancherel_l2"] = spec;
    m["relative_error"] = rel;
    m["origin_value"] = at0;
    m["origin_error"] = orel;
    m["sup_coefficient"] = sup;
    m["l1"] = l1;
    m["riemann_lebesgue"] = rl;
    m["verdict"] = ok;
    members.push_back(m);
    log << "roundtrip widths[0]=" << widths[0] << " rel=" << rel << " origin=" << orel << '\n';
  }
  out["members"] = members;
  out["norm_tol"] = c.norm_tol;
  out["origin_tol"] = c.origin_tol;
  out["verdict"] = pass;
  write_json(out_path(dir, "roundtrip.json"), out);
  return pass ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------- linear

struct LinearSetup {
  PhysicalGrid pgrid;
  GridPtr grid;
  std::unique_ptr<TransformPlan> plan;
  InitialData data;
};

LinearSetup linear_setup(const RunConfig& c) {
  LinearSetup s;
  s.pgrid = make_cube_grid(c.model.n, c.half_width, c.count);
  if (is_physical_family(c.data.family)) {
    s.grid = build_grid(c.spectral, s.pgrid, c, nullptr);
    s.plan = std::make_unique<TransformPlan>(s.grid, s.pgrid);
  } else {
    // spectral data: c_n is only needed for norms; calibrate when a physical grid is usable
    const double nyquist = std::numbers::pi * c.count / (2.0 * c.half_width);
    if (c.calibrate && c.spectral.lambda_max <= nyquist)
      s.grid = calibrated_grid(c.spectral, s.pgrid, c.calibration_family);
    else
      s.grid = std::make_shared<const SpectralGrid>(make_spectral_grid(c.spectral));
  }
  s.data = make_initial_data(c.data, s.grid, s.plan.get(), c.model);
  return s;
}

int run_simulate_linear(const RunConfig& c, const std::string& dir, std::uint64_t seed,
                        std::ostream& log) {
  LinearSetup s = linear_setup(c);
  const std::vector<double> times = log1p_spaced(c.t_max, c.time_count);
  Trajectory tr = linear_part(times, s.data.F0, s.data.F1, c.model);
  write_trajectory_csv(out_path(dir, "trajectory.csv"), tr, c.model.alpha);
  bool finite = true;
  for (std::size_t i = 0; i < tr.size(); ++i)
    finite = finite && std::isfinite(plancherel_norm(tr.u[i])) && std::isfinite(plancherel_norm(tr.ut[i]));
  json out = header(c, "linear damped evolution of the Fourier coefficients", seed);
  out["family"] = c.data.family;
  out["data_norms"] = to_json(s.data.norms);
  out["samples"] = tr.size();
  out["final_l2"] = plancherel_norm(tr.u.back());
  out["verdict"] = finite;
  write_json(out_path(dir, "linear.json"), out);
  log << "simulate-linear: " << tr.size() << " samples\n";
  return finite ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------- fit-decay

std::pair<std::vector<double>, std::vector<double>> read_series(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open series file " + path);
  std::string line;
  std::getline(is, line);
  std::vector<double> t, v;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double a, b;
    char comma;
    if (!(ls >> a >> comma >> b) || comma != ',') throw InputError("bad series line: " + line);
    t.push_back(a);
    v.push_back(b);
  }
  return {t, v};
}

int run_fit_decay(const RunConfig& c, const std::string& dir, std::uint64_t seed, std::ostream& log) {
  json out = header(c, "polynomial and exponential decay envelopes of the linear problem", seed);
  bool pass = true;
  if (c.series.present) {
    std::vector<double> t, v;
    if (c.series.file.empty()) {
      t = log1p_spaced(c.t_max, c.time_count);
      for (double x : t) v.push_back(std::pow(1.0 + x, c.series.power));
      out["series"] = "synthetic (1+t)^power";
      out["power"] = c.series.power;
    } else {
      std::tie(t, v) = read_series(c.series.file);
      out["series"] = c.series.file;
    }
    const double slope = fit_tail_slope(t, v, c.model);
    out["fitted_slope"] = std::isfinite(slope) ? json(slope) : json("nan");
    pass = std::isfinite(slope);
    if (std::isfinite(c.series.expect_slope)) {
      out["expect_slope"] = c.series.expect_slope;
      out["slope_tol"] = c.series.slope_tol;
      pass = pass && std::abs(slope - c.series.expect_slope) <= c.series.slope_tol;
    }
    std::ofstream os(out_path(dir, "series.csv"), std::ios::binary);
    os << "t,measured\n";
    for (std::size_t i = 0; i < t.size(); ++i) os << format_double(t[i]) << ',' << format_double(v[i]) << '\n';
    out["verdict"] = pass;
    write_json(out_path(dir, "decay.json"), out);
    log << "fit-decay: slope " << slope << '\n';
    return pass ? kExitPass : kExitFail;
  }

  LinearSetup s = linear_setup(c);
  const std::vector<double> times = log1p_spaced(c.t_max, c.time_count);
  std::vector<Envelope> kinds;
  for (const auto& name : c.envelopes) kinds.push_back(envelope_from_name(name));
  if (kinds.empty()) kinds = linear_envelopes();

  out["family"] = c.data.family;
  out["data_norms"] = to_json(s.data.norms);
  json reports = json::array();
  for (Envelope e : kinds) {
    const EnvelopeKind kind = linear_kind(e, c.model);
    DecayReport r = measure_decay(s.data.F0, s.data.F1, c.model, s.data.norms, times, kind);
    write_decay_csv(out_path(dir, "decay_" + r.label + ".csv"), r);
    json j = window_json(r, c.window_split, c.window_tol, pass);
    j["estimate"] = envelope_description(kind);
    auto it = c.slope_bounds.find(envelope_name(e));
    if (it != c.slope_bounds.end()) {
      const bool ok = r.fitted_slope <= it->second;
      j["slope_bound"] = it->second;
      j["slope_verdict"] = ok;
      pass = pass && ok;
    }
    reports.push_back(j);
    log << "fit-decay " << r.label << ": dominance " << r.dominance_constant << " slope "
        << r.fitted_slope << '\n';
  }
  out["reports"] = reports;

  if (c.model.m > 0.0) {
    // ||u||_2 e^{mt/2b} should stay bounded
    std::vector<double> w;
    for (double t : times) {
      auto [u, ut] = evolve_field(t, s.data.F0, s.data.F1, c.model);
      w.push_back(plancherel_norm(u) * std::exp(c.model.m * t / (2.0 * c.model.b)));
    }
    double sup_split = 0.0, sup_full = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      sup_full = std::max(sup_full, w[i]);
      if (times[i] <= c.window_split) sup_split = std::max(sup_split, w[i]);
    }
    const double change = relative_change(sup_split, sup_full);
    const bool ok = std::isfinite(sup_full) && change < c.window_tol;
    json j;
    j["estimate"] = "weak mass estimate: ||u||_2 e^{mt/2b} bounded";
    j["sup_split"] = sup_split;
    j["sup_full"] = sup_full;
    j["window_change"] = change;
    j["verdict"] = ok;
    out["mass_weighted_l2"] = j;
    pass = pass && ok;
  }
  out["verdict"] = pass;
  write_json(out_path(dir, "decay.json"), out);
  return pass ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------- verify

int run_verify(const RunConfig& c, const std::string& dir, std::uint64_t seed, std::ostream& log) {
  json out = header(c, "pointwise and integral inequalities behind the decay estimates", seed);
  json checks = json::array();
  bool pass = true;
  auto record = [&](const std::string& name, const std::string& what, bool ok, json details) {
    json j;
    j["name"] = name;
    j["check"] = what;
    j["verdict"] = ok;
    if (!details.is_null()) j["details"] = details;
    checks.push_back(j);
    pass = pass && ok;
    log << "verify " << name << ": " << (ok ? "pass" : "FAIL") << '\n';
  };

  record("sqrt_inequality", "-4x <= -1 + sqrt(1-4x) <= -2x on [0, 1/4]", sqrt_inequality_sweep(10001),
         json());

  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    bool ok = true;
    int count = 0;
    for (int i = 0; i < 1000; ++i) {
      const double b = 0.1 + 4.9 * U(rng);
      const double m = 0.999 * U(rng) * b * b / 4.0;
      ok = check_f_positivity(b, m) && ok;
      ++count;
    }
    json d;
    d["samples"] = count;
    record("f_positivity", "exponent gaps of the uniform estimates are positive", ok, d);
  }

  {
    const RatioReport a = check_exp_poly_bound(1.0, 1.0, 2.0);
    const RatioReport b = check_exp_poly_bound(2.0, 1.0, 3.0);
    const double ea = std::abs(a.sup_ratio - std::exp(-1.0));
    const double eb = std::abs(b.sup_ratio - 4.0 * std::exp(-2.0));
    json d;
    d["gamma1"] = to_json(a);
    d["gamma2"] = to_json(b);
    d["error_gamma1"] = ea;
    d["error_gamma2"] = eb;
    record("exp_poly_bound", "sup t^gamma e^{-delta t} = (gamma/(e delta))^gamma", a.verdict && b.verdict &&
               ea < 1e-9 && eb < 1e-9, d);
  }

  const std::vector<double> grid = log_spaced(0.1, 1e4, 40);
  struct LemmaCase {
    const char* name;
    IntegralLemma lemma;
    LemmaArgs args;
  };
  const LemmaCase cases[] = {
      {"singular_convolution_above_one", IntegralLemma::SingularConvolution, {0.5, 1.0, 1.5, 0, 0, 1}},
      {"singular_convolution_equal_one", IntegralLemma::SingularConvolution, {0.5, 0.5, 0.5, 0, 0, 1}},
      {"singular_convolution_below_one", IntegralLemma::SingularConvolution, {0.3, 0.2, 0.6, 0, 0, 1}},
      {"split_head", IntegralLemma::SplitHead, {0, 0, 0, 1.5, 2.0, 1}},
      {"split_tail", IntegralLemma::SplitTail, {0, 0, 0, 0.5, 1.5, 1}},
      {"split_tail_log", IntegralLemma::SplitTailLog, {0, 0, 0, 0.5, 1.5, 1}},
      {"exp_convolution", IntegralLemma::ExpConvolution, {0, 0, 0, 1.5, 0, 1.0}},
  };
  for (const auto& lc : cases) {
    const RatioReport r = check_integral_lemma(lc.lemma, lc.args, grid);
    record(lc.name, std::string("time convolution bound: ") + lemma_name(lc.lemma), r.verdict, to_json(r));
  }

  for (Zone z : {Zone::Small, Zone::Large}) {
    const std::vector<ModeSample> samples = generate_mode_samples(c.samples, c.model, seed, &z);
    for (Quantity q : {Quantity::U, Quantity::DT_U, Quantity::FRAC_U}) {
      const RatioReport r = check_zone_estimate(z, q, samples, c.model);
      record(std::string("zone_") + zone_name(z) + "_" + quantity_name(q),
             "pointwise Fourier-side estimate in one frequency zone", r.verdict, to_json(r));
    }
  }
  {
    const std::vector<ModeSample> samples = generate_mode_samples(c.samples, c.model, seed + 1, nullptr);
    for (Quantity q : {Quantity::U, Quantity::DT_U, Quantity::FRAC_U}) {
      const RatioReport r = check_uniform_estimates(q, samples, c.model);
      record(std::string("uniform_") + quantity_name(q), "zone-free exponential estimate", r.verdict,
             to_json(r));
    }
  }

  {
    const PhysicalGrid pgrid = make_cube_grid(c.model.n, c.half_width, c.count);
    GridPtr g = build_grid(c.spectral, pgrid, c, nullptr);
    TransformPlan plan(g, pgrid);
    const double s = std::min(1.0, c.model.alpha);
    double worst = 0.0;
    bool ok = true, rl = true;
    json d = json::array();
    for (const auto& widths : c.calibration_family) {
      PhysicalField f = gaussian_field(pgrid, widths);
      CoefficientField F = plan.forward(f);
      rl = check_riemann_lebesgue(f, F) && rl;
      for (double q : {3.0, 4.0}) {
        const double qmax = 2.0 * c.model.Q() / (c.model.Q() - 2.0 * s);
        if (q > qmax) continue;
        const RatioReport r = check_gagliardo_nirenberg(f, F, q, s, 2.0, c.model);
        ok = ok && r.verdict;
        worst = std::max(worst, r.sup_ratio);
        json e = to_json(r);
        e["widths"] = widths;
        d.push_back(e);
      }
    }
    json det;
    det["ratios"] = d;
    det["common_constant"] = worst;
    record("gagliardo_nirenberg", "||f||_q <= C ||(-L)^{s/2} f||_2^theta ||f||_2^{1-theta}",
           ok && std::isfinite(worst), det);
    record("riemann_lebesgue", "sup |f^(lambda)| <= ||f||_1 on the calibration family", rl, json());
  }

  out["checks"] = checks;
  out["verdict"] = pass;
  write_json(out_path(dir, "verify.json"), out);
  return pass ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------- nonlinear

struct NonlinearSetup {
  PhysicalGrid pgrid;
  GridPtr grid;
  std::unique_ptr<TransformPlan> plan;
};

NonlinearSetup nonlinear_setup(const RunConfig& c) {
  NonlinearSetup s;
  s.pgrid = make_cube_grid(c.model.n, c.nl_half_width, c.nl_count);
  s.grid = build_grid(c.nl_spectral, s.pgrid, c, nullptr);
  s.plan = std::make_unique<TransformPlan>(s.grid, s.pgrid);
  return s;
}

json decay_block(const std::vector<DecayReport>& reps, const RunConfig& c, bool& pass) {
  json a = json::array();
  for (const auto& r : reps) {
    json j = window_json(r, 0.5 * c.fixed_point.T, c.window_tol, pass);
    j["estimate"] = envelope_description(
        EnvelopeKind{envelope_for(c.fixed_point.regime), r.label.ends_with("_dt") ? 1 : 0,
                     r.label.ends_with("_halpha") ? c.model.alpha : 0.0});
    a.push_back(j);
  }
  return a;
}

int run_simulate_nonlinear(const RunConfig& c, const std::string& dir, std::uint64_t seed,
                           std::ostream& log) {
  NonlinearSetup s = nonlinear_setup(c);
  const FixedPointConfig& cfg = c.fixed_point;
  InitialData shape = make_initial_data(c.data, s.grid, s.plan.get(), c.model);
  const double d0 = regime_data_norm(shape.norms, cfg.regime);
  json out = header(c, "small-data global solution by Picard iteration on the Duhamel formula", seed);
  out["regime"] = regime_name(cfg.regime);
  out["profile"] = profile_name(profile_for(cfg.regime));
  out["p"] = cfg.p;
  const WeightProfile profile{profile_for(cfg.regime), c.model};
  bool pass = true;

  if (!(d0 > 0.0)) {
    // zero data: N(0) = 0
    PicardResult res = picard_iterate(shape.F0, shape.F1, shape.norms, cfg, profile, c.model, *s.plan);
    out["convergence"] = to_json(res.report);
    write_convergence_csv(out_path(dir, "convergence.csv"), res.report);
    write_trajectory_csv(out_path(dir, "trajectory.csv"), res.components[0], c.model.alpha);
    out["verdict"] = res.report.verdict;
    write_json(out_path(dir, "nonlinear.json"), out);
    return res.report.verdict ? kExitPass : kExitFail;
  }

  if (c.calibrate_epsilon) {
    EpsilonCalibration cal = calibrate_epsilon(shape.F0, shape.F1, shape.norms, cfg, profile, c.model,
                                               *s.plan, c.eps_lo, c.eps_hi, c.eps_steps);
    json j;
    j["stable"] = cal.stable;
    j["breaking"] = cal.breaking;
    j["runs"] = cal.runs;
    j["lo"] = c.eps_lo;
    j["hi"] = c.eps_hi;
    out["epsilon_calibration"] = j;
    log << "epsilon calibration: stable " << cal.stable << " breaking " << cal.breaking << '\n';
  }

  InitialData data = scaled(shape, cfg.epsilon / d0);
  out["data_norms"] = to_json(data.norms);
  try {
    PicardResult res = picard_iterate(data.F0, data.F1, data.norms, cfg, profile, c.model, *s.plan);
    const ConvergenceReport& rep = res.report;
    out["convergence"] = to_json(rep);
    write_convergence_csv(out_path(dir, "convergence.csv"), rep);
    write_trajectory_csv(out_path(dir, "trajectory.csv"), res.components[0], c.model.alpha);
    pass = rep.verdict;
    log << "picard: iters " << rep.iters << " converged " << rep.converged << " final X-norm "
        << rep.final_x_norm << '\n';
    if (rep.converged) {
      const double resid =
          fixed_point_residual(res, data.F0, data.F1, cfg, profile, c.model, *s.plan);
      out["fixed_point_residual"] = resid;
      const bool rok = resid < 2.0 * cfg.tol * rep.linear_x_norm;
      out["fixed_point_residual_verdict"] = rok;
      pass = pass && rok;
      auto reps = verify_nonlinear_decay(res.components[0], c.model, data.norms, cfg.regime, rep);
      for (const auto& r : reps) write_decay_csv(out_path(dir, "decay_" + r.label + ".csv"), r);
      out["decay"] = decay_block(reps, c, pass);
    }
  } catch (const NonContractionError& e) {
    out["non_contraction"] = e.what();
    pass = false;
  }

  if (c.breaking_factor > 0.0) {
    FixedPointConfig big = cfg;
    big.epsilon = cfg.epsilon * c.breaking_factor;
    InitialData bd = scaled(shape, big.epsilon / d0);
    json j;
    j["epsilon"] = big.epsilon;
    bool raised = false;
    try {
      PicardResult r = picard_iterate(bd.F0, bd.F1, bd.norms, big, profile, c.model, *s.plan);
      j["converged"] = r.report.converged;
      j["iters"] = r.report.iters;
    } catch (const NonContractionError& e) {
      raised = true;
      j["error"] = e.what();
    }
    j["non_contraction"] = raised;
    out["breaking_run"] = j;
    pass = pass && raised;
    log << "breaking run at " << big.epsilon << ": non-contraction " << raised << '\n';
  }

  out["verdict"] = pass;
  write_json(out_path(dir, "nonlinear.json"), out);
  return pass ? kExitPass : kExitFail;
}

double max_mode_difference(const Trajectory& a, const Trajectory& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < a.u[i].values.size(); ++k) {
      d = std::max(d, std::abs(a.u[i].values[k] - b.u[i].values[k]));
      d = std::max(d, std::abs(a.ut[i].values[k] - b.ut[i].values[k]));
    }
  return d;
}

DataNorms sum_norms(const DataNorms& a, const DataNorms& b) {
  DataNorms s;
  s.l1 = a.l1 + b.l1;
  s.l2 = a.l2 + b.l2;
  s.h_alpha_seminorm = a.h_alpha_seminorm + b.h_alpha_seminorm;
  s.l1_is_surrogate = a.l1_is_surrogate || b.l1_is_surrogate;
  return s;
}

int run_simulate_coupled(const RunConfig& c, const std::string& dir, std::uint64_t seed,
                         std::ostream& log) {
  NonlinearSetup s = nonlinear_setup(c);
  const FixedPointConfig& cfg = c.fixed_point;
  InitialData su = make_initial_data(c.data, s.grid, s.plan.get(), c.model);
  InitialData sv = c.has_data_v ? make_initial_data(c.data_v, s.grid, s.plan.get(), c.model) : su;
  const double joint = regime_data_norm(sum_norms(su.norms, sv.norms), cfg.regime);
  const double factor = joint > 0.0 ? cfg.epsilon / joint : 1.0;
  InitialData u = scaled(su, factor), v = scaled(sv, factor);
  const DataNorms norms = sum_norms(u.norms, v.norms);

  json out = header(c, "weakly coupled system with mass by simultaneous Picard iteration", seed);
  out["p"] = cfg.p;
  out["q"] = cfg.q;
  out["profile"] = profile_name(ProfileTag::Z_MASS);
  out["data_norms_u"] = to_json(u.norms);
  out["data_norms_v"] = to_json(v.norms);
  bool pass = true;
  try {
    PicardResult res = coupled_iterate(u.F0, u.F1, v.F0, v.F1, norms, cfg, c.model, *s.plan);
    out["convergence"] = to_json(res.report);
    write_convergence_csv(out_path(dir, "convergence.csv"), res.report);
    write_trajectory_csv(out_path(dir, "trajectory_u.csv"), res.components[0], c.model.alpha);
    write_trajectory_csv(out_path(dir, "trajectory_v.csv"), res.components[1], c.model.alpha);
    pass = res.report.verdict;
    log << "coupled: iters " << res.report.iters << " converged " << res.report.converged << '\n';
    if (res.report.converged) {
      auto ru = verify_nonlinear_decay(res.components[0], c.model, u.norms, SemilinearRegime::Mass,
                                       res.report);
      for (const auto& r : ru) write_decay_csv(out_path(dir, "decay_u_" + r.label + ".csv"), r);
      out["decay_u"] = decay_block(ru, c, pass);
    }
    if (c.check_symmetric) {
      json j;
      if (c.has_data_v || cfg.p != cfg.q) {
        j["skipped"] = "needs identical data for u and v and p = q";
      } else {
        FixedPointConfig single = cfg;
        const WeightProfile profile{ProfileTag::Z_MASS, c.model};
        PicardResult one = picard_iterate(u.F0, u.F1, u.norms, single, profile, c.model, *s.plan);
        const double du = max_mode_difference(one.components[0], res.components[0]);
        const double dv = max_mode_difference(res.components[0], res.components[1]);
        j["max_difference_single_vs_u"] = du;
        j["max_difference_u_vs_v"] = dv;
        j["single_iters"] = one.report.iters;
        const bool ok = du <= 1e-12 && dv <= 1e-12 && one.report.iters == res.report.iters;
        j["verdict"] = ok;
        pass = pass && ok;
        log << "symmetric specialization: max difference " << du << '\n';
      }
      out["symmetric_check"] = j;
    }
  } catch (const NonContractionError& e) {
    out["non_contraction"] = e.what();
    pass = false;
  }
  out["verdict"] = pass;
  write_json(out_path(dir, "coupled.json"), out);
  return pass ? kExitPass : kExitFail;
}

}  // namespace

int run(const RunConfig& c, const std::string& dir, std::uint64_t seed, std::ostream& log) {
  try {
    fs::create_directories(dir);
    switch (c.experiment) {
      case Experiment::Roundtrip: return run_roundtrip(c, dir, seed, log);
      case Experiment::SimulateLinear: return run_simulate_linear(c, dir, seed, log);
      case Experiment::FitDecay: return run_fit_decay(c, dir, seed, log);
      case Experiment::Verify: return run_verify(c, dir, seed, log);
      case Experiment::SimulateNonlinear: return run_simulate_nonlinear(c, dir, seed, log);
      case Experiment::SimulateCoupled: return run_simulate_coupled(c, dir, seed, log);
    }
  } catch (const DomainError& e) {
    log << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConfigurationError& e) {
    log << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InputError& e) {
    log << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    log << "output error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace hwave
