#include "hwave/duhamel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hwave/errors.hpp"
#include "hwave/propagator.hpp"

namespace hwave {

const char* profile_name(ProfileTag t) {
  switch (t) {
    case ProfileTag::X_L1: return "X_L1";
    case ProfileTag::X_L2: return "X_L2";
    case ProfileTag::Z_MASS: return "Z_MASS";
  }
  return "?";
}

double WeightProfile::f1(double t) const {
  switch (tag) {
    case ProfileTag::X_L1: return std::pow(1.0 + t, -params.Q() / (4.0 * params.alpha));
    case ProfileTag::X_L2: return 1.0;
    case ProfileTag::Z_MASS: return std::exp(-params.m * t / (2.0 * params.b));
  }
  return 1.0;
}

double WeightProfile::f2(double t) const {
  switch (tag) {
    case ProfileTag::X_L1: return std::pow(1.0 + t, -params.Q() / (4.0 * params.alpha) - 0.5);
    case ProfileTag::X_L2: return std::pow(1.0 + t, -0.5);
    case ProfileTag::Z_MASS: return std::pow(1.0 + t, -0.5) * std::exp(-params.m * t / (2.0 * params.b));
  }
  return 1.0;
}

double WeightProfile::f3(double t) const {
  switch (tag) {
    case ProfileTag::X_L1: return std::pow(1.0 + t, -params.Q() / (4.0 * params.alpha) - 1.0);
    case ProfileTag::X_L2: return 1.0 / (1.0 + t);
    case ProfileTag::Z_MASS:
      return (1.0 / (1.0 + t) + params.m) * std::exp(-params.m * t / (2.0 * params.b));
  }
  return 1.0;
}

const char* regime_name(SemilinearRegime r) {
  switch (r) {
    case SemilinearRegime::L1: return "l1";
    case SemilinearRegime::L2: return "l2";
    case SemilinearRegime::Mass: return "mass";
  }
  return "?";
}

SemilinearRegime semilinear_regime_from_name(const std::string& s) {
  for (auto r : {SemilinearRegime::L1, SemilinearRegime::L2, SemilinearRegime::Mass})
    if (s == regime_name(r)) return r;
  throw InputError("unknown semilinear regime '" + s + "' (expected l1, l2 or mass)");
}

ProfileTag profile_for(SemilinearRegime r) {
  switch (r) {
    case SemilinearRegime::L1: return ProfileTag::X_L1;
    case SemilinearRegime::L2: return ProfileTag::X_L2;
    case SemilinearRegime::Mass: return ProfileTag::Z_MASS;
  }
  return ProfileTag::X_L1;
}

Envelope envelope_for(SemilinearRegime r) {
  switch (r) {
    case SemilinearRegime::L1: return Envelope::NONLIN_L1;
    case SemilinearRegime::L2: return Envelope::NONLIN_L2;
    case SemilinearRegime::Mass: return Envelope::NONLIN_MASS;
  }
  return Envelope::NONLIN_L1;
}

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void check_exponent(const char* label, double p, const FixedPointConfig& cfg, const ModelParams& m) {
  const double Q = m.Q(), a = m.alpha;
  const double crit = 1.0 + 2.0 * a / (Q - 2.0 * a);
  std::string lo_txt;
  bool ok = false;
  switch (cfg.regime) {
    case SemilinearRegime::L1:
      ok = p >= 2.0 && p <= crit;
      lo_txt = "2 <= ";
      break;
    case SemilinearRegime::L2:
      ok = p > 1.0 + 4.0 * a / Q && p <= crit;
      lo_txt = num(1.0 + 4.0 * a / Q) + " < ";
      break;
    case SemilinearRegime::Mass:
      ok = p > 1.0 && p <= crit;
      lo_txt = "1 < ";
      break;
  }
  if (!ok)
    throw DomainError(std::string("fixed point: exponent ") + label + "=" + num(p) + " violates " +
                      lo_txt + label + " <= 1+2alpha/(Q-2alpha) = " + num(crit) + " (" +
                      regime_name(cfg.regime) + " regime, Q=" + num(Q) + ", alpha=" + num(a) + ")");
}

}  // namespace

void validate(const FixedPointConfig& cfg, const ModelParams& m, bool coupled) {
  validate(m);
  if (!(cfg.epsilon > 0.0)) throw DomainError("fixed point: epsilon must be positive");
  if (!(cfg.T > 0.0)) throw DomainError("fixed point: horizon T must be positive");
  if (cfg.time_nodes < 3) throw ConfigurationError("fixed point: need at least 3 time nodes");
  if (cfg.max_iters < 1) throw DomainError("fixed point: max_iters must be positive");
  if (!(cfg.tol > 0.0)) throw DomainError("fixed point: tol must be positive");
  if (!(cfg.r > 1.0)) throw DomainError("fixed point: contraction margin r must exceed 1");
  const double Q = m.Q(), a = m.alpha;
  switch (cfg.regime) {
    case SemilinearRegime::L1:
      if (m.m != 0.0) throw DomainError("fixed point: l1 regime requires m = 0");
      if (!(a >= 1.0 && 2.0 * a < Q && Q <= 4.0 * a))
        throw DomainError("fixed point: l1 regime requires alpha >= 1 and 2alpha < Q <= 4alpha");
      break;
    case SemilinearRegime::L2:
      if (m.m != 0.0) throw DomainError("fixed point: l2 regime requires m = 0");
      if (!(2.0 * a < Q && Q < 4.0 * a))
        throw DomainError("fixed point: l2 regime requires 2alpha < Q < 4alpha");
      break;
    case SemilinearRegime::Mass:
      if (!(m.m > 0.0)) throw DomainError("fixed point: mass regime requires m > 0");
      if (!(Q > 2.0 * a)) throw DomainError("fixed point: mass regime requires Q > 2alpha");
      break;
  }
  if (coupled && cfg.regime != SemilinearRegime::Mass)
    throw DomainError("fixed point: the coupled system is posed in the mass regime");
  check_exponent("p", cfg.p, cfg, m);
  if (coupled) check_exponent("q", cfg.q, cfg, m);
}

std::vector<double> uniform_times(double T, int nodes) {
  if (!(T > 0.0) || nodes < 2) throw InputError("uniform_times: need T > 0 and nodes >= 2");
  std::vector<double> t(nodes);
  for (int i = 0; i < nodes; ++i) t[i] = T * i / (nodes - 1);
  t.back() = T;
  return t;
}

Trajectory linear_part(const std::vector<double>& times, const CoefficientField& F0,
                       const CoefficientField& F1, const ModelParams& params) {
  require_same_grid(F0, F1, "linear_part");
  Trajectory tr;
  tr.times = times;
  for (double t : times) {
    if (t == 0.0) {
      tr.u.push_back(F0);
      tr.ut.push_back(F1);
      continue;
    }
    auto [u, ut] = evolve_field(t, F0, F1, params);
    tr.u.push_back(std::move(u));
    tr.ut.push_back(std::move(ut));
  }
  return tr;
}

CoefficientField nonlinearity_transform(const CoefficientField& state, double p,
                                        const TransformPlan& plan) {
  if (!(p > 1.0)) throw InputError("nonlinearity: p must exceed 1");
  if (!same_grid(*state.grid, plan.spectral()))
    throw InputError("nonlinearity: state and plan use different spectral grids");
  PhysicalField f = plan.inverse(state);
  double re2 = 0.0, im2 = 0.0;
  for (const cplx& v : f.values) {
    re2 += v.real() * v.real();
    im2 += v.imag() * v.imag();
  }
  if (im2 > 0.01 * (re2 + im2))
    throw ConsistencyError("nonlinearity: reconstruction has an imaginary part of " +
                           num(std::sqrt(im2 / (re2 + im2)) * 100.0) +
                           "% of its magnitude; truncation too aggressive");
  for (cplx& v : f.values) v = std::pow(std::abs(v.real()), p);
  return plan.forward(f);
}

CoefficientField nonlinearity_transform(const CoefficientField& state, double p,
                                        const PhysicalGrid& pgrid, const GridPtr& sgrid) {
  TransformPlan plan(sgrid, pgrid);
  return nonlinearity_transform(state, p, plan);
}

DuhamelKernels::DuhamelKernels(const SpectralGrid& g, double dt, std::size_t nodes,
                               const ModelParams& params)
    : dt_(dt), nodes_(nodes), modes_(g.num_lambda() * g.rows.size()) {
  k1_.resize((nodes + 1) * modes_);
  k2_.resize((nodes + 1) * modes_);
  for (long lag = -1; lag < static_cast<long>(nodes); ++lag) {
    const double tau = lag < 0 ? 0.5 * dt : lag * dt;
    double* a = &k1_[slot(lag)];
    double* b = &k2_[slot(lag)];
    for (std::size_t li = 0; li < g.num_lambda(); ++li)
      for (std::size_t r = 0; r < g.rows.size(); ++r) {
        const double s = fractional_symbol(g.lambda_nodes[li], g.row_mu[r], params.alpha);
        const Damped d = damped_multipliers(tau, s, params);
        const std::size_t i = li * g.rows.size() + r;
        a[i] = d.e1;
        b[i] = d.e0 - 0.5 * params.b * d.e1;
      }
  }
}

namespace {

// quadrature weights (in units of dt) for nodes 0..i, i >= 2
std::vector<double> composite_weights(std::size_t i) {
  std::vector<double> w(i + 1, 0.0);
  const std::size_t simpson_end = (i % 2 == 0) ? i : i - 3;
  for (std::size_t j = 0; j + 2 <= simpson_end; j += 2) {
    w[j] += 1.0 / 3.0;
    w[j + 1] += 4.0 / 3.0;
    w[j + 2] += 1.0 / 3.0;
  }
  if (i % 2 == 1) {
    const double c = 3.0 / 8.0;
    w[i - 3] += c;
    w[i - 2] += 3.0 * c;
    w[i - 1] += 3.0 * c;
    w[i] += c;
  }
  return w;
}

void accumulate(CoefficientField& out, const CoefficientField& src, const double* kern, double w,
                std::size_t cols) {
  const std::size_t modes = out.values.size() / cols;
  for (std::size_t m = 0; m < modes; ++m) {
    const double f = w * kern[m];
    if (f == 0.0) continue;
    cplx* o = &out.values[m * cols];
    const cplx* s = &src.values[m * cols];
    for (std::size_t c = 0; c < cols; ++c) o[c] += f * s[c];
  }
}

}  // namespace

std::pair<CoefficientField, CoefficientField> duhamel_step(std::size_t i,
                                                           const std::vector<CoefficientField>& src,
                                                           const DuhamelKernels& K,
                                                           std::size_t cols) {
  if (src.size() < 3)
    throw ConfigurationError("duhamel: need at least 3 quadrature nodes, have " +
                             std::to_string(src.size()));
  if (i >= src.size()) throw InputError("duhamel: time index beyond the source history");
  if (src.size() > K.nodes()) throw InputError("duhamel: kernels cover fewer nodes than the history");
  CoefficientField u(src[0].grid), ut(src[0].grid);
  if (i == 0) return {std::move(u), std::move(ut)};
  const double dt = K.dt();
  if (i == 1) {
    // Simpson on [0, dt]; the source at dt/2 is interpolated through nodes 0, 1, 2
    CoefficientField mid = 0.375 * src[0] + 0.75 * src[1] + (-0.125) * src[2];
    const double w = dt / 6.0;
    accumulate(u, src[0], K.k1(1), w, cols);
    accumulate(u, mid, K.k1(-1), 4.0 * w, cols);
    accumulate(u, src[1], K.k1(0), w, cols);
    accumulate(ut, src[0], K.k2(1), w, cols);
    accumulate(ut, mid, K.k2(-1), 4.0 * w, cols);
    accumulate(ut, src[1], K.k2(0), w, cols);
    return {std::move(u), std::move(ut)};
  }
  const std::vector<double> w = composite_weights(i);
  for (std::size_t j = 0; j <= i; ++j) {
    accumulate(u, src[j], K.k1(static_cast<long>(i - j)), w[j] * dt, cols);
    accumulate(ut, src[j], K.k2(static_cast<long>(i - j)), w[j] * dt, cols);
  }
  return {std::move(u), std::move(ut)};
}

std::pair<CoefficientField, CoefficientField> duhamel_step(std::size_t i,
                                                           const std::vector<double>& times,
                                                           const std::vector<CoefficientField>& src,
                                                           const ModelParams& params) {
  if (times.size() != src.size()) throw InputError("duhamel: times and source differ in length");
  if (src.size() < 3)
    throw ConfigurationError("duhamel: need at least 3 quadrature nodes, have " +
                             std::to_string(src.size()));
  const double dt = times[1] - times[0];
  for (std::size_t j = 1; j < times.size(); ++j)
    if (std::abs(times[j] - times[0] - j * dt) > 1e-9 * (1.0 + times.back()))
      throw InputError("duhamel: time nodes must be uniform");
  DuhamelKernels K(*src[0].grid, dt, src.size(), params);
  return duhamel_step(i, src, K, src[0].grid->cols.size());
}

double x_norm(const Trajectory& tr, const WeightProfile& pr) {
  if (tr.times.empty()) throw InputError("x_norm: empty trajectory");
  double best = 0.0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const double t = tr.times[i];
    const double v = plancherel_norm(tr.u[i]) / pr.f1(t) +
                     sobolev_seminorm(tr.u[i], pr.params.alpha) / pr.f2(t) +
                     plancherel_norm(tr.ut[i]) / pr.f3(t);
    if (!(v <= best)) best = v;  // lets NaN through
  }
  return best;
}

double regime_data_norm(const DataNorms& n, SemilinearRegime r) {
  return r == SemilinearRegime::L1 ? n.b_norm() : n.a_norm();
}

namespace {

Trajectory difference(const Trajectory& a, const Trajectory& b) {
  Trajectory d;
  d.times = a.times;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d.u.push_back(a.u[i] - b.u[i]);
    d.ut.push_back(a.ut[i] - b.ut[i]);
  }
  return d;
}

double total_x_norm(const std::vector<Trajectory>& c, const WeightProfile& pr) {
  double s = 0.0;
  for (const auto& tr : c) s += x_norm(tr, pr);
  return s;
}

double total_diff_norm(const std::vector<Trajectory>& a, const std::vector<Trajectory>& b,
                       const WeightProfile& pr) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += x_norm(difference(a[k], b[k]), pr);
  return s;
}

struct Engine {
  const std::vector<Trajectory>& lin;
  std::vector<std::size_t> source_of;  // component feeding each equation
  std::vector<double> exponent;
  const TransformPlan& plan;
  DuhamelKernels kernels;

  // N applied to all components at once
  std::vector<Trajectory> apply(const std::vector<Trajectory>& cur) const {
    const std::size_t nodes = cur[0].size();
    const std::size_t cols = plan.spectral().cols.size();
    std::vector<Trajectory> next(cur.size());
    for (std::size_t k = 0; k < cur.size(); ++k) {
      std::vector<CoefficientField> src;
      src.reserve(nodes);
      for (std::size_t j = 0; j < nodes; ++j)
        src.push_back(nonlinearity_transform(cur[source_of[k]].u[j], exponent[k], plan));
      Trajectory& out = next[k];
      out.times = cur[k].times;
      for (std::size_t j = 0; j < nodes; ++j) {
        auto [du, dut] = duhamel_step(j, src, kernels, cols);
        out.u.push_back(lin[k].u[j] + du);
        out.ut.push_back(lin[k].ut[j] + dut);
      }
    }
    return next;
  }
};

PicardResult run_picard(const std::vector<std::pair<const CoefficientField*, const CoefficientField*>>& data,
                        std::vector<std::size_t> source_of, std::vector<double> exponent,
                        const DataNorms& norms, const FixedPointConfig& cfg,
                        const WeightProfile& profile, const ModelParams& params,
                        const TransformPlan& plan) {
  for (const auto& [a, b] : data) {
    if (!same_grid(*a->grid, plan.spectral()) || !same_grid(*b->grid, plan.spectral()))
      throw InputError("picard: data and plan use different spectral grids");
  }
  const std::vector<double> times = uniform_times(cfg.T, cfg.time_nodes);
  std::vector<Trajectory> lin;
  for (const auto& [a, b] : data) lin.push_back(linear_part(times, *a, *b, params));

  ConvergenceReport rep;
  rep.epsilon = cfg.epsilon;
  rep.tol = cfg.tol;
  rep.data_norm = regime_data_norm(norms, cfg.regime);
  if (rep.data_norm > cfg.epsilon * (1.0 + 1e-12))
    throw InputError("picard: data norm " + num(rep.data_norm) + " exceeds epsilon " +
                     num(cfg.epsilon));

  Engine eng{lin, std::move(source_of), std::move(exponent), plan,
             DuhamelKernels(plan.spectral(), times[1] - times[0], times.size(), params)};
  rep.linear_x_norm = total_x_norm(lin, profile);
  const double scale = rep.linear_x_norm;

  std::vector<Trajectory> cur = lin;
  int rising = 0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    std::vector<Trajectory> next = eng.apply(cur);
    const double d = total_diff_norm(next, cur, profile);
    rep.iters = it;
    if (!rep.diffs.empty()) rep.ratios.push_back(rep.diffs.back() > 0.0 ? d / rep.diffs.back() : 0.0);
    rep.diffs.push_back(d);
    cur = std::move(next);
    if (!std::isfinite(d))
      throw NonContractionError("picard: iterate difference is not finite at iteration " +
                                    std::to_string(it) + " (epsilon " + num(cfg.epsilon) + ")",
                                cfg.epsilon);
    if (d <= cfg.tol * scale) {
      rep.converged = true;
      break;
    }
    rising = (!rep.ratios.empty() && rep.ratios.back() > 1.0) ? rising + 1 : 0;
    if (rising >= 3)
      throw NonContractionError("picard: difference ratio above 1 for 3 consecutive iterations "
                                "(epsilon " + num(cfg.epsilon) + ")",
                                cfg.epsilon);
  }

  rep.final_x_norm = total_x_norm(cur, profile);
  double pmax = *std::max_element(eng.exponent.begin(), eng.exponent.end());
  double lin_part = rep.data_norm > 0.0 ? rep.linear_x_norm / rep.data_norm : 0.0;
  double non = 0.0;
  for (std::size_t k = 0; k < cur.size(); ++k) non += x_norm(difference(cur[k], lin[k]), profile);
  double non_part = rep.final_x_norm > 0.0 ? non / std::pow(rep.final_x_norm, pmax) : 0.0;
  rep.a_emp = std::max(lin_part, non_part);
  rep.bound_ok = rep.final_x_norm <= 2.0 * rep.a_emp * cfg.epsilon;
  bool contracting = true;
  for (double r : rep.ratios) contracting = contracting && r < 1.0;
  rep.verdict = rep.converged && rep.bound_ok && contracting;

  PicardResult out;
  out.components = std::move(cur);
  out.report = std::move(rep);
  return out;
}

}  // namespace

PicardResult picard_iterate(const CoefficientField& F0, const CoefficientField& F1,
                            const DataNorms& norms, const FixedPointConfig& cfg,
                            const WeightProfile& profile, const ModelParams& params,
                            const TransformPlan& plan) {
  validate(cfg, params);
  return run_picard({{&F0, &F1}}, {0}, {cfg.p}, norms, cfg, profile, params, plan);
}

PicardResult coupled_iterate(const CoefficientField& F0u, const CoefficientField& F1u,
                             const CoefficientField& F0v, const CoefficientField& F1v,
                             const DataNorms& norms, const FixedPointConfig& cfg,
                             const ModelParams& params, const TransformPlan& plan) {
  validate(cfg, params, true);
  WeightProfile profile{ProfileTag::Z_MASS, params};
  return run_picard({{&F0u, &F1u}, {&F0v, &F1v}}, {1, 0}, {cfg.p, cfg.q}, norms, cfg, profile,
                    params, plan);
}

double fixed_point_residual(const PicardResult& res, const CoefficientField& F0,
                            const CoefficientField& F1, const FixedPointConfig& cfg,
                            const WeightProfile& profile, const ModelParams& params,
                            const TransformPlan& plan) {
  if (res.components.size() != 1) throw InputError("fixed_point_residual: single equation only");
  const Trajectory& u = res.components[0];
  std::vector<Trajectory> lin{linear_part(u.times, F0, F1, params)};
  Engine eng{lin, {0}, {cfg.p}, plan,
             DuhamelKernels(plan.spectral(), u.times[1] - u.times[0], u.size(), params)};
  std::vector<Trajectory> next = eng.apply({u});
  return x_norm(difference(next[0], u), profile);
}

std::vector<DecayReport> verify_nonlinear_decay(const Trajectory& tr, const ModelParams& params,
                                                const DataNorms& norms, SemilinearRegime regime,
                                                const ConvergenceReport& conv) {
  if (!conv.converged) throw InputError("verify_nonlinear_decay: trajectory did not converge");
  std::vector<DecayReport> out;
  const Envelope tag = envelope_for(regime);
  const std::pair<int, double> ij[] = {{0, 0.0}, {0, params.alpha}, {1, 0.0}};
  for (auto [i, j] : ij) {
    EnvelopeKind kind{tag, i, j};
    std::vector<double> measured;
    for (std::size_t k = 0; k < tr.size(); ++k) {
      if (i == 1)
        measured.push_back(plancherel_norm(tr.ut[k]));
      else if (j > 0.0)
        measured.push_back(sobolev_seminorm(tr.u[k], params.alpha));
      else
        measured.push_back(plancherel_norm(tr.u[k]));
    }
    out.push_back(make_report(tr.times, std::move(measured), kind, params, norms));
  }
  return out;
}

EpsilonCalibration calibrate_epsilon(const CoefficientField& F0, const CoefficientField& F1,
                                     const DataNorms& shape, FixedPointConfig cfg,
                                     const WeightProfile& profile, const ModelParams& params,
                                     const TransformPlan& plan, double lo, double hi, int steps) {
  const double d0 = regime_data_norm(shape, cfg.regime);
  if (!(d0 > 0.0)) throw InputError("calibrate_epsilon: data shape has zero norm");
  if (!(lo > 0.0 && hi > lo)) throw InputError("calibrate_epsilon: need 0 < lo < hi");
  EpsilonCalibration cal;
  auto converges = [&](double eps) {
    ++cal.runs;
    const double c = eps / d0;
    DataNorms n = shape;
    n.l1 *= c;
    n.l2 *= c;
    n.h_alpha_seminorm *= c;
    cfg.epsilon = eps;
    try {
      return picard_iterate(c * F0, c * F1, n, cfg, profile, params, plan).report.converged;
    } catch (const NonContractionError&) {
      return false;
    } catch (const ConsistencyError&) {
      return false;
    }
  };
  if (!converges(lo)) throw ConsistencyError("calibrate_epsilon: no convergence at the lower bracket");
  if (converges(hi)) {
    cal.stable = hi;
    cal.breaking = hi;
    return cal;
  }
  for (int s = 0; s < steps; ++s) {
    const double mid = std::sqrt(lo * hi);
    (converges(mid) ? lo : hi) = mid;
  }
  cal.stable = lo;
  cal.breaking = hi;
  return cal;
}

}  // namespace hwave
