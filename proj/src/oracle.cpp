#include "hwave/oracle.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "hwave/decay.hpp"
#include "hwave/errors.hpp"
#include "hwave/propagator.hpp"

namespace hwave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ratio_of(double lhs, double rhs) {
  if (lhs == 0.0) return 0.0;
  if (!(rhs > 0.0)) return kInf;
  return lhs / rhs;
}

double drift(double coarse, double fine) {
  if (coarse == fine) return 0.0;
  if (!(coarse > 0.0)) return kInf;
  return std::abs(fine - coarse) / coarse;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string describe(const ModeSample& s, double sym) {
  std::ostringstream os;
  os.precision(6);
  os << "t=" << s.t << " lambda=" << s.lambda << " k=(";
  for (std::size_t i = 0; i < s.k.size(); ++i) os << (i ? "," : "") << s.k[i];
  os << ") s=" << sym;
  return os.str();
}

template <class Lhs, class Rhs>
RatioReport sweep_samples(const std::vector<ModeSample>& samples, const ModelParams& p, Lhs lhs,
                          Rhs rhs) {
  RatioReport rep;
  rep.sample_count = static_cast<int>(samples.size());
  const std::size_t half = samples.size() / 2;
  double sup_half = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const ModeSample& smp = samples[i];
    const double s = fractional_symbol(smp.lambda, smp.k, p);
    // both sides are quadratic in (u0, u1) with a diagonal right side, so the sup over
    // all data at this (t, lambda, k) is a0/c0 + a1/c1 (Cauchy-Schwarz)
    ModeSample e0 = smp, e1 = smp;
    e0.u0 = 1.0;
    e0.u1 = 0.0;
    e1.u0 = 0.0;
    e1.u1 = 1.0;
    const double r = ratio_of(lhs(e0, s), rhs(e0, s)) + ratio_of(lhs(e1, s), rhs(e1, s));
    if (r > rep.sup_ratio || (i == 0 && r == 0.0 && rep.argmax_input.empty())) {
      if (r > rep.sup_ratio) rep.sup_ratio = r;
      rep.argmax_input = describe(smp, s);
    }
    if (i + 1 == half) sup_half = rep.sup_ratio;
  }
  rep.refinement_drift = half > 0 ? drift(sup_half, rep.sup_ratio) : 0.0;
  rep.verdict = std::isfinite(rep.sup_ratio) && rep.refinement_drift < 0.05;
  return rep;
}

void require_zone(Zone z, const ModeSample& s, const ModelParams& p) {
  const double thr = zone_threshold(s.k, p);
  const double lam = std::abs(s.lambda);
  if (z == Zone::Small ? !(lam < thr) : !(lam > thr))
    throw InputError(std::string("zone estimate: sample lambda=") + fmt(s.lambda) +
                     " is not in the " + zone_name(z) + " zone (threshold " + fmt(thr) + ")");
}

double lhs_of(Quantity q, const ModeSample& smp, double s, const ModelParams& p) {
  switch (q) {
    case Quantity::U: return std::norm(evolve_coefficient(smp.t, smp.u0, smp.u1, s, p));
    case Quantity::DT_U: return std::norm(evolve_time_derivative(smp.t, smp.u0, smp.u1, s, p));
    case Quantity::FRAC_U: return s * std::norm(evolve_coefficient(smp.t, smp.u0, smp.u1, s, p));
  }
  return 0.0;
}

// graded mesh toward sigma = 0 on [0, h] for int sigma^{-theta} g(sigma)
template <class G>
double singular_piece(double theta, double h, G g) {
  constexpr int kLevels = 60;
  double acc = 0.0;
  double hi = h;
  for (int j = 0; j < kLevels; ++j) {
    const double lo = 0.5 * hi;
    acc += boost::math::quadrature::gauss<double, 15>::integrate(
        [&](double x) { return std::pow(x, -theta) * g(x); }, lo, hi);
    hi = lo;
  }
  // remaining [0, hi]: freeze the smooth factor
  acc += g(0.0) * std::pow(hi, 1.0 - theta) / (1.0 - theta);
  return acc;
}

template <class F>
double smooth_integral(F f, double a, double b) {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 25, 1e-12);
}

}  // namespace

bool check_sqrt_inequality(double x) {
  if (!(x >= 0.0 && x <= 0.25)) throw InputError("check_sqrt_inequality: x must lie in [0, 1/4]");
  const double mid = -1.0 + std::sqrt(1.0 - 4.0 * x);
  constexpr double slack = 1e-14;
  return -4.0 * x <= mid + slack && mid <= -2.0 * x + slack;
}

bool sqrt_inequality_sweep(int count) {
  bool ok = true;
  for (int i = 0; i < count; ++i) ok = check_sqrt_inequality(0.25 * i / (count - 1)) && ok;
  return ok;
}

bool check_f_positivity(double b, double m) {
  if (!(b > 0.0) || !(m >= 0.0) || !(b * b > 4.0 * m))
    throw DomainError("check_f_positivity: requires b > 0, m >= 0, b^2 > 4m");
  const double f = (b * b - m) / (2.0 * b) - std::sqrt(0.25 * b * b - m);
  const double f1 = -m / b + b - std::sqrt(0.5 * (b * b - 4.0 * m));
  const double bound = (std::sqrt(2.0) - 1.0) * (m / b + b / std::sqrt(2.0));
  const double slack = 1e-12 * (1.0 + std::abs(f1) + bound);
  return f >= -1e-12 * (1.0 + b * b) && f1 >= bound - slack && bound > 0.0;
}

RatioReport check_exp_poly_bound(double gamma, double delta, double beta) {
  if (!(gamma > 0.0) || !(delta > 0.0)) throw InputError("check_exp_poly_bound: gamma, delta > 0");
  if (!(beta > delta)) throw InputError("check_exp_poly_bound: requires beta > delta");
  auto ratio = [&](double t) {
    // t^gamma e^{-beta t} / e^{-(beta-delta) t}, in log form
    return std::exp(gamma * std::log(t) - beta * t + (beta - delta) * t);
  };
  auto sweep = [&](int count, double& arg) {
    const double lo = std::log(1e-6), hi = std::log(200.0);
    std::vector<double> t(count);
    int best = 0;
    double vbest = -1.0;
    for (int i = 0; i < count; ++i) {
      t[i] = std::exp(lo + (hi - lo) * i / (count - 1));
      double v = ratio(t[i]);
      if (v > vbest) {
        vbest = v;
        best = i;
      }
    }
    const double a = t[std::max(best - 1, 0)], b = t[std::min(best + 1, count - 1)];
    auto res = boost::math::tools::brent_find_minima([&](double x) { return -ratio(x); }, a, b, 52);
    arg = res.first;
    return std::max(vbest, -res.second);
  };
  RatioReport rep;
  double arg1 = 0, arg2 = 0;
  const double s1 = sweep(2000, arg1);
  const double s2 = sweep(4000, arg2);
  rep.sup_ratio = s2;
  rep.argmax_input = "t=" + fmt(arg2);
  rep.sample_count = 4000;
  rep.refinement_drift = drift(s1, s2);
  rep.verdict = std::isfinite(s2) && rep.refinement_drift < 0.01;
  return rep;
}

const char* zone_name(Zone z) { return z == Zone::Small ? "small" : "large"; }

const char* quantity_name(Quantity q) {
  switch (q) {
    case Quantity::U: return "u";
    case Quantity::DT_U: return "dt_u";
    case Quantity::FRAC_U: return "frac_u";
  }
  return "?";
}

std::vector<ModeSample> generate_mode_samples(int count, const ModelParams& p, std::uint64_t seed,
                                              const Zone* zone, int max_degree, double t_max) {
  validate(p);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> N(0.0, 1.0);
  TruncationSet set = enumerate_multi_indices(p.n, max_degree);
  std::vector<ModeSample> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    ModeSample s;
    s.k = set.indices[static_cast<std::size_t>(U(rng) * set.size()) % set.size()];
    const double u = U(rng);
    s.t = t_max * u * u;
    double mag;
    if (zone) {
      const double thr = zone_threshold(s.k, p);
      if (*zone == Zone::Small) {
        mag = thr * (1.0 - 1e-6) * std::pow(U(rng), 0.5);
      } else {
        const double lo = thr * (1.0 + 1e-6);
        const double hi = std::max(12.0, 4.0 * lo);
        mag = lo * std::exp(U(rng) * std::log(hi / lo));
      }
    } else {
      mag = 1e-3 * std::exp(U(rng) * std::log(12.0 / 1e-3));
    }
    s.lambda = U(rng) < 0.5 ? -mag : mag;
    const double mode = U(rng);
    s.u0 = cplx(N(rng), N(rng));
    s.u1 = cplx(N(rng), N(rng));
    if (mode < 0.25) s.u0 = 0.0;
    else if (mode < 0.5) s.u1 = 0.0;
    out.push_back(s);
  }
  return out;
}

RatioReport check_zone_estimate(Zone zone, Quantity q, const std::vector<ModeSample>& samples,
                                const ModelParams& p) {
  validate(p);
  for (const auto& s : samples) require_zone(zone, s, p);
  const double b = p.b, m = p.m;
  auto lhs = [&](const ModeSample& smp, double s) { return lhs_of(q, smp, s, p); };
  auto rhs = [&](const ModeSample& smp, double s) {
    const double n0 = std::norm(smp.u0), n1 = std::norm(smp.u1);
    const double t = smp.t;
    if (zone == Zone::Small) {
      const double r = std::sqrt(std::max(0.0, b * b - 4.0 * m - 4.0 * s));
      const double E = std::exp((-b + r) * t);
      switch (q) {
        case Quantity::U: return E * (n0 + n1);
        case Quantity::DT_U: return E * (s + m) * (s + m) * (n0 + n1) + std::exp((-b - r) * t) * n1;
        case Quantity::FRAC_U: return E * s * (n0 + n1);
      }
    } else {
      const double E = std::exp((-b + std::sqrt(0.5 * (b * b - 4.0 * m))) * t);
      switch (q) {
        case Quantity::U: return E * (n0 + n1);
        case Quantity::DT_U: return E * ((s + m) * n0 + n1);
        case Quantity::FRAC_U: return E * (s * n0 + n1);
      }
    }
    return 0.0;
  };
  RatioReport rep = sweep_samples(samples, p, lhs, rhs);
  rep.note = std::string(zone_name(zone)) + " zone, " + quantity_name(q);
  return rep;
}

RatioReport check_uniform_estimates(Quantity q, const std::vector<ModeSample>& samples,
                                    const ModelParams& p) {
  validate(p);
  const double b = p.b, m = p.m;
  auto lhs = [&](const ModeSample& smp, double s) { return lhs_of(q, smp, s, p); };
  auto rhs = [&](const ModeSample& smp, double s) {
    const double n0 = std::norm(smp.u0), n1 = std::norm(smp.u1);
    switch (q) {
      case Quantity::U: return std::exp((-b + std::sqrt(b * b - m)) * smp.t) * (n0 + n1);
      case Quantity::DT_U: return std::exp((-b + std::sqrt(b * b - m)) * smp.t) * ((s + m) * n0 + n1);
      case Quantity::FRAC_U: return std::exp((-b + std::sqrt(b * b - 4.0 * m)) * smp.t) * (s * n0 + n1);
    }
    return 0.0;
  };
  RatioReport rep = sweep_samples(samples, p, lhs, rhs);
  rep.note = std::string("uniform, ") + quantity_name(q);
  return rep;
}

const char* lemma_name(IntegralLemma l) {
  switch (l) {
    case IntegralLemma::SingularConvolution: return "singular_convolution";
    case IntegralLemma::SplitHead: return "split_head";
    case IntegralLemma::SplitTail: return "split_tail";
    case IntegralLemma::SplitTailLog: return "split_tail_log";
    case IntegralLemma::ExpConvolution: return "exp_convolution";
  }
  return "?";
}

IntegralLemma lemma_from_name(const std::string& s) {
  for (IntegralLemma l : {IntegralLemma::SingularConvolution, IntegralLemma::SplitHead,
                          IntegralLemma::SplitTail, IntegralLemma::SplitTailLog,
                          IntegralLemma::ExpConvolution})
    if (s == lemma_name(l)) return l;
  throw InputError("unknown integral lemma '" + s + "'");
}

namespace {

void check_hypotheses(IntegralLemma l, const LemmaArgs& a) {
  switch (l) {
    case IntegralLemma::SingularConvolution:
      if (!(a.theta >= 0.0 && a.theta < 1.0) || !(a.a >= 0.0) || !(a.b >= 0.0))
        throw InputError("singular_convolution: requires theta in [0,1), a >= 0, b >= 0");
      break;
    case IntegralLemma::SplitHead:
      if (!(a.sigma > 0.0) || !(a.beta > 1.0))
        throw InputError("split_head: requires sigma > 0 and beta > 1");
      break;
    case IntegralLemma::SplitTail:
      if (!(a.sigma < 1.0)) throw InputError("split_tail: requires sigma < 1");
      break;
    case IntegralLemma::SplitTailLog:
      if (!(a.beta > 1.0)) throw InputError("split_tail_log: requires beta > 1");
      break;
    case IntegralLemma::ExpConvolution:
      if (!(a.c > 0.0)) throw InputError("exp_convolution: requires c > 0");
      break;
  }
}

}  // namespace

double lemma_lhs(IntegralLemma l, const LemmaArgs& a, double t) {
  check_hypotheses(l, a);
  if (!(t > 0.0)) throw InputError("integral lemma: t must be positive");
  switch (l) {
    case IntegralLemma::SingularConvolution: {
      // substitute r = t - s; the singular factor sits at r = 0
      auto g = [&](double r) { return std::pow(1.0 + r, -a.a) * std::pow(1.0 + t - r, -a.b); };
      const double h = std::min(1.0, t);
      double acc = singular_piece(a.theta, h, g);
      acc += smooth_integral([&](double r) { return std::pow(r, -a.theta) * g(r); }, h, t);
      return acc;
    }
    case IntegralLemma::SplitHead:
      return smooth_integral(
          [&](double s) { return std::pow(1.0 + t - s, -a.sigma) * std::pow(1.0 + s, -a.beta); }, 0.0,
          0.5 * t);
    case IntegralLemma::SplitTail:
      return smooth_integral(
          [&](double s) { return std::pow(1.0 + t - s, -a.sigma) * std::pow(1.0 + s, -a.beta); },
          0.5 * t, t);
    case IntegralLemma::SplitTailLog:
      return smooth_integral(
          [&](double s) { return std::pow(1.0 + t - s, -1.0) * std::pow(1.0 + s, -a.sigma - a.beta); },
          0.5 * t, t);
    case IntegralLemma::ExpConvolution: {
      auto f = [&](double s) { return std::exp(-a.c * (t - s)) * std::pow(1.0 + s, -a.sigma); };
      const double cut = std::max(0.0, t - 60.0 / a.c);
      return smooth_integral(f, 0.0, cut) + smooth_integral(f, cut, t);
    }
  }
  return 0.0;
}

double lemma_rhs(IntegralLemma l, const LemmaArgs& a, double t) {
  check_hypotheses(l, a);
  const double T = 1.0 + t;
  switch (l) {
    case IntegralLemma::SingularConvolution: {
      const double mx = std::max(a.a + a.theta, a.b), mn = std::min(a.a + a.theta, a.b);
      if (mx > 1.0) return std::pow(T, -mn);
      if (mx == 1.0) return std::pow(T, -mn) * std::log(2.0 + t);
      return std::pow(T, 1.0 - a.a - a.theta - a.b);
    }
    case IntegralLemma::SplitHead: return std::pow(T, -a.sigma);
    case IntegralLemma::SplitTail: return std::pow(T, 1.0 - a.sigma - a.beta);
    case IntegralLemma::SplitTailLog: return std::pow(T, -a.sigma - 1.0);
    case IntegralLemma::ExpConvolution: return std::pow(T, -a.sigma);
  }
  return 0.0;
}

RatioReport check_integral_lemma(IntegralLemma l, const LemmaArgs& a,
                                 const std::vector<double>& t_grid) {
  check_hypotheses(l, a);
  if (t_grid.size() < 4) throw InputError("integral lemma: t_grid needs at least 4 points");
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    if (!(t_grid[i] > 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1])))
      throw InputError("integral lemma: t_grid must be positive and increasing");

  auto eval = [&](const std::vector<double>& grid, std::vector<double>* ratios) {
    double sup = 0.0;
    for (double t : grid) {
      const double r = ratio_of(lemma_lhs(l, a, t), lemma_rhs(l, a, t));
      if (ratios) ratios->push_back(r);
      sup = std::max(sup, r);
    }
    return sup;
  };
  std::vector<double> ratios;
  const double sup = eval(t_grid, &ratios);
  // refinement: geometric midpoints
  std::vector<double> mids;
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) mids.push_back(std::sqrt(t_grid[i] * t_grid[i + 1]));
  const double sup_fine = std::max(sup, eval(mids, nullptr));

  RatioReport rep;
  rep.sup_ratio = sup_fine;
  rep.sample_count = static_cast<int>(t_grid.size() + mids.size());
  std::size_t arg = std::max_element(ratios.begin(), ratios.end()) - ratios.begin();
  rep.argmax_input = "t=" + fmt(t_grid[arg]);
  rep.refinement_drift = drift(sup, sup_fine);
  // trend: log-log slope of the ratio over the last quarter of the grid
  const std::size_t q0 = t_grid.size() - std::max<std::size_t>(2, t_grid.size() / 4);
  double slope = 0.0;
  if (ratios[q0] > 0.0 && ratios.back() > 0.0)
    slope = std::log(ratios.back() / ratios[q0]) / std::log((1.0 + t_grid.back()) / (1.0 + t_grid[q0]));
  rep.verdict = std::isfinite(sup_fine) && rep.refinement_drift < 0.05 && slope < 0.05;
  rep.note = "tail log-log slope of ratio " + fmt(slope);
  if (l == IntegralLemma::SingularConvolution) {
    const double mx = std::max(a.a + a.theta, a.b);
    if (std::abs(mx - 1.0) < 1e-3)
      rep.note += mx == 1.0 ? "; borderline case (log factor)" : "; near-borderline case";
  }
  return rep;
}

double gn_theta(double q, double s, double r, int Q) {
  if (!(s > 0.0 && s <= 1.0)) throw InputError("gn_theta: requires s in (0, 1]");
  if (!(r > 1.0 && r < Q / s)) throw InputError("gn_theta: requires 1 < r < Q/s");
  const double q_max = r * Q / (Q - s * r);
  if (!(q >= 2.0 && q <= q_max * (1.0 + 1e-14)))
    throw InputError("gn_theta: requires 2 <= q <= rQ/(Q - s r) = " + fmt(q_max));
  const double den = s / Q + 0.5 - 1.0 / r;
  if (den == 0.0) throw InputError("gn_theta: requires s/Q + 1/2 != 1/r");
  return std::min(1.0, (0.5 - 1.0 / q) / den);
}

RatioReport check_gagliardo_nirenberg(const PhysicalField& f, const CoefficientField& F, double q,
                                      double s, double r, const ModelParams& p) {
  if (r != 2.0) throw InputError("check_gagliardo_nirenberg: only r = 2 is supported");
  const double theta = gn_theta(q, s, r, p.Q());
  const double lhs = lq_norm(f, q);
  const double rhs = std::pow(sobolev_seminorm(F, s), theta) * std::pow(plancherel_norm(F), 1.0 - theta);
  RatioReport rep;
  rep.sup_ratio = ratio_of(lhs, rhs);
  rep.sample_count = 1;
  rep.argmax_input = "q=" + fmt(q) + " s=" + fmt(s) + " theta=" + fmt(theta);
  rep.verdict = std::isfinite(rep.sup_ratio);
  return rep;
}

bool check_riemann_lebesgue(const PhysicalField& f, const CoefficientField& F) {
  double sup = 0.0;
  for (const auto& v : F.values) sup = std::max(sup, std::abs(v));
  return sup <= 1.02 * l1_norm(f);
}

}  // namespace hwave
