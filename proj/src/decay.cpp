#include "hwave/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hwave/errors.hpp"
#include "hwave/propagator.hpp"

namespace hwave {

int EnvelopeKind::norm_selector() const {
  switch (tag) {
    case Envelope::L2_MASS:
    case Envelope::L2_L1: return 0;
    case Envelope::HALPHA_MASS:
    case Envelope::HALPHA_L1: return 1;
    case Envelope::DT_MASS:
    case Envelope::DT_L1: return 2;
    default: return i == 1 ? 2 : (j > 0.0 ? 1 : 0);
  }
}

const char* envelope_name(Envelope e) {
  switch (e) {
    case Envelope::L2_MASS: return "L2_MASS";
    case Envelope::HALPHA_MASS: return "HALPHA_MASS";
    case Envelope::DT_MASS: return "DT_MASS";
    case Envelope::L2_L1: return "L2_L1";
    case Envelope::HALPHA_L1: return "HALPHA_L1";
    case Envelope::DT_L1: return "DT_L1";
    case Envelope::NONLIN_L1: return "NONLIN_L1";
    case Envelope::NONLIN_L2: return "NONLIN_L2";
    case Envelope::NONLIN_MASS: return "NONLIN_MASS";
  }
  return "?";
}

Envelope envelope_from_name(const std::string& s) {
  for (Envelope e : {Envelope::L2_MASS, Envelope::HALPHA_MASS, Envelope::DT_MASS, Envelope::L2_L1,
                     Envelope::HALPHA_L1, Envelope::DT_L1, Envelope::NONLIN_L1, Envelope::NONLIN_L2,
                     Envelope::NONLIN_MASS})
    if (s == envelope_name(e)) return e;
  throw InputError("unknown envelope kind '" + s + "'");
}

std::string envelope_description(const EnvelopeKind& k) {
  auto ij = [&] {
    return std::string(k.i == 1 ? "dt u" : (k.j > 0.0 ? "(-L)^{alpha/2} u" : "u"));
  };
  switch (k.tag) {
    case Envelope::L2_MASS: return "linear: ||u||_2 <= e^{(-b/2+sqrt(b^2/4-m))t} ||(u0,u1)||_2";
    case Envelope::HALPHA_MASS:
      return "linear: ||(-L)^{alpha/2}u||_2 <= (1+t)^{-1/2} e^{-mt/2b} ||(u0,u1)||_{H^alpha x L2}";
    case Envelope::DT_MASS:
      return "linear: ||dt u||_2 <= ((1+t)^{-1}+m) e^{-mt/2b} ||(u0,u1)||_{H^alpha x L2}";
    case Envelope::L2_L1:
      return "linear: ||u||_2 <= (1+t)^{-Q/4alpha} e^{-mt/2b} ||(u0,u1)||_{L1 cap L2}";
    case Envelope::HALPHA_L1:
      return "linear: ||(-L)^{alpha/2}u||_2 <= (1+t)^{-Q/4alpha-1/2} e^{-mt/2b} ||(u0,u1)||_{L1 cap H^alpha x L1 cap L2}";
    case Envelope::DT_L1:
      return "linear: ||dt u||_2 <= ((1+t)^{-Q/4alpha-1} + m (1+t)^{-Q/4alpha}) e^{-mt/2b} ||(u0,u1)||_{L1 cap H^alpha x L1 cap L2}";
    case Envelope::NONLIN_L1:
      return "semilinear, massless, L1 cap L2 data: ||" + ij() + "||_2 <= (1+t)^{-Q/4alpha-j/2alpha-i} eps";
    case Envelope::NONLIN_L2:
      return "semilinear, massless, L2 data: ||" + ij() + "||_2 <= (1+t)^{-j/2alpha-i} eps";
    case Envelope::NONLIN_MASS:
      return "semilinear with mass: ||" + ij() + "||_2 <= ((1+t)^{-j/2alpha-i} + m i) e^{-mt/2b} eps";
  }
  return "";
}

double sobolev_seminorm(const CoefficientField& F, double alpha) {
  if (alpha == 0.0) return plancherel_norm(F);
  return weighted_plancherel_norm(
      F, [alpha](double lam, int mu) { return std::pow(std::abs(lam) * mu, 0.5 * alpha); });
}

double h_alpha_norm(const CoefficientField& F, double alpha) {
  double a = plancherel_norm(F), s = sobolev_seminorm(F, alpha);
  return std::sqrt(a * a + s * s);
}

double zone_threshold(int mu, const ModelParams& p) {
  if (!(p.b * p.b > 4.0 * p.m)) throw DomainError("zone_threshold: requires b^2 > 4m");
  return std::pow(0.5 * p.gap(), 1.0 / p.alpha) / mu;
}

double zone_threshold(const MultiIndex& k, const ModelParams& p) {
  return zone_threshold(eigenvalue(k, p.n), p);
}

double decay_envelope(double t, const EnvelopeKind& kind, const ModelParams& p,
                      const DataNorms& norms) {
  if (t < 0.0) throw InputError("decay_envelope: t must be nonnegative");
  const double P = p.Q() / (4.0 * p.alpha);
  const double L = std::exp(-p.m * t / (2.0 * p.b));
  const double A = norms.a_norm();
  const double B = norms.b_norm();
  const double T = 1.0 + t;
  const bool nonlin = kind.tag == Envelope::NONLIN_L1 || kind.tag == Envelope::NONLIN_L2 ||
                      kind.tag == Envelope::NONLIN_MASS;
  if (nonlin) {
    const bool ok = (kind.i == 0 && kind.j == 0.0) || (kind.i == 0 && kind.j == p.alpha) ||
                    (kind.i == 1 && kind.j == 0.0);
    if (!ok) throw InputError("decay_envelope: (i,j) must be (0,0), (0,alpha) or (1,0)");
    if (kind.tag != Envelope::NONLIN_MASS && p.m != 0.0)
      throw InputError("decay_envelope: massless semilinear envelope needs m = 0");
  }
  const double rate = kind.j / (2.0 * p.alpha) + kind.i;
  switch (kind.tag) {
    case Envelope::L2_MASS: return std::exp((-0.5 * p.b + std::sqrt(p.gap())) * t) * norms.l2;
    case Envelope::HALPHA_MASS: return std::pow(T, -0.5) * L * A;
    case Envelope::DT_MASS: return (1.0 / T + p.m) * L * A;
    case Envelope::L2_L1: return std::pow(T, -P) * L * (norms.l1 + norms.l2);
    case Envelope::HALPHA_L1: return std::pow(T, -P - 0.5) * L * (norms.l1 + A);
    case Envelope::DT_L1: return (std::pow(T, -P - 1.0) + p.m * std::pow(T, -P)) * L * (norms.l1 + A);
    case Envelope::NONLIN_L1: return std::pow(T, -P - rate) * B;
    case Envelope::NONLIN_L2: return std::pow(T, -rate) * A;
    case Envelope::NONLIN_MASS: return (std::pow(T, -rate) + p.m * kind.i) * L * A;
  }
  return 0.0;
}

double theoretical_slope(const EnvelopeKind& kind, const ModelParams& p) {
  const double P = p.Q() / (4.0 * p.alpha);
  const double rate = kind.j / (2.0 * p.alpha) + kind.i;
  const bool mass = p.m > 0.0;
  switch (kind.tag) {
    case Envelope::L2_MASS: return 0.0;
    case Envelope::HALPHA_MASS: return -0.5;
    case Envelope::DT_MASS: return mass ? 0.0 : -1.0;
    case Envelope::L2_L1: return -P;
    case Envelope::HALPHA_L1: return -P - 0.5;
    case Envelope::DT_L1: return mass ? -P : -P - 1.0;
    case Envelope::NONLIN_L1: return -P - rate;
    case Envelope::NONLIN_L2: return -rate;
    case Envelope::NONLIN_MASS: return (mass && kind.i == 1) ? 0.0 : -rate;
  }
  return 0.0;
}

double fit_tail_slope(const std::vector<double>& times, const std::vector<double>& measured,
                      const ModelParams& p) {
  if (times.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double cut = 0.5 * std::log1p(times.back());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double x = std::log1p(times[i]);
    if (x < cut || !(measured[i] > 0.0)) continue;
    const double y = std::log(measured[i]) + p.m * times[i] / (2.0 * p.b);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  const double den = cnt * sxx - sx * sx;
  if (cnt < 2 || den <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (cnt * sxy - sx * sy) / den;
}

double dominance_over(const DecayReport& r, double t_max) {
  double c = 0.0;
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    if (r.times[i] > t_max) break;
    if (r.measured[i] == 0.0) continue;
    if (!(r.envelope[i] > 0.0)) return std::numeric_limits<double>::infinity();
    c = std::max(c, r.measured[i] / r.envelope[i]);
  }
  return c;
}

DecayReport make_report(std::vector<double> times, std::vector<double> measured,
                        const EnvelopeKind& kind, const ModelParams& p, const DataNorms& norms) {
  DecayReport r;
  r.label = envelope_name(kind.tag);
  if (kind.tag == Envelope::NONLIN_L1 || kind.tag == Envelope::NONLIN_L2 ||
      kind.tag == Envelope::NONLIN_MASS)
    r.label += kind.i == 1 ? "_dt" : (kind.j > 0.0 ? "_halpha" : "_l2");
  r.times = std::move(times);
  r.measured = std::move(measured);
  for (double t : r.times) r.envelope.push_back(decay_envelope(t, kind, p, norms));
  r.fitted_slope = fit_tail_slope(r.times, r.measured, p);
  r.theoretical_slope = theoretical_slope(kind, p);
  r.dominance_constant = r.times.empty() ? 0.0 : dominance_over(r, r.times.back());
  return r;
}

DecayReport measure_decay(const CoefficientField& F0, const CoefficientField& F1,
                          const ModelParams& p, const DataNorms& norms,
                          const std::vector<double>& times, const EnvelopeKind& kind) {
  if (times.empty()) throw InputError("measure_decay: empty time list");
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] < 0.0 || (i > 0 && !(times[i] > times[i - 1])))
      throw InputError("measure_decay: times must be nonnegative and increasing");
  std::vector<double> measured;
  measured.reserve(times.size());
  const int sel = kind.norm_selector();
  for (double t : times) {
    auto [u, ut] = evolve_field(t, F0, F1, p);
    if (sel == 0)
      measured.push_back(plancherel_norm(u));
    else if (sel == 1)
      measured.push_back(sobolev_seminorm(u, p.alpha));
    else
      measured.push_back(plancherel_norm(ut));
  }
  return make_report(times, std::move(measured), kind, p, norms);
}

std::pair<double, double> zone_split_norm(const CoefficientField& F, const ModelParams& p) {
  const SpectralGrid& g = *F.grid;
  double lo = 0.0, hi = 0.0;
  for (std::size_t li = 0; li < g.num_lambda(); ++li) {
    const double lam = std::abs(g.lambda_nodes[li]);
    const double meas = g.measure(li);
    for (std::size_t r = 0; r < g.rows.size(); ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < g.cols.size(); ++c) s += std::norm(F.at(li, r, c));
      (lam < zone_threshold(g.row_mu[r], p) ? lo : hi) += meas * s;
    }
  }
  return {lo, hi};
}

std::vector<double> log_spaced(double t_min, double t_max, int count) {
  if (!(t_min > 0.0) || !(t_max > t_min) || count < 2)
    throw InputError("log_spaced: need 0 < t_min < t_max and count >= 2");
  std::vector<double> t(count);
  const double a = std::log(t_min), b = std::log(t_max);
  for (int i = 0; i < count; ++i) t[i] = std::exp(a + (b - a) * i / (count - 1));
  t.back() = t_max;
  return t;
}

std::vector<double> log1p_spaced(double t_max, int count) {
  if (!(t_max > 0.0) || count < 2) throw InputError("log1p_spaced: need t_max > 0 and count >= 2");
  std::vector<double> t(count);
  const double L = std::log1p(t_max);
  for (int i = 0; i < count; ++i) t[i] = std::expm1(L * i / (count - 1));
  t.back() = t_max;
  return t;
}

}  // namespace hwave
