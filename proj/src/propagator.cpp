#include "hwave/propagator.hpp"

#include <cmath>

#include "hwave/errors.hpp"

namespace hwave {

namespace {

constexpr double kSeriesCut = 1e-4;

bool degenerate(double D, const ModelParams& p) {
  return std::abs(D) < 1e-10 * (0.25 * p.b * p.b + 1.0);
}

// sinh(x)/x and sin(x)/x with the short series near 0
double sinhc(double x) { return std::abs(x) < kSeriesCut ? 1.0 + x * x / 6.0 : std::sinh(x) / x; }
double sinc(double x) { return std::abs(x) < kSeriesCut ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

}  // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Hyperbolic: return "HYPERBOLIC";
    case Regime::Degenerate: return "DEGENERATE";
    case Regime::Oscillatory: return "OSCILLATORY";
  }
  return "?";
}

double fractional_symbol(double lambda, int mu, double alpha) {
  if (lambda == 0.0) throw InputError("fractional_symbol: lambda must be nonzero");
  return std::pow(std::abs(lambda) * mu, alpha);
}

double fractional_symbol(double lambda, const MultiIndex& k, const ModelParams& params) {
  return fractional_symbol(lambda, eigenvalue(k, params.n), params.alpha);
}

double discriminant(double s, const ModelParams& p) { return 0.25 * p.b * p.b - p.m - s; }

Regime classify(double s, const ModelParams& p) {
  double D = discriminant(s, p);
  if (degenerate(D, p)) return Regime::Degenerate;
  return D > 0 ? Regime::Hyperbolic : Regime::Oscillatory;
}

std::pair<cplx, cplx> char_roots(double s, const ModelParams& p) {
  double D = discriminant(s, p);
  double re = -0.5 * p.b;
  switch (classify(s, p)) {
    case Regime::Hyperbolic: return {cplx(re + std::sqrt(D), 0.0), cplx(re - std::sqrt(D), 0.0)};
    case Regime::Degenerate: return {cplx(re, 0.0), cplx(re, 0.0)};
    case Regime::Oscillatory: return {cplx(re, std::sqrt(-D)), cplx(re, -std::sqrt(-D))};
  }
  return {};
}

double a0(double t, double s, const ModelParams& p) {
  double D = discriminant(s, p);
  switch (classify(s, p)) {
    case Regime::Hyperbolic: return std::cosh(std::sqrt(D) * t);
    case Regime::Degenerate: return 1.0;
    case Regime::Oscillatory: return std::cos(std::sqrt(-D) * t);
  }
  return 0.0;
}

double a1(double t, double s, const ModelParams& p) {
  double D = discriminant(s, p);
  switch (classify(s, p)) {
    case Regime::Hyperbolic: return t * sinhc(std::sqrt(D) * t);
    case Regime::Degenerate: return t;
    case Regime::Oscillatory: return t * sinc(std::sqrt(-D) * t);
  }
  return 0.0;
}

Damped damped_multipliers(double t, double s, const ModelParams& p) {
  const double D = discriminant(s, p);
  const double half_b = 0.5 * p.b;
  switch (classify(s, p)) {
    case Regime::Hyperbolic: {
      const double r = std::sqrt(D);
      const double ep = std::exp((-half_b + r) * t);
      const double em = std::exp((-half_b - r) * t);
      const double x = r * t;
      double e1;
      if (x < kSeriesCut)
        e1 = std::exp(-half_b * t) * t * (1.0 + x * x / 6.0);
      else if (x < 25.0)
        e1 = em * std::expm1(2.0 * x) / (2.0 * r);
      else
        e1 = (ep - em) / (2.0 * r);
      return {0.5 * (ep + em), e1};
    }
    case Regime::Degenerate: {
      const double e = std::exp(-half_b * t);
      return {e, t * e};
    }
    case Regime::Oscillatory: {
      const double w = std::sqrt(-D);
      const double e = std::exp(-half_b * t);
      return {e * std::cos(w * t), e * t * sinc(w * t)};
    }
  }
  return {0.0, 0.0};
}

cplx evolve_coefficient(double t, cplx u0, cplx u1, double s, const ModelParams& p) {
  Damped d = damped_multipliers(t, s, p);
  return d.e0 * u0 + d.e1 * (0.5 * p.b * u0 + u1);
}

cplx evolve_time_derivative(double t, cplx u0, cplx u1, double s, const ModelParams& p) {
  Damped d = damped_multipliers(t, s, p);
  return d.e0 * u1 - d.e1 * (0.5 * p.b * u1 + (s + p.m) * u0);
}

std::pair<CoefficientField, CoefficientField> evolve_field(double t, const CoefficientField& F0,
                                                           const CoefficientField& F1,
                                                           const ModelParams& p) {
  require_same_grid(F0, F1, "evolve_field");
  const SpectralGrid& g = *F0.grid;
  CoefficientField U(F0.grid), V(F0.grid);
  for (std::size_t li = 0; li < g.num_lambda(); ++li)
    for (std::size_t r = 0; r < g.rows.size(); ++r) {
      const double s = fractional_symbol(g.lambda_nodes[li], g.row_mu[r], p.alpha);
      const Damped d = damped_multipliers(t, s, p);
      for (std::size_t c = 0; c < g.cols.size(); ++c) {
        const std::size_t i = g.index(li, r, c);
        const cplx u0 = F0.values[i], u1 = F1.values[i];
        U.values[i] = d.e0 * u0 + d.e1 * (0.5 * p.b * u0 + u1);
        V.values[i] = d.e0 * u1 - d.e1 * (0.5 * p.b * u1 + (s + p.m) * u0);
      }
    }
  return {std::move(U), std::move(V)};
}

double ode_residual(double t, cplx u0, cplx u1, double s, const ModelParams& p, double h) {
  if (!(t > 0.0)) throw InputError("ode_residual: t must be positive");
  h = std::min(h, 0.5 * t);
  auto u = [&](double tt) { return evolve_coefficient(tt, u0, u1, s, p); };
  const cplx f2m = u(t - 2 * h), f1m = u(t - h), f0 = u(t), f1p = u(t + h), f2p = u(t + 2 * h);
  const cplx d1 = (f2m - 8.0 * f1m + 8.0 * f1p - f2p) / (12.0 * h);
  const cplx d2 = (-f2m + 16.0 * f1m - 30.0 * f0 + 16.0 * f1p - f2p) / (12.0 * h * h);
  return std::abs(d2 + p.b * d1 + (s + p.m) * f0);
}

}  // namespace hwave
