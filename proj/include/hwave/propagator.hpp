#pragma once

#include <complex>
#include <utility>

#include "hwave/fourier.hpp"
#include "hwave/hermite.hpp"
#include "hwave/model.hpp"

namespace hwave {

enum class Regime { Hyperbolic, Degenerate, Oscillatory };

const char* regime_name(Regime r);

// |lambda|^alpha (2|k|+n)^alpha
double fractional_symbol(double lambda, const MultiIndex& k, const ModelParams& params);
double fractional_symbol(double lambda, int mu, double alpha);

// D = b^2/4 - m - s
double discriminant(double s, const ModelParams& params);
Regime classify(double s, const ModelParams& params);

std::pair<cplx, cplx> char_roots(double s, const ModelParams& params);

double a0(double t, double s, const ModelParams& params);
double a1(double t, double s, const ModelParams& params);

// e^{-bt/2} A0 and e^{-bt/2} A1, overflow safe.
struct Damped {
  double e0;
  double e1;
};
Damped damped_multipliers(double t, double s, const ModelParams& params);

cplx evolve_coefficient(double t, cplx u0, cplx u1, double s, const ModelParams& params);
cplx evolve_time_derivative(double t, cplx u0, cplx u1, double s, const ModelParams& params);

std::pair<CoefficientField, CoefficientField> evolve_field(double t, const CoefficientField& F0,
                                                           const CoefficientField& F1,
                                                           const ModelParams& params);

// |u'' + b u' + (s+m) u| from 4th-order differences of evolve_coefficient.
double ode_residual(double t, cplx u0, cplx u1, double s, const ModelParams& params,
                    double h = 1e-3);

}  // namespace hwave
