#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hwave/fourier.hpp"
#include "hwave/model.hpp"

namespace hwave {

enum class Envelope {
  L2_MASS,      // L2 norm, mass-type exponential envelope
  HALPHA_MASS,  // fractional seminorm, L2 data
  DT_MASS,      // time derivative, L2 data
  L2_L1,        // L2 norm, L1 and L2 data
  HALPHA_L1,
  DT_L1,
  NONLIN_L1,    // semilinear, L1 and L2 data
  NONLIN_L2,    // semilinear, L2 data only
  NONLIN_MASS,  // semilinear with mass
};

struct EnvelopeKind {
  Envelope tag = Envelope::L2_L1;
  int i = 0;       // time derivatives
  double j = 0.0;  // 0 or alpha

  // which measured norm this kind compares: 0 = L2, 1 = fractional seminorm, 2 = dt L2
  int norm_selector() const;
};

const char* envelope_name(Envelope e);
Envelope envelope_from_name(const std::string& s);
// human-readable description of the estimate a kind encodes
std::string envelope_description(const EnvelopeKind& kind);

struct DecayReport {
  std::string label;
  std::vector<double> times;
  std::vector<double> measured;
  std::vector<double> envelope;
  double fitted_slope = 0.0;
  double theoretical_slope = 0.0;
  double dominance_constant = 0.0;
};

double sobolev_seminorm(const CoefficientField& F, double alpha);
double h_alpha_norm(const CoefficientField& F, double alpha);

double zone_threshold(const MultiIndex& k, const ModelParams& params);
double zone_threshold(int mu, const ModelParams& params);

double decay_envelope(double t, const EnvelopeKind& kind, const ModelParams& params,
                      const DataNorms& norms);
double theoretical_slope(const EnvelopeKind& kind, const ModelParams& params);

// Least squares slope of log(measured e^{mt/2b}) against log(1+t) on the tail half
// (upper half in log(1+t)) of the window; NaN if fewer than two usable points.
double fit_tail_slope(const std::vector<double>& times, const std::vector<double>& measured,
                      const ModelParams& params);

// max measured/envelope over times <= t_max
double dominance_over(const DecayReport& r, double t_max);

DecayReport make_report(std::vector<double> times, std::vector<double> measured,
                        const EnvelopeKind& kind, const ModelParams& params, const DataNorms& norms);

DecayReport measure_decay(const CoefficientField& F0, const CoefficientField& F1,
                          const ModelParams& params, const DataNorms& norms,
                          const std::vector<double>& times, const EnvelopeKind& kind);

// (sum over modes below the threshold, sum above) of the squared Plancherel norm
std::pair<double, double> zone_split_norm(const CoefficientField& F, const ModelParams& params);

std::vector<double> log_spaced(double t_min, double t_max, int count);
// t_i = (1+t_max)^{i/(count-1)} - 1: uniform in log(1+t), starting at 0
std::vector<double> log1p_spaced(double t_max, int count);

}  // namespace hwave
