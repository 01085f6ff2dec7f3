#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hwave/fourier.hpp"
#include "hwave/model.hpp"

namespace hwave {

struct RatioReport {
  double sup_ratio = 0.0;
  std::string argmax_input;
  int sample_count = 0;
  bool verdict = false;
  double refinement_drift = 0.0;  // relative change of sup_ratio under doubling
  std::string note;
};

bool check_sqrt_inequality(double x);
// count equispaced points on [0, 1/4]; true iff all pass
bool sqrt_inequality_sweep(int count);

bool check_f_positivity(double b, double m);

// sup over (0, 200] of t^gamma e^{-beta t} / e^{-(beta - delta) t}
RatioReport check_exp_poly_bound(double gamma, double delta, double beta);

enum class Zone { Small, Large };
enum class Quantity { U, DT_U, FRAC_U };

const char* zone_name(Zone z);
const char* quantity_name(Quantity q);

struct ModeSample {
  double t = 0.0;
  double lambda = 1.0;
  MultiIndex k;
  cplx u0, u1;
};

// Seeded samples; with a zone, lambda lies at relative distance >= 1e-6 from the
// threshold on the requested side. Without a zone lambda is log-uniform on [1e-3, 12].
std::vector<ModeSample> generate_mode_samples(int count, const ModelParams& params,
                                              std::uint64_t seed, const Zone* zone,
                                              int max_degree = 6, double t_max = 50.0);

// Pointwise zone estimates for the Fourier-side solution (constant 1 on the right).
RatioReport check_zone_estimate(Zone zone, Quantity quantity, const std::vector<ModeSample>& samples,
                                const ModelParams& params);
// Zone-free exponential bounds.
RatioReport check_uniform_estimates(Quantity quantity, const std::vector<ModeSample>& samples,
                                    const ModelParams& params);

// Time-convolution lemmas behind the nonlinear estimates.
enum class IntegralLemma {
  SingularConvolution,  // int_0^t (t-s)^{-theta} (1+t-s)^{-a} (1+s)^{-b} ds, three cases
  SplitHead,            // int_0^{t/2} (1+t-s)^{-sigma} (1+s)^{-beta} ds
  SplitTail,            // int_{t/2}^t (1+t-s)^{-sigma} (1+s)^{-beta} ds
  SplitTailLog,         // int_{t/2}^t (1+t-s)^{-1} (1+s)^{-sigma-beta} ds
  ExpConvolution,       // int_0^t e^{-c(t-s)} (1+s)^{-sigma} ds
};

const char* lemma_name(IntegralLemma l);
IntegralLemma lemma_from_name(const std::string& s);

struct LemmaArgs {
  double theta = 0.0, a = 0.0, b = 0.0;  // singular convolution
  double sigma = 0.0, beta = 0.0;        // split lemmas, exp convolution (sigma)
  double c = 1.0;                        // exp convolution
};

double lemma_lhs(IntegralLemma lemma, const LemmaArgs& args, double t);
double lemma_rhs(IntegralLemma lemma, const LemmaArgs& args, double t);

RatioReport check_integral_lemma(IntegralLemma lemma, const LemmaArgs& args,
                                 const std::vector<double>& t_grid);

// theta = (1/2 - 1/q) / (s/Q + 1/2 - 1/r)
double gn_theta(double q, double s, double r, int Q);

RatioReport check_gagliardo_nirenberg(const PhysicalField& f, const CoefficientField& F, double q,
                                      double s, double r, const ModelParams& params);

bool check_riemann_lebesgue(const PhysicalField& f, const CoefficientField& F);

}  // namespace hwave
