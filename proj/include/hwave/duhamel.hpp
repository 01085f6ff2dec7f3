#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hwave/decay.hpp"
#include "hwave/fourier.hpp"
#include "hwave/model.hpp"

namespace hwave {

enum class ProfileTag { X_L1, X_L2, Z_MASS };

const char* profile_name(ProfileTag t);

// Reciprocal weights of the solution-space norm.
struct WeightProfile {
  ProfileTag tag = ProfileTag::X_L1;
  ModelParams params;

  double f1(double t) const;
  double f2(double t) const;
  double f3(double t) const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<CoefficientField> u;
  std::vector<CoefficientField> ut;

  std::size_t size() const { return times.size(); }
};

// Semilinear regimes: massless with L1 cap L2 data, massless with L2 data, with mass.
enum class SemilinearRegime { L1, L2, Mass };

const char* regime_name(SemilinearRegime r);
SemilinearRegime semilinear_regime_from_name(const std::string& s);
ProfileTag profile_for(SemilinearRegime r);
Envelope envelope_for(SemilinearRegime r);

struct FixedPointConfig {
  double p = 2.0;
  double q = 2.0;  // second exponent, coupled runs only
  double epsilon = 1e-2;
  double T = 40.0;
  int time_nodes = 41;
  int max_iters = 15;
  double tol = 1e-8;  // relative to the X-norm of the linear part
  double r = 2.0;
  SemilinearRegime regime = SemilinearRegime::L1;
};

// Throws DomainError if p (and q for coupled runs) is outside the regime.
void validate(const FixedPointConfig& cfg, const ModelParams& params, bool coupled = false);

std::vector<double> uniform_times(double T, int nodes);

Trajectory linear_part(const std::vector<double>& times, const CoefficientField& F0,
                       const CoefficientField& F1, const ModelParams& params);

// Transform of |Re u|^p, u reconstructed on the plan's physical grid.
CoefficientField nonlinearity_transform(const CoefficientField& state, double p,
                                        const TransformPlan& plan);
CoefficientField nonlinearity_transform(const CoefficientField& state, double p,
                                        const PhysicalGrid& pgrid, const GridPtr& sgrid);

// Per-mode kernels e^{-b tau/2} A1 and e^{-b tau/2}(A0 - b/2 A1) on the lags of a
// uniform time grid, plus the half-step lag used by the first interval.
class DuhamelKernels {
 public:
  DuhamelKernels(const SpectralGrid& grid, double dt, std::size_t nodes, const ModelParams& params);

  double dt() const { return dt_; }
  std::size_t nodes() const { return nodes_; }
  // lag in units of dt; lag = -1 addresses dt/2
  const double* k1(long lag) const { return &k1_[slot(lag)]; }
  const double* k2(long lag) const { return &k2_[slot(lag)]; }

 private:
  std::size_t slot(long lag) const { return static_cast<std::size_t>(lag + 1) * modes_; }
  double dt_;
  std::size_t nodes_, modes_;  // modes_: lambda x rows
  std::vector<double> k1_, k2_;
};

// Duhamel integral of the source history up to times[t_index] (uniform nodes).
std::pair<CoefficientField, CoefficientField> duhamel_step(std::size_t t_index,
                                                           const std::vector<double>& times,
                                                           const std::vector<CoefficientField>& source,
                                                           const ModelParams& params);
std::pair<CoefficientField, CoefficientField> duhamel_step(std::size_t t_index,
                                                           const std::vector<CoefficientField>& source,
                                                           const DuhamelKernels& kernels,
                                                           std::size_t cols);

double x_norm(const Trajectory& traj, const WeightProfile& profile);

struct ConvergenceReport {
  int iters = 0;
  std::vector<double> diffs;
  std::vector<double> ratios;
  double final_x_norm = 0.0;
  double linear_x_norm = 0.0;
  double data_norm = 0.0;
  double epsilon = 0.0;
  double tol = 0.0;
  double a_emp = 0.0;
  bool bound_ok = false;
  bool converged = false;
  bool verdict = false;
};

struct PicardResult {
  std::vector<Trajectory> components;  // one for the single equation, two for the system
  ConvergenceReport report;
};

// Data norm matching the regime: B-norm for L1, A-norm otherwise.
double regime_data_norm(const DataNorms& norms, SemilinearRegime regime);

PicardResult picard_iterate(const CoefficientField& F0, const CoefficientField& F1,
                            const DataNorms& norms, const FixedPointConfig& cfg,
                            const WeightProfile& profile, const ModelParams& params,
                            const TransformPlan& plan);

// Sources |v|^p drive u and |u|^q drive v; Z_MASS profile, norms summed over components.
PicardResult coupled_iterate(const CoefficientField& F0u, const CoefficientField& F1u,
                             const CoefficientField& F0v, const CoefficientField& F1v,
                             const DataNorms& norms, const FixedPointConfig& cfg,
                             const ModelParams& params, const TransformPlan& plan);

// X-norm of N(u) - u for one more application of the single-equation operator.
double fixed_point_residual(const PicardResult& res, const CoefficientField& F0,
                            const CoefficientField& F1, const FixedPointConfig& cfg,
                            const WeightProfile& profile, const ModelParams& params,
                            const TransformPlan& plan);

// One report per (i, j) in {(0,0), (0,alpha), (1,0)}.
std::vector<DecayReport> verify_nonlinear_decay(const Trajectory& traj, const ModelParams& params,
                                                const DataNorms& norms, SemilinearRegime regime,
                                                const ConvergenceReport& conv);

struct EpsilonCalibration {
  double breaking = 0.0;  // smallest tested epsilon without contraction
  double stable = 0.0;    // largest tested epsilon with convergence
  int runs = 0;
};

// Bisection in log(epsilon) on data F0, F1 rescaled to each trial epsilon.
EpsilonCalibration calibrate_epsilon(const CoefficientField& F0, const CoefficientField& F1,
                                     const DataNorms& shape_norms, FixedPointConfig cfg,
                                     const WeightProfile& profile, const ModelParams& params,
                                     const TransformPlan& plan, double lo, double hi, int steps);

}  // namespace hwave
