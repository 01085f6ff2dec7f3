#pragma once

#include <string>
#include <vector>

#include "hwave/fourier.hpp"
#include "hwave/model.hpp"

namespace hwave {

// Named initial-data families:
//   gaussian        separable Gaussian u0 (u1 = velocity_amplitude * same shape)
//   low-freq-spike  spectral data on the (e_0, e_0) entry for |lambda| below 0.9 x the
//                   row-0 zone threshold
//   high-freq-spike spectral data on every diagonal entry whose lambda lies in
//                   [band_lo, band_hi] and above 1.1 x that row's zone threshold
struct DataSpec {
  std::string family = "gaussian";
  std::vector<double> widths{1.0};
  double amplitude = 1.0;
  double velocity_amplitude = 0.0;
  double band_lo = 2.0;
  double band_hi = 4.0;
};

bool is_physical_family(const std::string& family);
bool is_known_family(const std::string& family);

struct InitialData {
  bool physical = false;
  PhysicalField u0, u1;  // empty for spectral families
  CoefficientField F0, F1;
  DataNorms norms;
};

// plan is required for physical families and ignored otherwise.
InitialData make_initial_data(const DataSpec& spec, const GridPtr& grid, const TransformPlan* plan,
                              const ModelParams& params);

InitialData scaled(const InitialData& d, double factor);

std::vector<std::vector<double>> default_calibration_family();

// Spectral grid with c_n fitted on the family over pgrid.
GridPtr calibrated_grid(const SpectralGridSpec& spec, const PhysicalGrid& pgrid,
                        const std::vector<std::vector<double>>& family,
                        PlancherelCalibration* report = nullptr);

}  // namespace hwave
