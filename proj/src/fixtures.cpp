#include "hwave/fixtures.hpp"

#include "hwave/decay.hpp"
#include "hwave/errors.hpp"

namespace hwave {

bool is_physical_family(const std::string& f) { return f == "gaussian"; }

bool is_known_family(const std::string& f) {
  return f == "gaussian" || f == "low-freq-spike" || f == "high-freq-spike";
}

namespace {

PhysicalField scaled_field(const PhysicalField& f, double c) {
  PhysicalField g = f;
  for (cplx& v : g.values) v *= c;
  return g;
}

}  // namespace

InitialData make_initial_data(const DataSpec& spec, const GridPtr& grid, const TransformPlan* plan,
                              const ModelParams& params) {
  InitialData d;
  if (!is_known_family(spec.family)) throw InputError("unknown data family '" + spec.family + "'");
  if (is_physical_family(spec.family)) {
    if (!plan) throw InputError("gaussian data needs a transform plan");
    if (!same_grid(plan->spectral(), *grid)) throw InputError("plan and grid disagree");
    d.physical = true;
    PhysicalField shape = gaussian_field(plan->physical(), spec.widths);
    d.u0 = scaled_field(shape, spec.amplitude);
    d.u1 = scaled_field(shape, spec.velocity_amplitude);
    d.F0 = plan->forward(d.u0);
    d.F1 = plan->forward(d.u1);
    d.norms = data_norms(d.u0, d.u1, d.F0, d.F1, params);
    return d;
  }
  const SpectralGrid& g = *grid;
  d.F0 = CoefficientField(grid);
  d.F1 = CoefficientField(grid);
  const bool low = spec.family == "low-freq-spike";
  if (!low && !(spec.band_hi > spec.band_lo && spec.band_lo > 0.0))
    throw InputError("high-freq-spike: need 0 < band_lo < band_hi");
  for (std::size_t li = 0; li < g.num_lambda(); ++li) {
    const double lam = std::abs(g.lambda_nodes[li]);
    for (std::size_t r = 0; r < g.rows.size() && r < g.cols.size(); ++r) {
      const double thr = zone_threshold(g.row_mu[r], params);
      bool on;
      if (low)
        on = r == 0 && lam < 0.9 * thr;
      else
        on = lam >= spec.band_lo && lam <= spec.band_hi && lam > 1.1 * thr;
      if (!on) continue;
      d.F0.at(li, r, r) = spec.amplitude;
      d.F1.at(li, r, r) = spec.velocity_amplitude;
    }
  }
  d.norms = spectral_data_norms(d.F0, d.F1, params);
  return d;
}

InitialData scaled(const InitialData& d, double c) {
  InitialData s = d;
  if (d.physical) {
    s.u0 = scaled_field(d.u0, c);
    s.u1 = scaled_field(d.u1, c);
  }
  s.F0 = c * d.F0;
  s.F1 = c * d.F1;
  s.norms.l1 *= std::abs(c);
  s.norms.l2 *= std::abs(c);
  s.norms.h_alpha_seminorm *= std::abs(c);
  return s;
}

std::vector<std::vector<double>> default_calibration_family() { return {{0.8}, {1.0}, {1.25}}; }

GridPtr calibrated_grid(const SpectralGridSpec& spec, const PhysicalGrid& pgrid,
                        const std::vector<std::vector<double>>& family,
                        PlancherelCalibration* report) {
  SpectralGrid g = make_spectral_grid(spec);
  PlancherelCalibration cal = calibrate_plancherel_constant(g, pgrid, family);
  g.plancherel_constant = cal.constant;
  if (report) *report = std::move(cal);
  return std::make_shared<const SpectralGrid>(std::move(g));
}

}  // namespace hwave
