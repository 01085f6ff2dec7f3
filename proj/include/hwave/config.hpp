#pragma once

#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hwave/duhamel.hpp"
#include "hwave/fixtures.hpp"
#include "hwave/fourier.hpp"
#include "hwave/model.hpp"

namespace hwave {

enum class Experiment { Roundtrip, SimulateLinear, FitDecay, Verify, SimulateNonlinear, SimulateCoupled };

const char* experiment_name(Experiment e);
Experiment experiment_from_name(const std::string& s);  // InputError if unknown

// Rejected configuration; line is 1-based, 0 when the offending value is a default.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& what, int line_no) : std::runtime_error(what), line(line_no) {}
  int line;
};

struct SeriesSpec {
  bool present = false;
  std::string file;       // CSV with header t,measured; empty: synthetic power law
  double power = -1.0;    // synthetic: (1+t)^power
  double expect_slope = std::numeric_limits<double>::quiet_NaN();
  double slope_tol = 1e-6;
};

struct RunConfig {
  Experiment experiment = Experiment::Verify;
  ModelParams model;

  SpectralGridSpec spectral{1, 6, -1, 0.01, 6.0, 40, LambdaMapping::Linear};
  double half_width = 8.0;
  int count = 33;
  bool calibrate = true;
  std::vector<std::vector<double>> calibration_family = default_calibration_family();

  DataSpec data;
  bool has_data_v = false;
  DataSpec data_v;

  // decay sampling
  double t_max = 100.0;
  int time_count = 64;
  double window_split = 50.0;
  double window_tol = 0.10;
  std::vector<std::string> envelopes;  // empty: the six linear kinds
  std::map<std::string, double> slope_bounds;  // fitted slope must not exceed the bound
  SeriesSpec series;

  // roundtrip
  double norm_tol = 0.03;
  double origin_tol = 0.05;

  // verify
  int samples = 1000;

  // nonlinear
  FixedPointConfig fixed_point;
  SpectralGridSpec nl_spectral{1, 6, -1, 0.01, 6.0, 40, LambdaMapping::Linear};
  double nl_half_width = 6.0;
  int nl_count = 25;
  bool calibrate_epsilon = false;
  double eps_lo = 1.0, eps_hi = 100.0;
  int eps_steps = 6;
  double breaking_factor = 0.0;  // > 0: also expect non-contraction at factor * epsilon
  bool check_symmetric = false;
};

// forced: experiment chosen on the command line; a different "experiment" key is an error.
RunConfig parse_config_text(const std::string& text, const std::string& source_name,
                            const Experiment* forced = nullptr);
RunConfig parse_config(const std::string& path, const Experiment* forced = nullptr);

}  // namespace hwave
