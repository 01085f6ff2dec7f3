#include "hwave/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "hwave/decay.hpp"
#include "hwave/errors.hpp"

namespace hwave {

const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::Roundtrip: return "roundtrip";
    case Experiment::SimulateLinear: return "simulate-linear";
    case Experiment::FitDecay: return "fit-decay";
    case Experiment::Verify: return "verify";
    case Experiment::SimulateNonlinear: return "simulate-nonlinear";
    case Experiment::SimulateCoupled: return "simulate-coupled";
  }
  return "?";
}

Experiment experiment_from_name(const std::string& s) {
  for (Experiment e : {Experiment::Roundtrip, Experiment::SimulateLinear, Experiment::FitDecay,
                       Experiment::Verify, Experiment::SimulateNonlinear, Experiment::SimulateCoupled})
    if (s == experiment_name(e)) return e;
  throw InputError("unknown experiment '" + s + "'");
}

namespace {

using json = nlohmann::json;
using Path = std::vector<std::string>;

std::string join(const Path& p) {
  std::string s;
  for (const auto& k : p) s += (s.empty() ? "" : ".") + k;
  return s;
}

class Reader {
 public:
  Reader(const std::string& text, const std::string& src) : text_(text), src_(src) {}

  // line of the last key in path, searched in document order; 0 if absent
  int line_of(const Path& path) const {
    std::size_t pos = 0;
    for (const auto& key : path) {
      const std::string pat = "\"" + key + "\"";
      std::size_t hit = std::string::npos;
      for (std::size_t p = text_.find(pat, pos); p != std::string::npos; p = text_.find(pat, p + 1)) {
        std::size_t q = p + pat.size();
        while (q < text_.size() && std::isspace(static_cast<unsigned char>(text_[q]))) ++q;
        if (q < text_.size() && text_[q] == ':') {
          hit = p;
          break;
        }
      }
      if (hit == std::string::npos) return 0;
      pos = hit + pat.size();
    }
    return line_at(pos);
  }

  int line_at(std::size_t byte) const {
    byte = std::min(byte, text_.size());
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + byte, '\n'));
  }

  [[noreturn]] void fail(const Path& path, const std::string& msg) const {
    const int line = line_of(path);
    std::string where = src_ + (line > 0 ? ":" + std::to_string(line) : "");
    std::string key = join(path);
    throw ConfigError(where + ": " + (key.empty() ? "" : key + ": ") + msg, line);
  }

  void allow(const json& obj, const Path& path, std::initializer_list<const char*> keys) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char* k : keys) ok = ok || it.key() == k;
      if (!ok) {
        Path p = path;
        p.push_back(it.key());
        fail(p, "unknown key");
      }
    }
  }

  double num(const json& obj, Path path, const char* key, double def) const {
    if (!obj.contains(key)) return def;
    path.push_back(key);
    const json& v = obj.at(key);
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  int integer(const json& obj, Path path, const char* key, int def) const {
    if (!obj.contains(key)) return def;
    path.push_back(key);
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
  }

  bool boolean(const json& obj, Path path, const char* key, bool def) const {
    if (!obj.contains(key)) return def;
    path.push_back(key);
    const json& v = obj.at(key);
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
  }

  std::string str(const json& obj, Path path, const char* key, const std::string& def) const {
    if (!obj.contains(key)) return def;
    path.push_back(key);
    const json& v = obj.at(key);
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const json& obj, Path path, const char* key,
                              const std::vector<double>& def) const {
    if (!obj.contains(key)) return def;
    path.push_back(key);
    const json& v = obj.at(key);
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) fail(path, "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

 private:
  const std::string& text_;
  const std::string& src_;
};

const json& section(const json& root, const char* key) {
  static const json empty = json::object();
  return root.contains(key) ? root.at(key) : empty;
}

void read_spectral(const Reader& rd, const json& s, const Path& path, SpectralGridSpec& spec) {
  rd.allow(s, path, {"max_degree", "col_degree", "lambda_min", "lambda_max", "lambda_nodes", "mapping"});
  spec.max_degree = rd.integer(s, path, "max_degree", spec.max_degree);
  spec.col_degree = rd.integer(s, path, "col_degree", spec.col_degree);
  spec.lambda_min = rd.num(s, path, "lambda_min", spec.lambda_min);
  spec.lambda_max = rd.num(s, path, "lambda_max", spec.lambda_max);
  spec.lambda_nodes = rd.integer(s, path, "lambda_nodes", spec.lambda_nodes);
  const std::string mapping = rd.str(s, path, "mapping", spec.mapping == LambdaMapping::Log ? "log" : "linear");
  auto at = [&](const char* k) {
    Path p = path;
    p.push_back(k);
    return p;
  };
  if (mapping == "linear")
    spec.mapping = LambdaMapping::Linear;
  else if (mapping == "log")
    spec.mapping = LambdaMapping::Log;
  else
    rd.fail(at("mapping"), "expected \"linear\" or \"log\"");
  if (spec.max_degree < 0 || spec.max_degree > kMaxDegree)
    rd.fail(at("max_degree"), "must lie in [0, " + std::to_string(kMaxDegree) + "]");
  if (spec.col_degree > kMaxDegree) rd.fail(at("col_degree"), "too large");
  if (!(spec.lambda_min > 0.0)) rd.fail(at("lambda_min"), "must be positive");
  if (!(spec.lambda_max > spec.lambda_min)) rd.fail(at("lambda_max"), "must exceed lambda_min");
  if (spec.lambda_nodes < 2 || spec.lambda_nodes % 2 != 0)
    rd.fail(at("lambda_nodes"), "must be even and at least 2");
}

void read_data(const Reader& rd, const json& s, const Path& path, DataSpec& d, int n) {
  rd.allow(s, path, {"family", "widths", "amplitude", "velocity_amplitude", "band_lo", "band_hi"});
  d.family = rd.str(s, path, "family", d.family);
  d.widths = rd.numbers(s, path, "widths", d.widths);
  d.amplitude = rd.num(s, path, "amplitude", d.amplitude);
  d.velocity_amplitude = rd.num(s, path, "velocity_amplitude", d.velocity_amplitude);
  d.band_lo = rd.num(s, path, "band_lo", d.band_lo);
  d.band_hi = rd.num(s, path, "band_hi", d.band_hi);
  auto at = [&](const char* k) {
    Path p = path;
    p.push_back(k);
    return p;
  };
  if (!is_known_family(d.family))
    rd.fail(at("family"), "unknown family '" + d.family + "' (gaussian, low-freq-spike, high-freq-spike)");
  if (d.widths.size() != 1 && d.widths.size() != static_cast<std::size_t>(2 * n + 1))
    rd.fail(at("widths"), "give one width or one per axis (2n+1)");
  for (double w : d.widths)
    if (!(w > 0.0)) rd.fail(at("widths"), "widths must be positive");
  if (!(d.band_hi > d.band_lo && d.band_lo > 0.0)) rd.fail(at("band_lo"), "need 0 < band_lo < band_hi");
}

void check_nyquist(const Reader& rd, const Path& path, const SpectralGridSpec& s, double half_width,
                   int count) {
  const double nyquist = std::numbers::pi * count / (2.0 * half_width);
  if (s.lambda_max > nyquist)
    rd.fail(path, "lambda_max " + std::to_string(s.lambda_max) + " exceeds the t-grid Nyquist limit " +
                      std::to_string(nyquist) + " of the physical grid");
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& src, const Experiment* forced) {
  Reader rd(text, src);
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const int line = rd.line_at(e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError(src + ":" + std::to_string(line) + ": parse error: " + e.what(), line);
  }
  rd.allow(root, {}, {"experiment", "model", "spectral", "physical", "calibration", "data", "data_v",
                      "decay", "series", "roundtrip", "verify", "fixed_point", "nonlinear_grid",
                      "epsilon_calibration"});
  RunConfig c;
  if (root.contains("experiment")) {
    const std::string e = rd.str(root, {}, "experiment", "");
    try {
      c.experiment = experiment_from_name(e);
    } catch (const InputError& err) {
      rd.fail({"experiment"}, err.what());
    }
    if (forced && *forced != c.experiment)
      rd.fail({"experiment"}, std::string("configuration is for '") + experiment_name(c.experiment) +
                                  "', not '" + experiment_name(*forced) + "'");
  }
  if (forced) c.experiment = *forced;

  const json& model = section(root, "model");
  rd.allow(model, {"model"}, {"n", "b", "m", "alpha"});
  c.model.n = rd.integer(model, {"model"}, "n", c.model.n);
  c.model.b = rd.num(model, {"model"}, "b", c.model.b);
  c.model.m = rd.num(model, {"model"}, "m", c.model.m);
  c.model.alpha = rd.num(model, {"model"}, "alpha", c.model.alpha);
  if (c.model.n < 1 || c.model.n > kMaxDim)
    rd.fail({"model", "n"}, "n must lie in [1, " + std::to_string(kMaxDim) + "]");
  try {
    validate(c.model);
  } catch (const DomainError& e) {
    const bool bm = !(c.model.b * c.model.b > 4.0 * c.model.m);
    rd.fail({"model", bm ? (model.contains("m") ? "m" : "b") : "alpha"}, e.what());
  }
  c.spectral.n = c.nl_spectral.n = c.model.n;

  read_spectral(rd, section(root, "spectral"), {"spectral"}, c.spectral);
  const json& phys = section(root, "physical");
  rd.allow(phys, {"physical"}, {"half_width", "count"});
  c.half_width = rd.num(phys, {"physical"}, "half_width", c.half_width);
  c.count = rd.integer(phys, {"physical"}, "count", c.count);
  if (!(c.half_width > 0.0)) rd.fail({"physical", "half_width"}, "must be positive");
  if (c.count < 4) rd.fail({"physical", "count"}, "need at least 4 nodes per axis");

  const json& cal = section(root, "calibration");
  rd.allow(cal, {"calibration"}, {"enabled", "family"});
  c.calibrate = rd.boolean(cal, {"calibration"}, "enabled", c.calibrate);
  if (cal.contains("family")) {
    const json& fam = cal.at("family");
    if (!fam.is_array() || fam.empty()) rd.fail({"calibration", "family"}, "expected a non-empty array");
    c.calibration_family.clear();
    for (const auto& w : fam) {
      std::vector<double> widths;
      if (w.is_number()) widths.push_back(w.get<double>());
      else if (w.is_array())
        for (const auto& x : w) widths.push_back(x.is_number() ? x.get<double>() : -1.0);
      if (widths.empty() || std::any_of(widths.begin(), widths.end(), [](double v) { return !(v > 0.0); }))
        rd.fail({"calibration", "family"}, "each member is a positive width or an array of them");
      c.calibration_family.push_back(widths);
    }
  }

  read_data(rd, section(root, "data"), {"data"}, c.data, c.model.n);
  if (root.contains("data_v")) {
    c.has_data_v = true;
    read_data(rd, root.at("data_v"), {"data_v"}, c.data_v, c.model.n);
  }

  const json& dec = section(root, "decay");
  rd.allow(dec, {"decay"}, {"t_max", "count", "window_split", "window_tol", "envelopes", "slope_bounds"});
  c.t_max = rd.num(dec, {"decay"}, "t_max", c.t_max);
  c.time_count = rd.integer(dec, {"decay"}, "count", c.time_count);
  c.window_split = rd.num(dec, {"decay"}, "window_split", 0.5 * c.t_max);
  c.window_tol = rd.num(dec, {"decay"}, "window_tol", c.window_tol);
  if (!(c.t_max > 0.0)) rd.fail({"decay", "t_max"}, "must be positive");
  if (c.time_count < 2) rd.fail({"decay", "count"}, "need at least 2 samples");
  if (!(c.window_split > 0.0 && c.window_split < c.t_max))
    rd.fail({"decay", "window_split"}, "must lie in (0, t_max)");
  if (dec.contains("envelopes")) {
    const json& env = dec.at("envelopes");
    if (!env.is_array()) rd.fail({"decay", "envelopes"}, "expected an array of names");
    for (const auto& e : env) {
      if (!e.is_string()) rd.fail({"decay", "envelopes"}, "expected an array of names");
      try {
        envelope_from_name(e.get<std::string>());
      } catch (const InputError& err) {
        rd.fail({"decay", "envelopes"}, err.what());
      }
      c.envelopes.push_back(e.get<std::string>());
    }
  }
  if (dec.contains("slope_bounds")) {
    const json& sb = dec.at("slope_bounds");
    if (!sb.is_object()) rd.fail({"decay", "slope_bounds"}, "expected an object name -> bound");
    for (auto it = sb.begin(); it != sb.end(); ++it) {
      try {
        envelope_from_name(it.key());
      } catch (const InputError& err) {
        rd.fail({"decay", "slope_bounds", it.key()}, err.what());
      }
      if (!it.value().is_number()) rd.fail({"decay", "slope_bounds", it.key()}, "expected a number");
      c.slope_bounds[it.key()] = it.value().get<double>();
    }
  }

  if (root.contains("series")) {
    const json& s = root.at("series");
    rd.allow(s, {"series"}, {"file", "power", "expect_slope", "slope_tol"});
    c.series.present = true;
    c.series.file = rd.str(s, {"series"}, "file", "");
    c.series.power = rd.num(s, {"series"}, "power", c.series.power);
    c.series.expect_slope = rd.num(s, {"series"}, "expect_slope", c.series.expect_slope);
    c.series.slope_tol = rd.num(s, {"series"}, "slope_tol", c.series.slope_tol);
  }

  const json& rt = section(root, "roundtrip");
  rd.allow(rt, {"roundtrip"}, {"norm_tol", "origin_tol"});
  c.norm_tol = rd.num(rt, {"roundtrip"}, "norm_tol", c.norm_tol);
  c.origin_tol = rd.num(rt, {"roundtrip"}, "origin_tol", c.origin_tol);

  const json& ver = section(root, "verify");
  rd.allow(ver, {"verify"}, {"samples"});
  c.samples = rd.integer(ver, {"verify"}, "samples", c.samples);
  if (c.samples < 2) rd.fail({"verify", "samples"}, "need at least 2 samples");

  const json& fp = section(root, "fixed_point");
  rd.allow(fp, {"fixed_point"}, {"regime", "p", "q", "epsilon", "T", "time_nodes", "max_iters", "tol",
                                 "r", "breaking_factor", "check_symmetric"});
  FixedPointConfig& f = c.fixed_point;
  const std::string regime = rd.str(fp, {"fixed_point"}, "regime",
                                    c.model.m > 0.0 ? "mass" : "l1");
  try {
    f.regime = semilinear_regime_from_name(regime);
  } catch (const InputError& e) {
    rd.fail({"fixed_point", "regime"}, e.what());
  }
  f.p = rd.num(fp, {"fixed_point"}, "p", f.p);
  f.q = rd.num(fp, {"fixed_point"}, "q", f.q);
  f.epsilon = rd.num(fp, {"fixed_point"}, "epsilon", f.epsilon);
  f.T = rd.num(fp, {"fixed_point"}, "T", f.T);
  f.time_nodes = rd.integer(fp, {"fixed_point"}, "time_nodes", f.time_nodes);
  f.max_iters = rd.integer(fp, {"fixed_point"}, "max_iters", f.max_iters);
  f.tol = rd.num(fp, {"fixed_point"}, "tol", f.tol);
  f.r = rd.num(fp, {"fixed_point"}, "r", f.r);
  c.breaking_factor = rd.num(fp, {"fixed_point"}, "breaking_factor", c.breaking_factor);
  c.check_symmetric = rd.boolean(fp, {"fixed_point"}, "check_symmetric", c.check_symmetric);

  const json& ng = section(root, "nonlinear_grid");
  rd.allow(ng, {"nonlinear_grid"}, {"spectral", "half_width", "count"});
  read_spectral(rd, section(ng, "spectral"), {"nonlinear_grid", "spectral"}, c.nl_spectral);
  c.nl_half_width = rd.num(ng, {"nonlinear_grid"}, "half_width", c.nl_half_width);
  c.nl_count = rd.integer(ng, {"nonlinear_grid"}, "count", c.nl_count);
  if (!(c.nl_half_width > 0.0)) rd.fail({"nonlinear_grid", "half_width"}, "must be positive");
  if (c.nl_count < 4) rd.fail({"nonlinear_grid", "count"}, "need at least 4 nodes per axis");

  const json& ec = section(root, "epsilon_calibration");
  rd.allow(ec, {"epsilon_calibration"}, {"enabled", "lo", "hi", "steps"});
  c.calibrate_epsilon = rd.boolean(ec, {"epsilon_calibration"}, "enabled", c.calibrate_epsilon);
  c.eps_lo = rd.num(ec, {"epsilon_calibration"}, "lo", c.eps_lo);
  c.eps_hi = rd.num(ec, {"epsilon_calibration"}, "hi", c.eps_hi);
  c.eps_steps = rd.integer(ec, {"epsilon_calibration"}, "steps", c.eps_steps);
  if (!(c.eps_lo > 0.0 && c.eps_hi > c.eps_lo))
    rd.fail({"epsilon_calibration", "lo"}, "need 0 < lo < hi");

  // checks that depend on the experiment
  const bool physical_data = is_physical_family(c.data.family) ||
                             (c.has_data_v && is_physical_family(c.data_v.family));
  switch (c.experiment) {
    case Experiment::Roundtrip:
    case Experiment::Verify:
      check_nyquist(rd, {"spectral", "lambda_max"}, c.spectral, c.half_width, c.count);
      break;
    case Experiment::SimulateLinear:
    case Experiment::FitDecay:
      if (physical_data && !c.series.present)
        check_nyquist(rd, {"spectral", "lambda_max"}, c.spectral, c.half_width, c.count);
      break;
    case Experiment::SimulateNonlinear:
    case Experiment::SimulateCoupled: {
      const bool coupled = c.experiment == Experiment::SimulateCoupled;
      try {
        validate(c.fixed_point, c.model, coupled);
      } catch (const DomainError& e) {
        const std::string what = e.what();
        const char* key = what.find("exponent q") != std::string::npos ? "q"
                          : what.find("exponent p") != std::string::npos ? "p"
                          : what.find("regime") != std::string::npos ? "regime"
                                                                      : "epsilon";
        rd.fail({"fixed_point", key}, what);
      } catch (const ConfigurationError& e) {
        rd.fail({"fixed_point", "time_nodes"}, e.what());
      }
      check_nyquist(rd, {"nonlinear_grid", "spectral", "lambda_max"}, c.nl_spectral, c.nl_half_width,
                    c.nl_count);
      if (!is_physical_family(c.data.family) || (c.has_data_v && !is_physical_family(c.data_v.family)))
        rd.fail({"data", "family"}, "nonlinear runs need physical (gaussian) data");
      break;
    }
  }
  return c;
}

RunConfig parse_config(const std::string& path, const Experiment* forced) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError(path + ": cannot open configuration file", 0);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str(), path, forced);
}

}  // namespace hwave
