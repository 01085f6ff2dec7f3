#include "hwave/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "hwave/errors.hpp"

namespace hwave {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path);
  return os;
}

// non-finite values become strings; JSON has no literal for them
json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

json num_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

}  // namespace

void write_decay_csv(const std::string& path, const DecayReport& r) {
  auto os = open_out(path);
  os << "t,measured,envelope,ratio\n";
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    const double ratio = r.measured[i] == 0.0 ? 0.0 : r.measured[i] / r.envelope[i];
    os << format_double(r.times[i]) << ',' << format_double(r.measured[i]) << ','
       << format_double(r.envelope[i]) << ',' << format_double(ratio) << '\n';
  }
}

void write_convergence_csv(const std::string& path, const ConvergenceReport& r) {
  auto os = open_out(path);
  os << "iter,x_diff,ratio\n";
  for (std::size_t i = 0; i < r.diffs.size(); ++i) {
    os << i + 1 << ',' << format_double(r.diffs[i]) << ',';
    if (i > 0) os << format_double(r.ratios[i - 1]);
    os << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& tr, double alpha) {
  auto os = open_out(path);
  os << "t,L2,Halpha,dtL2\n";
  for (std::size_t i = 0; i < tr.size(); ++i)
    os << format_double(tr.times[i]) << ',' << format_double(plancherel_norm(tr.u[i])) << ','
       << format_double(sobolev_seminorm(tr.u[i], alpha)) << ','
       << format_double(plancherel_norm(tr.ut[i])) << '\n';
}

json to_json(const DecayReport& r, bool with_series) {
  json j;
  j["label"] = r.label;
  j["fitted_slope"] = num(r.fitted_slope);
  j["theoretical_slope"] = num(r.theoretical_slope);
  j["dominance_constant"] = num(r.dominance_constant);
  if (with_series) {
    j["times"] = num_array(r.times);
    j["measured"] = num_array(r.measured);
    j["envelope"] = num_array(r.envelope);
  }
  return j;
}

json to_json(const ConvergenceReport& r) {
  json j;
  j["iters"] = r.iters;
  j["diffs"] = num_array(r.diffs);
  j["ratios"] = num_array(r.ratios);
  j["final_x_norm"] = num(r.final_x_norm);
  j["linear_x_norm"] = num(r.linear_x_norm);
  j["data_norm"] = num(r.data_norm);
  j["epsilon"] = num(r.epsilon);
  j["tol"] = num(r.tol);
  j["a_emp"] = num(r.a_emp);
  j["bound_ok"] = r.bound_ok;
  j["converged"] = r.converged;
  j["verdict"] = r.verdict;
  return j;
}

json to_json(const RatioReport& r) {
  json j;
  j["sup_ratio"] = num(r.sup_ratio);
  j["argmax_input"] = r.argmax_input;
  j["sample_count"] = r.sample_count;
  j["refinement_drift"] = num(r.refinement_drift);
  j["verdict"] = r.verdict;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

json to_json(const DataNorms& n) {
  json j;
  j["l1"] = num(n.l1);
  j["l2"] = num(n.l2);
  j["h_alpha_seminorm"] = num(n.h_alpha_seminorm);
  j["l1_is_surrogate"] = n.l1_is_surrogate;
  return j;
}

void write_json(const std::string& path, const json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

}  // namespace hwave
