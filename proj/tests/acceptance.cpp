// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <array>
#include <boost/numeric/odeint.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "hwave/config.hpp"
#include "hwave/decay.hpp"
#include "hwave/experiments.hpp"
#include "hwave/oracle.hpp"
#include "hwave/propagator.hpp"

using namespace hwave;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::uint64_t kSeed = 20240917;

struct Outcome {
  bool pass = false;
  std::string detail;
};

const fs::path& out_root() {
  static const fs::path p = [] {
    fs::path r = fs::temp_directory_path() / "hwave_acceptance";
    fs::remove_all(r);
    fs::create_directories(r);
    return r;
  }();
  return p;
}

fs::path fixture(const std::string& name) { return fs::path(HWAVE_SOURCE_DIR) / "fixtures" / (name + ".json"); }

std::ostringstream run_log;

// runs a shipped fixture into out_root()/dir, returns the exit code
int run_fixture(const std::string& name, const std::string& dir) {
  const RunConfig c = parse_config(fixture(name).string());
  return run(c, (out_root() / dir).string(), kSeed, run_log);
}

json read_json(const fs::path& p) {
  std::ifstream is(p);
  return json::parse(is);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// rows of a t,measured,envelope,ratio CSV
std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream is(p);
  std::string line;
  std::getline(is, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------- 1

Outcome propagator_vs_rk4() {
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    ModelParams p;
    p.b = 0.5 + 3.5 * U(rng);
    p.m = 0.99 * U(rng) * p.b * p.b / 4.0;
    const double s = std::exp(std::log(1e-3) + U(rng) * std::log(50.0 / 1e-3));
    const double t = 20.0 * U(rng);
    const cplx u0(2 * U(rng) - 1, 2 * U(rng) - 1), u1(2 * U(rng) - 1, 2 * U(rng) - 1);

    using State = std::array<double, 4>;
    State x{u0.real(), u0.imag(), u1.real(), u1.imag()};
    auto rhs = [&](const State& y, State& dy, double) {
      dy[0] = y[2];
      dy[1] = y[3];
      dy[2] = -p.b * y[2] - (s + p.m) * y[0];
      dy[3] = -p.b * y[3] - (s + p.m) * y[1];
    };
    const double omega = std::sqrt(s + p.m) + p.b;
    const int steps = std::max(1, static_cast<int>(std::ceil(t * omega / 2e-3)));
    boost::numeric::odeint::runge_kutta4<State> rk;
    if (t > 0.0) boost::numeric::odeint::integrate_n_steps(rk, rhs, x, 0.0, t / steps, steps);
    const cplx ru(x[0], x[1]), rut(x[2], x[3]);
    const cplx u = evolve_coefficient(t, u0, u1, s, p), ut = evolve_time_derivative(t, u0, u1, s, p);
    const double scale = std::abs(ru) + std::abs(rut);
    worst = std::max(worst, (std::abs(u - ru) + std::abs(ut - rut)) / scale);
  }
  return {worst <= 1e-6, "50 samples, max relative error " + fmt(worst)};
}

// ---------------------------------------------------------------- 2

Outcome multiplier_identities() {
  const double h = 1e-4;
  double worst = 0.0;
  int count = 0;
  for (auto [b, m] : std::vector<std::pair<double, double>>{{2.0, 0.0}, {2.0, 0.5}, {3.0, 1.0}}) {
    ModelParams p;
    p.b = b;
    p.m = m;
    const double g = p.gap();
    for (double s : {0.05 * g, 0.5 * g, g - 1e-6, g - 1e-7, g, g + 1e-7, g + 1e-6, 2.0 * g, 10.0 * g + 1.0})
      for (double t : {0.2, 1.0, 3.0, 8.0}) {
        const double d1 = (a1(t + h, s, p) - a1(t - h, s, p)) / (2 * h);
        const double d0 = (a0(t + h, s, p) - a0(t - h, s, p)) / (2 * h);
        const double e1 = std::abs(d1 - a0(t, s, p)) / std::max(1.0, std::abs(a0(t, s, p)));
        const double rhs = discriminant(s, p) * a1(t, s, p);
        const double e0 = std::abs(d0 - rhs) / std::max(1.0, std::abs(rhs));
        worst = std::max({worst, e1, e0});
        ++count;
      }
  }
  return {worst <= 1e-6, std::to_string(count) + " (s, t) points over three regimes, max error " + fmt(worst)};
}

// ---------------------------------------------------------------- 3, 4

Outcome roundtrip(bool& rl_ok, std::string& rl_detail) {
  const int code = run_fixture("roundtrip", "roundtrip");
  const json j = read_json(out_root() / "roundtrip" / "roundtrip.json");
  double worst_rel = 0.0, worst_origin = 0.0, worst_rl = 0.0;
  rl_ok = true;
  for (const auto& m : j["members"]) {
    worst_rel = std::max(worst_rel, m["relative_error"].get<double>());
    worst_origin = std::max(worst_origin, m["origin_error"].get<double>());
    worst_rl = std::max(worst_rl, m["sup_coefficient"].get<double>() / m["l1"].get<double>());
    rl_ok = rl_ok && m["riemann_lebesgue"].get<bool>();
  }
  rl_detail = "Gaussian fixtures, max sup|F|/||f||_1 = " + fmt(worst_rl) +
              "; spectral-only fixtures have no physical L1 norm";
  return {code == kExitPass && worst_rel <= 0.03 && worst_origin <= 0.05,
          "max norm error " + fmt(worst_rel) + ", max origin error " + fmt(worst_origin) + ", c_n " +
              fmt(j["plancherel_constant"].get<double>())};
}

// ---------------------------------------------------------------- 5, 6

Outcome linear_dominance() {
  bool pass = true;
  std::string worst_label;
  double worst_change = 0.0, slope = 0.0;
  for (const char* name : {"decay_gaussian_m0", "decay_gaussian_m05", "decay_lowfreq_m0", "decay_lowfreq_m05"}) {
    const int code = run_fixture(name, name);
    const json j = read_json(out_root() / name / "decay.json");
    pass = pass && code == kExitPass && j["reports"].size() == 6;
    for (const auto& r : j["reports"]) {
      const bool finite = r["dominance_constant"].is_number();
      const double change = r["window_change"].is_number() ? r["window_change"].get<double>() : INFINITY;
      const auto rows = read_csv(out_root() / name / ("decay_" + r["label"].get<std::string>() + ".csv"));
      pass = pass && finite && change < 0.1 && rows.size() == 64;
      if (!(change <= worst_change)) {
        worst_change = change;
        worst_label = std::string(name) + "/" + r["label"].get<std::string>();
      }
      if (std::string(name) == "decay_lowfreq_m0" && r["label"] == "L2_L1") {
        slope = r["fitted_slope"].get<double>();
        pass = pass && slope <= -0.85;
      }
    }
  }
  return {pass, "24 reports, worst window change " + fmt(worst_change) + " (" + worst_label +
                    "), low-frequency L2 slope " + fmt(slope)};
}

Outcome mass_transition() {
  const json j = read_json(out_root() / "decay_gaussian_m05" / "decay.json");
  const json k = read_json(out_root() / "decay_lowfreq_m05" / "decay.json");
  const json& a = j["mass_weighted_l2"];
  const json& b = k["mass_weighted_l2"];
  bool pass = a["verdict"].get<bool>() && b["verdict"].get<bool>();
  // massless: the mass envelope reduces to the data norm
  ModelParams p;
  DataNorms d{1.7, 0.9, 0.3, false};
  const double e0 = decay_envelope(0.0, {Envelope::L2_MASS}, p, d);
  bool constant = true;
  for (double t : log1p_spaced(100.0, 64)) constant = constant && decay_envelope(t, {Envelope::L2_MASS}, p, d) == e0;
  const auto rows = read_csv(out_root() / "decay_gaussian_m0" / "decay_L2_MASS.csv");
  constant = constant && rows.size() == 64;
  for (const auto& r : rows) constant = constant && r[2] == rows.front()[2];
  pass = pass && constant;
  return {pass, "m=0.5 sup ||u||_2 e^{mt/2b}: Gaussian " + fmt(a["sup_full"].get<double>()) + ", low-frequency " +
                    fmt(b["sup_full"].get<double>()) + "; m=0 envelope constant: " + (constant ? "yes" : "no")};
}

// ---------------------------------------------------------------- 7, 8, 9

json verify_checks() {
  static json checks = [] {
    run_fixture("verify", "verify");
    return read_json(out_root() / "verify" / "verify.json")["checks"];
  }();
  return checks;
}

Outcome checks_named(const std::function<bool(const std::string&)>& select, int expected) {
  int n = 0, ok = 0;
  std::string failed;
  for (const auto& c : verify_checks()) {
    const std::string name = c["name"];
    if (!select(name)) continue;
    ++n;
    if (c["verdict"].get<bool>())
      ++ok;
    else
      failed += " " + name;
  }
  return {n == expected && ok == n, std::to_string(ok) + "/" + std::to_string(n) + " checks pass" +
                                        (failed.empty() ? "" : ", failing:" + failed)};
}

Outcome inequality_suite() {
  return checks_named(
      [](const std::string& s) {
        return s == "sqrt_inequality" || s == "f_positivity" || s == "exp_poly_bound" ||
               s.starts_with("singular_convolution") || s.starts_with("split_") || s == "exp_convolution";
      },
      10);
}

Outcome zone_estimates() {
  return checks_named([](const std::string& s) { return s.starts_with("zone_"); }, 6);
}

Outcome gagliardo_nirenberg() {
  const bool theta = gn_theta(2.0, 1.0, 2.0, 4) == 0.0 && std::abs(gn_theta(3.0, 1.0, 2.0, 4) - 2.0 / 3.0) < 1e-15;
  double common = NAN;
  bool ok = false;
  for (const auto& c : verify_checks())
    if (c["name"] == "gagliardo_nirenberg") {
      ok = c["verdict"].get<bool>();
      common = c["details"]["common_constant"].get<double>();
    }
  return {theta && ok && std::isfinite(common),
          std::string("theta(2)=0, theta(3)=2/3: ") + (theta ? "yes" : "no") + "; common constant over q in {3,4} " +
              fmt(common)};
}

// ---------------------------------------------------------------- 10, 11

Outcome semilinear() {
  const RunConfig c = parse_config(fixture("nonlinear_l1").string());
  const int code = run(c, (out_root() / "nonlinear_l1").string(), kSeed, run_log);
  const json j = read_json(out_root() / "nonlinear_l1" / "nonlinear.json");
  if (!j.contains("convergence")) return {false, "no convergence record (exit " + std::to_string(code) + ")"};
  const json& conv = j["convergence"];
  bool pass = conv["converged"].get<bool>() && conv["iters"].get<int>() <= 15;
  double worst_ratio = 0.0;
  for (const auto& r : conv["ratios"]) worst_ratio = std::max(worst_ratio, r.get<double>());
  pass = pass && worst_ratio < 1.0 && j.value("fixed_point_residual_verdict", false);
  for (const auto& d : j["decay"]) pass = pass && d["verdict"].get<bool>();
  const bool broke = j["breaking_run"]["non_contraction"].get<bool>();
  std::string cal;
  if (j.contains("epsilon_calibration")) {
    const double stable = j["epsilon_calibration"]["stable"].get<double>();
    pass = pass && c.fixed_point.epsilon <= stable;
    cal = ", calibrated stable " + fmt(stable) + " breaking " +
          fmt(j["epsilon_calibration"]["breaking"].get<double>());
  }
  pass = pass && broke && code == kExitPass;
  return {pass, "epsilon " + fmt(c.fixed_point.epsilon) + cal + ", " + std::to_string(conv["iters"].get<int>()) +
                    " iterations, max ratio " + fmt(worst_ratio) + ", 10x epsilon non-contraction: " +
                    (broke ? "yes" : "no")};
}

Outcome coupled() {
  const int code = run_fixture("coupled_mass", "coupled_mass");
  const json j = read_json(out_root() / "coupled_mass" / "coupled.json");
  if (!j.contains("symmetric_check")) return {false, "run did not complete (exit " + std::to_string(code) + ")"};
  const json& s = j["symmetric_check"];
  const bool pass = code == kExitPass && j["convergence"]["converged"].get<bool>() && s["verdict"].get<bool>();
  return {pass, std::to_string(j["convergence"]["iters"].get<int>()) + " iterations, single vs coupled max mode difference " +
                    fmt(s["max_difference_single_vs_u"].get<double>())};
}

// ---------------------------------------------------------------- 12

Outcome determinism(const std::vector<std::string>& fixtures) {
  int files = 0;
  std::string differing;
  for (const auto& name : fixtures) {
    const fs::path first = out_root() / name;
    if (!fs::exists(first)) run_fixture(name, name);
    run_fixture(name, name + "_rerun");
    for (const auto& e : fs::directory_iterator(first)) {
      ++files;
      const fs::path other = out_root() / (name + "_rerun") / e.path().filename();
      if (!fs::exists(other) || slurp(e.path()) != slurp(other)) differing += " " + name + "/" + e.path().filename().string();
    }
  }
  return {files > 0 && differing.empty(),
          std::to_string(fixtures.size()) + " fixtures, " + std::to_string(files) + " artifacts compared" +
              (differing.empty() ? "" : ", differing:" + differing)};
}

}  // namespace

int main() {
  bool all = true;
  int index = 0;
  auto report = [&](const char* name, const std::function<Outcome()>& fn) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all = all && o.pass;
    std::cout << "AC" << index << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << name << ": " << o.detail << " ["
              << fmt(secs) << " s]" << std::endl;
  };

  bool rl_ok = false;
  std::string rl_detail = "not run";
  report("propagator matches RK4", propagator_vs_rk4);
  report("multiplier identities", multiplier_identities);
  report("Plancherel round trip", [&] { return roundtrip(rl_ok, rl_detail); });
  report("Riemann-Lebesgue bound", [&] { return Outcome{rl_ok, rl_detail}; });
  report("linear decay dominance", linear_dominance);
  report("mass transition", mass_transition);
  report("inequality and lemma suite", inequality_suite);
  report("zone estimates", zone_estimates);
  report("Gagliardo-Nirenberg", gagliardo_nirenberg);
  report("semilinear fixed point", semilinear);
  report("coupled system", coupled);
  report("determinism", [] {
    return determinism({"roundtrip", "verify", "decay_gaussian_m05", "decay_lowfreq_m0", "decay_highfreq",
                        "synthetic_series", "linear_zero", "linear_gaussian", "nonlinear_l1", "coupled_mass",
                        "coupled_asym"});
  });
  if (!all) std::cerr << run_log.str();
  return all ? 0 : 1;
}
