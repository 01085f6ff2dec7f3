#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "hwave/duhamel.hpp"
#include "hwave/errors.hpp"
#include "hwave/fixtures.hpp"
#include "hwave/propagator.hpp"

using namespace hwave;

namespace {

struct Reduced {
  PhysicalGrid pgrid = make_cube_grid(1, 6.0, 25);
  GridPtr grid = calibrated_grid(SpectralGridSpec{}, pgrid, default_calibration_family());
  TransformPlan plan{grid, pgrid};
};

const Reduced& reduced() {
  static const Reduced r;
  return r;
}

// Gaussian data rescaled so that the regime data norm equals eps
InitialData data_at(double eps, const ModelParams& p, SemilinearRegime regime,
                    std::vector<double> widths = {1.0}) {
  const Reduced& r = reduced();
  DataSpec spec;
  spec.widths = std::move(widths);
  InitialData d = make_initial_data(spec, r.grid, &r.plan, p);
  return scaled(d, eps / regime_data_norm(d.norms, regime));
}

FixedPointConfig l1_config(double eps) {
  FixedPointConfig c;
  c.epsilon = eps;
  c.regime = SemilinearRegime::L1;
  return c;
}

GridPtr tiny_grid() {
  SpectralGridSpec s;
  s.max_degree = 2;
  s.lambda_min = 0.01;
  s.lambda_max = 2.0;
  s.lambda_nodes = 8;
  return std::make_shared<const SpectralGrid>(make_spectral_grid(s));
}

}  // namespace

TEST_CASE("weight profiles") {
  ModelParams p;
  WeightProfile x{ProfileTag::X_L1, p};
  CHECK(x.f1(0) == 1.0);
  CHECK(x.f2(0) == 1.0);
  CHECK(x.f3(0) == 1.0);
  CHECK(x.f1(3.0) == doctest::Approx(0.25));
  CHECK(x.f3(3.0) == doctest::Approx(1.0 / 16.0));
  WeightProfile l2{ProfileTag::X_L2, p};
  CHECK(l2.f1(9.0) == 1.0);
  CHECK(l2.f2(3.0) == doctest::Approx(0.5));
  ModelParams pm = p;
  pm.m = 0.2;
  WeightProfile z{ProfileTag::Z_MASS, pm};
  CHECK(z.f3(0.0) == doctest::Approx(1.2));
  CHECK(z.f1(10.0) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("regime validation") {
  ModelParams p;
  FixedPointConfig c = l1_config(1.0);
  CHECK_NOTHROW(validate(c, p));
  c.p = 3.0;
  try {
    validate(c, p);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("2 <= p <= 1+2alpha/(Q-2alpha) = 2") != std::string::npos);
  }
  c.p = 2.0;
  c.regime = SemilinearRegime::L2;  // Q = 4 = 4 alpha: empty range
  CHECK_THROWS_AS(validate(c, p), DomainError);
  c.regime = SemilinearRegime::Mass;
  CHECK_THROWS_AS(validate(c, p), DomainError);  // needs m > 0
  ModelParams pm = p;
  pm.m = 0.2;
  c.q = 1.0;
  CHECK_NOTHROW(validate(c, pm));
  CHECK_THROWS_AS(validate(c, pm, true), DomainError);
  c.q = 2.0;
  c.time_nodes = 2;
  CHECK_THROWS_AS(validate(c, pm), ConfigurationError);
}

TEST_CASE("linear part") {
  ModelParams p;
  GridPtr g = tiny_grid();
  CoefficientField F0(g), F1(g);
  Trajectory z = linear_part({0.0, 1.0, 2.0}, F0, F1, p);
  for (const auto& u : z.u) CHECK(plancherel_norm(u) == 0.0);
  F0.values[3] = 1.5;
  F1.values[7] = cplx(0, 2);
  Trajectory one = linear_part({0.0}, F0, F1, p);
  CHECK(one.u[0].values == F0.values);
  CHECK(one.ut[0].values == F1.values);
}

TEST_CASE("duhamel quadrature matches an adaptive reference") {
  ModelParams p;
  GridPtr g = tiny_grid();
  const std::vector<double> times = uniform_times(10.0, 201);
  // source: one mode, constant in time, and one mode varying like cos(tau)
  const std::size_t li = 3, r = 1;
  const double s = fractional_symbol(g->lambda_nodes[li], g->row_mu[r], p.alpha);
  std::vector<CoefficientField> src;
  for (double t : times) {
    CoefficientField f(g);
    f.at(li, r, 0) = 1.0;
    f.at(li, r, 1) = std::cos(t);
    src.push_back(f);
  }
  auto ref = [&](double t, bool deriv, bool varying) {
    auto f = [&](double tau) {
      const Damped d = damped_multipliers(t - tau, s, p);
      const double k = deriv ? d.e0 - 0.5 * p.b * d.e1 : d.e1;
      return k * (varying ? std::cos(tau) : 1.0);
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, t, 15, 1e-14);
  };
  DuhamelKernels K(*g, times[1] - times[0], times.size(), p);
  for (std::size_t i : {0ul, 1ul, 2ul, 3ul, 50ul, 77ul, 200ul}) {
    auto [u, ut] = duhamel_step(i, src, K, g->cols.size());
    const double t = times[i];
    CHECK(std::abs(u.at(li, r, 0) - ref(t, false, false)) < 1e-6);
    CHECK(std::abs(ut.at(li, r, 0) - ref(t, true, false)) < 1e-6);
    CHECK(std::abs(u.at(li, r, 1) - ref(t, false, true)) < 1e-6);
    CHECK(std::abs(ut.at(li, r, 1) - ref(t, true, true)) < 1e-6);
    CHECK(std::abs(u.at(li, r + 1, 0)) == 0.0);
  }
  auto [u0, ut0] = duhamel_step(0, times, src, p);
  CHECK(plancherel_norm(u0) == 0.0);
  std::vector<CoefficientField> short_src(src.begin(), src.begin() + 2);
  CHECK_THROWS_AS(duhamel_step(1, {0.0, 0.05}, short_src, p), ConfigurationError);
}

TEST_CASE("x-norm weights") {
  ModelParams p;
  WeightProfile pr{ProfileTag::X_L1, p};
  GridPtr g = tiny_grid();
  Trajectory z;
  z.times = {0.0, 1.0};
  z.u = {CoefficientField(g), CoefficientField(g)};
  z.ut = z.u;
  CHECK(x_norm(z, pr) == 0.0);

  // two spikes with different seminorm/L2 ratios let L2 and seminorm be set independently
  const std::size_t lo = g->num_lambda() / 2, hi = g->num_lambda() - 1;
  CoefficientField a(g), b(g);
  a.at(lo, 0, 0) = 1.0;
  b.at(hi, 2, 0) = 1.0;
  const double P1 = std::pow(plancherel_norm(a), 2), P2 = std::pow(plancherel_norm(b), 2);
  const double Q1 = std::pow(sobolev_seminorm(a, 1.0), 2), Q2 = std::pow(sobolev_seminorm(b, 1.0), 2);
  const double c = 0.7;
  Trajectory tr;
  for (double t : {0.0, 0.5, 2.0, 4.0}) {
    const double L = c * pr.f1(t), H = c * pr.f2(t), D = c * pr.f3(t);
    const double det = P1 * Q2 - P2 * Q1;
    const double x2 = (L * L * Q2 - H * H * P2) / det, y2 = (H * H * P1 - L * L * Q1) / det;
    REQUIRE(x2 >= 0.0);
    REQUIRE(y2 >= 0.0);
    tr.times.push_back(t);
    tr.u.push_back(std::sqrt(x2) * a + std::sqrt(y2) * b);
    tr.ut.push_back((D / std::sqrt(P1)) * a);
  }
  CHECK(x_norm(tr, pr) == doctest::Approx(3 * c).epsilon(1e-12));

  Trajectory single;
  single.times = {0.0};
  single.u = {2.0 * a};
  single.ut = {b};
  CHECK(x_norm(single, pr) == doctest::Approx(plancherel_norm(2.0 * a) + sobolev_seminorm(2.0 * a, 1.0) + plancherel_norm(b)));
}

TEST_CASE("nonlinearity transform") {
  const Reduced& r = reduced();
  PhysicalField gfield = gaussian_field(r.pgrid, {1.2});
  CoefficientField G = r.plan.forward(gfield);
  CHECK(plancherel_norm(nonlinearity_transform(CoefficientField(r.grid), 2.0, r.plan)) == 0.0);

  PhysicalField sq = gfield;
  for (auto& v : sq.values) v = v * v;
  CoefficientField expect = r.plan.forward(sq);
  CoefficientField got = nonlinearity_transform(G, 2.0, r.plan);
  // truncation of the basis is the only error source: bounded by the round-trip loss of the input
  const double loss = plancherel_norm(r.plan.forward(r.plan.inverse(G)) - G) / plancherel_norm(G);
  CHECK(loss < 0.2);
  CHECK(plancherel_norm(got - expect) <= loss * plancherel_norm(expect));

  CoefficientField scaled3 = nonlinearity_transform(3.0 * G, 2.0, r.plan);
  CHECK(plancherel_norm(scaled3 - 9.0 * got) <= 1e-12 * plancherel_norm(scaled3));

  CoefficientField rotated = G;
  for (auto& v : rotated.values) v *= cplx(0.0, 1.0);
  CHECK_THROWS_AS(nonlinearity_transform(rotated, 2.0, r.plan), ConsistencyError);
  CHECK_THROWS_AS(nonlinearity_transform(G, 1.0, r.plan), InputError);
}

TEST_CASE("picard iteration in the massless l1 regime") {
  const Reduced& r = reduced();
  ModelParams p;
  const WeightProfile pr{ProfileTag::X_L1, p};

  CoefficientField zero(r.grid);
  PicardResult z = picard_iterate(zero, zero, DataNorms{}, l1_config(1.0), pr, p, r.plan);
  CHECK(z.report.iters == 1);
  CHECK(z.report.converged);
  CHECK(z.report.final_x_norm == 0.0);
  auto zr = verify_nonlinear_decay(z.components[0], p, DataNorms{1.0, 1.0, 1.0, false}, SemilinearRegime::L1, z.report);
  for (const auto& d : zr) CHECK(d.dominance_constant == 0.0);

  const InitialData d = data_at(1.0, p, SemilinearRegime::L1);
  const FixedPointConfig cfg = l1_config(1.0);
  PicardResult res = picard_iterate(d.F0, d.F1, d.norms, cfg, pr, p, r.plan);
  CHECK(res.report.converged);
  CHECK(res.report.verdict);
  for (double q : res.report.ratios) CHECK(q < 1.0);
  for (std::size_t i = 1; i < res.report.diffs.size(); ++i) CHECK(res.report.diffs[i] < res.report.diffs[i - 1]);
  CHECK(fixed_point_residual(res, d.F0, d.F1, cfg, pr, p, r.plan) < 2.0 * cfg.tol * res.report.linear_x_norm);

  // monotone smallness over three levels
  double prev = res.report.final_x_norm;
  for (double eps : {0.5, 0.25}) {
    const InitialData h = data_at(eps, p, SemilinearRegime::L1);
    PicardResult rh = picard_iterate(h.F0, h.F1, h.norms, l1_config(eps), pr, p, r.plan);
    CHECK(rh.report.final_x_norm <= prev);
    prev = rh.report.final_x_norm;
  }

  // doubling the time nodes barely moves the X-norm
  FixedPointConfig fine = cfg;
  fine.time_nodes = 2 * cfg.time_nodes - 1;
  PicardResult rf = picard_iterate(d.F0, d.F1, d.norms, fine, pr, p, r.plan);
  CHECK(std::abs(rf.report.final_x_norm / res.report.final_x_norm - 1.0) < 0.05);

  // ||u(tau)||_p^p against (1+tau)^{-Q(p-1)/2alpha} ||u||_X^p, window stable
  const Trajectory& u = res.components[0];
  const double X = res.report.final_x_norm;
  double c_half = 0.0, c_full = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double lp = std::pow(lq_norm(r.plan.inverse(u.u[i]), 2.0), 2.0);
    const double bound = std::pow(1.0 + u.times[i], -p.Q() * (2.0 - 1.0) / (2.0 * p.alpha)) * X * X;
    c_full = std::max(c_full, lp / bound);
    if (u.times[i] <= 0.5 * cfg.T) c_half = c_full;
  }
  CHECK(std::isfinite(c_full));
  CHECK(c_full <= 1.1 * c_half);

  ConvergenceReport not_done = res.report;
  not_done.converged = false;
  CHECK_THROWS_AS(verify_nonlinear_decay(u, p, d.norms, SemilinearRegime::L1, not_done), InputError);
  CHECK_THROWS_AS(picard_iterate(d.F0, d.F1, d.norms, l1_config(0.5), pr, p, r.plan), InputError);
}

TEST_CASE("large data break the contraction") {
  const Reduced& r = reduced();
  ModelParams p;
  const WeightProfile pr{ProfileTag::X_L1, p};
  const InitialData d = data_at(200.0, p, SemilinearRegime::L1);
  try {
    picard_iterate(d.F0, d.F1, d.norms, l1_config(200.0), pr, p, r.plan);
    FAIL("expected non-contraction");
  } catch (const NonContractionError& e) {
    CHECK(e.epsilon == 200.0);
  }
}

TEST_CASE("coupled system") {
  const Reduced& r = reduced();
  ModelParams p;
  p.m = 0.2;
  FixedPointConfig cfg;
  cfg.regime = SemilinearRegime::Mass;
  cfg.epsilon = 2.0;
  const WeightProfile pr{ProfileTag::Z_MASS, p};

  CoefficientField zero(r.grid);
  PicardResult z = coupled_iterate(zero, zero, zero, zero, DataNorms{}, cfg, p, r.plan);
  CHECK(z.report.final_x_norm == 0.0);
  REQUIRE(z.components.size() == 2);

  // symmetric data: each component carries half of the joint norm
  const InitialData d = data_at(1.0, p, SemilinearRegime::Mass);
  DataNorms joint = d.norms;
  joint.l1 *= 2;
  joint.l2 *= 2;
  joint.h_alpha_seminorm *= 2;
  PicardResult c = coupled_iterate(d.F0, d.F1, d.F0, d.F1, joint, cfg, p, r.plan);
  PicardResult s = picard_iterate(d.F0, d.F1, d.norms, cfg, pr, p, r.plan);
  CHECK(c.report.converged);
  CHECK(c.report.iters == s.report.iters);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.components[0].size(); ++i)
    for (std::size_t k = 0; k < s.components[0].u[i].values.size(); ++k) {
      worst = std::max(worst, std::abs(s.components[0].u[i].values[k] - c.components[0].u[i].values[k]));
      worst = std::max(worst, std::abs(c.components[1].u[i].values[k] - c.components[0].u[i].values[k]));
    }
  CHECK(worst <= 1e-12);
  CHECK(c.report.final_x_norm == doctest::Approx(2 * s.report.final_x_norm).epsilon(1e-14));

  // asymmetric data
  const InitialData v = data_at(0.5, p, SemilinearRegime::Mass, {0.8});
  const InitialData u = data_at(0.5, p, SemilinearRegime::Mass, {1.25});
  DataNorms uv = u.norms;
  uv.l2 += v.norms.l2;
  uv.h_alpha_seminorm += v.norms.h_alpha_seminorm;
  PicardResult a = coupled_iterate(u.F0, u.F1, v.F0, v.F1, uv, cfg, p, r.plan);
  CHECK(a.report.converged);
  CHECK(std::isfinite(a.report.final_x_norm));
  CHECK(a.report.bound_ok);
}
