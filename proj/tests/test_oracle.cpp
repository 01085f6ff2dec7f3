#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "hwave/decay.hpp"
#include "hwave/errors.hpp"
#include "hwave/fixtures.hpp"
#include "hwave/oracle.hpp"

using namespace hwave;

TEST_CASE("elementary inequalities") {
  CHECK(sqrt_inequality_sweep(10001));
  CHECK(check_sqrt_inequality(0.0));
  CHECK(check_sqrt_inequality(0.25));
  CHECK_THROWS_AS(check_sqrt_inequality(0.3), InputError);
  CHECK(check_f_positivity(2.0, 0.5));
  CHECK(check_f_positivity(2.0, 0.0));
  CHECK(check_f_positivity(0.3, 0.0224));
  CHECK_THROWS_AS(check_f_positivity(1.0, 1.0), DomainError);
}

TEST_CASE("exponential-polynomial maxima") {
  const RatioReport a = check_exp_poly_bound(1.0, 1.0, 2.0);
  const RatioReport b = check_exp_poly_bound(2.0, 1.0, 5.0);
  CHECK(std::abs(a.sup_ratio - std::exp(-1.0)) < 1e-9);
  CHECK(std::abs(b.sup_ratio - 4.0 * std::exp(-2.0)) < 1e-9);
  CHECK(a.verdict);
  CHECK(b.verdict);
  CHECK_THROWS_AS(check_exp_poly_bound(1.0, 2.0, 1.0), InputError);
}

TEST_CASE("lemma integrals against closed forms and tanh-sinh quadrature") {
  LemmaArgs e;
  e.c = 2.0;
  for (double t : {0.5, 3.0, 40.0})
    CHECK(lemma_lhs(IntegralLemma::ExpConvolution, e, t) == doctest::Approx((1 - std::exp(-2 * t)) / 2).epsilon(1e-12));
  LemmaArgs h;
  h.sigma = 1e-300;  // (1+t-s)^{-sigma} = 1 to double precision
  h.beta = 2.0;
  CHECK(lemma_lhs(IntegralLemma::SplitHead, h, 6.0) == doctest::Approx(1.0 - 1.0 / 4.0).epsilon(1e-12));
  LemmaArgs s;
  s.theta = 0.7;
  for (double t : {0.3, 2.0, 50.0})
    CHECK(lemma_lhs(IntegralLemma::SingularConvolution, s, t) ==
          doctest::Approx(std::pow(t, 0.3) / 0.3).epsilon(1e-8));

  boost::math::quadrature::tanh_sinh<double> ts;
  LemmaArgs g{0.6, 0.4, 1.3, 0, 0, 1};
  for (double t : {0.2, 5.0, 300.0}) {
    // r = t - s puts the singularity at the left endpoint, where tanh-sinh resolves it
    auto f = [&](double r) {
      return std::pow(r, -g.theta) * std::pow(1 + r, -g.a) * std::pow(1 + t - r, -g.b);
    };
    const double ref = ts.integrate(f, 0.0, t);
    CHECK(lemma_lhs(IntegralLemma::SingularConvolution, g, t) == doctest::Approx(ref).epsilon(1e-7));
  }
  CHECK_THROWS_AS(lemma_lhs(IntegralLemma::SingularConvolution, LemmaArgs{1.0, 0, 0, 0, 0, 1}, 1.0), InputError);
  CHECK_THROWS_AS(lemma_lhs(IntegralLemma::SplitHead, LemmaArgs{0, 0, 0, 1.0, 0.5, 1}, 1.0), InputError);
  CHECK(lemma_from_name("split_tail_log") == IntegralLemma::SplitTailLog);
}

TEST_CASE("integral lemma sup ratios are refinement stable") {
  const std::vector<double> grid = log_spaced(0.1, 1e4, 40);
  const std::pair<IntegralLemma, LemmaArgs> cases[] = {
      {IntegralLemma::SingularConvolution, {0.5, 1.0, 1.5, 0, 0, 1}},
      {IntegralLemma::SingularConvolution, {0.5, 0.5, 0.5, 0, 0, 1}},
      {IntegralLemma::SingularConvolution, {0.3, 0.2, 0.6, 0, 0, 1}},
      {IntegralLemma::SplitHead, {0, 0, 0, 1.5, 2.0, 1}},
      {IntegralLemma::SplitTail, {0, 0, 0, 0.5, 1.5, 1}},
      {IntegralLemma::SplitTailLog, {0, 0, 0, 0.5, 1.5, 1}},
      {IntegralLemma::ExpConvolution, {0, 0, 0, 1.5, 0, 1.0}},
  };
  for (const auto& [lemma, args] : cases) {
    const RatioReport r = check_integral_lemma(lemma, args, grid);
    INFO(lemma_name(lemma), " ", r.note);
    CHECK(std::isfinite(r.sup_ratio));
    CHECK(r.refinement_drift < 0.05);
    CHECK(r.verdict);
  }
}

TEST_CASE("zone and uniform estimates on seeded samples") {
  ModelParams p;
  p.m = 0.5;
  for (Zone z : {Zone::Small, Zone::Large}) {
    const auto samples = generate_mode_samples(1000, p, 7, &z);
    for (const auto& s : samples) {
      const double thr = zone_threshold(s.k, p);
      CHECK((z == Zone::Small ? std::abs(s.lambda) < thr : std::abs(s.lambda) > thr));
    }
    for (Quantity q : {Quantity::U, Quantity::DT_U, Quantity::FRAC_U}) {
      const RatioReport r = check_zone_estimate(z, q, samples, p);
      INFO(zone_name(z), " ", quantity_name(q), " ", r.argmax_input);
      CHECK(std::isfinite(r.sup_ratio));
      CHECK(r.refinement_drift < 0.05);
    }
  }
  const auto any = generate_mode_samples(1000, p, 11, nullptr);
  for (Quantity q : {Quantity::U, Quantity::DT_U, Quantity::FRAC_U}) {
    const RatioReport r = check_uniform_estimates(q, any, p);
    CHECK(std::isfinite(r.sup_ratio));
  }
  const Zone small = Zone::Small, large = Zone::Large;
  CHECK_THROWS_AS(check_zone_estimate(Zone::Large, Quantity::U, generate_mode_samples(50, p, 3, &small), p),
                  InputError);
  const auto a = generate_mode_samples(20, p, 5, &large), b = generate_mode_samples(20, p, 5, &large);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].t == b[i].t);
    CHECK(a[i].lambda == b[i].lambda);
    CHECK(a[i].u0 == b[i].u0);
  }
}

TEST_CASE("Gagliardo-Nirenberg exponent and ratio") {
  CHECK(gn_theta(2.0, 1.0, 2.0, 4) == 0.0);
  CHECK(gn_theta(3.0, 1.0, 2.0, 4) == doctest::Approx(2.0 / 3.0));
  CHECK(gn_theta(4.0, 1.0, 2.0, 4) == doctest::Approx(1.0));
  CHECK_THROWS_AS(gn_theta(5.0, 1.0, 2.0, 4), InputError);
  CHECK_THROWS_AS(gn_theta(3.0, 0.0, 2.0, 4), InputError);

  const PhysicalGrid pg = make_cube_grid(1, 8.0, 33);
  GridPtr g = calibrated_grid(SpectralGridSpec{}, pg, default_calibration_family());
  TransformPlan plan(g, pg);
  ModelParams p;
  for (double w : {0.8, 1.0, 1.25}) {
    PhysicalField f = gaussian_field(pg, {w});
    CoefficientField F = plan.forward(f);
    CHECK(check_riemann_lebesgue(f, F));
    for (double q : {3.0, 4.0}) {
      const RatioReport r = check_gagliardo_nirenberg(f, F, q, 1.0, 2.0, p);
      CHECK(r.verdict);
      CHECK(r.sup_ratio > 0.0);
      CHECK(r.sup_ratio < 10.0);
    }
  }
}
