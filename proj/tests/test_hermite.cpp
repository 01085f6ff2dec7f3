#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "hwave/errors.hpp"
#include "hwave/hermite.hpp"

using namespace hwave;

namespace {

double integrate(auto f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

}  // namespace

TEST_CASE("hermite function matches high-precision reference") {
  // mpmath: hermite(5, 1.3) / sqrt(2^5 5! sqrt(pi)) * exp(-1.3^2/2)
  CHECK(hermite_function(5, 1.3) == doctest::Approx(-0.39939146281375073457).epsilon(1e-13));
  CHECK(hermite_function(0, 0.0) == doctest::Approx(std::pow(std::numbers::pi, -0.25)).epsilon(1e-15));
}

TEST_CASE("hermite functions are orthonormal under adaptive quadrature") {
  for (int j = 0; j <= 8; ++j)
    for (int k = j; k <= 8; ++k) {
      const double v = integrate([&](double x) { return hermite_function(j, x) * hermite_function(k, x); },
                                 -15.0, 15.0);
      CHECK(v == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("sweep agrees with single evaluation and survives large arguments") {
  const auto all = hermite_functions(32, 2.7);
  for (int k = 0; k <= 32; ++k) CHECK(all[k] == doctest::Approx(hermite_function(k, 2.7)).epsilon(1e-12));
  const auto far = hermite_functions(32, 40.0);
  for (double v : far) {
    CHECK(std::isfinite(v));
    CHECK(std::abs(v) < 1e-200);
  }
  // harmonic oscillator eigenfunction: -h'' + x^2 h = (2k+1) h
  const double x = 0.7, h = 1e-3;
  for (int k : {0, 3, 7}) {
    const double d2 = (hermite_function(k, x + h) - 2 * hermite_function(k, x) + hermite_function(k, x - h)) / (h * h);
    CHECK(-d2 + x * x * hermite_function(k, x) == doctest::Approx((2 * k + 1) * hermite_function(k, x)).epsilon(1e-5));
  }
}

TEST_CASE("eigenvalue and index enumeration") {
  CHECK(eigenvalue({0}, 1) == 1);
  CHECK(eigenvalue({1, 2}, 2) == 8);
  CHECK_THROWS_AS(eigenvalue({1, 2}, 3), InputError);

  const TruncationSet s = enumerate_multi_indices(2, 2);
  REQUIRE(s.size() == 6);
  const std::vector<MultiIndex> expect{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}};
  CHECK(s.indices == expect);
  CHECK(enumerate_multi_indices(1, 6).size() == 7);
  CHECK(enumerate_multi_indices(3, 4).size() == 35);
  CHECK(enumerate_multi_indices(2, 0).size() == 1);
}

TEST_CASE("gauss rules integrate polynomials exactly") {
  const QuadratureRule gh = gauss_hermite_rule(20);
  double m4 = 0.0;
  for (std::size_t i = 0; i < gh.nodes.size(); ++i) m4 += gh.weights[i] * std::pow(gh.nodes[i], 4);
  CHECK(m4 == doctest::Approx(0.75 * std::sqrt(std::numbers::pi)).epsilon(1e-13));
  for (std::size_t i = 1; i < gh.nodes.size(); ++i) CHECK(gh.nodes[i] > gh.nodes[i - 1]);

  const QuadratureRule gl = gauss_legendre_rule(10);
  double m8 = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) m8 += gl.weights[i] * std::pow(gl.nodes[i], 8);
  CHECK(m8 == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("function weights reproduce the norms of hermite functions") {
  const QuadratureRule gh = gauss_hermite_rule(64);
  const std::vector<double> fw = gauss_hermite_function_weights(gh);
  for (int k : {0, 10, 40, 63}) {
    double s = 0.0;
    for (std::size_t i = 0; i < fw.size(); ++i) s += fw[i] * std::pow(hermite_function(k, gh.nodes[i]), 2);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK_THROWS_AS(gauss_hermite_rule(1), InputError);
}
