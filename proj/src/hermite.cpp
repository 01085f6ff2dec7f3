#include "hwave/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hwave/errors.hpp"

namespace hwave {

namespace {

constexpr double kPiQuarterInv = 0.75112554446494248286;  // pi^{-1/4}
constexpr double kRescale = 1e150;
constexpr double kLogRescale = 345.38776394910684;  // ln(1e150)

}  // namespace

int degree(const MultiIndex& k) {
  int d = 0;
  for (int e : k) d += e;
  return d;
}

void hermite_functions(int kmax, double x, double* out) {
  if (!std::isfinite(x)) throw InputError("hermite_function: non-finite x");
  if (kmax < 0) throw InputError("hermite_function: negative index");
  // p_k carries h_k up to the factor exp(log_scale); the Gaussian is folded
  // into log_scale and the recurrence is renormalized whenever it grows.
  double log_scale = -0.5 * x * x;
  double prev = 0.0;
  double cur = kPiQuarterInv;
  out[0] = cur * std::exp(log_scale);
  for (int k = 0; k < kmax; ++k) {
    double next = std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(double(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescale) {
      cur /= kRescale;
      prev /= kRescale;
      log_scale += kLogRescale;
    }
    out[k + 1] = cur * std::exp(log_scale);
  }
}

std::vector<double> hermite_functions(int kmax, double x) {
  std::vector<double> out(kmax + 1);
  hermite_functions(kmax, x, out.data());
  return out;
}

double hermite_function(int k, double x) {
  if (k < 0) throw InputError("hermite_function: negative index");
  return hermite_functions(k, x)[k];
}

int eigenvalue(const MultiIndex& k, int n) {
  if (static_cast<int>(k.size()) != n)
    throw InputError("eigenvalue: multi-index length " + std::to_string(k.size()) +
                     " does not match n = " + std::to_string(n));
  return 2 * degree(k) + n;
}

namespace {

// compositions of `remaining` into the slots [pos, n), lexicographically ascending
void compose(MultiIndex& k, int pos, int remaining, std::vector<MultiIndex>& out) {
  const int n = static_cast<int>(k.size());
  if (pos == n - 1) {
    k[pos] = remaining;
    out.push_back(k);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    k[pos] = v;
    compose(k, pos + 1, remaining - v, out);
  }
}

}  // namespace

TruncationSet enumerate_multi_indices(int n, int max_degree) {
  if (n < 1 || n > kMaxDim) throw InputError("enumerate_multi_indices: n must be in 1..3");
  if (max_degree < 0 || max_degree > kMaxDegree)
    throw InputError("enumerate_multi_indices: max_degree must be in 0..32");
  TruncationSet set;
  set.n = n;
  set.max_degree = max_degree;
  MultiIndex k(n, 0);
  for (int d = 0; d <= max_degree; ++d) compose(k, 0, d, set.indices);
  return set;
}

QuadratureRule gauss_hermite_rule(int count) {
  if (count < 2 || count > 256)
    throw InputError("gauss_hermite_rule: count must be in 2..256");
  const int n = count;
  std::vector<double> x(n), w(n);
  const int half = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1) - 1.85575 * std::pow(2.0 * n + 1, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(double(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[i - 2];
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = kPiQuarterInv, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(double(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / (pp * pp);
  }
  if (n % 2 == 1) x[half - 1] = 0.0;
  std::reverse(x.begin(), x.end());
  std::reverse(w.begin(), w.end());
  return {x, w};
}

std::vector<double> gauss_hermite_function_weights(const QuadratureRule& rule) {
  const int n = static_cast<int>(rule.nodes.size());
  std::vector<double> fw(n);
  std::vector<double> h(n);
  for (int j = 0; j < n; ++j) {
    hermite_functions(n - 1, rule.nodes[j], h.data());
    double s = 0.0;
    for (double v : h) s += v * v;
    fw[j] = 1.0 / s;
  }
  return fw;
}

QuadratureRule gauss_legendre_rule(int count) {
  if (count < 1) throw InputError("gauss_legendre_rule: count must be positive");
  const int n = count;
  std::vector<double> x(n), w(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  if (n % 2 == 1) x[half - 1] = 0.0;
  return {x, w};
}

}  // namespace hwave
