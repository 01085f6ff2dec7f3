#pragma once

#include <cstddef>
#include <vector>

namespace hwave {

using MultiIndex = std::vector<int>;

int degree(const MultiIndex& k);

struct TruncationSet {
  std::vector<MultiIndex> indices;
  int max_degree = 0;
  int n = 1;

  std::size_t size() const { return indices.size(); }
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline constexpr int kMaxDegree = 32;
inline constexpr int kMaxDim = 3;

// Normalized Hermite function h_k(x) = (2^k k! sqrt(pi))^{-1/2} H_k(x) e^{-x^2/2}.
double hermite_function(int k, double x);

// h_0(x) .. h_kmax(x) in one recurrence sweep.
std::vector<double> hermite_functions(int kmax, double x);
void hermite_functions(int kmax, double x, double* out);

// 2|k| + n
int eigenvalue(const MultiIndex& k, int n);

// All k in N^n with |k| <= max_degree, graded then lexicographic.
TruncationSet enumerate_multi_indices(int n, int max_degree);

// Rule for weight e^{-x^2}; 2 <= count <= 256.
QuadratureRule gauss_hermite_rule(int count);

// w_j e^{x_j^2}: weights for integrating functions that already carry their
// Gaussian decay (products of Hermite functions).
std::vector<double> gauss_hermite_function_weights(const QuadratureRule& rule);

// Rule for weight 1 on [-1, 1].
QuadratureRule gauss_legendre_rule(int count);

}  // namespace hwave
