#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "hwave/hermite.hpp"
#include "hwave/model.hpp"

namespace hwave {

using cplx = std::complex<double>;

enum class LambdaMapping { Linear, Log };

struct SpectralGridSpec {
  int n = 1;
  int max_degree = 6;
  int col_degree = -1;  // < 0: same as max_degree
  double lambda_min = 0.01;
  double lambda_max = 6.0;  // t-Nyquist of the default 33-node box is ~6.5
  int lambda_nodes = 40;  // total over both signs, even
  LambdaMapping mapping = LambdaMapping::Linear;
};

struct SpectralGrid {
  int n = 1;
  std::vector<double> lambda_nodes;  // increasing, symmetric, no zero
  std::vector<double> lambda_weights;
  double plancherel_constant = 0.0;
  TruncationSet rows;
  TruncationSet cols;
  std::vector<int> row_mu;  // 2|k|+n per row

  std::size_t num_lambda() const { return lambda_nodes.size(); }
  std::size_t size() const { return lambda_nodes.size() * rows.size() * cols.size(); }
  std::size_t index(std::size_t li, std::size_t r, std::size_t c) const {
    return (li * rows.size() + r) * cols.size() + c;
  }
  // Plancherel measure of node li: c_n w |lambda|^n
  double measure(std::size_t li) const;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

// (2 pi)^{-(n+1)}: the value of c_n for this normalization of pi_lambda.
double reference_plancherel_constant(int n);

SpectralGrid make_spectral_grid(const SpectralGridSpec& spec);

// Axis order: x_1..x_n, y_1..y_n, t; t varies fastest in PhysicalField::values.
struct PhysicalGrid {
  std::vector<double> half_widths;
  std::vector<int> counts;

  int dim() const { return static_cast<int>(counts.size()); }
  double spacing(int axis) const { return 2.0 * half_widths[axis] / counts[axis]; }
  // cell-centred nodes
  double coord(int axis, int i) const { return -half_widths[axis] + (i + 0.5) * spacing(axis); }
  double cell_volume() const;
  std::size_t size() const;
};

PhysicalGrid make_cube_grid(int n, double half_width, int count);

struct PhysicalField {
  PhysicalGrid grid;
  std::vector<cplx> values;
};

struct CoefficientField {
  GridPtr grid;
  std::vector<cplx> values;

  CoefficientField() = default;
  explicit CoefficientField(GridPtr g) : grid(std::move(g)), values(grid->size()) {}

  cplx& at(std::size_t li, std::size_t r, std::size_t c) { return values[grid->index(li, r, c)]; }
  const cplx& at(std::size_t li, std::size_t r, std::size_t c) const {
    return values[grid->index(li, r, c)];
  }
};

bool same_grid(const SpectralGrid& a, const SpectralGrid& b);
void require_same_grid(const CoefficientField& a, const CoefficientField& b, const char* where);

CoefficientField operator+(const CoefficientField& a, const CoefficientField& b);
CoefficientField operator-(const CoefficientField& a, const CoefficientField& b);
CoefficientField operator*(double s, const CoefficientField& a);

struct DataNorms {
  double l1 = 0.0;
  double l2 = 0.0;  // ||u0||_2 + ||u1||_2, Plancherel side
  double h_alpha_seminorm = 0.0;
  bool l1_is_surrogate = false;  // spectral-only data: l1 replaced by sup |F|

  // ||u0||_{H^alpha} + ||u1||_2 up to equivalence: seminorm + l2
  double a_norm() const { return h_alpha_seminorm + l2; }
  double b_norm() const { return l1 + a_norm(); }
};

// (pi_lambda(eta) e_l, e_k) for eta = (x_1..x_n, y_1..y_n, t).
cplx rep_matrix_element(double lambda, const std::vector<double>& eta, const MultiIndex& k,
                        const MultiIndex& l);

// Precomputed matrix elements for one (SpectralGrid, PhysicalGrid) pair.
class TransformPlan {
 public:
  TransformPlan(GridPtr sgrid, PhysicalGrid pgrid);

  CoefficientField forward(const PhysicalField& f) const;
  PhysicalField inverse(const CoefficientField& F) const;

  const SpectralGrid& spectral() const { return *sgrid_; }
  const GridPtr& spectral_ptr() const { return sgrid_; }
  const PhysicalGrid& physical() const { return pgrid_; }

 private:
  // e^{i lambda x_j y_j / 2} times the 1-D overlap, per (lambda, axis, x, y, k_j, l_j)
  const cplx* table(std::size_t li, int axis, int xi, int yi) const;

  GridPtr sgrid_;
  PhysicalGrid pgrid_;
  int deg_ = 0;  // 1-D degree bound
  std::size_t block_ = 0;
  std::vector<std::size_t> axis_offset_;
  std::vector<cplx> tables_;
  std::vector<std::vector<int>> row_digits_, col_digits_;  // per axis: 1-D index of each row/col
};

CoefficientField forward_transform(const PhysicalField& f, const GridPtr& sgrid);
cplx inverse_transform(const CoefficientField& F, const std::vector<double>& eta);

double plancherel_norm(const CoefficientField& F);
// sqrt(c_n sum w |lambda|^n sum mult(lambda, mu_k)^2 |F|^2)
template <class Mult>
double weighted_plancherel_norm(const CoefficientField& F, Mult mult) {
  const SpectralGrid& g = *F.grid;
  double acc = 0.0;
  for (std::size_t li = 0; li < g.num_lambda(); ++li) {
    double lam = g.lambda_nodes[li];
    double row_acc = 0.0;
    for (std::size_t r = 0; r < g.rows.size(); ++r) {
      double w = mult(lam, g.row_mu[r]);
      double s = 0.0;
      for (std::size_t c = 0; c < g.cols.size(); ++c) s += std::norm(F.at(li, r, c));
      row_acc += w * w * s;
    }
    acc += g.measure(li) * row_acc;
  }
  return std::sqrt(acc);
}

double physical_l2_norm(const PhysicalField& f);
double l1_norm(const PhysicalField& f);
double lq_norm(const PhysicalField& f, double q);

DataNorms data_norms(const PhysicalField& u0, const PhysicalField& u1, const CoefficientField& F0,
                     const CoefficientField& F1, const ModelParams& params);
// For data given only on the Fourier side.
DataNorms spectral_data_norms(const CoefficientField& F0, const CoefficientField& F1,
                              const ModelParams& params);

// Separable Gaussian amplitude * prod exp(-z_i^2 / (2 w_i^2)); one width per axis
// or a single width for all axes.
PhysicalField gaussian_field(const PhysicalGrid& grid, const std::vector<double>& widths,
                             double amplitude = 1.0);

struct PlancherelCalibration {
  double constant = 0.0;
  std::vector<double> relative_errors;  // norm, per family member, after calibration
  std::vector<double> origin_errors;    // inverse at the origin vs f(0) = 1
  std::vector<double> physical_norms;
};

// Least-squares fit of c_n on a unit-amplitude Gaussian family: relative errors of the
// Plancherel norm and of the inverse at the origin.
PlancherelCalibration calibrate_plancherel_constant(const SpectralGrid& sgrid,
                                                    const PhysicalGrid& pgrid,
                                                    const std::vector<std::vector<double>>& family);

}  // namespace hwave
