#include "hwave/fourier.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hwave/errors.hpp"

namespace hwave {

namespace {

constexpr int kOverlapNodes = 64;

struct OverlapRule {
  std::vector<double> nodes;
  std::vector<double> fweights;
};

const OverlapRule& overlap_rule() {
  static const OverlapRule rule = [] {
    QuadratureRule r = gauss_hermite_rule(kOverlapNodes);
    return OverlapRule{r.nodes, gauss_hermite_function_weights(r)};
  }();
  return rule;
}

// Work buffers for the 1-D overlap int e^{i s y u} h_l(u + a x) h_k(u) du, evaluated
// after centring u = v - a x / 2 so the Gaussian factor is symmetric in v.
struct OverlapBuffers {
  int dim;  // deg + 1
  std::vector<double> hp, hm;  // [q][d]
  std::vector<cplx> am;        // [q][d]

  explicit OverlapBuffers(int deg)
      : dim(deg + 1), hp(kOverlapNodes * dim), hm(kOverlapNodes * dim), am(kOverlapNodes * dim) {}

  void set_shift(double c) {
    const OverlapRule& rule = overlap_rule();
    for (int q = 0; q < kOverlapNodes; ++q) {
      double v = rule.nodes[q];
      hermite_functions(dim - 1, v + c, &hp[q * dim]);
      hermite_functions(dim - 1, v - c, &hm[q * dim]);
      for (int d = 0; d < dim; ++d) hm[q * dim + d] *= rule.fweights[q];
    }
  }

  // out[kd * dim + ld]
  void overlap(double freq, cplx* out) {
    const OverlapRule& rule = overlap_rule();
    std::fill(out, out + dim * dim, cplx(0.0));
    for (int q = 0; q < kOverlapNodes; ++q) {
      const double* hmq = &hm[q * dim];
      const double* hpq = &hp[q * dim];
      double amax = 0.0, pmax = 0.0;
      for (int d = 0; d < dim; ++d) {
        amax = std::max(amax, std::abs(hmq[d]));
        pmax = std::max(pmax, std::abs(hpq[d]));
      }
      if (amax * pmax < 1e-300) continue;
      cplx ph = std::polar(1.0, freq * rule.nodes[q]);
      for (int kd = 0; kd < dim; ++kd) {
        cplx a = ph * hmq[kd];
        cplx* row = out + kd * dim;
        for (int ld = 0; ld < dim; ++ld) row[ld] += a * hpq[ld];
      }
    }
  }
};

void check_physical_grid(const PhysicalGrid& g) {
  if (g.counts.size() != g.half_widths.size() || g.counts.empty())
    throw InputError("physical grid: counts and half_widths must have equal nonzero length");
  for (int a = 0; a < g.dim(); ++a) {
    if (!(g.half_widths[a] > 0.0)) throw InputError("physical grid: half widths must be positive");
    if (g.counts[a] < 4)
      throw ConfigurationError("physical grid too coarse: fewer than 4 nodes on axis " +
                               std::to_string(a));
  }
}

bool same_physical_grid(const PhysicalGrid& a, const PhysicalGrid& b) {
  return a.counts == b.counts && a.half_widths == b.half_widths;
}

}  // namespace

double SpectralGrid::measure(std::size_t li) const {
  return plancherel_constant * lambda_weights[li] * std::pow(std::abs(lambda_nodes[li]), n);
}

double reference_plancherel_constant(int n) { return std::pow(2.0 * std::numbers::pi, -(n + 1)); }

SpectralGrid make_spectral_grid(const SpectralGridSpec& spec) {
  if (spec.n < 1 || spec.n > kMaxDim) throw InputError("spectral grid: n must be in 1..3");
  if (spec.lambda_nodes < 2 || spec.lambda_nodes % 2 != 0)
    throw InputError("spectral grid: lambda_nodes must be even and >= 2");
  if (!(spec.lambda_min > 0.0) || !(spec.lambda_max > spec.lambda_min))
    throw InputError("spectral grid: need 0 < lambda_min < lambda_max");
  SpectralGrid g;
  g.n = spec.n;
  g.rows = enumerate_multi_indices(spec.n, spec.max_degree);
  g.cols = enumerate_multi_indices(spec.n, spec.col_degree < 0 ? spec.max_degree : spec.col_degree);
  for (const auto& k : g.rows.indices) g.row_mu.push_back(eigenvalue(k, spec.n));
  g.plancherel_constant = reference_plancherel_constant(spec.n);

  const int half = spec.lambda_nodes / 2;
  QuadratureRule gl = gauss_legendre_rule(half);
  std::vector<double> pos(half), wpos(half);
  for (int i = 0; i < half; ++i) {
    double x = gl.nodes[i], w = gl.weights[i];
    if (spec.mapping == LambdaMapping::Linear) {
      double len = spec.lambda_max - spec.lambda_min;
      pos[i] = spec.lambda_min + 0.5 * len * (x + 1.0);
      wpos[i] = 0.5 * len * w;
    } else {
      double lo = std::log(spec.lambda_min), len = std::log(spec.lambda_max) - lo;
      pos[i] = std::exp(lo + 0.5 * len * (x + 1.0));
      wpos[i] = 0.5 * len * w * pos[i];
    }
  }
  for (int i = half - 1; i >= 0; --i) {
    g.lambda_nodes.push_back(-pos[i]);
    g.lambda_weights.push_back(wpos[i]);
  }
  for (int i = 0; i < half; ++i) {
    g.lambda_nodes.push_back(pos[i]);
    g.lambda_weights.push_back(wpos[i]);
  }
  return g;
}

double PhysicalGrid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= spacing(a);
  return v;
}

std::size_t PhysicalGrid::size() const {
  std::size_t s = 1;
  for (int c : counts) s *= static_cast<std::size_t>(c);
  return s;
}

PhysicalGrid make_cube_grid(int n, double half_width, int count) {
  PhysicalGrid g;
  g.half_widths.assign(2 * n + 1, half_width);
  g.counts.assign(2 * n + 1, count);
  return g;
}

bool same_grid(const SpectralGrid& a, const SpectralGrid& b) {
  return &a == &b || (a.n == b.n && a.lambda_nodes == b.lambda_nodes &&
                      a.lambda_weights == b.lambda_weights &&
                      a.plancherel_constant == b.plancherel_constant &&
                      a.rows.indices == b.rows.indices && a.cols.indices == b.cols.indices);
}

void require_same_grid(const CoefficientField& a, const CoefficientField& b, const char* where) {
  if (!a.grid || !b.grid || !same_grid(*a.grid, *b.grid))
    throw InputError(std::string(where) + ": coefficient fields live on different spectral grids");
}

CoefficientField operator+(const CoefficientField& a, const CoefficientField& b) {
  require_same_grid(a, b, "operator+");
  CoefficientField out(a.grid);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a.values[i] + b.values[i];
  return out;
}

CoefficientField operator-(const CoefficientField& a, const CoefficientField& b) {
  require_same_grid(a, b, "operator-");
  CoefficientField out(a.grid);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a.values[i] - b.values[i];
  return out;
}

CoefficientField operator*(double s, const CoefficientField& a) {
  CoefficientField out(a.grid);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = s * a.values[i];
  return out;
}

cplx rep_matrix_element(double lambda, const std::vector<double>& eta, const MultiIndex& k,
                        const MultiIndex& l) {
  if (lambda == 0.0 || !std::isfinite(lambda))
    throw InputError("rep_matrix_element: lambda must be nonzero and finite");
  const int n = static_cast<int>(k.size());
  if (static_cast<int>(l.size()) != n || static_cast<int>(eta.size()) != 2 * n + 1)
    throw InputError("rep_matrix_element: dimension mismatch");
  const double a = std::sqrt(std::abs(lambda));
  const double s = lambda > 0 ? a : -a;
  cplx value = std::polar(1.0, lambda * eta[2 * n]);
  int deg = 0;
  for (int j = 0; j < n; ++j) deg = std::max({deg, k[j], l[j]});
  OverlapBuffers buf(deg);
  std::vector<cplx> table(buf.dim * buf.dim);
  for (int j = 0; j < n; ++j) {
    double x = eta[j], y = eta[n + j];
    buf.set_shift(0.5 * a * x);
    buf.overlap(s * y, table.data());
    value *= table[k[j] * buf.dim + l[j]];
  }
  return value;
}

TransformPlan::TransformPlan(GridPtr sgrid, PhysicalGrid pgrid)
    : sgrid_(std::move(sgrid)), pgrid_(std::move(pgrid)) {
  check_physical_grid(pgrid_);
  const SpectralGrid& g = *sgrid_;
  const int n = g.n;
  if (pgrid_.dim() != 2 * n + 1)
    throw InputError("transform plan: physical grid dimension must be 2n+1");
  deg_ = std::max(g.rows.max_degree, g.cols.max_degree);
  const int dim = deg_ + 1;
  block_ = static_cast<std::size_t>(dim) * dim;

  row_digits_.assign(n, {});
  col_digits_.assign(n, {});
  for (int j = 0; j < n; ++j) {
    for (const auto& k : g.rows.indices) row_digits_[j].push_back(k[j]);
    for (const auto& l : g.cols.indices) col_digits_[j].push_back(l[j]);
  }

  std::size_t total = 0;
  axis_offset_.resize(g.num_lambda() * n);
  for (std::size_t li = 0; li < g.num_lambda(); ++li)
    for (int j = 0; j < n; ++j) {
      axis_offset_[li * n + j] = total;
      total += static_cast<std::size_t>(pgrid_.counts[j]) * pgrid_.counts[n + j] * block_;
    }
  tables_.assign(total, cplx(0.0));

  OverlapBuffers buf(deg_);
  for (std::size_t li = 0; li < g.num_lambda(); ++li) {
    const double lam = g.lambda_nodes[li];
    const double a = std::sqrt(std::abs(lam));
    const double s = lam > 0 ? a : -a;
    for (int j = 0; j < n; ++j) {
      const int nx = pgrid_.counts[j], ny = pgrid_.counts[n + j];
      for (int xi = 0; xi < nx; ++xi) {
        buf.set_shift(0.5 * a * pgrid_.coord(j, xi));
        for (int yi = 0; yi < ny; ++yi) {
          cplx* out = &tables_[axis_offset_[li * n + j] + (static_cast<std::size_t>(xi) * ny + yi) * block_];
          buf.overlap(s * pgrid_.coord(n + j, yi), out);
        }
      }
    }
  }
}

const cplx* TransformPlan::table(std::size_t li, int axis, int xi, int yi) const {
  const int n = sgrid_->n;
  const int ny = pgrid_.counts[n + axis];
  return &tables_[axis_offset_[li * n + axis] + (static_cast<std::size_t>(xi) * ny + yi) * block_];
}

CoefficientField TransformPlan::forward(const PhysicalField& f) const {
  if (!same_physical_grid(f.grid, pgrid_))
    throw InputError("forward transform: field grid does not match the plan");
  const SpectralGrid& g = *sgrid_;
  const int n = g.n;
  const int ta = 2 * n;
  const int nt = pgrid_.counts[ta];
  const double nyquist = std::numbers::pi / pgrid_.spacing(ta);
  if (std::abs(g.lambda_nodes.back()) > nyquist * (1.0 + 1e-12))
    throw ConfigurationError("forward transform: t-grid too coarse for lambda_max (Nyquist " +
                             std::to_string(nyquist) + ")");
  const std::size_t nxy = pgrid_.size() / nt;
  const std::size_t nr = g.rows.size(), nc = g.cols.size();
  const int dim = deg_ + 1;
  const double vol = pgrid_.cell_volume();

  CoefficientField F(sgrid_);
  std::vector<cplx> ft(nxy), phase(nt);
  std::vector<int> digits(2 * n);
  std::vector<const cplx*> tab(n);
  for (std::size_t li = 0; li < g.num_lambda(); ++li) {
    const double lam = g.lambda_nodes[li];
    for (int ti = 0; ti < nt; ++ti) phase[ti] = std::polar(1.0, -lam * pgrid_.coord(ta, ti));
    for (std::size_t p = 0; p < nxy; ++p) {
      cplx acc = 0.0;
      const cplx* row = &f.values[p * nt];
      for (int ti = 0; ti < nt; ++ti) acc += row[ti] * phase[ti];
      ft[p] = acc;
    }
    cplx* out = &F.values[g.index(li, 0, 0)];
    for (std::size_t p = 0; p < nxy; ++p) {
      if (ft[p] == cplx(0.0)) continue;
      std::size_t rem = p;
      for (int a = 2 * n - 1; a >= 0; --a) {
        digits[a] = static_cast<int>(rem % pgrid_.counts[a]);
        rem /= pgrid_.counts[a];
      }
      for (int j = 0; j < n; ++j) tab[j] = table(li, j, digits[j], digits[n + j]);
      const cplx w = ft[p];
      for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t c = 0; c < nc; ++c) {
          cplx prod = tab[0][row_digits_[0][r] * dim + col_digits_[0][c]];
          for (int j = 1; j < n; ++j) prod *= tab[j][row_digits_[j][r] * dim + col_digits_[j][c]];
          out[r * nc + c] += w * std::conj(prod);
        }
    }
  }
  for (auto& v : F.values) v *= vol;
  return F;
}

PhysicalField TransformPlan::inverse(const CoefficientField& F) const {
  if (!F.grid || !same_grid(*F.grid, *sgrid_))
    throw InputError("inverse transform: coefficient grid does not match the plan");
  const SpectralGrid& g = *sgrid_;
  const int n = g.n;
  const int ta = 2 * n;
  const int nt = pgrid_.counts[ta];
  const std::size_t nxy = pgrid_.size() / nt;
  const std::size_t nr = g.rows.size(), nc = g.cols.size();
  const int dim = deg_ + 1;

  PhysicalField u{pgrid_, std::vector<cplx>(pgrid_.size(), cplx(0.0))};
  std::vector<cplx> phase(nt);
  std::vector<int> digits(2 * n);
  std::vector<const cplx*> tab(n);
  for (std::size_t li = 0; li < g.num_lambda(); ++li) {
    const double lam = g.lambda_nodes[li];
    const double meas = g.measure(li);
    const cplx* coef = &F.values[g.index(li, 0, 0)];
    bool any = false;
    for (std::size_t i = 0; i < nr * nc; ++i)
      if (coef[i] != cplx(0.0)) {
        any = true;
        break;
      }
    if (!any) continue;
    for (int ti = 0; ti < nt; ++ti) phase[ti] = meas * std::polar(1.0, lam * pgrid_.coord(ta, ti));
    for (std::size_t p = 0; p < nxy; ++p) {
      std::size_t rem = p;
      for (int a = 2 * n - 1; a >= 0; --a) {
        digits[a] = static_cast<int>(rem % pgrid_.counts[a]);
        rem /= pgrid_.counts[a];
      }
      for (int j = 0; j < n; ++j) tab[j] = table(li, j, digits[j], digits[n + j]);
      cplx acc = 0.0;
      for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t c = 0; c < nc; ++c) {
          cplx prod = tab[0][row_digits_[0][r] * dim + col_digits_[0][c]];
          for (int j = 1; j < n; ++j) prod *= tab[j][row_digits_[j][r] * dim + col_digits_[j][c]];
          acc += prod * coef[r * nc + c];
        }
      cplx* row = &u.values[p * nt];
      for (int ti = 0; ti < nt; ++ti) row[ti] += acc * phase[ti];
    }
  }
  return u;
}

CoefficientField forward_transform(const PhysicalField& f, const GridPtr& sgrid) {
  TransformPlan plan(sgrid, f.grid);
  return plan.forward(f);
}

cplx inverse_transform(const CoefficientField& F, const std::vector<double>& eta) {
  const SpectralGrid& g = *F.grid;
  cplx acc = 0.0;
  for (std::size_t li = 0; li < g.num_lambda(); ++li) {
    cplx inner = 0.0;
    for (std::size_t r = 0; r < g.rows.size(); ++r)
      for (std::size_t c = 0; c < g.cols.size(); ++c) {
        const cplx v = F.at(li, r, c);
        if (v == cplx(0.0)) continue;
        inner += rep_matrix_element(g.lambda_nodes[li], eta, g.rows.indices[r], g.cols.indices[c]) * v;
      }
    acc += g.measure(li) * inner;
  }
  return acc;
}

double plancherel_norm(const CoefficientField& F) {
  return weighted_plancherel_norm(F, [](double, int) { return 1.0; });
}

double physical_l2_norm(const PhysicalField& f) {
  double s = 0.0;
  for (const auto& v : f.values) s += std::norm(v);
  return std::sqrt(s * f.grid.cell_volume());
}

double l1_norm(const PhysicalField& f) {
  double s = 0.0;
  for (const auto& v : f.values) s += std::abs(v);
  return s * f.grid.cell_volume();
}

double lq_norm(const PhysicalField& f, double q) {
  if (!(q >= 1.0)) throw InputError("lq_norm: q must be >= 1");
  double s = 0.0;
  for (const auto& v : f.values) s += std::pow(std::abs(v), q);
  return std::pow(s * f.grid.cell_volume(), 1.0 / q);
}

namespace {

double seminorm_of(const CoefficientField& F, double alpha) {
  return weighted_plancherel_norm(
      F, [alpha](double lam, int mu) { return std::pow(std::abs(lam) * mu, 0.5 * alpha); });
}

double sup_abs(const CoefficientField& F) {
  double s = 0.0;
  for (const auto& v : F.values) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

DataNorms data_norms(const PhysicalField& u0, const PhysicalField& u1, const CoefficientField& F0,
                     const CoefficientField& F1, const ModelParams& params) {
  require_same_grid(F0, F1, "data_norms");
  if (!same_physical_grid(u0.grid, u1.grid)) throw InputError("data_norms: physical grid mismatch");
  DataNorms d;
  d.l1 = l1_norm(u0) + l1_norm(u1);
  d.l2 = plancherel_norm(F0) + plancherel_norm(F1);
  d.h_alpha_seminorm = seminorm_of(F0, params.alpha);
  return d;
}

DataNorms spectral_data_norms(const CoefficientField& F0, const CoefficientField& F1,
                              const ModelParams& params) {
  require_same_grid(F0, F1, "spectral_data_norms");
  DataNorms d;
  d.l1 = sup_abs(F0) + sup_abs(F1);
  d.l1_is_surrogate = true;
  d.l2 = plancherel_norm(F0) + plancherel_norm(F1);
  d.h_alpha_seminorm = seminorm_of(F0, params.alpha);
  return d;
}

PhysicalField gaussian_field(const PhysicalGrid& grid, const std::vector<double>& widths,
                             double amplitude) {
  const int d = grid.dim();
  if (widths.size() != 1 && static_cast<int>(widths.size()) != d)
    throw InputError("gaussian_field: need one width or one per axis");
  std::vector<std::vector<double>> factor(d);
  for (int a = 0; a < d; ++a) {
    double w = widths.size() == 1 ? widths[0] : widths[a];
    if (!(w > 0.0)) throw InputError("gaussian_field: widths must be positive");
    for (int i = 0; i < grid.counts[a]; ++i) {
      double z = grid.coord(a, i);
      factor[a].push_back(std::exp(-z * z / (2.0 * w * w)));
    }
  }
  PhysicalField f{grid, std::vector<cplx>(grid.size())};
  std::vector<int> idx(d, 0);
  for (std::size_t p = 0; p < f.values.size(); ++p) {
    double v = amplitude;
    for (int a = 0; a < d; ++a) v *= factor[a][idx[a]];
    f.values[p] = v;
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < grid.counts[a]) break;
      idx[a] = 0;
    }
  }
  return f;
}

PlancherelCalibration calibrate_plancherel_constant(const SpectralGrid& sgrid,
                                                    const PhysicalGrid& pgrid,
                                                    const std::vector<std::vector<double>>& family) {
  if (family.empty()) throw InputError("calibration: empty family");
  auto unit = std::make_shared<SpectralGrid>(sgrid);
  unit->plancherel_constant = 1.0;
  TransformPlan plan(unit, pgrid);
  // per member: squared norm ratio and origin value at c = 1
  std::vector<double> ratio, origin;
  PlancherelCalibration out;
  const std::vector<double> zero(pgrid.dim(), 0.0);
  for (const auto& widths : family) {
    PhysicalField f = gaussian_field(pgrid, widths);
    CoefficientField F = plan.forward(f);
    double phys = physical_l2_norm(f);
    double spec = plancherel_norm(F);
    out.physical_norms.push_back(phys);
    ratio.push_back(spec * spec / (phys * phys));
    origin.push_back(inverse_transform(F, zero).real());
  }
  // least squares over the relative errors of both functionals, in log c
  auto cost = [&](double lc) {
    const double c = std::exp(lc);
    double acc = 0.0;
    for (std::size_t i = 0; i < ratio.size(); ++i) {
      const double e1 = std::sqrt(c * ratio[i]) - 1.0, e2 = c * origin[i] - 1.0;
      acc += e1 * e1 + e2 * e2;
    }
    return acc;
  };
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    const double a = -std::log(ratio[i]), b = origin[i] > 0.0 ? -std::log(origin[i]) : a;
    lo = i == 0 ? std::min(a, b) : std::min({lo, a, b});
    hi = i == 0 ? std::max(a, b) : std::max({hi, a, b});
  }
  out.constant = std::exp(boost::math::tools::brent_find_minima(cost, lo - 0.1, hi + 0.1, 52).first);
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    out.relative_errors.push_back(std::sqrt(out.constant * ratio[i]) - 1.0);
    out.origin_errors.push_back(out.constant * origin[i] - 1.0);
  }
  return out;
}

}  // namespace hwave
