#pragma once

#include "tomra/complexdyn.hpp"
#include "tomra/core.hpp"
#include "tomra/random.hpp"
#include "tomra/trigpoly.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

namespace tomra::filters {

// a_k for k = offset, offset+1, ...
struct ScalingCoefficients {
  int offset = 0;
  std::vector<Complex> taps;

  double energy() const;  // sum |a_k|^2
  TrigPoly polynomial() const { return TrigPoly(offset, taps); }
};

struct LowPassFilter {
  TrigPoly poly;
  int N = 2;
  Complex value_at_one;
  bool trivial = false;   // a single nonzero tap: no low-pass behavior
  bool singular = false;  // identically zero
  std::vector<Complex> unit_circle_zeros;  // informational

  Complex operator()(Complex z) const { return poly(z); }
  // The classical normalization m0(1) = sqrt(N).  The Cantor filter fails it on purpose.
  bool lowpass_normalized(double tol = 1e-12) const;
};

// m0(z) = sum a_k z^k.
LowPassFilter filter_from_coeffs(const ScalingCoefficients& a, int n);

template <class Point>
struct FilterSystem {
  using Filter = std::function<Complex(const Point&)>;
  std::string name;
  int N = 2;
  std::vector<Filter> m;  // may hold fewer than N filters (low-pass only)
  std::function<double(const Point&)> h;
  int lowpass = 0;
  bool lowpass_singular = false;
  // Trigonometric-polynomial forms, when known; consumers on the circle use these for exact algebra.
  std::vector<TrigPoly> polys;
  TrigPoly h_poly = TrigPoly::constant(1.0);
};

using CircleFilterSystem = FilterSystem<Complex>;

// classical(N), haar, stretched_haar, cantor.  Each preset is checked with qmf_residual on 1024 samples.
CircleFilterSystem preset_filters(const std::string& name);
CircleFilterSystem classical_filters(int n);
CircleFilterSystem haar_filters();
CircleFilterSystem stretched_haar_filters();
CircleFilterSystem cantor_filters();
CircleFilterSystem from_polynomials(std::string name, int n, std::vector<TrigPoly> m, TrigPoly h = TrigPoly::constant(1.0));

// max over samples x and pairs (i, j) of |(1/c(x)) sum_{r(y)=x} conj(m_i(y)) m_j(y) h(y) - delta_ij h(x)|.
template <class System, class Point>
double qmf_residual(const FilterSystem<Point>& f, const System& sys, const std::vector<Point>& samples) {
  double worst = 0.0;
  const std::size_t k = f.m.size();
  for (const auto& x : samples) {
    auto pre = sys.preimages(x);
    const double c = static_cast<double>(pre.size());
    std::vector<std::vector<Complex>> vals(k);
    std::vector<double> hy;
    for (const auto& y : pre) {
      hy.push_back(f.h(y));
      for (std::size_t i = 0; i < k; ++i) vals[i].push_back(f.m[i](y));
    }
    const double hx = f.h(x);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        Complex s = 0.0;
        for (std::size_t t = 0; t < pre.size(); ++t) s += std::conj(vals[i][t]) * vals[j][t] * hy[t];
        s /= c;
        if (i == j) s -= hx;
        worst = std::max(worst, std::abs(s));
      }
  }
  return worst;
}

// Step function on the circle: cell t is the arc of angles [b_t, b_{t+1}) with b_0 = 0 and a final
// cell running to 2 pi.
class LoopGroupElement {
 public:
  LoopGroupElement(std::vector<double> breakpoints, std::vector<Eigen::MatrixXcd> matrices);
  static LoopGroupElement constant(const Eigen::MatrixXcd& a) { return LoopGroupElement({0.0}, {a}); }
  static LoopGroupElement identity(int n) { return constant(Eigen::MatrixXcd::Identity(n, n)); }

  int dim() const { return static_cast<int>(cells_.front().rows()); }
  std::size_t cell_count() const { return cells_.size(); }
  const std::vector<double>& breakpoints() const { return breaks_; }
  const Eigen::MatrixXcd& cell(std::size_t i) const { return cells_[i]; }
  std::size_t cell_of(Complex x) const;
  const Eigen::MatrixXcd& operator()(Complex x) const { return cells_[cell_of(x)]; }
  // max over cells of ||A A* - I|| (operator 2-norm).
  double unitarity_defect() const;
  // Pointwise product (*this)(x) * o(x) on the common refinement.
  LoopGroupElement operator*(const LoopGroupElement& o) const;

 private:
  std::vector<double> breaks_;
  std::vector<Eigen::MatrixXcd> cells_;
};

// Haar-random unitary cells (QR of complex Gaussian matrices) on random breakpoints.
LoopGroupElement random_loop_element(int n, int cells, Engine& rng);
Eigen::MatrixXcd random_unitary(int n, Engine& rng);

// m_i^A(x) = sum_j A_ij(r(x)) m_j(x); h is kept.  Throws std::domain_error for non-unitary A.
CircleFilterSystem loop_group_apply(const LoopGroupElement& a, const CircleFilterSystem& f, const complexdyn::CircleMap& sys,
                                    double tol = 1e-12);

struct CascadeResult {
  int N = 2;
  int samples_per_unit = 1;
  int support = 1;  // grid covers [0, support)
  std::vector<double> x;
  std::vector<Complex> values;
  std::vector<double> residual_history;  // residual of phi_m for m = 0..iterations
  double residual = 0.0;
};

// phi_{m+1}(x) = sqrt(N) sum a_k phi_m(N x - k) from phi_0 = 1 on [0,1), sampled at j / samples_per_unit.
CascadeResult cascade_approx(const ScalingCoefficients& a, int n, int iterations, int samples_per_unit);

}  // namespace tomra::filters
