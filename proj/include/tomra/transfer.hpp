#pragma once

#include "tomra/core.hpp"
#include "tomra/symbolic.hpp"
#include "tomra/trigpoly.hpp"

#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace tomra::transfer {

template <class S>
concept DynamicalSystem = requires(const S& s, const typename S::Point& x) {
  { s.map(x) } -> std::convertible_to<typename S::Point>;
  { s.preimages(x) } -> std::convertible_to<std::vector<typename S::Point>>;
  { s.max_branch_count() } -> std::convertible_to<int>;
};

// X(A) with the left shift; points are finite prefixes, long enough for whatever reads them.
class SubshiftSystem {
 public:
  using Point = symbolic::Word;
  explicit SubshiftSystem(symbolic::TransitionMatrix a) : a_(std::move(a)) {}
  const symbolic::TransitionMatrix& matrix() const { return a_; }
  Point map(const Point& x) const;
  std::vector<Point> preimages(const Point& x) const { return symbolic::preimages_word(a_, x); }
  int branch_count(const Point& x) const { return a_.column_sum(x.front()); }
  int max_branch_count() const { return a_.max_column_sum(); }

 private:
  symbolic::TransitionMatrix a_;
};

template <class Point, class Scalar = double>
class WeightFunction {
 public:
  using Fn = std::function<Scalar(const Point&)>;
  WeightFunction(Fn f, Convention c = Convention::averaged, double bound = std::numeric_limits<double>::infinity())
      : f_(std::move(f)), convention_(c), bound_(bound) {}
  Scalar operator()(const Point& y) const { return f_(y); }
  Convention convention() const { return convention_; }
  double bound() const { return bound_; }

 private:
  Fn f_;
  Convention convention_;
  double bound_;
};

template <class Point, class Scalar = double>
WeightFunction<Point, Scalar> constant_weight(Scalar c, Convention conv = Convention::averaged) {
  return WeightFunction<Point, Scalar>([c](const Point&) { return c; }, conv, magnitude(c));
}

// summed(y) = averaged(y) / c(r(y)).
template <DynamicalSystem S, class Scalar>
WeightFunction<typename S::Point, Scalar> to_summed(const S& sys, const WeightFunction<typename S::Point, Scalar>& w) {
  if (w.convention() == Convention::summed) return w;
  return WeightFunction<typename S::Point, Scalar>(
      [sys, w](const typename S::Point& y) { return w(y) / Scalar(static_cast<int>(sys.preimages(sys.map(y)).size())); },
      Convention::summed, w.bound());
}

// averaged(y) = c(r(y)) * summed(y).
template <DynamicalSystem S, class Scalar>
WeightFunction<typename S::Point, Scalar> to_averaged(const S& sys, const WeightFunction<typename S::Point, Scalar>& w) {
  if (w.convention() == Convention::averaged) return w;
  return WeightFunction<typename S::Point, Scalar>(
      [sys, w](const typename S::Point& y) { return w(y) * Scalar(static_cast<int>(sys.preimages(sys.map(y)).size())); },
      Convention::averaged, w.bound() * sys.max_branch_count());
}

// (R_W f)(x).
template <DynamicalSystem S, class WScalar, class F>
auto apply_ruelle(const S& sys, const WeightFunction<typename S::Point, WScalar>& w, const F& f, const typename S::Point& x) {
  using R = decltype(w(x) * f(x));
  auto pre = sys.preimages(x);
  R sum(0);
  for (const auto& y : pre) sum += w(y) * f(y);
  if (w.convention() == Convention::averaged) sum /= R(static_cast<int>(pre.size()));
  return sum;
}

struct IterateOptions {
  double budget = 1 << 22;  // max leaves per evaluation point
};

// R_W^n f at each point, by n nested preimage sums.
template <DynamicalSystem S, class WScalar, class F>
auto ruelle_iterate(const S& sys, const WeightFunction<typename S::Point, WScalar>& w, const F& f, int n,
                    const std::vector<typename S::Point>& points, IterateOptions opt = {}) {
  using Point = typename S::Point;
  using R = decltype(w(points.front()) * f(points.front()));
  if (n < 0) throw std::invalid_argument("ruelle_iterate: n must be >= 0");
  const double leaves = std::pow(static_cast<double>(sys.max_branch_count()), n);
  if (leaves > opt.budget)
    throw BudgetError("ruelle_iterate: " + std::to_string(sys.max_branch_count()) + "^" + std::to_string(n) +
                      " preimage leaves exceed the budget of " + std::to_string(opt.budget));
  std::function<R(const Point&, int)> rec = [&](const Point& x, int k) -> R {
    if (k == 0) return R(f(x));
    return apply_ruelle(sys, w, [&](const Point& y) { return rec(y, k - 1); }, x);
  };
  std::vector<R> out;
  out.reserve(points.size());
  for (const auto& x : points) out.push_back(rec(x, n));
  return out;
}

// Exact R^n f on level-L cylinder functions: W sees words of length L+1.
template <class Scalar, class WeightFn>
std::vector<Scalar> ruelle_power(const symbolic::CylinderIndex& idx, WeightFn&& w, const std::vector<Scalar>& f, int n,
                                 Convention conv = Convention::averaged) {
  if (n < 0) throw std::invalid_argument("ruelle_power: n must be >= 0");
  auto m = symbolic::ruelle_matrix<Scalar>(idx, w, conv);
  std::vector<Scalar> v = f;
  for (int k = 0; k < n; ++k) v = m.apply(v);
  return v;
}

struct PFOptions {
  double tol = 1e-12;
  int max_iter = 200000;
};

template <class Scalar>
struct PFData {
  double lambda0 = 0.0;
  std::vector<Scalar> h;
  std::vector<Scalar> nu;
  double residual_right = 0.0;  // ||R h - lambda h||_inf
  double residual_left = 0.0;   // ||nu R - lambda nu||_inf
  double normalization_error = 0.0;  // |nu(h) - 1|
  int iterations = 0;
};

// Power iteration for the dominant pair of a finite-rank operator.  nu sums to 1 (when its sum
// is nonzero) and h is scaled so nu(h) = 1.
PFData<double> pf_solve(const Matrix<double>& op, const PFOptions& opt = {});
PFData<Complex> pf_solve(const Matrix<Complex>& op, const PFOptions& opt = {});

// Finite-rank operator acting on coefficient vectors plus evaluation at named sample points.
template <class Coeff>
struct Discretization {
  Matrix<Coeff> op;
  std::vector<Coeff> one;
  Matrix<Coeff> evaluate;  // rows: samples
  std::vector<std::string> labels;
};

Discretization<double> cylinder_discretization(const symbolic::CylinderIndex& idx, const Matrix<double>& op);

// Averaged R_V on trigonometric polynomials of degree <= K for z -> z^N: (R f)_j = sum_k v_{Nj-k} f_k.
// Throws unless the degree-K space is invariant, i.e. K (N-1) >= deg V.
Matrix<Complex> fourier_operator(const TrigPoly& v, int n, int k);
Matrix<Complex> fourier_evaluation(int k, const std::vector<Complex>& points);
std::vector<Complex> fourier_coefficients_of(const TrigPoly& f, int k);
TrigPoly fourier_to_trigpoly(const std::vector<Complex>& c);
Discretization<Complex> fourier_discretization(const TrigPoly& v, int n, int k, const std::vector<Complex>& samples);

// All points of r^{-j}(base) for j = 0..depth.
template <DynamicalSystem S>
std::vector<typename S::Point> preimage_tree(const S& sys, const std::vector<typename S::Point>& base, int depth) {
  std::vector<typename S::Point> all = base, level = base;
  for (int j = 0; j < depth; ++j) {
    std::vector<typename S::Point> next;
    for (const auto& x : level)
      for (auto& y : sys.preimages(x)) next.push_back(std::move(y));
    all.insert(all.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return all;
}

std::vector<Complex> roots_of_unity(int m);

struct HarmonicOptions {
  double tol = 1e-10;
  int max_iter = 100000;
  double slack = 1e-12;
  bool record = false;
};

struct HarmonicLimit {
  std::vector<double> values;  // h_V at the samples
  int iterations = 0;
  double residual = 0.0;  // sup |R h - h| at the samples
  std::vector<std::vector<double>> iterates;  // values of R^n 1, n = 0..iterations, when recorded
};

// h_V = lim R_V^n 1.  Checks R_V 1 <= 1 first (std::domain_error naming the sample) and
// monotone decrease at every step (std::logic_error).
HarmonicLimit harmonic_limit(const Discretization<double>& d, const HarmonicOptions& opt = {});
HarmonicLimit harmonic_limit(const Discretization<Complex>& d, const HarmonicOptions& opt = {});

}  // namespace tomra::transfer
