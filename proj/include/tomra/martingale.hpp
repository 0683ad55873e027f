#pragma once

#include "tomra/core.hpp"
#include "tomra/solenoid.hpp"
#include "tomra/symbolic.hpp"
#include "tomra/trigpoly.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace tomra::martingale {

using symbolic::TransitionMatrix;
using symbolic::Word;

template <class Scalar>
Scalar from_rational(const Rational& q) {
  if constexpr (std::is_same_v<Scalar, Rational>)
    return q;
  else
    return Scalar(static_cast<double>(q));
}

// Cylinder functions on X(A) with the strongly invariant measure.  Function levels above max_level
// are refused with BudgetError.
template <class Scalar>
class SubshiftSpace {
 public:
  using Function = symbolic::CylinderFunction<Scalar>;
  using Value = Scalar;

  explicit SubshiftSpace(TransitionMatrix a, int max_level = 10)
      : a_(std::move(a)), max_level_(max_level), mu_(std::make_shared<symbolic::InvariantMeasure>(a_)), cache_(std::make_shared<Cache>()) {}

  const TransitionMatrix& matrix() const { return a_; }
  int max_level() const { return max_level_; }

  symbolic::IndexPtr index(int level) const {
    if (level > max_level_) throw BudgetError("SubshiftSpace: level " + std::to_string(level) + " exceeds the budget " + std::to_string(max_level_));
    auto& slot = cache_->indices[level];
    if (!slot) slot = symbolic::make_index(a_, level);
    return slot;
  }

  Function constant(const Scalar& c) const { return Function::constant(index(1), c); }
  template <class F>
  Function from(int level, F&& f) const {
    return Function::from(index(level), std::forward<F>(f));
  }
  int level(const Function& f) const { return f.level(); }
  Function at_level(const Function& f, int level) const { return level == f.level() ? f : symbolic::refine(f, index(level)); }

  template <class Op>
  Function zip(const Function& a, const Function& b, Op op) const {
    const int l = std::max(a.level(), b.level());
    return from(l, [&](const Word& w) { return op(a(w), b(w)); });
  }
  Function add(const Function& a, const Function& b) const { return zip(a, b, [](const Scalar& x, const Scalar& y) { return x + y; }); }
  Function sub(const Function& a, const Function& b) const { return zip(a, b, [](const Scalar& x, const Scalar& y) { return x - y; }); }
  Function mul(const Function& a, const Function& b) const { return zip(a, b, [](const Scalar& x, const Scalar& y) { return x * y; }); }
  Function scale(const Function& a, const Scalar& s) const {
    Function out = a;
    for (auto& v : out.values) v *= s;
    return out;
  }
  Function conj(const Function& a) const {
    Function out = a;
    for (auto& v : out.values) v = conj_of(v);
    return out;
  }
  // a / b; b must not vanish on any cylinder.
  Function div(const Function& a, const Function& b) const {
    return zip(a, b, [](const Scalar& x, const Scalar& y) {
      if (y == Scalar(0)) throw std::domain_error("SubshiftSpace::div: divisor vanishes on a cylinder");
      return x / y;
    });
  }
  // f o r^k.
  Function compose_r(const Function& f, int k) const {
    if (k == 0) return f;
    return from(f.level() + k, [&](const Word& w) { return f(Word(w.begin() + k, w.end())); });
  }
  // Averaged R_W f: W sees one more symbol than the result's level.
  Function ruelle(const Function& w, const Function& f) const {
    const int l = std::max({1, f.level(), w.level() - 1});
    return from(l, [&](const Word& x) {
      auto pre = symbolic::preimages_word(a_, x);
      Scalar s(0);
      for (const auto& y : pre) s += w(y) * f(y);
      return s / Scalar(static_cast<int>(pre.size()));
    });
  }
  Scalar integrate(const Function& f) const {
    Scalar s(0);
    for (std::size_t i = 0; i < f.index->size(); ++i) s += f.values[i] * from_rational<Scalar>(mu_->mass(f.index->word(i)));
    return s;
  }
  double distance(const Function& a, const Function& b) const {
    double d = 0.0;
    auto diff = sub(a, b);
    for (const auto& v : diff.values) d = std::max(d, magnitude(v));
    return d;
  }
  bool vanishes_somewhere(const Function& f) const {
    for (const auto& v : f.values)
      if (v == Scalar(0)) return true;
    return false;
  }

 private:
  struct Cache {
    std::map<int, symbolic::IndexPtr> indices;
  };
  TransitionMatrix a_;
  int max_level_;
  std::shared_ptr<symbolic::InvariantMeasure> mu_;
  std::shared_ptr<Cache> cache_;
};

// Trigonometric polynomials on the circle with Haar measure and z -> z^N.  Division is exact only by
// monomials.
class CircleSpace {
 public:
  using Function = TrigPoly;
  using Value = Complex;

  explicit CircleSpace(int n, int max_degree = 1 << 14);
  int power() const { return n_; }

  Function constant(Complex c) const { return TrigPoly::constant(c); }
  int level(const Function& f) const { return std::max(std::abs(f.low()), std::abs(f.high())); }
  Function add(const Function& a, const Function& b) const { return a + b; }
  Function sub(const Function& a, const Function& b) const { return a - b; }
  Function mul(const Function& a, const Function& b) const { return checked(a * b); }
  Function scale(const Function& a, Complex s) const { return a * s; }
  Function conj(const Function& a) const { return a.conj(); }
  Function div(const Function& a, const Function& b) const;
  Function compose_r(const Function& f, int k) const;
  Function ruelle(const Function& w, const Function& f) const { return checked(w * f).average_preimages(n_); }
  Complex integrate(const Function& f) const { return f.coeff(0); }
  double distance(const Function& a, const Function& b) const { return (a - b).max_abs_coeff(); }
  bool vanishes_somewhere(const Function& f) const { return f.is_zero(); }

 private:
  Function checked(Function f) const;
  int n_;
  int max_degree_;
};

// (xi_0, ..., xi_M); beyond M, xi_{M+j} = xi_M o r^j.
template <class F>
struct MartingaleVector {
  std::vector<F> levels;
  int top() const { return static_cast<int>(levels.size()) - 1; }
};

// The covariant system (U, pi, phi) of (m0, h) acting on martingale vectors.  The consistency relation
// uses R = R_W with W = |m0|^2 (averaged).
template <class Space>
class CovariantSystem {
 public:
  using F = typename Space::Function;
  using Scalar = typename Space::Value;
  using Vector = MartingaleVector<F>;

  CovariantSystem(Space space, F m0, F h, double tol = 1e-10)
      : space_(std::move(space)), m0_(std::move(m0)), h_(std::move(h)), w_(space_.mul(space_.conj(m0_), m0_)), tol_(tol) {
    double res = space_.distance(space_.ruelle(w_, h_), h_);
    if (res > tol_) throw std::domain_error("CovariantSystem: R_W h != h (residual " + std::to_string(res) + ")");
  }

  const Space& space() const { return space_; }
  const F& m0() const { return m0_; }
  const F& h() const { return h_; }
  const F& weight() const { return w_; }
  bool singular() const { return space_.vanishes_somewhere(m0_); }

  F ruelle_power(F f, int n) const {
    for (int k = 0; k < n; ++k) f = space_.ruelle(w_, f);
    return f;
  }

  // int R^n(f h) dmu.
  Scalar omega(const F& f, int n) const { return space_.integrate(ruelle_power(space_.mul(f, h_), n)); }

  F at(const Vector& v, int n) const {
    if (v.levels.empty()) throw std::invalid_argument("MartingaleVector: empty");
    return n <= v.top() ? v.levels[static_cast<std::size_t>(n)] : space_.compose_r(v.levels.back(), n - v.top());
  }

  Vector phi() const { return Vector{{space_.constant(Scalar(1))}}; }

  // xi_n = f, xi_k = R^{n-k}(f h) / h below.
  Vector embed(const F& f, int n) const {
    if (n < 0) throw std::invalid_argument("embed: level must be >= 0");
    Vector v;
    v.levels.resize(static_cast<std::size_t>(n) + 1);
    v.levels[static_cast<std::size_t>(n)] = f;
    F fh = space_.mul(f, h_);
    for (int k = n - 1; k >= 0; --k) {
      fh = space_.ruelle(w_, fh);
      v.levels[static_cast<std::size_t>(k)] = space_.div(fh, h_);
    }
    return v;
  }

  // max_n dist(R(xi_{n+1} h), xi_n h).
  double consistency_residual(const Vector& v) const {
    double worst = 0.0;
    for (int n = 0; n < v.top(); ++n)
      worst = std::max(worst, space_.distance(space_.ruelle(w_, space_.mul(at(v, n + 1), h_)), space_.mul(at(v, n), h_)));
    return worst;
  }

  Scalar inner_product(const Vector& a, const Vector& b) const {
    const int n = std::max(a.top(), b.top());
    Scalar v0 = pairing(a, b, n), v1 = pairing(a, b, n + 1);
    if (magnitude(v0 - v1) > tol_ * std::max(1.0, magnitude(v0)))
      throw std::logic_error("inner_product: value is not stationary (" + std::to_string(magnitude(v0 - v1)) + "); inconsistent vector");
    return v0;
  }
  double norm(const Vector& v) const { return std::sqrt(std::max(0.0, to_double(inner_product(v, v)))); }

  // (U xi)_n = m0 o r^n xi_{n+1}.
  Vector U(const Vector& v) const {
    Vector out;
    for (int n = 0; n <= v.top(); ++n) out.levels.push_back(space_.mul(space_.compose_r(m0_, n), at(v, n + 1)));
    return verified(out, "U");
  }
  // (U^{-1} xi)_{n+1} = xi_n / m0 o r^n, and xi_0 from consistency.
  Vector U_inverse(const Vector& v) const {
    if (singular()) throw std::domain_error("U_inverse: m0 is singular");
    Vector out;
    out.levels.resize(static_cast<std::size_t>(v.top()) + 2);
    for (int n = 0; n <= v.top(); ++n)
      out.levels[static_cast<std::size_t>(n) + 1] = space_.div(v.levels[static_cast<std::size_t>(n)], space_.compose_r(m0_, n));
    out.levels[0] = space_.div(space_.ruelle(w_, space_.mul(out.levels[1], h_)), h_);
    return verified(out, "U_inverse");
  }
  // (pi(g) xi)_n = g o r^n xi_n.
  Vector pi(const F& g, const Vector& v) const {
    Vector out;
    for (int n = 0; n <= v.top(); ++n) out.levels.push_back(space_.mul(space_.compose_r(g, n), v.levels[static_cast<std::size_t>(n)]));
    return verified(out, "pi");
  }

  Vector add(const Vector& a, const Vector& b) const { return combine(a, b, [&](const F& x, const F& y) { return space_.add(x, y); }); }
  Vector sub(const Vector& a, const Vector& b) const { return combine(a, b, [&](const F& x, const F& y) { return space_.sub(x, y); }); }
  Vector scale(const Vector& a, const Scalar& s) const {
    Vector out = a;
    for (auto& f : out.levels) f = space_.scale(f, s);
    return out;
  }

 private:
  Scalar pairing(const Vector& a, const Vector& b, int n) const {
    return space_.integrate(ruelle_power(space_.mul(space_.mul(space_.conj(at(a, n)), at(b, n)), h_), n));
  }
  template <class Op>
  Vector combine(const Vector& a, const Vector& b, Op op) const {
    Vector out;
    const int m = std::max(a.top(), b.top());
    for (int n = 0; n <= m; ++n) out.levels.push_back(op(at(a, n), at(b, n)));
    return out;
  }
  Vector verified(Vector v, const char* what) const {
    double res = consistency_residual(v);
    if (res > tol_) throw std::logic_error(std::string(what) + ": result violates consistency (residual " + std::to_string(res) + ")");
    return v;
  }

  Space space_;
  F m0_, h_, w_;
  double tol_;
};

// sum_j |<pi(z^j) phi, v>|^2 + sum_{k < levels} sum_j |<U^{-k} pi(z^j) psi, v>|^2 with psi = U^{-1} pi(m1) phi,
// |j| <= jmax.  Equals ||v||^2 when the filters form an orthonormal pair and v lies in the truncation.
double parseval_sum(const CovariantSystem<CircleSpace>& cs, const TrigPoly& m1, const MartingaleVector<TrigPoly>& v, int levels, int jmax);

// ---- multiplicity functions ----

struct MultiplicityFunction {
  symbolic::IndexPtr index;
  std::vector<long> values;
  long operator()(const Word& x) const { return values[index->index_of(x)]; }
};

struct MultiplicityCheck {
  MultiplicityFunction mV1;  // sum over preimages of mV0
  MultiplicityFunction mW0;  // mV1 - mV0
  bool exact = true;         // false when mW0 is negative somewhere
  std::vector<Word> witnesses;
};

// Level-L tables: mV1(x) = sum_{r(y)=x} mV0(y) reads the first L-1 symbols of x, stored at level L.
MultiplicityCheck multiplicity_sum_check(const MultiplicityFunction& mV0);

// ---- harmonic functions and cocycles ----

struct CocycleReport {
  std::vector<int> depths;
  std::vector<std::vector<double>> ratios;  // per path: (h0/h)(x_d) for each depth d
  std::vector<double> median_delta;         // median |ratio(d_i) - ratio(d_{i-1})| for i >= 1
  std::vector<double> limits;               // ratio at the last depth
  double invariance = 0.0;                  // mean |f - f o r-hat| at the last depth: |q(x_D) - q(x_{D-1})|
  double harmonic_residual = 0.0;           // max |R h0 - h0| at the check points
  double bound = 0.0;                       // max |h0|^2 / h^2 at the check points
};

// Records (h0/h)(x_n) along sampled paths of the lift.  h0 must satisfy R_V h0 = h0 with V the lift's weight.
CocycleReport harmonic_to_cocycle(const std::function<double(Complex)>& h0, const std::function<double(Complex)>& h, const solenoid::CircleLift& lift,
                                  std::vector<int> depths, std::size_t paths, std::uint64_t seed, double tol = 1e-9);

// Second bounded harmonic function of the stretched Haar weight |1 + z^2|^2 / 2 with h = 1 + cos:
// h0(theta) = sin^2(theta) psi_1(theta / 2 pi) / (2 pi^2), theta in (0, 2 pi), and h0(1) = 2.
double stretched_haar_harmonic(Complex z);

}  // namespace tomra::martingale
