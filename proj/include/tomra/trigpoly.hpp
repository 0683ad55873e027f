#pragma once

#include "tomra/core.hpp"

#include <complex>
#include <vector>

namespace tomra {

// Laurent polynomial sum_k c_k z^k, k in [low, low + coeffs.size()).  On the circle conj(z) = 1/z.
class TrigPoly {
 public:
  TrigPoly() : low_(0), c_{Complex(0)} {}
  TrigPoly(int low, std::vector<Complex> coeffs);
  static TrigPoly constant(Complex c) { return TrigPoly(0, {c}); }
  static TrigPoly monomial(int k, Complex c = 1.0) { return TrigPoly(k, {c}); }

  int low() const { return low_; }
  int high() const { return low_ + static_cast<int>(c_.size()) - 1; }
  Complex coeff(int k) const;
  const std::vector<Complex>& coeffs() const { return c_; }

  Complex operator()(Complex z) const;
  Complex at_angle(double theta) const { return (*this)(std::polar(1.0, theta)); }

  TrigPoly operator+(const TrigPoly& o) const;
  TrigPoly operator-(const TrigPoly& o) const;
  TrigPoly operator*(const TrigPoly& o) const;
  TrigPoly operator*(Complex s) const;

  // Circle conjugate: sum conj(c_k) z^{-k}.
  TrigPoly conj() const;
  // f(z^n).
  TrigPoly compose_power(int n) const;
  // (1/n) sum_{w^n = z} f(w): keeps coefficients with k divisible by n.
  TrigPoly average_preimages(int n) const;

  bool is_monomial() const;
  bool is_zero(double tol = 0.0) const;
  double max_abs_coeff() const;
  TrigPoly trimmed(double tol = 0.0) const;

 private:
  int low_;
  std::vector<Complex> c_;
};

}  // namespace tomra
