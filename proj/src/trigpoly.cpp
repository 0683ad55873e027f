#include "tomra/trigpoly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tomra {

TrigPoly::TrigPoly(int low, std::vector<Complex> coeffs) : low_(low), c_(std::move(coeffs)) {
  if (c_.empty()) {
    low_ = 0;
    c_.assign(1, Complex(0));
  }
}

Complex TrigPoly::coeff(int k) const {
  if (k < low_ || k > high()) return 0.0;
  return c_[static_cast<std::size_t>(k - low_)];
}

Complex TrigPoly::operator()(Complex z) const {
  // Horner in z, then shift by z^low.
  Complex acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
  if (low_ != 0) acc *= std::pow(z, low_);
  return acc;
}

TrigPoly TrigPoly::operator+(const TrigPoly& o) const {
  int lo = std::min(low_, o.low_), hi = std::max(high(), o.high());
  std::vector<Complex> c(static_cast<std::size_t>(hi - lo + 1));
  for (int k = lo; k <= hi; ++k) c[static_cast<std::size_t>(k - lo)] = coeff(k) + o.coeff(k);
  return TrigPoly(lo, std::move(c));
}

TrigPoly TrigPoly::operator-(const TrigPoly& o) const { return *this + o * Complex(-1.0); }

TrigPoly TrigPoly::operator*(const TrigPoly& o) const {
  std::vector<Complex> c(c_.size() + o.c_.size() - 1);
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < o.c_.size(); ++j) c[i + j] += c_[i] * o.c_[j];
  return TrigPoly(low_ + o.low_, std::move(c));
}

TrigPoly TrigPoly::operator*(Complex s) const {
  std::vector<Complex> c = c_;
  for (auto& x : c) x *= s;
  return TrigPoly(low_, std::move(c));
}

TrigPoly TrigPoly::conj() const {
  std::vector<Complex> c(c_.rbegin(), c_.rend());
  for (auto& x : c) x = std::conj(x);
  return TrigPoly(-high(), std::move(c));
}

TrigPoly TrigPoly::compose_power(int n) const {
  if (n < 1) throw std::invalid_argument("TrigPoly::compose_power: n must be >= 1");
  std::vector<Complex> c((c_.size() - 1) * static_cast<std::size_t>(n) + 1);
  for (std::size_t i = 0; i < c_.size(); ++i) c[i * static_cast<std::size_t>(n)] = c_[i];
  return TrigPoly(low_ * n, std::move(c));
}

static int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

TrigPoly TrigPoly::average_preimages(int n) const {
  if (n < 1) throw std::invalid_argument("TrigPoly::average_preimages: n must be >= 1");
  int lo = -floor_div(-low_, n);  // ceil(low/n)
  int hi = floor_div(high(), n);
  if (hi < lo) return TrigPoly();
  std::vector<Complex> c(static_cast<std::size_t>(hi - lo + 1));
  for (int j = lo; j <= hi; ++j) c[static_cast<std::size_t>(j - lo)] = coeff(j * n);
  return TrigPoly(lo, std::move(c));
}

bool TrigPoly::is_monomial() const {
  int nonzero = 0;
  for (const auto& x : c_)
    if (x != Complex(0)) ++nonzero;
  return nonzero == 1;
}

bool TrigPoly::is_zero(double tol) const { return max_abs_coeff() <= tol; }

double TrigPoly::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& x : c_) m = std::max(m, std::abs(x));
  return m;
}

TrigPoly TrigPoly::trimmed(double tol) const {
  std::size_t first = 0, last = c_.size();
  while (first < last && std::abs(c_[first]) <= tol) ++first;
  while (last > first && std::abs(c_[last - 1]) <= tol) --last;
  if (first == last) return TrigPoly();
  return TrigPoly(low_ + static_cast<int>(first),
                  std::vector<Complex>(c_.begin() + static_cast<long>(first), c_.begin() + static_cast<long>(last)));
}

}  // namespace tomra
