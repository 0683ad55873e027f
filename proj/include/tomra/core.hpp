#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace tomra {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using Complex = std::complex<double>;

// Averaged: R f(x) = (1/c(x)) sum W(y) f(y).  Summed drops the 1/c(x).
enum class Convention { averaged, summed };

inline const char* to_string(Convention c) { return c == Convention::averaged ? "averaged" : "summed"; }

// Iterative solver gave up; carries the last residual it saw.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_residual, int iterations)
      : std::runtime_error(what), last_residual_(last_residual), iterations_(iterations) {}
  double last_residual() const { return last_residual_; }
  int iterations() const { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

// Power iteration detected a second eigenvalue of the same modulus.
class NotIsolatedError : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

// Exact-mode work would exceed the configured budget.
class BudgetError : public std::length_error {
 public:
  using std::length_error::length_error;
};

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

template <class T>
T conj_of(const T& x) {
  if constexpr (is_complex<T>::value)
    return std::conj(x);
  else
    return x;
}

template <class T>
double magnitude(const T& x) {
  if constexpr (is_complex<T>::value)
    return std::abs(x);
  else if constexpr (std::is_same_v<T, Rational>)
    return std::abs(static_cast<double>(x));
  else
    return std::abs(static_cast<double>(x));
}

template <class T>
double to_double(const T& x) {
  if constexpr (is_complex<T>::value)
    return x.real();
  else
    return static_cast<double>(x);
}

// Minimal row-major dense matrix; enough for exact rational work where Eigen is awkward.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0)) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<T> apply(const std::vector<T>& v) const {
    if (v.size() != cols_) throw std::invalid_argument("Matrix::apply: size mismatch");
    std::vector<T> out(rows_, T(0));
    for (std::size_t i = 0; i < rows_; ++i) {
      T s(0);
      for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
      out[i] = s;
    }
    return out;
  }

  // Row vector times matrix.
  std::vector<T> apply_left(const std::vector<T>& v) const {
    if (v.size() != rows_) throw std::invalid_argument("Matrix::apply_left: size mismatch");
    std::vector<T> out(cols_, T(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[j] += v[i] * (*this)(i, j);
    return out;
  }

  Matrix operator*(const Matrix& b) const {
    if (cols_ != b.rows_) throw std::invalid_argument("Matrix product: size mismatch");
    Matrix out(rows_, b.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const T& a = (*this)(i, k);
        if (a == T(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += a * b(k, j);
      }
    return out;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  template <class U>
  Matrix<U> cast() const {
    Matrix<U> m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(i, j) = static_cast<U>((*this)(i, j));
    return m;
  }

  bool operator==(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

template <class T>
Matrix<T> matrix_power(const Matrix<T>& m, int n) {
  if (n < 0) throw std::invalid_argument("matrix_power: negative exponent");
  Matrix<T> result = Matrix<T>::identity(m.rows());
  Matrix<T> base = m;
  while (n > 0) {
    if (n & 1) result = result * base;
    base = base * base;
    n >>= 1;
  }
  return result;
}

std::string rational_string(const Rational& q);

constexpr const char* kVersion = "0.4.1";

}  // namespace tomra
