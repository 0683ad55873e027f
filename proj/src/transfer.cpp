#include "tomra/transfer.hpp"

#include <algorithm>
#include <numbers>

namespace tomra::transfer {

SubshiftSystem::Point SubshiftSystem::map(const Point& x) const {
  if (x.empty()) throw std::invalid_argument("SubshiftSystem::map: empty prefix");
  return Point(x.begin() + 1, x.end());
}

namespace {

template <class T>
double sup_norm(const std::vector<T>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, magnitude(x));
  return m;
}

template <class T>
double sup_diff(const std::vector<T>& a, const std::vector<T>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, magnitude(a[i] - b[i]));
  return m;
}

// Scale so the entry of largest modulus becomes 1; removes sign and phase drift.
template <class T>
T normalize_by_peak(std::vector<T>& v) {
  std::size_t peak = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (magnitude(v[i]) > magnitude(v[peak]) * (1.0 + 1e-12)) peak = i;
  T p = v[peak];
  if (magnitude(p) == 0.0) throw std::domain_error("pf_solve: iterate collapsed to zero (operator is nilpotent on the start vector)");
  for (auto& x : v) x /= p;
  return p;
}

template <class T>
struct PowerResult {
  std::vector<T> v;
  T lambda;
  double residual;
  int iterations;
};

template <class T>
PowerResult<T> power_iterate(const Matrix<T>& a, bool left, const PFOptions& opt) {
  const std::size_t n = a.rows();
  std::vector<T> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = T(1.0 + 0.25 * static_cast<double>((i * 7919) % 11) / 11.0);
  normalize_by_peak(v);
  auto step = [&](const std::vector<T>& x) { return left ? a.apply_left(x) : a.apply(x); };

  std::vector<T> prev, prev2;
  int oscillating = 0;
  double residual = INFINITY;
  for (int it = 1; it <= opt.max_iter; ++it) {
    std::vector<T> w = step(v);
    // Eigenvalue estimate at the peak of v (v is peak-normalized, so v[peak] = 1).
    std::size_t peak = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (magnitude(v[i]) > magnitude(v[peak])) peak = i;
    T lambda = w[peak] / v[peak];
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, magnitude(w[i] - lambda * v[i]));
    if (residual <= opt.tol) return {v, lambda, residual, it};

    normalize_by_peak(w);
    prev2 = std::move(prev);
    prev = std::move(v);
    v = std::move(w);
    if (!prev2.empty()) {
      double d1 = sup_diff(v, prev), d2 = sup_diff(v, prev2);
      if (it > 10 && d1 > 1e3 * opt.tol && d2 <= 1e-3 * d1)
        ++oscillating;
      else
        oscillating = 0;
      if (oscillating >= 20)
        throw NotIsolatedError(
            "pf_solve: iterates oscillate with period 2; the dominant eigenvalue is not isolated "
            "(the transition structure must be aperiodic)",
            residual, it);
    }
  }
  throw ConvergenceError("pf_solve: no convergence after " + std::to_string(opt.max_iter) + " iterations", residual, opt.max_iter);
}

template <class T>
PFData<T> pf_solve_impl(const Matrix<T>& a, const PFOptions& opt) {
  if (a.rows() != a.cols() || a.rows() == 0) throw std::invalid_argument("pf_solve: operator must be square and non-empty");
  auto right = power_iterate(a, false, opt);
  auto left = power_iterate(a, true, opt);
  T lambda = right.lambda;
  if (magnitude(lambda) == 0.0) throw std::domain_error("pf_solve: dominant eigenvalue is zero");
  if (std::abs(std::arg(std::complex<double>(lambda))) > 1e-8)
    throw std::domain_error("pf_solve: dominant eigenvalue is not real and positive");

  PFData<T> out;
  out.lambda0 = to_double(lambda);
  out.h = right.v;
  out.nu = left.v;
  T total(0);
  for (const auto& x : out.nu) total += x;
  if (magnitude(total) > 1e-300)
    for (auto& x : out.nu) x /= total;
  T pairing(0);
  for (std::size_t i = 0; i < out.h.size(); ++i) pairing += out.nu[i] * out.h[i];
  if (magnitude(pairing) == 0.0) throw std::domain_error("pf_solve: left and right eigenvectors are orthogonal");
  for (auto& x : out.h) x /= pairing;

  auto rh = a.apply(out.h);
  auto ln = a.apply_left(out.nu);
  for (std::size_t i = 0; i < out.h.size(); ++i) {
    out.residual_right = std::max(out.residual_right, magnitude(rh[i] - lambda * out.h[i]));
    out.residual_left = std::max(out.residual_left, magnitude(ln[i] - lambda * out.nu[i]));
  }
  T check(0);
  for (std::size_t i = 0; i < out.h.size(); ++i) check += out.nu[i] * out.h[i];
  out.normalization_error = magnitude(check - T(1));
  out.iterations = std::max(right.iterations, left.iterations);
  return out;
}

}  // namespace

PFData<double> pf_solve(const Matrix<double>& op, const PFOptions& opt) { return pf_solve_impl(op, opt); }
PFData<Complex> pf_solve(const Matrix<Complex>& op, const PFOptions& opt) { return pf_solve_impl(op, opt); }

Discretization<double> cylinder_discretization(const symbolic::CylinderIndex& idx, const Matrix<double>& op) {
  if (op.rows() != idx.size() || op.cols() != idx.size()) throw std::invalid_argument("cylinder_discretization: size mismatch");
  Discretization<double> d;
  d.op = op;
  d.one.assign(idx.size(), 1.0);
  d.evaluate = Matrix<double>::identity(idx.size());
  for (const auto& w : idx.words()) d.labels.push_back(symbolic::word_string(w));
  return d;
}

Matrix<Complex> fourier_operator(const TrigPoly& v, int n, int k) {
  if (n < 2) throw std::invalid_argument("fourier_operator: N must be >= 2");
  const int dv = std::max(std::abs(v.low()), std::abs(v.high()));
  if (k < 0 || static_cast<long>(k) * (n - 1) < dv)
    throw std::invalid_argument("fourier_operator: degree " + std::to_string(k) + " is not invariant for a weight of degree " + std::to_string(dv));
  const std::size_t size = static_cast<std::size_t>(2 * k + 1);
  Matrix<Complex> m(size, size, 0.0);
  for (int j = -k; j <= k; ++j)
    for (int i = -k; i <= k; ++i) m(static_cast<std::size_t>(j + k), static_cast<std::size_t>(i + k)) = v.coeff(n * j - i);
  return m;
}

Matrix<Complex> fourier_evaluation(int k, const std::vector<Complex>& points) {
  Matrix<Complex> e(points.size(), static_cast<std::size_t>(2 * k + 1), 0.0);
  for (std::size_t s = 0; s < points.size(); ++s) {
    double theta = std::arg(points[s]);
    for (int i = -k; i <= k; ++i) e(s, static_cast<std::size_t>(i + k)) = std::polar(1.0, i * theta);
  }
  return e;
}

std::vector<Complex> fourier_coefficients_of(const TrigPoly& f, int k) {
  if (f.low() < -k || f.high() > k) throw std::invalid_argument("fourier_coefficients_of: degree exceeds truncation");
  std::vector<Complex> c(static_cast<std::size_t>(2 * k + 1), 0.0);
  for (int i = -k; i <= k; ++i) c[static_cast<std::size_t>(i + k)] = f.coeff(i);
  return c;
}

TrigPoly fourier_to_trigpoly(const std::vector<Complex>& c) {
  const int k = (static_cast<int>(c.size()) - 1) / 2;
  return TrigPoly(-k, c);
}

Discretization<Complex> fourier_discretization(const TrigPoly& v, int n, int k, const std::vector<Complex>& samples) {
  Discretization<Complex> d;
  d.op = fourier_operator(v, n, k);
  d.one = fourier_coefficients_of(TrigPoly::constant(1.0), k);
  d.evaluate = fourier_evaluation(k, samples);
  for (const auto& z : samples) d.labels.push_back("theta=" + std::to_string(std::arg(z)));
  return d;
}

std::vector<Complex> roots_of_unity(int m) {
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) out.push_back(std::polar(1.0, 2.0 * std::numbers::pi * j / m));
  return out;
}

namespace {

template <class T>
std::vector<double> sample_values(const Discretization<T>& d, const std::vector<T>& coeffs) {
  auto raw = d.evaluate.apply(coeffs);
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if constexpr (is_complex<T>::value) {
      if (std::abs(raw[i].imag()) > 1e-9 * (1.0 + std::abs(raw[i].real())))
        throw std::domain_error("harmonic_limit: iterate is not real at " + d.labels[i] + "; the weight must be real-valued");
      out[i] = raw[i].real();
    } else {
      out[i] = raw[i];
    }
  }
  return out;
}

template <class T>
HarmonicLimit harmonic_impl(const Discretization<T>& d, const HarmonicOptions& opt) {
  std::vector<T> g = d.one;
  std::vector<double> gv = sample_values(d, g);
  HarmonicLimit out;
  if (opt.record) out.iterates.push_back(gv);

  for (int it = 1; it <= opt.max_iter; ++it) {
    std::vector<T> next = d.op.apply(g);
    std::vector<double> nv = sample_values(d, next);
    double step = 0.0;
    for (std::size_t i = 0; i < nv.size(); ++i) {
      if (it == 1 && nv[i] > 1.0 + opt.slack)
        throw std::domain_error("harmonic_limit: (1/c) sum V(y) = " + std::to_string(nv[i]) + " > 1 at " + d.labels[i] +
                                "; the weight is not sub-probability");
      if (nv[i] > gv[i] + opt.slack)
        throw std::logic_error("harmonic_limit: iterate " + std::to_string(it) + " increased at " + d.labels[i] + " by " +
                               std::to_string(nv[i] - gv[i]));
      step = std::max(step, std::abs(nv[i] - gv[i]));
    }
    if (opt.record) out.iterates.push_back(nv);
    if (step <= opt.tol) {
      // R g - g = next - g, so the step is the eigen-residual of g.
      out.values = gv;
      out.iterations = it - 1;
      out.residual = step;
      return out;
    }
    g = std::move(next);
    gv = std::move(nv);
  }
  throw ConvergenceError("harmonic_limit: no convergence after " + std::to_string(opt.max_iter) + " iterations", INFINITY, opt.max_iter);
}

}  // namespace

HarmonicLimit harmonic_limit(const Discretization<double>& d, const HarmonicOptions& opt) { return harmonic_impl(d, opt); }
HarmonicLimit harmonic_limit(const Discretization<Complex>& d, const HarmonicOptions& opt) { return harmonic_impl(d, opt); }

}  // namespace tomra::transfer
