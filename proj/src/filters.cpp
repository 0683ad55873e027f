#include "tomra/filters.hpp"

#include "tomra/transfer.hpp"

#include <cmath>
#include <numbers>
#include <regex>

namespace tomra::filters {

double ScalingCoefficients::energy() const {
  double s = 0.0;
  for (const auto& a : taps) s += std::norm(a);
  return s;
}

bool LowPassFilter::lowpass_normalized(double tol) const { return std::abs(value_at_one - std::sqrt(static_cast<double>(N))) <= tol; }

LowPassFilter filter_from_coeffs(const ScalingCoefficients& a, int n) {
  if (a.taps.empty()) throw std::invalid_argument("filter_from_coeffs: empty coefficient list");
  if (n < 2) throw std::invalid_argument("filter_from_coeffs: N must be >= 2");
  LowPassFilter f;
  f.poly = a.polynomial();
  f.N = n;
  f.value_at_one = f.poly(1.0);
  int nonzero = 0;
  for (const auto& t : a.taps)
    if (t != Complex(0)) ++nonzero;
  f.singular = nonzero == 0;
  f.trivial = nonzero == 1;
  if (nonzero >= 2) {
    // Zeros of the ordinary polynomial z^{-offset} m0(z), nonzero roots only.
    auto trimmed = f.poly.trimmed();
    std::vector<Complex> c = trimmed.coeffs();
    for (const auto& z : complexdyn::polynomial_roots(c))
      if (std::abs(std::abs(z) - 1.0) <= 1e-8) f.unit_circle_zeros.push_back(z);
    std::sort(f.unit_circle_zeros.begin(), f.unit_circle_zeros.end(), complexdyn::BranchLabeling{});
  }
  return f;
}

CircleFilterSystem from_polynomials(std::string name, int n, std::vector<TrigPoly> m, TrigPoly h) {
  CircleFilterSystem f;
  f.name = std::move(name);
  f.N = n;
  for (const auto& p : m) f.m.push_back([p](const Complex& z) { return p(z); });
  f.h = [h](const Complex& z) { return h(z).real(); };
  f.lowpass_singular = m.empty() || m.front().is_zero();
  f.polys = std::move(m);
  f.h_poly = std::move(h);
  return f;
}

namespace {

CircleFilterSystem validated(CircleFilterSystem f) {
  complexdyn::CircleMap sys(f.N);
  double r = qmf_residual(f, sys, transfer::roots_of_unity(1024));
  if (!(r <= 1e-12)) throw std::logic_error("preset " + f.name + " fails the QMF identity, residual " + std::to_string(r));
  return f;
}

const double kRoot2 = std::numbers::sqrt2;

}  // namespace

CircleFilterSystem classical_filters(int n) {
  if (n < 2) throw std::invalid_argument("classical(N): N must be >= 2");
  std::vector<TrigPoly> m;
  for (int k = 0; k < n; ++k) m.push_back(TrigPoly::monomial(k));
  return validated(from_polynomials("classical(" + std::to_string(n) + ")", n, std::move(m)));
}

CircleFilterSystem haar_filters() {
  return validated(from_polynomials("haar", 2, {TrigPoly(0, {1 / kRoot2, 1 / kRoot2}), TrigPoly(0, {1 / kRoot2, -1 / kRoot2})}));
}

// Low-pass only: no bounded m1 completes (1+z^2)/sqrt2 against h = 1 + Re z.
CircleFilterSystem stretched_haar_filters() {
  return validated(from_polynomials("stretched_haar", 2, {TrigPoly(0, {1 / kRoot2, 0.0, 1 / kRoot2})}, TrigPoly(-1, {0.5, 1.0, 0.5})));
}

CircleFilterSystem cantor_filters() {
  return validated(from_polynomials(
      "cantor", 3, {TrigPoly(0, {1 / kRoot2, 0.0, 1 / kRoot2}), TrigPoly(0, {1 / kRoot2, 0.0, -1 / kRoot2}), TrigPoly::monomial(1)}));
}

CircleFilterSystem preset_filters(const std::string& name) {
  static const std::regex classical(R"(classical[(:](\d+)\)?)");
  std::smatch m;
  if (std::regex_match(name, m, classical)) return classical_filters(std::stoi(m[1].str()));
  if (name == "haar") return haar_filters();
  if (name == "stretched_haar" || name == "stretched-haar") return stretched_haar_filters();
  if (name == "cantor") return cantor_filters();
  throw std::invalid_argument("preset_filters: unknown preset '" + name + "'");
}

LoopGroupElement::LoopGroupElement(std::vector<double> breakpoints, std::vector<Eigen::MatrixXcd> matrices)
    : breaks_(std::move(breakpoints)), cells_(std::move(matrices)) {
  if (breaks_.empty() || breaks_.size() != cells_.size())
    throw std::invalid_argument("LoopGroupElement: need one matrix per breakpoint");
  if (breaks_.front() != 0.0) throw std::invalid_argument("LoopGroupElement: first breakpoint must be 0");
  for (std::size_t i = 1; i < breaks_.size(); ++i)
    if (!(breaks_[i] > breaks_[i - 1]) || breaks_[i] >= 2 * std::numbers::pi)
      throw std::invalid_argument("LoopGroupElement: breakpoints must increase within [0, 2pi)");
  const auto n = cells_.front().rows();
  for (const auto& c : cells_)
    if (c.rows() != n || c.cols() != n || n < 1) throw std::invalid_argument("LoopGroupElement: cells must be square of one size");
}

std::size_t LoopGroupElement::cell_of(Complex x) const {
  double t = std::arg(x);
  if (t < 0) t += 2 * std::numbers::pi;
  // rounding in r(y) can leave 1 just below the positive real axis
  if (t > 2 * std::numbers::pi - 1e-12) t = 0.0;
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  return static_cast<std::size_t>(it - breaks_.begin()) - 1;
}

double LoopGroupElement::unitarity_defect() const {
  double worst = 0.0;
  for (const auto& c : cells_) {
    Eigen::MatrixXcd d = c * c.adjoint() - Eigen::MatrixXcd::Identity(c.rows(), c.cols());
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(d);
    worst = std::max(worst, svd.singularValues()(0));
  }
  return worst;
}

LoopGroupElement LoopGroupElement::operator*(const LoopGroupElement& o) const {
  if (dim() != o.dim()) throw std::invalid_argument("LoopGroupElement product: dimension mismatch");
  std::vector<double> merged = breaks_;
  merged.insert(merged.end(), o.breaks_.begin(), o.breaks_.end());
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  std::vector<Eigen::MatrixXcd> cells;
  for (double b : merged) {
    // Locate by the breakpoint itself; a polar/arg round trip can land just below b.
    auto locate = [b](const std::vector<double>& br) {
      return static_cast<std::size_t>(std::upper_bound(br.begin(), br.end(), b) - br.begin()) - 1;
    };
    cells.push_back(cells_[locate(breaks_)] * o.cells_[locate(o.breaks_)]);
  }
  return LoopGroupElement(std::move(merged), std::move(cells));
}

Eigen::MatrixXcd random_unitary(int n, Engine& rng) {
  Eigen::MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = Complex(standard_normal(rng), standard_normal(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix column phases so the distribution is Haar.
  for (int j = 0; j < n; ++j) {
    Complex d = r(j, j);
    q.col(j) *= (std::abs(d) > 0 ? d / std::abs(d) : Complex(1.0));
  }
  return q;
}

LoopGroupElement random_loop_element(int n, int cells, Engine& rng) {
  if (cells < 1) throw std::invalid_argument("random_loop_element: need at least one cell");
  std::vector<double> br{0.0};
  for (int k = 1; k < cells; ++k) br.push_back(2 * std::numbers::pi * uniform01(rng));
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  std::vector<Eigen::MatrixXcd> mats;
  for (std::size_t k = 0; k < br.size(); ++k) mats.push_back(random_unitary(n, rng));
  return LoopGroupElement(std::move(br), std::move(mats));
}

CircleFilterSystem loop_group_apply(const LoopGroupElement& a, const CircleFilterSystem& f, const complexdyn::CircleMap& sys, double tol) {
  if (static_cast<std::size_t>(a.dim()) != f.m.size())
    throw std::invalid_argument("loop_group_apply: element has dimension " + std::to_string(a.dim()) + " but the system has " +
                                std::to_string(f.m.size()) + " filters");
  double defect = a.unitarity_defect();
  if (!(defect <= tol)) throw std::domain_error("loop_group_apply: element is not unitary (defect " + std::to_string(defect) + ")");
  CircleFilterSystem out;
  out.name = f.name + "^A";
  out.N = f.N;
  out.h = f.h;
  out.h_poly = f.h_poly;
  out.lowpass = f.lowpass;
  auto filters = f.m;
  for (int i = 0; i < a.dim(); ++i)
    out.m.push_back([a, filters, sys, i](const Complex& x) {
      const auto& mat = a(sys.map(x));
      Complex s = 0.0;
      for (std::size_t j = 0; j < filters.size(); ++j) s += mat(i, static_cast<Eigen::Index>(j)) * filters[j](x);
      return s;
    });
  out.lowpass_singular = false;
  return out;
}

namespace {
bool is_power_of(int v, int n) {
  if (v < 1) return false;
  while (v % n == 0) v /= n;
  return v == 1;
}
}  // namespace

CascadeResult cascade_approx(const ScalingCoefficients& a, int n, int iterations, int samples_per_unit) {
  if (a.taps.empty()) throw std::invalid_argument("cascade_approx: empty coefficient list");
  if (a.offset < 0) throw std::invalid_argument("cascade_approx: coefficients must start at a non-negative index");
  if (n < 2) throw std::invalid_argument("cascade_approx: N must be >= 2");
  if (iterations < 0) throw std::invalid_argument("cascade_approx: iterations must be >= 0");
  if (!is_power_of(samples_per_unit, n))
    throw std::invalid_argument("cascade_approx: " + std::to_string(samples_per_unit) + " samples per unit is not a power of " + std::to_string(n));
  const int top = a.offset + static_cast<int>(a.taps.size()) - 1;
  CascadeResult out;
  out.N = n;
  out.samples_per_unit = samples_per_unit;
  out.support = std::max(1, (top + n - 2) / (n - 1));
  const int size = out.support * samples_per_unit;
  for (int j = 0; j < size; ++j) out.x.push_back(static_cast<double>(j) / samples_per_unit);

  const double scale = std::sqrt(static_cast<double>(n));
  auto step = [&](const std::vector<Complex>& phi) {
    std::vector<Complex> next(static_cast<std::size_t>(size), 0.0);
    for (int j = 0; j < size; ++j) {
      Complex s = 0.0;
      for (std::size_t t = 0; t < a.taps.size(); ++t) {
        // N x_j - k on the same grid.
        long idx = static_cast<long>(n) * j - static_cast<long>(a.offset + static_cast<int>(t)) * samples_per_unit;
        if (idx >= 0 && idx < size) s += a.taps[t] * phi[static_cast<std::size_t>(idx)];
      }
      next[static_cast<std::size_t>(j)] = scale * s;
    }
    return next;
  };
  auto residual = [](const std::vector<Complex>& p, const std::vector<Complex>& q) {
    double r = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) r = std::max(r, std::abs(p[i] - q[i]));
    return r;
  };

  std::vector<Complex> phi(static_cast<std::size_t>(size), 0.0);
  for (int j = 0; j < samples_per_unit; ++j) phi[static_cast<std::size_t>(j)] = 1.0;
  auto next = step(phi);
  out.residual_history.push_back(residual(phi, next));
  for (int m = 0; m < iterations; ++m) {
    phi = std::move(next);
    next = step(phi);
    out.residual_history.push_back(residual(phi, next));
  }
  out.values = std::move(phi);
  out.residual = out.residual_history.back();
  return out;
}

}  // namespace tomra::filters
