#include "tomra/cantor.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tomra::cantor {

std::uint64_t pow3(int n) {
  if (n < 0 || n > 39) throw std::out_of_range("pow3: exponent outside [0, 39]");
  std::uint64_t p = 1;
  for (int i = 0; i < n; ++i) p *= 3;
  return p;
}

TriadicInterval::TriadicInterval(int n, std::uint64_t k) : level(n), index(k) {
  if (k >= pow3(n)) throw std::out_of_range("TriadicInterval: index must be below 3^level");
}

Rational TriadicInterval::left() const { return Rational(index) / Rational(pow3(level)); }
Rational TriadicInterval::right() const { return Rational(index + 1) / Rational(pow3(level)); }

std::vector<int> TriadicInterval::digits() const {
  std::vector<int> d(static_cast<std::size_t>(level));
  std::uint64_t k = index;
  for (int i = level - 1; i >= 0; --i) {
    d[static_cast<std::size_t>(i)] = static_cast<int>(k % 3);
    k /= 3;
  }
  return d;
}

bool TriadicInterval::admissible() const {
  for (std::uint64_t k = index; k > 0; k /= 3)
    if (k % 3 == 1) return false;
  return true;
}

std::array<TriadicInterval, 3> TriadicInterval::children() const {
  return {TriadicInterval(level + 1, 3 * index), TriadicInterval(level + 1, 3 * index + 1), TriadicInterval(level + 1, 3 * index + 2)};
}

double hausdorff_dimension() { return std::numbers::ln2 / std::log(3.0); }

Rational cantor_measure(const TriadicInterval& i) {
  if (!i.admissible()) return 0;
  return Rational(1) / Rational(std::uint64_t{1} << i.level);
}

Rational additivity_defect(int n) {
  if (n < 0 || n > 20) throw std::out_of_range("additivity_defect: level outside [0, 20]");
  Rational worst = 0;
  for (std::uint64_t k = 0; k < pow3(n); ++k) {
    TriadicInterval i(n, k);
    Rational s = 0;
    for (const auto& c : i.children()) s += cantor_measure(c);
    worst = std::max(worst, Rational(abs(cantor_measure(i) - s)));
  }
  return worst;
}

int approximant_indicator(int n, std::int64_t num, int m) {
  if (n < 0 || m < 0) throw std::invalid_argument("approximant_indicator: negative level");
  if (num < 0) return 0;
  // cell index floor(num * 3^n / 3^m) at level n
  std::uint64_t k;
  if (m >= n) {
    k = static_cast<std::uint64_t>(num) / pow3(m - n);
  } else {
    const std::uint64_t p = pow3(n - m);
    if (static_cast<std::uint64_t>(num) > pow3(39) / p) return 0;
    k = static_cast<std::uint64_t>(num) * p;
  }
  if (k >= pow3(n)) return 0;
  return TriadicInterval(n, k).admissible() ? 1 : 0;
}

long scaling_identity_residual(int n) {
  if (n < 1 || n > 18) throw std::out_of_range("scaling_identity_residual: level outside [1, 18]");
  const std::int64_t top = static_cast<std::int64_t>(3 * pow3(n));
  const std::int64_t two = static_cast<std::int64_t>(2 * pow3(n));
  long worst = 0;
  for (std::int64_t k = 0; k < top; ++k) {
    // x = k / 3^n, so x/3 = k / 3^(n+1) and x - 2 = (k - 2 * 3^n) / 3^n
    const int lhs = approximant_indicator(n, k, n + 1);
    const int rhs = approximant_indicator(n - 1, k, n) + approximant_indicator(n - 1, k - two, n);
    worst = std::max(worst, static_cast<long>(std::abs(lhs - rhs)));
  }
  return worst;
}

filters::CircleFilterSystem cantor_filter_system() {
  auto f = filters::cantor_filters();
  if (std::abs(f.polys.front()(Complex(1.0)) - std::numbers::sqrt2) > 1e-14)
    throw std::logic_error("cantor_filter_system: m0(1) must be sqrt 2");
  return f;
}

double ScaledValue::value() const {
  return std::sqrt(static_cast<double>(scale2)) * static_cast<double>(coefficient);
}

std::array<ExactFilter, 3> cantor_exact_filters() {
  return {ExactFilter{Rational(1, 2), {1, 0, 1}}, ExactFilter{Rational(1, 2), {1, 0, -1}}, ExactFilter{Rational(1), {0, 1, 0}}};
}

ScaledFunction scaling_function(std::int64_t k) {
  ScaledFunction f;
  f.cells[k] = 1;
  return f;
}

ScaledFunction detail_function(int i, int j, std::int64_t k) {
  if (i != 1 && i != 2) throw std::invalid_argument("detail_function: i must be 1 or 2");
  if (j < 0 || j > 30) throw std::out_of_range("detail_function: scale outside [0, 30]");
  const auto m = cantor_exact_filters()[static_cast<std::size_t>(i)];
  ScaledFunction f;
  // psi_i(3^j x - k) = sqrt(2 * scale2) sum_t a_t chi_(j+1, 3k+t); the 2^{j/2} factor normalizes
  f.scale2 = 2 * m.scale2 * Rational(std::uint64_t{1} << j);
  f.level = j + 1;
  for (std::size_t t = 0; t < m.taps.size(); ++t)
    if (m.taps[t] != 0) f.cells[3 * k + static_cast<std::int64_t>(t)] += m.taps[t];
  return f;
}

ScaledFunction refine(const ScaledFunction& f, int level) {
  if (level < f.level) throw std::invalid_argument("refine: target level is coarser than the function");
  ScaledFunction out = f;
  while (out.level < level) {
    ScaledFunction next;
    next.scale2 = out.scale2;
    next.level = out.level + 1;
    for (const auto& [k, c] : out.cells) {
      next.cells[3 * k] += c;
      next.cells[3 * k + 2] += c;
    }
    out = std::move(next);
  }
  return out;
}

ScaledValue inner_product(const ScaledFunction& f, const ScaledFunction& g) {
  const int level = std::max(f.level, g.level);
  ScaledFunction fa, gb;
  const ScaledFunction& a = f.level == level ? f : (fa = refine(f, level));
  const ScaledFunction& b = g.level == level ? g : (gb = refine(g, level));
  std::int64_t s = 0;
  auto ia = a.cells.begin();
  auto ib = b.cells.begin();
  while (ia != a.cells.end() && ib != b.cells.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      s += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return {a.scale2 * b.scale2, Rational(s) / Rational(std::uint64_t{1} << level)};
}

OrthogonalityReport detail_orthogonality(int n) {
  if (n < 1 || n > 8) throw std::out_of_range("detail_orthogonality: level outside [1, 8]");
  std::vector<std::pair<std::string, ScaledFunction>> family;
  family.emplace_back("phi", refine(scaling_function(0), n));
  for (int j = 0; j < n; ++j)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(pow3(j)); ++k)
      for (int i = 1; i <= 2; ++i)
        family.emplace_back("psi" + std::to_string(i) + "(3^" + std::to_string(j) + "x-" + std::to_string(k) + ")",
                            refine(detail_function(i, j, k), n));

  OrthogonalityReport out;
  out.level = n;
  out.functions = family.size();
  for (std::size_t a = 0; a < family.size(); ++a)
    for (std::size_t b = a; b < family.size(); ++b) {
      ++out.pairs;
      const auto v = inner_product(family[a].second, family[b].second);
      if (a == b && v.square() != 1) {
        if (out.normalized && out.orthogonal) out.first_failure = "norm of " + family[a].first + " is not 1";
        out.normalized = false;
      } else if (a != b && !v.is_zero()) {
        if (out.normalized && out.orthogonal) out.first_failure = family[a].first + " and " + family[b].first + " are not orthogonal";
        out.orthogonal = false;
      }
    }
  return out;
}

}  // namespace tomra::cantor
