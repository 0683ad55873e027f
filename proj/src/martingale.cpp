#include "tomra/martingale.hpp"

#include <boost/math/special_functions/trigamma.hpp>

#include <algorithm>
#include <numbers>

namespace tomra::martingale {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double angle_of(Complex z) {
  double t = std::arg(z);
  if (t < 0.0) t += kTwoPi;
  return t >= kTwoPi ? 0.0 : t;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  double hi = *mid;
  double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}
}  // namespace

CircleSpace::CircleSpace(int n, int max_degree) : n_(n), max_degree_(max_degree) {
  if (n < 2) throw std::invalid_argument("CircleSpace: N must be >= 2");
}

TrigPoly CircleSpace::checked(TrigPoly f) const {
  if (level(f) > max_degree_)
    throw BudgetError("CircleSpace: degree " + std::to_string(level(f)) + " exceeds the budget " + std::to_string(max_degree_));
  return f;
}

TrigPoly CircleSpace::div(const TrigPoly& a, const TrigPoly& b) const {
  TrigPoly t = b.trimmed(1e-14);
  if (t.is_zero()) throw std::domain_error("CircleSpace::div: divisor is zero");
  if (!t.is_monomial()) throw std::domain_error("CircleSpace::div: division is exact only by monomials");
  int k = 0;
  Complex c = 0.0;
  for (int i = t.low(); i <= t.high(); ++i)
    if (t.coeff(i) != Complex(0)) {
      k = i;
      c = t.coeff(i);
    }
  return checked(a * TrigPoly::monomial(-k, 1.0 / c));
}

TrigPoly CircleSpace::compose_r(const TrigPoly& f, int k) const {
  long p = 1;
  for (int i = 0; i < k; ++i) {
    p *= n_;
    if (p * std::max(1, level(f)) > max_degree_) throw BudgetError("CircleSpace: f o r^" + std::to_string(k) + " exceeds the degree budget");
  }
  return f.compose_power(static_cast<int>(p));
}

double parseval_sum(const CovariantSystem<CircleSpace>& cs, const TrigPoly& m1, const MartingaleVector<TrigPoly>& v, int levels, int jmax) {
  const auto phi = cs.phi();
  const auto psi = cs.U_inverse(cs.pi(m1, phi));
  double s = 0.0;
  for (int j = -jmax; j <= jmax; ++j) s += std::norm(cs.inner_product(cs.pi(TrigPoly::monomial(j), phi), v));
  for (int k = 0; k < levels; ++k)
    for (int j = -jmax; j <= jmax; ++j) {
      auto e = cs.pi(TrigPoly::monomial(j), psi);
      for (int i = 0; i < k; ++i) e = cs.U_inverse(e);
      s += std::norm(cs.inner_product(e, v));
    }
  return s;
}

MultiplicityCheck multiplicity_sum_check(const MultiplicityFunction& mV0) {
  const auto& idx = *mV0.index;
  if (mV0.values.size() != idx.size()) throw std::invalid_argument("multiplicity_sum_check: table size does not match the index");
  MultiplicityCheck out{{mV0.index, {}}, {mV0.index, {}}, true, {}};
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (mV0.values[i] < 0) throw std::invalid_argument("multiplicity_sum_check: negative multiplicity on " + symbolic::word_string(idx.word(i)));
    long s = 0;
    for (const auto& y : symbolic::preimages_word(idx.matrix(), idx.word(i))) s += mV0(y);
    out.mV1.values.push_back(s);
    out.mW0.values.push_back(s - mV0.values[i]);
    if (s - mV0.values[i] < 0) {
      out.exact = false;
      out.witnesses.push_back(idx.word(i));
    }
  }
  return out;
}

CocycleReport harmonic_to_cocycle(const std::function<double(Complex)>& h0, const std::function<double(Complex)>& h, const solenoid::CircleLift& lift,
                                  std::vector<int> depths, std::size_t paths, std::uint64_t seed, double tol) {
  if (depths.empty()) throw std::invalid_argument("harmonic_to_cocycle: no depths");
  std::sort(depths.begin(), depths.end());
  if (depths.front() < 1) throw std::invalid_argument("harmonic_to_cocycle: depths must be >= 1");
  CocycleReport out;
  out.depths = depths;

  complexdyn::CircleMap sys(lift.N);
  for (int j = 0; j < 64; ++j) {
    Complex x = std::polar(1.0, kTwoPi * (j + 0.5) / 64);
    const double hx = h(x);
    if (std::abs(hx) <= solenoid::kDivisionGuard) throw std::domain_error("harmonic_to_cocycle: h vanishes at a check point");
    double r = 0.0;
    for (const auto& y : sys.preimages(x)) r += lift.weight(y).real() * h0(y);
    r /= lift.N;
    const double h0x = h0(x);
    out.harmonic_residual = std::max(out.harmonic_residual, std::abs(r - h0x));
    out.bound = std::max(out.bound, h0x * h0x / (hx * hx));
    if (std::abs(r - h0x) > tol * std::max(1.0, std::abs(h0x)))
      throw std::domain_error("harmonic_to_cocycle: h0 is not harmonic (residual " + std::to_string(std::abs(r - h0x)) + ")");
  }

  const int deepest = depths.back();
  auto sampled = solenoid::sample_lift(lift, deepest, paths, seed);
  auto ratio = [&](Complex x) {
    const double hx = h(x);
    if (std::abs(hx) <= solenoid::kDivisionGuard) throw std::domain_error("harmonic_to_cocycle: h vanishes on a sampled path");
    return h0(x) / hx;
  };
  double inv = 0.0;
  for (const auto& p : sampled) {
    std::vector<double> row;
    for (int d : depths) row.push_back(ratio(p.theta(d)));
    out.limits.push_back(row.back());
    inv += std::abs(ratio(p.theta(deepest)) - ratio(p.theta(deepest - 1)));
    out.ratios.push_back(std::move(row));
  }
  out.invariance = inv / static_cast<double>(sampled.size());
  for (std::size_t i = 1; i < depths.size(); ++i) {
    std::vector<double> d;
    for (const auto& row : out.ratios) d.push_back(std::abs(row[i] - row[i - 1]));
    out.median_delta.push_back(median(std::move(d)));
  }
  return out;
}

double stretched_haar_harmonic(Complex z) {
  const double t = angle_of(z);
  if (t == 0.0) return 2.0;
  const double s = std::sin(t);
  return s * s * boost::math::trigamma(t / kTwoPi) / (2.0 * std::numbers::pi * std::numbers::pi);
}

}  // namespace tomra::martingale
