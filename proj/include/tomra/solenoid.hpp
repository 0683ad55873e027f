#pragma once

#include "tomra/complexdyn.hpp"
#include "tomra/core.hpp"
#include "tomra/random.hpp"
#include "tomra/symbolic.hpp"
#include "tomra/transfer.hpp"
#include "tomra/trigpoly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace tomra::solenoid {

using symbolic::Word;

inline std::string point_string(const Word& w) { return symbolic::word_string(w); }
inline std::string point_string(Complex z) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << z.real() << "," << z.imag() << ")";
  return os.str();
}

// Prefixes stand for infinite sequences, so two words are compatible when one extends the other.
inline double point_distance(const Word& a, const Word& b) {
  const std::size_t n = std::min(a.size(), b.size());
  return std::equal(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n), b.begin()) ? 0.0 : 1.0;
}
inline double point_distance(Complex a, Complex b) { return std::abs(a - b); }

inline bool point_less(const Word& a, const Word& b) { return a < b; }
inline bool point_less(Complex a, Complex b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); }

// (x_0, x_1, ..., x_n) with r(x_{k+1}) = x_k.
template <class Point, class Weight = double>
struct SolenoidPath {
  std::vector<Point> prefix;
  Weight weight{1};

  int depth() const { return static_cast<int>(prefix.size()) - 1; }
  const Point& theta(int n) const {
    if (n < 0 || n > depth()) throw std::out_of_range("SolenoidPath::theta: coordinate " + std::to_string(n) + " beyond depth");
    return prefix[static_cast<std::size_t>(n)];
  }
};

enum class Direction { forward, inverse };

// forward: (r(x_0), x_0, x_1, ...); inverse: (x_1, x_2, ...).
template <transfer::DynamicalSystem S, class Weight>
SolenoidPath<typename S::Point, Weight> rhat(const S& sys, const SolenoidPath<typename S::Point, Weight>& p, Direction d) {
  if (p.prefix.empty()) throw std::invalid_argument("rhat: empty path");
  SolenoidPath<typename S::Point, Weight> out{{}, p.weight};
  if (d == Direction::forward) {
    out.prefix.reserve(p.prefix.size() + 1);
    out.prefix.push_back(sys.map(p.prefix.front()));
    out.prefix.insert(out.prefix.end(), p.prefix.begin(), p.prefix.end());
  } else {
    if (p.depth() < 1) throw std::invalid_argument("rhat: inverse needs depth >= 1");
    out.prefix.assign(p.prefix.begin() + 1, p.prefix.end());
  }
  return out;
}

// max_k dist(r(x_{k+1}), x_k).
template <transfer::DynamicalSystem S, class Weight>
double compatibility_defect(const S& sys, const SolenoidPath<typename S::Point, Weight>& p) {
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < p.prefix.size(); ++k) worst = std::max(worst, point_distance(sys.map(p.prefix[k + 1]), p.prefix[k]));
  return worst;
}

template <class Point, class Scalar = double>
struct ModularFunction {
  std::function<Scalar(const Point&)> delta;
  std::string provenance;
  Scalar operator()(const Point& y) const { return delta(y); }
};

inline constexpr double kDivisionGuard = 1e-14;

// Delta(y) = V(y) h(y) / (c(r(y)) h(r(y))) for averaged V, W(y) h(y) / h(r(y)) for summed W.
// Checks R_V h = h, Delta >= 0 and the branch sums at every check point first.
template <transfer::DynamicalSystem S, class Scalar>
ModularFunction<typename S::Point, Scalar> delta_from_weight(const S& sys, const transfer::WeightFunction<typename S::Point, Scalar>& v,
                                                             std::function<Scalar(const typename S::Point&)> h,
                                                             const std::vector<typename S::Point>& check_points, double tol = 1e-12) {
  using Point = typename S::Point;
  auto w = transfer::to_summed(sys, v);
  for (const auto& x : check_points) {
    const Scalar hx = h(x);
    if (magnitude(hx) <= kDivisionGuard) throw std::domain_error("delta_from_weight: h vanishes at " + point_string(x));
    Scalar rh(0), branch(0);
    for (const auto& y : sys.preimages(x)) {
      Scalar d = w(y) * h(y) / hx;
      if (d < Scalar(0)) throw std::domain_error("delta_from_weight: negative V h at " + point_string(y));
      rh += w(y) * h(y);
      branch += d;
    }
    if (magnitude(rh - hx) > tol * std::max(1.0, magnitude(hx)))
      throw std::domain_error("delta_from_weight: R h != h at " + point_string(x) + " (eigen-residual " + std::to_string(magnitude(rh - hx)) + ")");
    if (magnitude(branch - Scalar(1)) > tol)
      throw std::domain_error("delta_from_weight: branch sum " + std::to_string(to_double(branch)) + " at " + point_string(x));
  }
  ModularFunction<Point, Scalar> out;
  out.provenance = std::string("V h / (c h o r), ") + to_string(v.convention()) + " weight, " + std::to_string(check_points.size()) +
                   " check points";
  out.delta = [sys, w, h](const Point& y) {
    const Scalar hr = h(sys.map(y));
    if (magnitude(hr) <= kDivisionGuard) throw std::domain_error("modular function: h vanishes at r(" + point_string(y) + ")");
    return w(y) * h(y) / hr;
  };
  return out;
}

// Path measures from one base point.
//   delta mode:  mass of (x_0..x_n) is D(x_1) ... D(x_n), total 1.
//   weight mode: mass is W(x_1) ... W(x_n) h(x_n) with W summed, total h(x_0).
// Sampling moves by Delta in both modes.
template <transfer::DynamicalSystem S, class Scalar = double>
class PathMeasureSampler {
 public:
  using Point = typename S::Point;
  using Path = SolenoidPath<Point, Scalar>;
  enum class Mode { delta, weight };

  PathMeasureSampler(S sys, ModularFunction<Point, Scalar> delta) : sys_(std::move(sys)), mode_(Mode::delta), delta_(std::move(delta)) {}

  PathMeasureSampler(S sys, const transfer::WeightFunction<Point, Scalar>& w, std::function<Scalar(const Point&)> h,
                     const std::vector<Point>& check_points, double tol = 1e-12)
      : sys_(std::move(sys)),
        mode_(Mode::weight),
        delta_(delta_from_weight(sys_, w, h, check_points, tol)),
        w_(std::make_shared<transfer::WeightFunction<Point, Scalar>>(transfer::to_summed(sys_, w))),
        h_(std::move(h)) {}

  const S& system() const { return sys_; }
  Mode mode() const { return mode_; }
  const ModularFunction<Point, Scalar>& modular_function() const { return delta_; }

  Scalar declared_total(const Point& x0) const { return mode_ == Mode::delta ? Scalar(1) : h_(x0); }

  // Every depth-n path from x0 with its mass; the path weight holds the mass.
  std::vector<Path> enumerate(const Point& x0, int n, double budget = 1 << 22) const {
    if (n < 0) throw std::invalid_argument("enumerate: depth must be >= 0");
    if (std::pow(static_cast<double>(sys_.max_branch_count()), n) > budget)
      throw BudgetError("enumerate: " + std::to_string(sys_.max_branch_count()) + "^" + std::to_string(n) + " paths exceed the budget");
    std::vector<Path> out;
    Path p{{x0}, Scalar(1)};
    grow(p, n, out);
    if (mode_ == Mode::weight)
      for (auto& q : out) q.weight *= h_(q.prefix.back());
    return out;
  }

  // Draws x_{k+1} among the preimages of x_k with probabilities Delta.  weight = realized probability.
  SolenoidPath<Point, double> sample(const Point& x0, int n, Engine& rng) const {
    SolenoidPath<Point, double> p{{x0}, 1.0};
    p.prefix.reserve(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k < n; ++k) {
      auto [y, prob] = step(p.prefix.back(), uniform01(rng));
      p.prefix.push_back(std::move(y));
      p.weight *= prob;
    }
    return p;
  }

  // One backward step from x driven by u in [0,1).
  std::pair<Point, double> step(const Point& x, double u) const {
    auto pre = sys_.preimages(x);
    std::vector<double> probs;
    probs.reserve(pre.size());
    double total = 0.0;
    for (const auto& y : pre) {
      probs.push_back(to_double(delta_(y)));
      total += probs.back();
    }
    if (!(total > 0.0)) throw std::domain_error("sample_path: every branch has zero mass above " + point_string(x));
    double target = u * total, acc = 0.0;
    std::size_t pick = pre.size() - 1;
    for (std::size_t i = 0; i < pre.size(); ++i) {
      acc += probs[i];
      if (target < acc && probs[i] > 0.0) {
        pick = i;
        break;
      }
    }
    while (probs[pick] <= 0.0) --pick;  // u rounding onto a trailing zero branch
    return {pre[pick], probs[pick]};
  }

 private:
  void grow(Path& p, int remaining, std::vector<Path>& out) const {
    if (remaining == 0) {
      out.push_back(p);
      return;
    }
    for (const auto& y : sys_.preimages(p.prefix.back())) {
      Scalar f = mode_ == Mode::delta ? delta_(y) : (*w_)(y);
      if (f == Scalar(0)) continue;
      Path q{p.prefix, p.weight * f};
      q.prefix.push_back(y);
      grow(q, remaining - 1, out);
    }
  }

  S sys_;
  Mode mode_;
  ModularFunction<Point, Scalar> delta_;
  std::shared_ptr<transfer::WeightFunction<Point, Scalar>> w_;
  std::function<Scalar(const Point&)> h_;
};

// Sum of prefix masses, grouped by the first n+1 coordinates and sorted by prefix.
template <class Point, class Scalar>
std::vector<std::pair<std::vector<Point>, Scalar>> marginalize(const std::vector<SolenoidPath<Point, Scalar>>& paths, int n) {
  auto less = [](const std::vector<Point>& a, const std::vector<Point>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [](const Point& x, const Point& y) { return point_less(x, y); });
  };
  std::map<std::vector<Point>, Scalar, decltype(less)> acc(less);
  for (const auto& p : paths) {
    if (p.depth() < n) throw std::invalid_argument("marginalize: path shorter than the requested depth");
    std::vector<Point> key(p.prefix.begin(), p.prefix.begin() + n + 1);
    auto it = acc.find(key);
    if (it == acc.end())
      acc.emplace(std::move(key), p.weight);
    else
      it->second += p.weight;
  }
  return {acc.begin(), acc.end()};
}

// mu-hat as a base measure mu_0 on X extended backward by Delta.
template <transfer::DynamicalSystem S, class Scalar>
struct LiftedMeasure {
  using Point = typename S::Point;
  PathMeasureSampler<S, Scalar> sampler;
  std::vector<std::pair<Point, Scalar>> atoms;  // exact base measure, when it is atomic at finite rank
  std::function<Point(Engine&)> draw;           // x_0 ~ mu_0 / total
  Scalar total{0};
  double fixed_point_residual = 0.0;
};

// Exhaustive enumeration: each atom extended by every depth-n path, mass = mu_0(atom) D^{(n)}.
template <transfer::DynamicalSystem S, class Scalar>
std::vector<SolenoidPath<typename S::Point, Scalar>> enumerate_lift(const LiftedMeasure<S, Scalar>& lift, int n) {
  if (lift.atoms.empty()) throw std::invalid_argument("enumerate_lift: the base measure has no atoms");
  std::vector<SolenoidPath<typename S::Point, Scalar>> out;
  for (const auto& [x0, m] : lift.atoms) {
    if (m == Scalar(0)) continue;
    for (auto& p : lift.sampler.enumerate(x0, n)) {
      p.weight *= m;
      out.push_back(std::move(p));
    }
  }
  return out;
}

// count paths: x_0 ~ mu_0, then Delta.  Blocks of 1024 draws share one stream, so `threads` does not
// change the output.
template <transfer::DynamicalSystem S, class Scalar>
std::vector<SolenoidPath<typename S::Point, double>> sample_lift(const LiftedMeasure<S, Scalar>& lift, int n, std::size_t count,
                                                                  std::uint64_t seed, int threads = 1) {
  constexpr std::size_t block = 1024;
  std::vector<SolenoidPath<typename S::Point, double>> out(count);
  const std::size_t blocks = (count + block - 1) / block;
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t b = first; b < blocks; b += stride) {
      Engine rng = make_stream(seed, b);
      for (std::size_t i = b * block; i < std::min(count, (b + 1) * block); ++i) out[i] = lift.sampler.sample(lift.draw(rng), n, rng);
    }
  };
  const std::size_t t = static_cast<std::size_t>(std::max(1, threads));
  if (t == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < t; ++i) pool.emplace_back(work, i, t);
    for (auto& th : pool) th.join();
  }
  return out;
}

// ---- subshifts (exact) ----

using SubshiftLift = LiftedMeasure<transfer::SubshiftSystem, Rational>;

// mu_0 at level K with the fixed-point property int V (f o r) dmu_0 = int f dmu_0, checked on every
// level-(K-1) cylinder indicator.  V must depend on the first K symbols only.
// Delta(y) = V(y) mu_0[y] / mu_0[r y].
SubshiftLift lift_subshift(const symbolic::TransitionMatrix& a, std::function<Rational(const Word&)> v, const symbolic::CylinderMeasure& mu0);

// mu[w] h(w) on mu's index (h given on the same index).
symbolic::CylinderMeasure weighted_measure(const symbolic::CylinderMeasure& mu, const std::vector<Rational>& h);

// omega_n(f) = int R^n(f h) dmu with mu strongly invariant, exactly.  W sees words of length L+1, f and
// h are level-L tables on idx.  Throws std::domain_error unless R h = h exactly.
Rational omega_n(const symbolic::CylinderIndex& idx, const std::function<Rational(const Word&)>& w, const std::vector<Rational>& h,
                 const std::vector<Rational>& f, int n, Convention conv = Convention::averaged);

// Mass of x_n's rank-L cylinders under a list of (enumerated) paths.
template <class Weight>
std::map<Word, Weight> theta_pushforward(const std::vector<SolenoidPath<Word, Weight>>& paths, int n, int rank) {
  std::map<Word, Weight> out;
  for (const auto& p : paths) {
    const Word& x = p.theta(n);
    if (static_cast<int>(x.size()) < rank) throw std::invalid_argument("theta_pushforward: prefix shorter than the cylinder rank");
    Word key(x.begin(), x.begin() + rank);
    auto it = out.find(key);
    if (it == out.end())
      out.emplace(std::move(key), p.weight);
    else
      it->second += p.weight;
  }
  return out;
}

// ---- circle z -> z^N ----

struct CircleLift : LiftedMeasure<complexdyn::CircleMap, double> {
  int N = 2;
  TrigPoly weight;   // V, averaged convention
  TrigPoly density;  // rho: mu_0 = rho dtheta / 2 pi
  std::function<double(double)> quantile;  // angle in [0, 2 pi) with CDF value u
};

// Fixed-point property on z^k, |k| <= kmax: coeff_{-kN}(V rho) = coeff_{-k}(rho).  x_0 is drawn from rho
// by inverse CDF.
CircleLift lift_circle(int n, const TrigPoly& v, const TrigPoly& rho = TrigPoly::constant(1.0), int kmax = 16, double tol = 1e-10);

// Exact omega_n(f) = int R_V^n(f h) dtheta/2pi on trigonometric polynomials.
Complex omega_n(int n_power, const TrigPoly& v, const TrigPoly& h, const TrigPoly& f, int n, double tol = 1e-12);

// (1/2pi) int_a^b p(e^{i theta}) dtheta.
Complex arc_integral(const TrigPoly& p, double a, double b);

// Importance estimate of the total mass of theta_n-pushforward: x_0 uniform weighted by rho(x_0), branches
// uniform weighted by N Delta.
struct MassEstimate {
  double expected = 0.0;
  double estimate = 0.0;
  double sigma = 0.0;  // standard error
  std::size_t samples = 0;
  bool within(double k = 3.0) const { return std::abs(estimate - expected) <= k * sigma; }
};
MassEstimate mass_preservation_mc(const CircleLift& lift, int n, std::size_t samples, std::uint64_t seed);

enum class Sampling { iid, stratified };

struct RNBin {
  double lo = 0.0, hi = 0.0;
  std::size_t unshifted = 0;  // x_0 in bin
  std::size_t shifted = 0;    // x_1 in bin, i.e. (r-hat path) has theta_0 in bin
  double ratio = 0.0;
  double oracle = 0.0;  // rho-weighted bin average of |m0|^2
  double error = 0.0;   // |ratio - oracle| / max(1, oracle)
  bool excluded = false;
};

struct RNEstimate {
  bool singular = false;
  std::size_t samples = 0;
  std::vector<RNBin> bins;
  double max_error = 0.0;  // over bins not excluded
};

// d(mu-hat o r-hat)/d mu-hat by bin counts.  m0 must satisfy |m0|^2 = lift.weight.  Bins whose oracle
// density mass is below `exclude` are reported but left out of max_error.  A zero m0 is refused with
// singular = true.
RNEstimate radon_nikodym_estimate(const CircleLift& lift, const TrigPoly& m0, int bins, std::size_t samples, std::uint64_t seed,
                                  Sampling scheme = Sampling::stratified, double exclude = 0.0);

}  // namespace tomra::solenoid
