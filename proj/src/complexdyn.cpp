#include "tomra/complexdyn.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <thread>

namespace tomra::complexdyn {

namespace {

std::vector<Complex> trim_leading(std::vector<Complex> c, double rel = 0.0) {
  double scale = 0.0;
  for (const auto& x : c) scale = std::max(scale, std::abs(x));
  while (c.size() > 1 && std::abs(c.back()) <= rel * scale) c.pop_back();
  return c;
}

int poly_degree(const std::vector<Complex>& c) {
  int d = static_cast<int>(c.size()) - 1;
  while (d > 0 && c[static_cast<std::size_t>(d)] == Complex(0)) --d;
  return d;
}

Complex ipow(Complex z, int n) {
  Complex r = 1.0;
  while (n > 0) {
    if (n & 1) r *= z;
    z *= z;
    n >>= 1;
  }
  return r;
}

std::vector<Complex> quadratic_roots(Complex a, Complex b, Complex c) {
  Complex disc = std::sqrt(b * b - 4.0 * a * c);
  // Pick the sign that avoids cancellation.
  Complex q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc) : -0.5 * (b - disc);
  if (q == Complex(0)) return {0.0, 0.0};
  return {q / a, c / q};
}

std::vector<Complex> aberth(const std::vector<Complex>& c, const RootOptions& opt) {
  const int n = static_cast<int>(c.size()) - 1;
  const Complex lead = c.back();
  // Start radius: geometric mean of root moduli, or a Cauchy-type bound if a root sits at 0.
  double radius;
  if (std::abs(c.front()) > 0.0) {
    radius = std::pow(std::abs(c.front() / lead), 1.0 / n);
  } else {
    double m = 0.0;
    for (int k = 0; k < n; ++k) m = std::max(m, std::abs(c[static_cast<std::size_t>(k)] / lead));
    radius = 0.5 * (1.0 + m);
  }
  std::vector<Complex> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) z[static_cast<std::size_t>(k)] = std::polar(radius, 2.0 * std::numbers::pi * k / n + 0.4);
  std::vector<bool> done(static_cast<std::size_t>(n), false);

  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    bool all = true;
    for (int i = 0; i < n; ++i) {
      auto ui = static_cast<std::size_t>(i);
      if (done[ui]) continue;
      Complex p = c.back(), dp = 0.0;
      for (int k = n - 1; k >= 0; --k) {
        dp = dp * z[ui] + p;
        p = p * z[ui] + c[static_cast<std::size_t>(k)];
      }
      if (p == Complex(0)) {
        done[ui] = true;
        continue;
      }
      Complex ratio = p / dp;
      Complex sum = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (z[ui] - z[static_cast<std::size_t>(j)]);
      Complex step = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) step = Complex(1e-3 * (1.0 + std::abs(z[ui])), 1e-3);
      z[ui] -= step;
      if (std::abs(step) <= opt.tol * (1.0 + std::abs(z[ui])))
        done[ui] = true;
      else
        all = false;
    }
    if (all) return z;
  }
  throw RootFindingError("polynomial_roots: Aberth iteration did not converge in " + std::to_string(opt.max_sweeps) + " sweeps", z, done);
}

}  // namespace

Complex poly_eval(const std::vector<Complex>& c, Complex z) {
  Complex acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::vector<Complex> polynomial_roots(const std::vector<Complex>& coeffs, const RootOptions& opt) {
  auto c = trim_leading(coeffs);
  if (c.empty() || (c.size() == 1 && c[0] == Complex(0))) throw std::invalid_argument("polynomial_roots: zero polynomial");
  const int n = static_cast<int>(c.size()) - 1;
  if (n == 0) return {};
  if (n == 1) return {-c[0] / c[1]};
  if (n == 2) return quadratic_roots(c[2], c[1], c[0]);
  return aberth(c, opt);
}

bool BranchLabeling::operator()(Complex a, Complex b) const {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

bool BranchLabeling::operator()(const ProjectivePoint& a, const ProjectivePoint& b) const {
  // Infinity last.
  if (a.infinite || b.infinite) return !a.infinite && b.infinite;
  return (*this)(a.z, b.z);
}

RationalMap::RationalMap(std::vector<Complex> numerator, std::vector<Complex> denominator)
    : p_(trim_leading(std::move(numerator))), q_(trim_leading(std::move(denominator))) {
  if (p_.empty()) p_ = {0.0};
  if (q_.empty() || (q_.size() == 1 && q_[0] == Complex(0))) throw std::invalid_argument("RationalMap: denominator is identically zero");
  const int dp = poly_degree(p_), dq = poly_degree(q_);
  degree_ = std::max(dp, dq);
  if (degree_ < 2) throw std::invalid_argument("RationalMap: degree must be at least 2, got " + std::to_string(degree_));

  // Resultant of the unit-normalized pair via the Sylvester matrix.
  auto normalized = [](std::vector<Complex> v) {
    double s = 0.0;
    for (const auto& x : v) s = std::max(s, std::abs(x));
    for (auto& x : v) x /= s;
    return v;
  };
  auto pn = normalized(p_), qn = normalized(q_);
  if (dq == 0) {
    resultant_ = std::pow(std::abs(qn[0]), dp);
  } else if (dp == 0) {
    resultant_ = pn[0] == Complex(0) ? 0.0 : std::pow(std::abs(pn[0]), dq);
  } else {
    const int n = dp + dq;
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
    for (int r = 0; r < dq; ++r)
      for (int k = 0; k <= dp; ++k) s(r, r + k) = pn[static_cast<std::size_t>(dp - k)];
    for (int r = 0; r < dp; ++r)
      for (int k = 0; k <= dq; ++k) s(dq + r, r + k) = qn[static_cast<std::size_t>(dq - k)];
    resultant_ = std::abs(s.fullPivLu().determinant());
  }
  if (!(resultant_ > 1e-10))
    throw std::invalid_argument("RationalMap: numerator and denominator share a root (resultant magnitude " + std::to_string(resultant_) + ")");
}

ProjectivePoint map_eval(const RationalMap& r, ProjectivePoint z) {
  const auto& p = r.numerator();
  const auto& q = r.denominator();
  const int dp = poly_degree(p), dq = poly_degree(q);
  if (z.infinite) {
    if (dp > dq) return ProjectivePoint::infinity();
    if (dp < dq) return {0.0, false};
    return {p[static_cast<std::size_t>(dp)] / q[static_cast<std::size_t>(dq)], false};
  }
  Complex qz = poly_eval(q, z.z);
  if (qz == Complex(0)) return ProjectivePoint::infinity();
  return {poly_eval(p, z.z) / qz, false};
}

std::vector<Preimage> map_preimages(const RationalMap& r, ProjectivePoint w, const RootOptions& opt) {
  const int d = r.degree();
  std::vector<Complex> target;
  if (w.infinite) {
    target = r.denominator();
  } else {
    const auto& p = r.numerator();
    const auto& q = r.denominator();
    target.assign(static_cast<std::size_t>(d + 1), 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) target[k] += p[k];
    for (std::size_t k = 0; k < q.size(); ++k) target[k] -= w.z * q[k];
  }
  target = trim_leading(std::move(target), 1e-14);
  if (target.size() == 1 && target[0] == Complex(0)) throw std::domain_error("map_preimages: every point maps to w");

  std::vector<Preimage> out;
  for (const auto& z : polynomial_roots(target, opt)) out.push_back({{z, false}, false});
  const int at_infinity = d - (static_cast<int>(target.size()) - 1);
  for (int k = 0; k < at_infinity; ++k) out.push_back({ProjectivePoint::infinity(), at_infinity > 1});

  std::vector<Complex> finite;
  for (const auto& pre : out)
    if (!pre.point.infinite) finite.push_back(pre.point.z);
  for (const auto& z : finite) {
    double res;
    if (w.infinite) {
      double scale = 0.0;
      for (const auto& x : r.denominator()) scale = std::max(scale, std::abs(x));
      res = std::abs(poly_eval(r.denominator(), z)) / scale;
    } else {
      auto img = map_eval(r, z);
      res = img.infinite ? INFINITY : std::abs(img.z - w.z);
    }
    double bound = 1e-10 * (1.0 + (w.infinite ? 0.0 : std::abs(w.z)));
    if (!(res <= bound)) {
      std::vector<bool> ok;
      for (const auto& f : finite) {
        auto img = map_eval(r, f);
        ok.push_back(!img.infinite && !w.infinite && std::abs(img.z - w.z) <= bound);
      }
      throw RootFindingError("map_preimages: residual " + std::to_string(res) + " exceeds bound", finite, ok);
    }
  }

  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      if (out[i].point.infinite || out[j].point.infinite) continue;
      if (std::abs(out[i].point.z - out[j].point.z) <= 1e-6 * (1.0 + std::abs(out[i].point.z))) out[i].repeated = out[j].repeated = true;
    }
  BranchLabeling{}.apply(out);
  return out;
}

Complex backward_orbit_sample(const RationalMap& r, Complex z0, int depth, Engine& rng) {
  if (depth < 1) throw std::invalid_argument("backward_orbit_sample: depth must be >= 1");
  Complex z = z0;
  for (int k = 0; k < depth; ++k) {
    auto pre = map_preimages(r, z);
    const auto& pick = pre[uniform_index(rng, pre.size())];
    if (pick.point.infinite) throw std::domain_error("backward_orbit_sample: orbit reached the point at infinity");
    z = pick.point.z;
  }
  return z;
}

namespace {
constexpr int kBlock = 1024;  // samples per random stream
}

PointCloudMeasure brolin_measure(const RationalMap& r, Complex z0, int depth, int n_samples, int burn_in, std::uint64_t seed, int threads) {
  if (n_samples < 1) throw std::invalid_argument("brolin_measure: n_samples must be >= 1");
  if (burn_in < 0 || depth <= burn_in) throw std::invalid_argument("brolin_measure: need depth > burn_in >= 0");
  PointCloudMeasure mu;
  mu.points.assign(static_cast<std::size_t>(n_samples), 0.0);
  mu.weights.assign(static_cast<std::size_t>(n_samples), 1.0 / n_samples);
  mu.seed = seed;
  mu.depth = depth;
  mu.burn_in = burn_in;

  const int blocks = (n_samples + kBlock - 1) / kBlock;
  auto run_block = [&](int b) {
    Engine rng = make_stream(seed, static_cast<std::uint64_t>(b));
    int end = std::min(n_samples, (b + 1) * kBlock);
    for (int i = b * kBlock; i < end; ++i) mu.points[static_cast<std::size_t>(i)] = backward_orbit_sample(r, z0, depth, rng);
  };
  threads = std::max(1, std::min(threads, blocks));
  if (threads == 1) {
    for (int b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (int b = t; b < blocks; b += threads) run_block(b);
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return mu;
}

Complex moment(const PointCloudMeasure& mu, int k) {
  if (k < 0) throw std::invalid_argument("moment: k must be >= 0");
  if (k == 0) return mu.total_mass;
  Complex s = 0.0;
  for (std::size_t i = 0; i < mu.points.size(); ++i) s += mu.weights[i] * ipow(mu.points[i], k);
  return s;
}

PointCloudMeasure merge(const PointCloudMeasure& a, const PointCloudMeasure& b) {
  std::vector<std::pair<Complex, double>> all;
  for (std::size_t i = 0; i < a.size(); ++i) all.emplace_back(a.points[i], a.weights[i]);
  for (std::size_t i = 0; i < b.size(); ++i) all.emplace_back(b.points[i], b.weights[i]);
  std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return BranchLabeling{}(x.first, y.first);
    return x.second < y.second;
  });
  PointCloudMeasure out;
  out.total_mass = a.total_mass + b.total_mass;
  for (const auto& [z, w] : all) {
    out.points.push_back(z);
    out.weights.push_back(w);
  }
  out.seed = std::min(a.seed, b.seed);
  out.depth = std::min(a.depth, b.depth);
  out.burn_in = std::min(a.burn_in, b.burn_in);
  return out;
}

PointCloudMeasure normalized(const PointCloudMeasure& mu, double total) {
  if (!(mu.total_mass > 0.0)) throw std::domain_error("normalized: cloud has no mass");
  PointCloudMeasure out = mu;
  const double f = total / mu.total_mass;
  for (auto& w : out.weights) w *= f;
  out.total_mass = total;
  return out;
}

CircleMap::CircleMap(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("CircleMap: N must be >= 2");
}

Complex CircleMap::map(Complex z) const { return ipow(z, n_); }

std::vector<Complex> CircleMap::preimages(Complex z) const {
  double rad = std::pow(std::abs(z), 1.0 / n_);
  double arg = std::arg(z);
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(n_));
  for (int k = 0; k < n_; ++k) out.push_back(std::polar(rad, (arg + 2.0 * std::numbers::pi * k) / n_));
  std::stable_sort(out.begin(), out.end(), BranchLabeling{});
  return out;
}

Complex JuliaSystem::map(Complex z) const {
  auto w = map_eval(r_, z);
  if (w.infinite) throw std::domain_error("JuliaSystem::map: pole");
  return w.z;
}

std::vector<Complex> JuliaSystem::preimages(Complex z) const {
  std::vector<Complex> out;
  for (const auto& p : map_preimages(r_, z, opt_)) {
    if (p.point.infinite) throw std::domain_error("JuliaSystem::preimages: preimage at infinity");
    out.push_back(p.point.z);
  }
  return out;
}

}  // namespace tomra::complexdyn
