#include "tomra/solenoid.hpp"

#include <numbers>

namespace tomra::solenoid {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double angle_of(Complex z) {
  double t = std::arg(z);
  if (t < 0.0) t += kTwoPi;
  return t >= kTwoPi ? 0.0 : t;
}

std::size_t bin_of(double theta, int bins) {
  auto b = static_cast<std::size_t>(theta / kTwoPi * bins);
  return std::min(b, static_cast<std::size_t>(bins - 1));
}

void require_real(const TrigPoly& p, double tol, const char* what) {
  if ((p - p.conj()).max_abs_coeff() > tol) throw std::invalid_argument(std::string("lift_circle: ") + what + " is not real-valued");
}

}  // namespace

symbolic::CylinderMeasure weighted_measure(const symbolic::CylinderMeasure& mu, const std::vector<Rational>& h) {
  if (h.size() != mu.masses.size()) throw std::invalid_argument("weighted_measure: size mismatch");
  symbolic::CylinderMeasure out{mu.index, mu.masses};
  for (std::size_t i = 0; i < h.size(); ++i) out.masses[i] *= h[i];
  return out;
}

SubshiftLift lift_subshift(const symbolic::TransitionMatrix& a, std::function<Rational(const Word&)> v, const symbolic::CylinderMeasure& mu0) {
  const auto& idx = *mu0.index;
  if (!(idx.matrix() == a)) throw std::invalid_argument("lift_subshift: measure lives on a different subshift");
  const int k = mu0.level();
  if (k < 1) throw std::invalid_argument("lift_subshift: base measure level must be >= 1");

  // Coarse masses mu_0[w], |w| = K-1 (the empty word carries the total).
  std::map<Word, Rational> coarse;
  if (k == 1) {
    coarse[Word{}] = mu0.total();
  } else {
    auto m = mu0.marginal(k - 1);
    for (std::size_t i = 0; i < m.index->size(); ++i) coarse[m.index->word(i)] = m.masses[i];
  }

  // Fixed-point property on every level-(K-1) indicator: sum_s V(s w) mu_0[s w] = mu_0[w].
  Rational worst(0);
  std::map<Word, Rational> lhs;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const Word& u = idx.word(i);
    Rational vu = v(u);
    if (vu < 0) throw std::invalid_argument("lift_subshift: negative weight on " + symbolic::word_string(u));
    lhs[Word(u.begin() + 1, u.end())] += vu * mu0.masses[i];
  }
  for (const auto& [w, m] : coarse) {
    Rational d = lhs[w] - m;
    if (d < 0) d = -d;
    if (d > worst) worst = d;
  }
  if (worst != 0)
    throw std::domain_error("lift_subshift: fixed-point property fails; max residual " + rational_string(worst));

  auto masses = std::make_shared<std::vector<Rational>>(mu0.masses);
  auto coarse_ptr = std::make_shared<std::map<Word, Rational>>(std::move(coarse));
  auto index = mu0.index;
  ModularFunction<Word, Rational> delta;
  delta.provenance = "V mu_0[y] / mu_0[r y] at level " + std::to_string(k);
  delta.delta = [v, masses, coarse_ptr, index, k](const Word& y) -> Rational {
    if (static_cast<int>(y.size()) < k) throw std::invalid_argument("modular function: prefix shorter than level " + std::to_string(k));
    Word u(y.begin(), y.begin() + k);
    auto at = index->find(u);
    if (!at) return Rational(0);
    auto den = coarse_ptr->find(Word(u.begin() + 1, u.end()));
    if (den == coarse_ptr->end() || den->second == 0) return Rational(0);
    return v(u) * (*masses)[*at] / den->second;
  };

  SubshiftLift out{PathMeasureSampler<transfer::SubshiftSystem, Rational>(transfer::SubshiftSystem(a), std::move(delta)), {}, {}, mu0.total(), 0.0};
  std::vector<double> cdf;
  std::vector<Word> words;
  double acc = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (mu0.masses[i] == 0) continue;
    out.atoms.emplace_back(idx.word(i), mu0.masses[i]);
    acc += static_cast<double>(mu0.masses[i]);
    cdf.push_back(acc);
    words.push_back(idx.word(i));
  }
  if (words.empty()) throw std::invalid_argument("lift_subshift: base measure is zero");
  out.draw = [cdf, words](Engine& rng) {
    double u = uniform01(rng) * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t i = std::min(static_cast<std::size_t>(it - cdf.begin()), words.size() - 1);
    return words[i];
  };
  return out;
}

Rational omega_n(const symbolic::CylinderIndex& idx, const std::function<Rational(const Word&)>& w, const std::vector<Rational>& h,
                 const std::vector<Rational>& f, int n, Convention conv) {
  if (n < 0) throw std::invalid_argument("omega_n: n must be >= 0");
  if (h.size() != idx.size() || f.size() != idx.size()) throw std::invalid_argument("omega_n: tables must match the index");
  auto m = symbolic::ruelle_matrix<Rational>(idx, w, conv);
  auto rh = m.apply(h);
  for (std::size_t i = 0; i < h.size(); ++i)
    if (rh[i] != h[i])
      throw std::domain_error("omega_n: R h != h on cylinder " + symbolic::word_string(idx.word(i)) + " (" + rational_string(rh[i]) + " vs " +
                              rational_string(h[i]) + ")");
  std::vector<Rational> g(f.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = f[i] * h[i];
  for (int k = 0; k < n; ++k) g = m.apply(g);
  symbolic::InvariantMeasure mu(idx.matrix());
  Rational s(0);
  for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * mu.mass(idx.word(i));
  return s;
}

Complex arc_integral(const TrigPoly& p, double a, double b) {
  Complex s = p.coeff(0) * (b - a) / kTwoPi;
  for (int k = p.low(); k <= p.high(); ++k) {
    if (k == 0) continue;
    s += p.coeff(k) * (std::polar(1.0, k * b) - std::polar(1.0, k * a)) / (Complex(0.0, kTwoPi) * static_cast<double>(k));
  }
  return s;
}

CircleLift lift_circle(int n, const TrigPoly& v, const TrigPoly& rho, int kmax, double tol) {
  if (n < 2) throw std::invalid_argument("lift_circle: N must be >= 2");
  require_real(v, tol, "V");
  require_real(rho, tol, "rho");
  for (int j = 0; j < 4096; ++j) {
    double t = kTwoPi * (j + 0.5) / 4096;
    if (v.at_angle(t).real() < -tol) throw std::invalid_argument("lift_circle: V is negative at theta=" + std::to_string(t));
    if (rho.at_angle(t).real() < -tol) throw std::invalid_argument("lift_circle: rho is negative at theta=" + std::to_string(t));
  }
  const double total = rho.coeff(0).real();
  if (!(total > 0.0)) throw std::invalid_argument("lift_circle: rho has no mass");

  const TrigPoly vr = v * rho;
  double worst = 0.0;
  for (int k = -kmax; k <= kmax; ++k) worst = std::max(worst, std::abs(vr.coeff(-k * n) - rho.coeff(-k)));
  if (worst > tol)
    throw std::domain_error("lift_circle: fixed-point property fails on z^k, |k| <= " + std::to_string(kmax) + "; residual " + std::to_string(worst));

  std::vector<Complex> checks;
  for (int j = 0; j < 64; ++j) checks.push_back(std::polar(1.0, kTwoPi * (j + 0.5) / 64));
  complexdyn::CircleMap sys(n);
  transfer::WeightFunction<Complex, double> vw([v](Complex y) { return v(y).real(); }, Convention::averaged);
  std::function<double(const Complex&)> h = [rho](const Complex& y) { return rho(y).real(); };
  PathMeasureSampler<complexdyn::CircleMap, double> sampler(sys, delta_from_weight(sys, vw, h, checks, 1e-10));

  std::function<double(double)> quantile;
  if (rho.trimmed(tol).is_monomial() && rho.trimmed(tol).low() == 0) {
    quantile = [](double u) { return kTwoPi * u; };
  } else {
    quantile = [rho, total](double u) {
      double lo = 0.0, hi = kTwoPi;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        if (arc_integral(rho, 0.0, mid).real() / total < u)
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    };
  }
  auto draw = [quantile](Engine& rng) { return std::polar(1.0, quantile(uniform01(rng))); };
  CircleLift out{{std::move(sampler), {}, draw, total, worst}, n, v, rho, quantile};
  return out;
}

Complex omega_n(int n_power, const TrigPoly& v, const TrigPoly& h, const TrigPoly& f, int n, double tol) {
  if (n < 0) throw std::invalid_argument("omega_n: n must be >= 0");
  const double res = ((v * h).average_preimages(n_power) - h).max_abs_coeff();
  if (res > tol) throw std::domain_error("omega_n: R h != h (eigen-residual " + std::to_string(res) + ")");
  TrigPoly g = f * h;
  for (int k = 0; k < n; ++k) g = (v * g).average_preimages(n_power);
  return g.coeff(0);
}

MassEstimate mass_preservation_mc(const CircleLift& lift, int n, std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("mass_preservation_mc: need at least two samples");
  const auto& sys = lift.sampler.system();
  const auto& delta = lift.sampler.modular_function();
  constexpr std::size_t block = 1024;
  double mean = 0.0, m2 = 0.0;
  std::size_t count = 0;
  for (std::size_t b = 0; b * block < samples; ++b) {
    Engine rng = make_stream(seed, b);
    for (std::size_t i = b * block; i < std::min(samples, (b + 1) * block); ++i) {
      Complex x = std::polar(1.0, kTwoPi * uniform01(rng));
      double w = lift.density(x).real();
      for (int k = 0; k < n; ++k) {
        auto pre = sys.preimages(x);
        x = pre[uniform_index(rng, pre.size())];
        w *= static_cast<double>(pre.size()) * delta(x);
      }
      ++count;
      double d = w - mean;
      mean += d / static_cast<double>(count);
      m2 += d * (w - mean);
    }
  }
  MassEstimate out;
  out.expected = lift.total;
  out.estimate = mean;
  out.samples = count;
  out.sigma = std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count));
  return out;
}

RNEstimate radon_nikodym_estimate(const CircleLift& lift, const TrigPoly& m0, int bins, std::size_t samples, std::uint64_t seed,
                                  Sampling scheme, double exclude) {
  RNEstimate out;
  out.samples = samples;
  if (m0.is_zero()) {
    out.singular = true;
    return out;
  }
  if (bins < 1 || samples < 1) throw std::invalid_argument("radon_nikodym_estimate: need bins >= 1 and samples >= 1");
  const TrigPoly v = m0.conj() * m0;
  if ((v - lift.weight).max_abs_coeff() > 1e-10) throw std::invalid_argument("radon_nikodym_estimate: |m0|^2 differs from the lift's weight");

  std::vector<std::size_t> unshifted(static_cast<std::size_t>(bins), 0), shifted(static_cast<std::size_t>(bins), 0);
  Engine rng = make_stream(seed, 0);
  const double s1 = uniform01(rng), s2 = uniform01(rng);
  for (std::size_t i = 0; i < samples; ++i) {
    double u1, u2;
    if (scheme == Sampling::stratified) {
      // Rotated Hammersley points: stratified in x_0, low-discrepancy in the branch choice.
      u1 = std::fmod((static_cast<double>(i) + s1) / static_cast<double>(samples), 1.0);
      u2 = std::fmod(radical_inverse(i, 2) + s2, 1.0);
    } else {
      u1 = uniform01(rng);
      u2 = uniform01(rng);
    }
    Complex x0 = std::polar(1.0, lift.quantile(u1));
    Complex x1 = lift.sampler.step(x0, u2).first;
    ++unshifted[bin_of(angle_of(x0), bins)];
    ++shifted[bin_of(angle_of(x1), bins)];
  }

  const TrigPoly vr = v * lift.density;
  for (int b = 0; b < bins; ++b) {
    RNBin bin;
    bin.lo = kTwoPi * b / bins;
    bin.hi = kTwoPi * (b + 1) / bins;
    bin.unshifted = unshifted[static_cast<std::size_t>(b)];
    bin.shifted = shifted[static_cast<std::size_t>(b)];
    const double mass = arc_integral(lift.density, bin.lo, bin.hi).real();
    bin.oracle = mass > 0.0 ? arc_integral(vr, bin.lo, bin.hi).real() / mass : 0.0;
    bin.excluded = mass / lift.total <= exclude || bin.unshifted == 0;
    bin.ratio = bin.unshifted ? static_cast<double>(bin.shifted) / static_cast<double>(bin.unshifted) : 0.0;
    bin.error = std::abs(bin.ratio - bin.oracle) / std::max(1.0, bin.oracle);
    if (!bin.excluded) out.max_error = std::max(out.max_error, bin.error);
    out.bins.push_back(bin);
  }
  return out;
}

}  // namespace tomra::solenoid
