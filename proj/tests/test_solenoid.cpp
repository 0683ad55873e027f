#include "doctest.h"
#include "tomra/solenoid.hpp"

#include <cmath>
#include <numbers>

using namespace tomra;
using namespace tomra::solenoid;
using symbolic::TransitionMatrix;
using transfer::SubshiftSystem;
using transfer::WeightFunction;

namespace {

const double kPi = std::numbers::pi;

Rational rand_rational(Engine& rng, int lo, int hi) {
  int den = 1 + static_cast<int>(uniform_index(rng, 6));
  int num = lo * den + static_cast<int>(uniform_index(rng, static_cast<std::size_t>((hi - lo) * den + 1)));
  return Rational(num, den);
}

// R_W h = h by construction: W(y) = P(y_0 | y_1) h(y_1 y_2) / h(y_0 y_1), where P averages to one
// over the allowed predecessors and h is any positive level-2 table.
struct EigenPair {
  TransitionMatrix a;
  std::map<symbolic::Word, Rational> p;  // keyed by (s, x1)
  std::map<symbolic::Word, Rational> h;  // keyed by level-2 words
  Rational hw(const symbolic::Word& y) const { return h.at(symbolic::Word(y.begin(), y.begin() + 2)); }
  Rational w(const symbolic::Word& y) const {
    return p.at({y[0], y[1]}) * hw(symbolic::Word(y.begin() + 1, y.end())) / hw(y);
  }
};

EigenPair random_pair(const TransitionMatrix& a, Engine& rng) {
  EigenPair e{a, {}, {}};
  for (int x1 = 1; x1 <= a.size(); ++x1) {
    std::vector<int> pred;
    for (int s = 1; s <= a.size(); ++s)
      if (a.allowed(s, x1)) pred.push_back(s);
    std::vector<Rational> raw;
    Rational sum(0);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      raw.push_back(rand_rational(rng, 1, 4));
      sum += raw.back();
    }
    for (std::size_t i = 0; i < pred.size(); ++i) e.p[{pred[i], x1}] = raw[i] * static_cast<int>(pred.size()) / sum;
  }
  for (const auto& w : symbolic::admissible_words(a, 2)) e.h[w] = rand_rational(rng, 1, 3);
  return e;
}

std::vector<symbolic::Word> long_points(const TransitionMatrix& a, int len) { return symbolic::admissible_words(a, len); }

}  // namespace

TEST_CASE("rhat round trips and commutes with theta") {
  complexdyn::CircleMap sq(2);
  SolenoidPath<Complex> ones{{1.0, 1.0, 1.0}, 1.0};
  auto f = rhat(sq, ones, Direction::forward);
  CHECK(f.prefix == std::vector<Complex>(4, 1.0));

  Engine rng = make_stream(3, 0);
  for (int t = 0; t < 20; ++t) {
    Complex x0 = std::polar(1.0, 2 * kPi * uniform01(rng));
    SolenoidPath<Complex> p{{x0}, 1.0};
    for (int k = 0; k < 5; ++k) {
      auto pre = sq.preimages(p.prefix.back());
      p.prefix.push_back(pre[uniform_index(rng, 2)]);
    }
    CHECK(compatibility_defect(sq, p) <= 1e-10);
    auto q = rhat(sq, p, Direction::forward);
    CHECK(q.theta(1) == p.theta(0));
    CHECK(rhat(sq, q, Direction::inverse).prefix == p.prefix);
    auto r = rhat(sq, p, Direction::inverse);
    CHECK(rhat(sq, r, Direction::forward).prefix.size() == p.prefix.size());
    CHECK(std::abs(rhat(sq, r, Direction::forward).theta(0) - p.theta(0)) <= 1e-12);
  }

  SubshiftSystem g(TransitionMatrix::golden_mean());
  SolenoidPath<symbolic::Word> w{{{1, 2, 1}, {1, 1, 2, 1}, {2, 1, 1, 2, 1}}, 1.0};
  CHECK(compatibility_defect(g, w) == 0.0);
  auto wf = rhat(g, w, Direction::forward);
  CHECK(wf.prefix.front() == symbolic::Word{2, 1});
  CHECK(rhat(g, wf, Direction::inverse).prefix == w.prefix);
  CHECK_THROWS_AS(rhat(g, SolenoidPath<symbolic::Word>{{{1}}, 1.0}, Direction::inverse), std::invalid_argument);
}

TEST_CASE("delta_from_weight") {
  auto a = TransitionMatrix::golden_mean();
  SubshiftSystem g(a);
  auto pts = long_points(a, 3);
  auto one = transfer::constant_weight<symbolic::Word, Rational>(Rational(1));
  auto d = delta_from_weight(g, one, std::function<Rational(const symbolic::Word&)>([](const symbolic::Word&) { return Rational(1); }), pts);
  for (const auto& y : long_points(a, 4)) CHECK(d(y) == Rational(1, a.column_sum(y[1])));

  // Haar: Delta = |1 + z|^2 / 4 = (1 + cos)/2.
  complexdyn::CircleMap sq(2);
  WeightFunction<Complex, double> haar([](Complex y) { return std::norm(1.0 + y) / 2.0; });
  std::function<double(const Complex&)> h1 = [](const Complex&) { return 1.0; };
  auto circle_pts = transfer::roots_of_unity(97);
  auto dh = delta_from_weight(sq, haar, h1, circle_pts);
  for (const auto& x : circle_pts) {
    double s = 0.0;
    for (const auto& y : sq.preimages(x)) {
      CHECK(std::abs(dh(y) - (1.0 + y.real()) / 2.0) <= 1e-14);
      s += dh(y);
    }
    CHECK(std::abs(s - 1.0) <= 1e-12);
  }

  // h vanishing at a check point.
  std::function<double(const Complex&)> hz = [](const Complex& z) { return 1.0 + z.real(); };
  CHECK_THROWS_AS(delta_from_weight(sq, haar, hz, {Complex(-1.0, 0.0)}), std::domain_error);
  // Not an eigenfunction.
  CHECK_THROWS_AS(delta_from_weight(sq, haar, hz, {Complex(0.0, 1.0)}), std::domain_error);
}

TEST_CASE("path enumeration telescopes") {
  auto a = TransitionMatrix::golden_mean();
  SubshiftSystem g(a);
  Engine rng = make_stream(11, 0);
  auto e = random_pair(a, rng);
  WeightFunction<symbolic::Word, Rational> w([e](const symbolic::Word& y) { return e.w(y); });
  std::function<Rational(const symbolic::Word&)> h = [e](const symbolic::Word& y) { return e.hw(y); };
  auto pts = long_points(a, 3);
  PathMeasureSampler<SubshiftSystem, Rational> wh(g, w, h, pts);
  PathMeasureSampler<SubshiftSystem, Rational> dm(g, wh.modular_function());

  for (const auto& x0 : pts) {
    for (int n = 0; n <= 8; ++n) {
      Rational sd(0), sw(0);
      for (const auto& p : dm.enumerate(x0, n)) sd += p.weight;
      auto paths = wh.enumerate(x0, n);
      for (const auto& p : paths) sw += p.weight;
      CHECK(sd == 1);
      CHECK(sw == e.hw(x0));
      // Masses against the explicit product prod W(x_k)/c(x_{k-1}) times h(x_n).
      for (std::size_t i = 0; i < paths.size(); i += 7) {
        const auto& p = paths[i];
        Rational m = e.hw(p.prefix.back());
        for (int k = 1; k <= n; ++k) m *= e.w(p.theta(k)) / a.column_sum(p.theta(k - 1).front());
        CHECK(m == p.weight);
        CHECK(compatibility_defect(g, p) == 0.0);
      }
    }
  }
}

TEST_CASE("Kolmogorov consistency of enumerated paths") {
  auto a = symbolic::TransitionMatrix({{1, 1, 0}, {0, 1, 1}, {1, 1, 1}});
  SubshiftSystem g(a);
  Engine rng = make_stream(12, 0);
  auto e = random_pair(a, rng);
  WeightFunction<symbolic::Word, Rational> w([e](const symbolic::Word& y) { return e.w(y); });
  std::function<Rational(const symbolic::Word&)> h = [e](const symbolic::Word& y) { return e.hw(y); };
  PathMeasureSampler<SubshiftSystem, Rational> wh(g, w, h, long_points(a, 3));
  symbolic::Word x0{2, 3, 1};
  for (int m = 1; m <= 6; ++m) {
    auto deep = wh.enumerate(x0, m);
    for (int n = 0; n < m; ++n) {
      auto direct = marginalize(wh.enumerate(x0, n), n);
      auto folded = marginalize(deep, n);
      CHECK(direct == folded);
    }
  }
}

TEST_CASE("sampling is deterministic and dead ends are reported") {
  complexdyn::CircleMap sq(2);
  WeightFunction<Complex, double> haar([](Complex y) { return std::norm(1.0 + y) / 2.0; });
  std::function<double(const Complex&)> h1 = [](const Complex&) { return 1.0; };
  PathMeasureSampler<complexdyn::CircleMap, double> s(sq, haar, h1, transfer::roots_of_unity(16));
  Engine r1 = make_stream(5, 0), r2 = make_stream(5, 0);
  auto p1 = s.sample(Complex(0.6, 0.8), 12, r1);
  auto p2 = s.sample(Complex(0.6, 0.8), 12, r2);
  CHECK(p1.prefix == p2.prefix);
  CHECK(p1.weight == p2.weight);
  CHECK(compatibility_defect(sq, p1) <= 1e-10);

  ModularFunction<Complex, double> dead{[](const Complex&) { return 0.0; }, "zero"};
  PathMeasureSampler<complexdyn::CircleMap, double> z(sq, dead);
  CHECK_THROWS_AS(z.sample(Complex(1.0), 1, r1), std::domain_error);
}

TEST_CASE("omega_n on subshifts") {
  auto a = TransitionMatrix::golden_mean();
  SubshiftSystem g(a);
  Engine rng = make_stream(13, 0);
  auto e = random_pair(a, rng);
  auto idx = symbolic::make_index(a, 2);
  std::vector<Rational> h, one(idx->size(), Rational(1));
  for (const auto& w : idx->words()) h.push_back(e.hw(w));
  std::function<Rational(const symbolic::Word&)> wfn = [e](const symbolic::Word& y) { return e.w(y); };
  symbolic::InvariantMeasure mu(a);

  Rational base(0);
  for (std::size_t i = 0; i < idx->size(); ++i) base += h[i] * mu.mass(idx->word(i));
  for (int n = 0; n <= 6; ++n) CHECK(omega_n(*idx, wfn, h, one, n) == base);

  WeightFunction<symbolic::Word, Rational> wf(wfn);
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<Rational> f;
    for (std::size_t i = 0; i < idx->size(); ++i) f.push_back(rand_rational(rng, -2, 2));
    Rational f0(0);
    for (std::size_t i = 0; i < idx->size(); ++i) f0 += f[i] * h[i] * mu.mass(idx->word(i));
    CHECK(omega_n(*idx, wfn, h, f, 0, Convention::averaged) == f0);
    for (int n = 1; n <= 4; ++n) {
      auto fh = [&](const symbolic::Word& y) { return f[idx->index_of(y)] * h[idx->index_of(y)]; };
      auto nested = transfer::ruelle_iterate(g, wf, fh, n, idx->words());
      Rational s(0);
      for (std::size_t i = 0; i < idx->size(); ++i) s += nested[i] * mu.mass(idx->word(i));
      CHECK(omega_n(*idx, wfn, h, f, n) == s);
    }
  }
  std::vector<Rational> bad(h);
  bad[0] += 1;
  CHECK_THROWS_AS(omega_n(*idx, wfn, bad, one, 1), std::domain_error);
}

TEST_CASE("omega_n on the circle") {
  TrigPoly haar = TrigPoly(-1, {0.5, 1.0, 0.5});  // |1+z|^2/2
  TrigPoly one = TrigPoly::constant(1.0);
  for (int n = 0; n < 5; ++n) CHECK(std::abs(omega_n(2, haar, one, one, n) - 1.0) <= 1e-14);
  // omega_1(z) = int R(z) = average of (1 + cos) z over preimages, integrated: coefficient of z^{-1} in V.
  CHECK(std::abs(omega_n(2, haar, one, TrigPoly::monomial(1), 1) - 0.5) <= 1e-14);
  CHECK(std::abs(omega_n(2, haar, one, TrigPoly::monomial(2), 1)) <= 1e-14);
  TrigPoly sh = TrigPoly(-2, {0.5, 0.0, 1.0, 0.0, 0.5});
  TrigPoly hs = TrigPoly(-1, {0.5, 1.0, 0.5});
  CHECK(std::abs(omega_n(2, sh, hs, one, 3) - 1.0) <= 1e-14);
  CHECK_THROWS_AS(omega_n(2, sh, one, one, 1), std::domain_error);
}

TEST_CASE("subshift lift: V = 1 recovers the invariant measure at every depth") {
  auto a = TransitionMatrix::golden_mean();
  auto mu = symbolic::invariant_cylinder_measure(a, 4);
  auto lift = lift_subshift(a, [](const symbolic::Word&) { return Rational(1); }, mu);
  symbolic::InvariantMeasure oracle(a);
  for (const auto& y : long_points(a, 4)) CHECK(lift.sampler.modular_function()(y) == Rational(1, a.column_sum(y[1])));
  for (int n = 0; n <= 4; ++n) {
    auto paths = enumerate_lift(lift, n);
    Rational total(0);
    for (const auto& p : paths) total += p.weight;
    CHECK(total == lift.total);
    for (int rank = 1; rank <= 4; ++rank)
      for (const auto& [w, m] : theta_pushforward(paths, n, rank)) CHECK(m == oracle.mass(w));
  }
  CHECK_THROWS_AS(lift_subshift(a, [](const symbolic::Word&) { return Rational(2); }, mu), std::domain_error);
}

TEST_CASE("subshift lift of (W, h) pushes forward to omega_n") {
  auto a = TransitionMatrix::golden_mean();
  Engine rng = make_stream(14, 0);
  auto e = random_pair(a, rng);
  auto idx4 = symbolic::make_index(a, 4);
  symbolic::InvariantMeasure mu(a);
  std::vector<Rational> h4;
  for (const auto& w : idx4->words()) h4.push_back(e.hw(w));
  auto mu0 = weighted_measure(mu.at_index(idx4), h4);
  auto lift = lift_subshift(a, [e](const symbolic::Word& y) { return e.w(y); }, mu0);

  std::function<Rational(const symbolic::Word&)> wfn = [e](const symbolic::Word& y) { return e.w(y); };
  for (int n = 0; n <= 5; ++n) {
    auto paths = enumerate_lift(lift, n);
    for (int rank = 1; rank <= 4; ++rank) {
      auto push = theta_pushforward(paths, n, rank);
      for (const auto& w : symbolic::admissible_words(a, rank)) {
        std::vector<Rational> f;
        for (const auto& u : idx4->words()) f.push_back(std::equal(w.begin(), w.end(), u.begin()) ? 1 : 0);
        CHECK(push[w] == omega_n(*idx4, wfn, h4, f, n));
      }
    }
  }

  // Monte Carlo: cylinder frequencies of x_2 within 3 sigma.
  const std::size_t count = 40000;
  auto sampled = sample_lift(lift, 2, count, 99);
  std::map<symbolic::Word, std::size_t> hits;
  for (const auto& p : sampled) ++hits[symbolic::Word(p.theta(2).begin(), p.theta(2).begin() + 3)];
  const double total = static_cast<double>(lift.total);
  for (const auto& [w, m] : theta_pushforward(enumerate_lift(lift, 2), 2, 3)) {
    double prob = static_cast<double>(m) / total;
    double sigma = std::sqrt(prob * (1 - prob) / count);
    CHECK(std::abs(static_cast<double>(hits[w]) / count - prob) <= 3 * sigma);
  }
}

TEST_CASE("sample_lift does not depend on the thread count") {
  auto a = TransitionMatrix::golden_mean();
  auto lift = lift_subshift(a, [](const symbolic::Word&) { return Rational(1); }, symbolic::invariant_cylinder_measure(a, 2));
  auto s1 = sample_lift(lift, 5, 5000, 4, 1);
  auto s3 = sample_lift(lift, 5, 5000, 4, 3);
  REQUIRE(s1.size() == s3.size());
  for (std::size_t i = 0; i < s1.size(); ++i) CHECK(s1[i].prefix == s3[i].prefix);
}

TEST_CASE("circle lift: Haar") {
  TrigPoly v(-1, {0.5, 1.0, 0.5});
  auto lift = lift_circle(2, v);
  CHECK(lift.total == 1.0);
  CHECK(lift.fixed_point_residual <= 1e-15);
  // theta_0 histogram against the uniform law.
  const std::size_t count = 100000;
  const int bins = 32;
  auto paths = sample_lift(lift, 1, count, 21);
  std::vector<double> hist(bins, 0.0);
  for (const auto& p : paths) {
    double t = std::arg(p.theta(0));
    if (t < 0) t += 2 * kPi;
    hist[std::min(bins - 1, static_cast<int>(t / (2 * kPi) * bins))] += 1;
  }
  const double prob = 1.0 / bins, sigma = std::sqrt(prob * (1 - prob) / count);
  for (double c : hist) CHECK(std::abs(c / count - prob) <= 3 * sigma);

  // Lebesgue fails the fixed point for the stretched weight.
  CHECK_THROWS_AS(lift_circle(2, TrigPoly(-2, {0.5, 0.0, 1.0, 0.0, 0.5})), std::domain_error);
}

TEST_CASE("circle lift: stretched Haar uses rho = 1 + cos") {
  TrigPoly v(-2, {0.5, 0.0, 1.0, 0.0, 0.5});
  TrigPoly rho(-1, {0.75, 1.5, 0.75});  // 1.5 (1 + cos)
  auto lift = lift_circle(2, v, rho);
  CHECK(std::abs(lift.total - 1.5) <= 1e-15);
  // Delta(y) = (1 + cos y) / 2 away from the zeros.
  for (double t = 0.05; t < 2 * kPi; t += 0.37) {
    if (std::abs(std::cos(2 * t) + 1) < 1e-3) continue;
    Complex y = std::polar(1.0, t);
    CHECK(std::abs(lift.sampler.modular_function()(y) - (1 + std::cos(t)) / 2) <= 1e-12);
  }
  // Quantile inverts the CDF (theta + sin theta) / 2 pi.
  for (double u : {0.01, 0.2, 0.5, 0.77, 0.999}) {
    double t = lift.quantile(u);
    CHECK(std::abs((t + std::sin(t)) / (2 * kPi) - u) <= 1e-12);
  }
  auto mass = mass_preservation_mc(lift, 3, 50000, 8);
  CHECK(mass.within(3.0));
  CHECK(mass.sigma > 0.0);
}

TEST_CASE("Radon-Nikodym estimate") {
  auto flat = lift_circle(2, TrigPoly::constant(1.0));
  auto r0 = radon_nikodym_estimate(flat, TrigPoly::constant(1.0), 32, 100000, 1);
  CHECK_FALSE(r0.singular);
  CHECK(r0.max_error <= 0.02);

  TrigPoly m0(0, {1 / std::numbers::sqrt2, 1 / std::numbers::sqrt2});
  auto haar = lift_circle(2, m0.conj() * m0);
  auto r = radon_nikodym_estimate(haar, m0, 32, 100000, 2);
  REQUIRE(r.bins.size() == 32);
  CHECK(r.max_error <= 0.02);
  for (const auto& b : r.bins) {
    // Closed form: bin average of 1 + cos.
    double oracle = 1 + (std::sin(b.hi) - std::sin(b.lo)) / (b.hi - b.lo);
    CHECK(std::abs(b.oracle - oracle) <= 1e-12);
  }
  auto iid = radon_nikodym_estimate(haar, m0, 8, 100000, 2, Sampling::iid);
  CHECK(iid.max_error <= 0.05);

  TrigPoly sm(0, {1 / std::numbers::sqrt2, 0.0, 1 / std::numbers::sqrt2});
  auto stretched = lift_circle(2, sm.conj() * sm, TrigPoly(-1, {0.5, 1.0, 0.5}));
  auto rs = radon_nikodym_estimate(stretched, sm, 32, 100000, 3, Sampling::stratified, 0.002);
  CHECK_FALSE(rs.singular);
  CHECK(rs.max_error <= 0.05);

  auto singular = radon_nikodym_estimate(haar, TrigPoly::constant(0.0), 32, 1000, 1);
  CHECK(singular.singular);
  CHECK(singular.bins.empty());
  CHECK_THROWS_AS(radon_nikodym_estimate(haar, sm, 32, 1000, 1), std::invalid_argument);
}
