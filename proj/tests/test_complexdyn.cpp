#include "doctest.h"
#include "tomra/complexdyn.hpp"

#include <cmath>

using namespace tomra;
using namespace tomra::complexdyn;

namespace {
const RationalMap kSquare = RationalMap::polynomial({0.0, 0.0, 1.0});
const RationalMap kSquareMinus3 = RationalMap::polynomial({-3.0, 0.0, 1.0});
// 2z - 1/z = (2z^2 - 1) / z
const RationalMap kCantorMap({-1.0, 0.0, 2.0}, {0.0, 1.0});

std::vector<Complex> finite_points(const std::vector<Preimage>& pre) {
  std::vector<Complex> out;
  for (const auto& p : pre) out.push_back(p.point.z);
  return out;
}
}  // namespace

TEST_CASE("map_eval examples") {
  CHECK(std::abs(map_eval(kSquare, Complex(0, 1)).z - Complex(-1, 0)) < 1e-15);
  CHECK(std::abs(map_eval(kSquareMinus3, Complex(2, 0)).z - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(map_eval(kCantorMap, Complex(1, 0)).z - Complex(1, 0)) < 1e-15);
  CHECK(map_eval(kCantorMap, Complex(0, 0)).infinite);
  CHECK(map_eval(kSquare, ProjectivePoint::infinity()).infinite);
  // (z^2 + 1) / (2 z^2): infinity -> 1/2
  RationalMap r({1.0, 0.0, 1.0}, {0.0, 0.0, 2.0});
  CHECK(std::abs(map_eval(r, ProjectivePoint::infinity()).z - 0.5) < 1e-15);
}

TEST_CASE("RationalMap validation") {
  CHECK_THROWS_AS(RationalMap::polynomial({1.0, 2.0}), std::invalid_argument);
  // (z-1)(z+1) / (z-1) shares a root.
  CHECK_THROWS_AS(RationalMap({-1.0, 0.0, 1.0}, {-1.0, 1.0}), std::invalid_argument);
  CHECK(kCantorMap.degree() == 2);
  CHECK(kCantorMap.resultant_magnitude() > 1e-10);
}

TEST_CASE("map_preimages examples") {
  auto a = finite_points(map_preimages(kSquare, 1.0));
  REQUIRE(a.size() == 2);
  CHECK(std::abs(a[0] - Complex(-1)) < 1e-15);
  CHECK(std::abs(a[1] - Complex(1)) < 1e-15);

  auto b = finite_points(map_preimages(kSquareMinus3, 1.0));
  CHECK(std::abs(b[0] - Complex(-2)) < 1e-15);
  CHECK(std::abs(b[1] - Complex(2)) < 1e-15);

  // 2z^2 - z - 1 = 0 by the quadratic formula: (1 +- 3) / 4.
  auto c = finite_points(map_preimages(kCantorMap, 1.0));
  CHECK(std::abs(c[0] - Complex(-0.5)) < 1e-15);
  CHECK(std::abs(c[1] - Complex(1)) < 1e-15);
}

TEST_CASE("map_preimages: critical values and infinity") {
  auto crit = map_preimages(kSquare, 0.0);
  CHECK(crit[0].repeated);
  CHECK(crit[1].repeated);
  auto regular = map_preimages(kSquare, 4.0);
  CHECK_FALSE(regular[0].repeated);

  // 1/z^2: the preimages of 0 are infinity twice.
  RationalMap inv({1.0}, {0.0, 0.0, 1.0});
  auto z = map_preimages(inv, 0.0);
  REQUIRE(z.size() == 2);
  CHECK(z[0].point.infinite);
  CHECK(z[1].point.infinite);
  CHECK(z[0].repeated);

  // (z^2+1)/z: infinity has preimages 0 and infinity.
  RationalMap joukowski({1.0, 0.0, 1.0}, {0.0, 1.0});
  auto w = map_preimages(joukowski, ProjectivePoint::infinity());
  REQUIRE(w.size() == 2);
  CHECK(std::abs(w[0].point.z) < 1e-15);
  CHECK(w[1].point.infinite);
}

TEST_CASE("Aberth recovers constructed roots") {
  Engine rng = make_stream(5, 0);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 3 + static_cast<int>(uniform_index(rng, 6));
    std::vector<Complex> roots;
    for (int k = 0; k < n; ++k) roots.emplace_back(4 * uniform01(rng) - 2, 4 * uniform01(rng) - 2);
    // Expand prod (z - root) in ascending coefficients.
    std::vector<Complex> c{1.0};
    for (const auto& r : roots) {
      std::vector<Complex> next(c.size() + 1, 0.0);
      for (std::size_t i = 0; i < c.size(); ++i) {
        next[i + 1] += c[i];
        next[i] -= r * c[i];
      }
      c = next;
    }
    auto found = polynomial_roots(c);
    REQUIRE(found.size() == roots.size());
    for (const auto& r : roots) {
      double best = 1e9;
      for (const auto& f : found) best = std::min(best, std::abs(f - r));
      CHECK(best < 1e-8);
    }
  }
}

TEST_CASE("Aberth reports partial roots when starved of sweeps") {
  RootOptions opt;
  opt.max_sweeps = 1;
  try {
    polynomial_roots({1.0, -2.0, 3.0, 5.0, 1.0, 7.0}, opt);
    FAIL("expected RootFindingError");
  } catch (const RootFindingError& e) {
    CHECK(e.partial_roots().size() == 5);
    CHECK(e.converged().size() == 5);
  }
}

TEST_CASE("preimage residual property on cubic and quartic maps") {
  RationalMap cubic = RationalMap::polynomial({Complex(0.1, 0.2), 0.0, -0.5, 1.0});
  RationalMap quartic({1.0, 0.0, 0.0, 0.0, Complex(0.5, 0.5)}, {2.0, 1.0});
  Engine rng = make_stream(9, 0);
  for (int t = 0; t < 200; ++t) {
    Complex w(6 * uniform01(rng) - 3, 6 * uniform01(rng) - 3);
    for (const auto* r : {&cubic, &quartic}) {
      auto pre = map_preimages(*r, w);
      CHECK(static_cast<int>(pre.size()) == r->degree());
      for (const auto& p : pre) {
        REQUIRE_FALSE(p.point.infinite);
        CHECK(std::abs(map_eval(*r, p.point.z).z - w) <= 1e-10 * (1 + std::abs(w)));
      }
      // Labeling is deterministic and sorted.
      auto again = map_preimages(*r, w);
      for (std::size_t i = 0; i < pre.size(); ++i) CHECK(pre[i].point == again[i].point);
      for (std::size_t i = 1; i < pre.size(); ++i) CHECK_FALSE(BranchLabeling{}(pre[i].point, pre[i - 1].point));
    }
  }
}

TEST_CASE("backward orbits of z^2 stay on the circle") {
  Engine rng = make_stream(1, 0);
  for (int t = 0; t < 100; ++t) {
    Complex z = std::polar(1.0, 6.283185307179586 * uniform01(rng));
    for (int d = 0; d < 30; ++d) {
      auto pre = map_preimages(kSquare, z);
      z = pre[uniform_index(rng, 2)].point.z;
      CHECK(std::abs(std::abs(z) - 1.0) <= 1e-12 * (d + 1));
    }
  }
  Engine r2 = make_stream(2, 0);
  CHECK(std::abs(std::abs(backward_orbit_sample(kSquare, 1.0, 30, r2)) - 1.0) <= 1e-9);
}

TEST_CASE("backward orbits of z^2 - 3 follow the real branch oracle") {
  const double beta = (1 + std::sqrt(13.0)) / 2;  // repelling fixed point bounds the Julia set
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Engine rng = make_stream(seed, 0);
    Engine shadow = make_stream(seed, 0);
    Complex z = backward_orbit_sample(kSquareMinus3, 0.0, 30, rng);
    double x = 0.0;
    for (int d = 0; d < 30; ++d) {
      double s = std::sqrt(x + 3.0);
      x = uniform_index(shadow, 2) == 0 ? -s : s;  // branch order: negative root first
    }
    CHECK(z.imag() == 0.0);
    CHECK(std::abs(z.real()) <= beta + 1e-9);
    CHECK(std::abs(z.real() - x) <= 1e-12);
  }
}

TEST_CASE("backward_orbit_sample is deterministic per seed") {
  Engine a = make_stream(77, 3), b = make_stream(77, 3);
  CHECK(backward_orbit_sample(kCantorMap, 0.3, 25, a) == backward_orbit_sample(kCantorMap, 0.3, 25, b));
  Engine c = make_stream(77, 3);
  CHECK_THROWS_AS(backward_orbit_sample(kSquare, 1.0, 0, c), std::invalid_argument);
}

TEST_CASE("brolin_measure approximates Haar for z^2 and z^3") {
  const int n = 20000;
  const double bound = 3.0 / std::sqrt(static_cast<double>(n));  // CLT envelope for a single moment
  auto mu2 = brolin_measure(kSquare, 1.0, 30, n, 20, 42);
  CHECK(mu2.size() == static_cast<std::size_t>(n));
  double total = 0.0;
  for (double w : mu2.weights) total += w;
  CHECK(std::abs(total - 1.0) <= 1e-12);
  for (const auto& z : mu2.points) CHECK(std::abs(std::abs(z) - 1.0) <= 1e-9);
  for (int k = 1; k <= 8; ++k) CHECK(std::abs(moment(mu2, k)) <= bound);

  auto mu3 = brolin_measure(RationalMap::polynomial({0.0, 0.0, 0.0, 1.0}), 1.0, 25, n, 20, 43);
  for (int k = 1; k <= 8; ++k) CHECK(std::abs(moment(mu3, k)) <= bound);
}

TEST_CASE("brolin_measure ignores the thread count") {
  auto a = brolin_measure(kCantorMap, 0.5, 24, 5000, 20, 7, 1);
  auto b = brolin_measure(kCantorMap, 0.5, 24, 5000, 20, 7, 3);
  CHECK(a.points == b.points);
  CHECK_THROWS_AS(brolin_measure(kSquare, 1.0, 20, 10, 20, 1), std::invalid_argument);
  CHECK_THROWS_AS(brolin_measure(kSquare, 1.0, 30, 0, 20, 1), std::invalid_argument);
}

TEST_CASE("moment examples and merge") {
  PointCloudMeasure single;
  single.points = {2.0};
  single.weights = {1.0};
  CHECK(moment(single, 0) == Complex(1.0));
  CHECK(std::abs(moment(single, 3) - Complex(8.0)) < 1e-15);

  PointCloudMeasure other;
  other.points = {Complex(0, 1), -1.0};
  other.weights = {0.5, 0.5};
  auto ab = merge(single, other), ba = merge(other, single);
  CHECK(ab.points == ba.points);
  CHECK(ab.weights == ba.weights);
  CHECK(ab.total_mass == 2.0);
  auto p = normalized(ab);
  double s = 0.0;
  for (double w : p.weights) s += w;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("CircleMap branches") {
  CircleMap c3(3);
  Complex z = std::polar(1.0, 0.7);
  auto pre = c3.preimages(z);
  REQUIRE(pre.size() == 3);
  for (const auto& y : pre) CHECK(std::abs(c3.map(y) - z) < 1e-14);
  CHECK_THROWS_AS(CircleMap(1), std::invalid_argument);
}
