#include "doctest.h"
#include "tomra/filters.hpp"
#include "tomra/transfer.hpp"

#include <cmath>
#include <numbers>

using namespace tomra;
using namespace tomra::filters;
using complexdyn::CircleMap;

namespace {
const double r2 = std::numbers::sqrt2;
const auto kSamples = transfer::roots_of_unity(1024);

// Samples off the roots of unity too, so step-function cells are exercised.
std::vector<Complex> jittered(int m, double shift) {
  std::vector<Complex> out;
  for (int j = 0; j < m; ++j) out.push_back(std::polar(1.0, 2 * std::numbers::pi * (j + shift) / m));
  return out;
}
}  // namespace

TEST_CASE("filter_from_coeffs examples") {
  auto haar = filter_from_coeffs({0, {1 / r2, 1 / r2}}, 2);
  CHECK(std::abs(haar.value_at_one - r2) <= 1e-15);
  CHECK(haar.lowpass_normalized());
  CHECK_FALSE(haar.trivial);
  REQUIRE(haar.unit_circle_zeros.size() == 1);
  CHECK(std::abs(haar.unit_circle_zeros[0] + 1.0) <= 1e-12);

  auto cantor = filter_from_coeffs({0, {1 / r2, 0.0, 1 / r2}}, 3);
  CHECK(std::abs(cantor.value_at_one - r2) <= 1e-15);
  CHECK_FALSE(cantor.lowpass_normalized());  // sqrt2, not sqrt3
  CHECK(cantor.unit_circle_zeros.size() == 2);

  auto one = filter_from_coeffs({0, {1.0}}, 2);
  CHECK(one.trivial);
  CHECK(one(Complex(0.3, 0.4)) == Complex(1.0));

  auto zero = filter_from_coeffs({0, {0.0, 0.0}}, 2);
  CHECK(zero.singular);
  CHECK_THROWS_AS(filter_from_coeffs({0, {}}, 2), std::invalid_argument);
}

TEST_CASE("presets") {
  auto c4 = preset_filters("classical(4)");
  CHECK(c4.N == 4);
  REQUIRE(c4.m.size() == 4);
  Complex z = std::polar(1.0, 0.37);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(c4.m[static_cast<std::size_t>(k)](z) - std::pow(z, k)) <= 1e-15);
  CHECK(c4.h(z) == 1.0);

  auto haar = preset_filters("haar");
  CHECK(std::abs(haar.m[0](z) - (1.0 + z) / r2) <= 1e-15);
  CHECK(std::abs(haar.m[1](z) - (1.0 - z) / r2) <= 1e-15);

  auto cantor = preset_filters("cantor");
  CHECK(cantor.N == 3);
  CHECK(std::abs(cantor.m[0](z) - (1.0 + z * z) / r2) <= 1e-15);
  CHECK(std::abs(cantor.m[1](z) - (1.0 - z * z) / r2) <= 1e-15);
  CHECK(std::abs(cantor.m[2](z) - z) <= 1e-15);

  auto sh = preset_filters("stretched_haar");
  CHECK(sh.m.size() == 1);
  CHECK(std::abs(sh.h(z) - (1.0 + z.real())) <= 1e-15);

  CHECK_THROWS_AS(preset_filters("daubechies"), std::invalid_argument);
}

TEST_CASE("qmf_residual") {
  CHECK(qmf_residual(preset_filters("classical(2)"), CircleMap(2), kSamples) <= 1e-12);
  CHECK(qmf_residual(preset_filters("haar"), CircleMap(2), kSamples) <= 1e-12);
  CHECK(qmf_residual(preset_filters("cantor"), CircleMap(3), kSamples) <= 1e-12);
  for (int n = 2; n <= 5; ++n) CHECK(qmf_residual(classical_filters(n), CircleMap(n), kSamples) <= 1e-12);

  // {1, 1}: the off-diagonal average is 1.
  auto ones = from_polynomials("ones", 2, {TrigPoly::constant(1.0), TrigPoly::constant(1.0)});
  CHECK(std::abs(qmf_residual(ones, CircleMap(2), kSamples) - 1.0) <= 1e-15);
}

TEST_CASE("orthonormal low-pass filters average to one") {
  for (const auto* name : {"haar", "classical(3)", "cantor"}) {
    auto f = preset_filters(name);
    CircleMap sys(f.N);
    transfer::WeightFunction<Complex, double> w([&](Complex y) { return std::norm(f.m[0](y)); });
    for (const auto& x : kSamples) CHECK(std::abs(transfer::apply_ruelle(sys, w, [](Complex) { return 1.0; }, x) - 1.0) <= 1e-12);
  }
}

TEST_CASE("loop group: identity and swap") {
  auto haar = haar_filters();
  auto same = loop_group_apply(LoopGroupElement::identity(2), haar, CircleMap(2));
  for (const auto& x : jittered(257, 0.3))
    for (int i = 0; i < 2; ++i) CHECK(same.m[static_cast<std::size_t>(i)](x) == haar.m[static_cast<std::size_t>(i)](x));

  Eigen::MatrixXcd swap(2, 2);
  swap << 0, 1, 1, 0;
  auto swapped = loop_group_apply(LoopGroupElement::constant(swap), classical_filters(2), CircleMap(2));
  for (const auto& x : jittered(64, 0.1)) {
    CHECK(swapped.m[0](x) == x);
    CHECK(swapped.m[1](x) == Complex(1.0));
  }

  auto cantor = cantor_filters();
  auto c2 = loop_group_apply(LoopGroupElement::identity(3), cantor, CircleMap(3));
  for (const auto& x : jittered(64, 0.2))
    for (int i = 0; i < 3; ++i) CHECK(c2.m[static_cast<std::size_t>(i)](x) == cantor.m[static_cast<std::size_t>(i)](x));

  Eigen::MatrixXcd bad(2, 2);
  bad << 1, 1, 0, 1;
  CHECK_THROWS_AS(loop_group_apply(LoopGroupElement::constant(bad), haar, CircleMap(2)), std::domain_error);
  CHECK_THROWS_AS(loop_group_apply(LoopGroupElement::identity(3), haar, CircleMap(2)), std::invalid_argument);
}

TEST_CASE("loop group: random elements preserve the QMF identity") {
  Engine rng = make_stream(2024, 0);
  auto samples = jittered(1024, 0.25);
  for (const auto* name : {"haar", "classical(2)", "cantor", "classical(4)"}) {
    auto f = preset_filters(name);
    CircleMap sys(f.N);
    double base = qmf_residual(f, sys, samples);
    for (int t = 0; t < 10; ++t) {
      auto a = random_loop_element(f.N, 3, rng);
      CHECK(a.unitarity_defect() <= 1e-12);
      CHECK(qmf_residual(loop_group_apply(a, f, sys), sys, samples) <= base + 1e-10);
    }
  }
}

TEST_CASE("loop group: the sample z = 1 sits on the wrap-around break") {
  Engine rng = make_stream(7, 0);
  auto f = preset_filters("classical(2)");
  CircleMap sys(2);
  for (int t = 0; t < 20; ++t) {
    auto a = random_loop_element(2, 4, rng);
    CHECK(a.cell_of(std::polar(1.0, -1e-15)) == 0);
    CHECK(qmf_residual(loop_group_apply(a, f, sys), sys, kSamples) <= 1e-10);
  }
}

TEST_CASE("loop group: action composes through the pointwise product") {
  Engine rng = make_stream(7, 1);
  auto f = cantor_filters();
  CircleMap sys(3);
  auto samples = jittered(300, 0.4);
  for (int t = 0; t < 10; ++t) {
    auto a = random_loop_element(3, 3, rng);
    auto b = random_loop_element(3, 4, rng);
    auto twice = loop_group_apply(b, loop_group_apply(a, f, sys), sys);
    auto once = loop_group_apply(b * a, f, sys);
    for (const auto& x : samples)
      for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(twice.m[i](x) - once.m[i](x)) <= 1e-10);
  }
}

TEST_CASE("cascade: Haar stays the unit box") {
  for (int it : {0, 1, 5}) {
    auto c = cascade_approx({0, {1 / r2, 1 / r2}}, 2, it, 64);
    CHECK(c.support == 1);
    for (const auto& v : c.values) CHECK(std::abs(v - 1.0) <= 1e-15);
    CHECK(c.residual <= 1e-15);
  }
}

TEST_CASE("cascade: stretched Haar reaches the box on [0,2)") {
  const int spu = 32;  // 2^5
  auto c = cascade_approx({0, {1 / r2, 0.0, 1 / r2}}, 2, 8, spu);
  CHECK(c.support == 2);
  REQUIRE(c.values.size() == 64);
  for (const auto& v : c.values) CHECK(std::abs(v - 1.0) <= 1e-12);
  CHECK(c.residual <= 1e-12);
  for (std::size_t m = 1; m < c.residual_history.size(); ++m) CHECK(c.residual_history[m] <= c.residual_history[m - 1] + 1e-15);
  // The box is a fixed point: chi(x) = chi(2x) + chi(2x - 2).
  for (double x = 0.0; x < 2.0; x += 1.0 / spu) {
    auto chi = [](double t) { return (t >= 0.0 && t < 2.0) ? 1.0 : 0.0; };
    CHECK(chi(x) == chi(2 * x) + chi(2 * x - 2));
  }
}

TEST_CASE("cascade: zero iterations and grid validation") {
  auto c = cascade_approx({0, {0.5, 0.5, 0.5, 0.5}}, 2, 0, 8);
  CHECK(c.support == 3);
  for (std::size_t j = 0; j < c.values.size(); ++j) CHECK(c.values[j] == Complex(c.x[j] < 1.0 ? 1.0 : 0.0));
  CHECK_THROWS_AS(cascade_approx({0, {1 / r2, 1 / r2}}, 2, 3, 12), std::invalid_argument);
  CHECK_THROWS_AS(cascade_approx({0, {1 / r2, 1 / r2}}, 3, 3, 8), std::invalid_argument);
  CHECK_NOTHROW(cascade_approx({0, {1 / r2, 0.0, 1 / r2}}, 3, 3, 27));
}
