#pragma once

#include "tomra/core.hpp"
#include "tomra/filters.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace tomra::cantor {

// [k / 3^n, (k+1) / 3^n), 0 <= k < 3^n, n <= 39.
struct TriadicInterval {
  int level = 0;
  std::uint64_t index = 0;

  TriadicInterval(int n, std::uint64_t k);
  Rational left() const;
  Rational right() const;
  std::vector<int> digits() const;  // most significant first, `level` digits
  bool admissible() const;          // no digit 1
  std::array<TriadicInterval, 3> children() const;
};

std::uint64_t pow3(int n);

// s = log 2 / log 3.
double hausdorff_dimension();

// H^s restricted to C, normalized to mass 1: 2^-n on admissible intervals, 0 otherwise.
Rational cantor_measure(const TriadicInterval& i);

// max over level-n intervals of |mass - sum of the children's masses|.
Rational additivity_defect(int n);

// chi of the level-n approximant C_n (2^n closed-open intervals) at x = num / 3^m, exactly.
int approximant_indicator(int n, std::int64_t num, int m);

// max over x = k / 3^n in [0, 3) of |chi_{C_n}(x/3) - chi_{C_{n-1}}(x) - chi_{C_{n-1}}(x - 2)|, in integers.
long scaling_identity_residual(int n);

// {(1+z^2)/sqrt2, (1-z^2)/sqrt2, z} on z -> z^3, h = 1, checked by qmf_residual on 1024 samples.
filters::CircleFilterSystem cantor_filter_system();

// ---- exact inner products in L^2(R, H^s) ----
//
// A cell (j, k) is 3^-j (C + k); its H^s mass is 2^-j.  Cells of one level meet only in
// measure-zero sets, and (j, k) splits into (j+1, 3k) and (j+1, 3k+2).
// Functions are sqrt(scale2) * sum_k c_k chi_(level, k) with integer c_k.

struct ScaledFunction {
  Rational scale2{1};
  int level = 0;
  std::map<std::int64_t, std::int64_t> cells;
};

// sqrt(scale2) * coefficient.
struct ScaledValue {
  Rational scale2{1};
  Rational coefficient{0};
  bool is_zero() const { return coefficient == 0; }
  Rational square() const { return scale2 * coefficient * coefficient; }
  double value() const;
};

// Exact filter taps: m_i(z) = sqrt(scale2) sum_k taps[k] z^k.
struct ExactFilter {
  Rational scale2;
  std::vector<std::int64_t> taps;
};
std::array<ExactFilter, 3> cantor_exact_filters();

ScaledFunction scaling_function(std::int64_t k);  // phi(x - k) = chi_C(x - k)
// 2^{j/2} psi_i(3^j x - k) with psi_i(x) = sqrt2 sum_t a^i_t phi(3x - t), i in {1, 2}.
ScaledFunction detail_function(int i, int j, std::int64_t k);
ScaledFunction refine(const ScaledFunction& f, int level);
ScaledValue inner_product(const ScaledFunction& f, const ScaledFunction& g);

struct OrthogonalityReport {
  int level = 0;
  std::size_t functions = 0;
  std::size_t pairs = 0;
  bool orthogonal = true;
  bool normalized = true;
  std::string first_failure;
};

// phi(x) and 2^{j/2} psi_i(3^j x - k) for i = 1, 2, 0 <= j < n, 0 <= k < 3^j: Gram matrix equals the identity.
OrthogonalityReport detail_orthogonality(int n);

}  // namespace tomra::cantor
