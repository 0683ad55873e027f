#pragma once

#include "tomra/core.hpp"
#include "tomra/random.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace tomra::complexdyn {

struct RootOptions {
  double tol = 1e-13;  // relative step size at convergence
  int max_sweeps = 200;
};

class RootFindingError : public std::runtime_error {
 public:
  RootFindingError(const std::string& what, std::vector<Complex> partial, std::vector<bool> converged)
      : std::runtime_error(what), partial_(std::move(partial)), converged_(std::move(converged)) {}
  const std::vector<Complex>& partial_roots() const { return partial_; }
  const std::vector<bool>& converged() const { return converged_; }

 private:
  std::vector<Complex> partial_;
  std::vector<bool> converged_;
};

// Roots of sum_k c_k z^k (ascending coefficients, leading one nonzero).
// Closed form up to degree 2, Aberth iteration beyond.
std::vector<Complex> polynomial_roots(const std::vector<Complex>& coeffs, const RootOptions& opt = {});

Complex poly_eval(const std::vector<Complex>& coeffs, Complex z);

struct ProjectivePoint {
  Complex z = 0.0;
  bool infinite = false;
  static ProjectivePoint infinity() { return {0.0, true}; }
  bool operator==(const ProjectivePoint& o) const { return infinite == o.infinite && (infinite || z == o.z); }
};

// Ordering of the preimages of a point: (real, imag) lexicographic.
struct BranchLabeling {
  bool operator()(const ProjectivePoint& a, const ProjectivePoint& b) const;
  bool operator()(Complex a, Complex b) const;
  template <class Range>
  void apply(Range& r) const {
    std::stable_sort(r.begin(), r.end(), [this](const auto& a, const auto& b) { return (*this)(point_of(a), point_of(b)); });
  }

 private:
  static const ProjectivePoint& point_of(const ProjectivePoint& p) { return p; }
  template <class T>
  static const ProjectivePoint& point_of(const T& t) { return t.point; }
};

class RationalMap {
 public:
  // Ascending coefficients of p and q.  Throws unless max(deg p, deg q) >= 2 and p, q share no root.
  RationalMap(std::vector<Complex> numerator, std::vector<Complex> denominator);
  static RationalMap polynomial(std::vector<Complex> numerator) { return RationalMap(std::move(numerator), {1.0}); }

  int degree() const { return degree_; }
  const std::vector<Complex>& numerator() const { return p_; }
  const std::vector<Complex>& denominator() const { return q_; }
  double resultant_magnitude() const { return resultant_; }

 private:
  std::vector<Complex> p_, q_;
  int degree_;
  double resultant_;
};

ProjectivePoint map_eval(const RationalMap& r, ProjectivePoint z);
inline ProjectivePoint map_eval(const RationalMap& r, Complex z) { return map_eval(r, ProjectivePoint{z, false}); }

struct Preimage {
  ProjectivePoint point;
  bool repeated = false;
};

// All d solutions of r(z) = w in branch order.
std::vector<Preimage> map_preimages(const RationalMap& r, ProjectivePoint w, const RootOptions& opt = {});
inline std::vector<Preimage> map_preimages(const RationalMap& r, Complex w, const RootOptions& opt = {}) {
  return map_preimages(r, ProjectivePoint{w, false}, opt);
}

// Endpoint of a depth-step backward orbit with a uniformly chosen branch at each step.
Complex backward_orbit_sample(const RationalMap& r, Complex z0, int depth, Engine& rng);

struct PointCloudMeasure {
  std::vector<Complex> points;
  std::vector<double> weights;
  double total_mass = 1.0;
  std::uint64_t seed = 0;
  int depth = 0;
  int burn_in = 0;

  std::size_t size() const { return points.size(); }
};

// n_samples independent chains; chain i uses stream (seed, i) so results do not depend on `threads`.
PointCloudMeasure brolin_measure(const RationalMap& r, Complex z0, int depth, int n_samples, int burn_in, std::uint64_t seed,
                                 int threads = 1);

// Weighted mean of z^k.
Complex moment(const PointCloudMeasure& mu, int k);

// Union of two clouds, points in branch order so merge is commutative and associative.
// Masses add; rescale with `normalized` to get a probability cloud back.
PointCloudMeasure merge(const PointCloudMeasure& a, const PointCloudMeasure& b);
PointCloudMeasure normalized(const PointCloudMeasure& mu, double total = 1.0);

// z -> z^N on the unit circle.
class CircleMap {
 public:
  using Point = Complex;
  explicit CircleMap(int n);
  int power() const { return n_; }
  Complex map(Complex z) const;
  std::vector<Complex> preimages(Complex z) const;
  int branch_count(Complex) const { return n_; }
  int max_branch_count() const { return n_; }

 private:
  int n_;
};

// Finite part of a rational map's dynamics, for the generic operator code.
class JuliaSystem {
 public:
  using Point = Complex;
  explicit JuliaSystem(RationalMap r, RootOptions opt = {}) : r_(std::move(r)), opt_(opt) {}
  const RationalMap& rational_map() const { return r_; }
  Complex map(Complex z) const;
  std::vector<Complex> preimages(Complex z) const;
  int branch_count(Complex) const { return r_.degree(); }
  int max_branch_count() const { return r_.degree(); }

 private:
  RationalMap r_;
  RootOptions opt_;
};

}  // namespace tomra::complexdyn
