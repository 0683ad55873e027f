#pragma once

#include "tomra/core.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tomra::symbolic {

using Symbol = int;  // 1-based
using Word = std::vector<Symbol>;

std::string word_string(const Word& w);

class TransitionMatrix {
 public:
  // Throws std::invalid_argument unless square, N >= 2, entries in {0,1}, every column hit.
  explicit TransitionMatrix(std::vector<std::vector<int>> entries);
  static TransitionMatrix full_shift(int n);
  static TransitionMatrix golden_mean();

  int size() const { return n_; }
  // A(from, to) == 1 means `to` may follow `from`.
  bool allowed(Symbol from, Symbol to) const { return a_[static_cast<std::size_t>(from - 1)][static_cast<std::size_t>(to - 1)] == 1; }
  int column_sum(Symbol s) const;
  int max_column_sum() const;
  const std::vector<std::vector<int>>& entries() const { return a_; }
  bool operator==(const TransitionMatrix& o) const { return a_ == o.a_; }

 private:
  int n_;
  std::vector<std::vector<int>> a_;
};

struct MatrixDiagnostics {
  bool onto = false;
  bool irreducible = false;  // strongly connected
  bool aperiodic = false;    // some power entrywise positive
  int period = 0;            // gcd of cycle lengths when irreducible, 0 otherwise
  std::optional<int> primitivity_exponent;
  int strong_components = 0;
};

MatrixDiagnostics analyze_matrix(const TransitionMatrix& a);

int preimage_count(const TransitionMatrix& a, Symbol x1);
bool is_admissible(const TransitionMatrix& a, const Word& w);
std::vector<Word> preimages_word(const TransitionMatrix& a, const Word& w);
// Lexicographic order.
std::vector<Word> admissible_words(const TransitionMatrix& a, int length);

// Admissible words of one length in lexicographic order, with reverse lookup.
class CylinderIndex {
 public:
  CylinderIndex(const TransitionMatrix& a, int level);
  const TransitionMatrix& matrix() const { return a_; }
  int level() const { return level_; }
  std::size_t size() const { return words_.size(); }
  const Word& word(std::size_t i) const { return words_[i]; }
  const std::vector<Word>& words() const { return words_; }
  // Looks at the first `level` symbols of w.
  std::optional<std::size_t> find(const Word& w) const;
  std::size_t index_of(const Word& w) const;

 private:
  TransitionMatrix a_;
  int level_;
  std::vector<Word> words_;
  std::map<Word, std::size_t> lookup_;
};

using IndexPtr = std::shared_ptr<const CylinderIndex>;
inline IndexPtr make_index(const TransitionMatrix& a, int level) { return std::make_shared<const CylinderIndex>(a, level); }

// Function on X(A) constant on cylinders of a fixed level.
template <class Scalar>
struct CylinderFunction {
  IndexPtr index;
  std::vector<Scalar> values;

  int level() const { return index->level(); }
  Scalar operator()(const Word& x) const { return values[index->index_of(x)]; }

  static CylinderFunction constant(IndexPtr idx, const Scalar& c) { return {idx, std::vector<Scalar>(idx->size(), c)}; }
  template <class F>
  static CylinderFunction from(IndexPtr idx, F&& f) {
    CylinderFunction out{idx, {}};
    out.values.reserve(idx->size());
    for (const auto& w : idx->words()) out.values.push_back(f(w));
    return out;
  }
};

// Re-express f on a finer index (level >= f.level()).
template <class Scalar>
CylinderFunction<Scalar> refine(const CylinderFunction<Scalar>& f, const IndexPtr& finer) {
  if (finer->level() < f.level()) throw std::invalid_argument("refine: target level is coarser");
  return CylinderFunction<Scalar>::from(finer, [&](const Word& w) { return f(w); });
}

struct CylinderMeasure {
  IndexPtr index;
  std::vector<Rational> masses;

  int level() const { return index->level(); }
  Rational total() const;
  // Mass of the cylinder [w] for |w| <= level (sums admissible extensions).
  Rational mass(const Word& w) const;
  // Masses of all admissible words of a coarser length.
  CylinderMeasure marginal(int level) const;
  template <class Scalar>
  Scalar integrate(const CylinderFunction<Scalar>& f) const {
    if (f.level() > level()) throw std::invalid_argument("CylinderMeasure::integrate: function finer than measure");
    Scalar s(0);
    for (std::size_t i = 0; i < index->size(); ++i) s += f(index->word(i)) * Scalar(masses[i]);
    return s;
  }
};

// Strongly invariant measure restricted to level-L cylinders, by exact solve of nu M = nu.
// Throws std::invalid_argument for reducible or periodic A.
CylinderMeasure invariant_cylinder_measure(const TransitionMatrix& a, int level);

// The same measure at every depth.  Uses mu[s w] = mu[w] / c(w_1), which is strong invariance
// applied to cylinder indicators, on top of the exact level-1 solve.
class InvariantMeasure {
 public:
  explicit InvariantMeasure(const TransitionMatrix& a);
  const TransitionMatrix& matrix() const { return a_; }
  Rational mass(const Word& w) const;
  CylinderMeasure at_level(int level) const;
  CylinderMeasure at_index(const IndexPtr& idx) const;

 private:
  TransitionMatrix a_;
  std::vector<Rational> level1_;
};

// Finite-rank Ruelle operator on level-L cylinder functions.
// Row w: (1/c(w_1)) sum_y W(y w) at the column of the first L symbols of y w.  W sees words of length L+1.
template <class Scalar, class WeightFn>
Matrix<Scalar> ruelle_matrix(const CylinderIndex& idx, WeightFn&& weight, Convention convention = Convention::averaged) {
  const auto& a = idx.matrix();
  const int L = idx.level();
  Matrix<Scalar> m(idx.size(), idx.size(), Scalar(0));
  for (std::size_t row = 0; row < idx.size(); ++row) {
    const Word& w = idx.word(row);
    auto pre = preimages_word(a, w);
    Scalar inv_c = convention == Convention::averaged ? Scalar(1) / Scalar(static_cast<int>(pre.size())) : Scalar(1);
    for (const auto& yw : pre) {
      Scalar v = weight(yw);
      if (v < Scalar(0)) throw std::invalid_argument("ruelle_matrix: negative weight on cylinder " + word_string(yw));
      Word head(yw.begin(), yw.begin() + L);
      m(row, idx.index_of(head)) += inv_c * v;
    }
  }
  return m;
}

template <class Scalar>
Matrix<Scalar> ruelle_matrix_one(const CylinderIndex& idx, Convention convention = Convention::averaged) {
  return ruelle_matrix<Scalar>(idx, [](const Word&) { return Scalar(1); }, convention);
}

// Exact solve of x B = b-style systems: returns nu with nu M = nu and sum nu = 1.
std::vector<Rational> stationary_vector(const Matrix<Rational>& m);

}  // namespace tomra::symbolic
