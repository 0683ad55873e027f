#include "tomra/symbolic.hpp"

#include <numeric>
#include <queue>
#include <sstream>

namespace tomra {

std::string rational_string(const Rational& q) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(q);
  if (boost::multiprecision::denominator(q) != 1) os << '/' << boost::multiprecision::denominator(q);
  return os.str();
}

}  // namespace tomra

namespace tomra::symbolic {

std::string word_string(const Word& w) {
  std::string s = "(";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(w[i]);
  }
  return s + ")";
}

TransitionMatrix::TransitionMatrix(std::vector<std::vector<int>> entries) : n_(static_cast<int>(entries.size())), a_(std::move(entries)) {
  if (n_ < 2) throw std::invalid_argument("TransitionMatrix: alphabet size must be at least 2");
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (static_cast<int>(a_[i].size()) != n_)
      throw std::invalid_argument("TransitionMatrix: row " + std::to_string(i + 1) + " has " + std::to_string(a_[i].size()) +
                                  " entries, expected " + std::to_string(n_));
    for (std::size_t j = 0; j < a_[i].size(); ++j)
      if (a_[i][j] != 0 && a_[i][j] != 1)
        throw std::invalid_argument("TransitionMatrix: entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") is not 0 or 1");
  }
  for (Symbol s = 1; s <= n_; ++s)
    if (column_sum(s) == 0) throw std::invalid_argument("TransitionMatrix: column " + std::to_string(s) + " is empty, shift is not onto");
}

TransitionMatrix TransitionMatrix::full_shift(int n) {
  return TransitionMatrix(std::vector<std::vector<int>>(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 1)));
}

TransitionMatrix TransitionMatrix::golden_mean() { return TransitionMatrix({{1, 1}, {1, 0}}); }

int TransitionMatrix::column_sum(Symbol s) const {
  if (s < 1 || s > n_) throw std::out_of_range("symbol " + std::to_string(s) + " outside 1.." + std::to_string(n_));
  int c = 0;
  for (const auto& row : a_) c += row[static_cast<std::size_t>(s - 1)];
  return c;
}

int TransitionMatrix::max_column_sum() const {
  int m = 0;
  for (Symbol s = 1; s <= n_; ++s) m = std::max(m, column_sum(s));
  return m;
}

MatrixDiagnostics analyze_matrix(const TransitionMatrix& a) {
  const int n = a.size();
  MatrixDiagnostics d;
  d.onto = true;
  for (Symbol s = 1; s <= n; ++s) d.onto = d.onto && a.column_sum(s) > 0;

  // Transitive closure.
  std::vector<std::vector<bool>> reach(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) reach[i][j] = a.allowed(i + 1, j + 1);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (reach[i][k])
        for (int j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = true;

  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    if (comp[i] >= 0) continue;
    comp[i] = d.strong_components;
    for (int j = i + 1; j < n; ++j)
      if (comp[j] < 0 && reach[i][j] && reach[j][i]) comp[j] = d.strong_components;
    ++d.strong_components;
  }
  d.irreducible = d.strong_components == 1 && reach[0][0];

  if (d.irreducible) {
    std::vector<int> depth(static_cast<std::size_t>(n), -1);
    std::queue<int> q;
    depth[0] = 0;
    q.push(0);
    int g = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v = 0; v < n; ++v) {
        if (!a.allowed(u + 1, v + 1)) continue;
        if (depth[v] < 0) {
          depth[v] = depth[u] + 1;
          q.push(v);
        } else {
          g = std::gcd(g, std::abs(depth[u] + 1 - depth[v]));
        }
      }
    }
    d.period = g;
  }

  // Boolean powers up to Wielandt's bound.
  std::vector<std::vector<bool>> p(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p[i][j] = a.allowed(i + 1, j + 1);
  const int bound = (n - 1) * (n - 1) + 1;
  for (int e = 1; e <= bound; ++e) {
    bool positive = true;
    for (int i = 0; i < n && positive; ++i)
      for (int j = 0; j < n && positive; ++j) positive = p[i][j];
    if (positive) {
      d.aperiodic = true;
      d.primitivity_exponent = e;
      break;
    }
    std::vector<std::vector<bool>> next(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        if (p[i][k])
          for (int j = 0; j < n; ++j)
            if (a.allowed(k + 1, j + 1)) next[i][j] = true;
    p = std::move(next);
  }
  return d;
}

int preimage_count(const TransitionMatrix& a, Symbol x1) { return a.column_sum(x1); }

bool is_admissible(const TransitionMatrix& a, const Word& w) {
  for (Symbol s : w)
    if (s < 1 || s > a.size()) return false;
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (!a.allowed(w[i], w[i + 1])) return false;
  return true;
}

std::vector<Word> preimages_word(const TransitionMatrix& a, const Word& w) {
  if (!is_admissible(a, w)) throw std::invalid_argument("preimages_word: inadmissible word " + word_string(w));
  std::vector<Word> out;
  for (Symbol y = 1; y <= a.size(); ++y) {
    if (!w.empty() && !a.allowed(y, w.front())) continue;
    Word yw;
    yw.reserve(w.size() + 1);
    yw.push_back(y);
    yw.insert(yw.end(), w.begin(), w.end());
    out.push_back(std::move(yw));
  }
  return out;
}

std::vector<Word> admissible_words(const TransitionMatrix& a, int length) {
  if (length < 0) throw std::invalid_argument("admissible_words: negative length");
  std::vector<Word> cur{Word{}};
  for (int k = 0; k < length; ++k) {
    std::vector<Word> next;
    for (const auto& w : cur)
      for (Symbol s = 1; s <= a.size(); ++s) {
        if (!w.empty() && !a.allowed(w.back(), s)) continue;
        Word e = w;
        e.push_back(s);
        next.push_back(std::move(e));
      }
    cur = std::move(next);
  }
  return cur;
}

CylinderIndex::CylinderIndex(const TransitionMatrix& a, int level) : a_(a), level_(level), words_(admissible_words(a, level)) {
  if (level < 1) throw std::invalid_argument("CylinderIndex: level must be >= 1");
  for (std::size_t i = 0; i < words_.size(); ++i) lookup_.emplace(words_[i], i);
}

std::optional<std::size_t> CylinderIndex::find(const Word& w) const {
  if (static_cast<int>(w.size()) < level_) return std::nullopt;
  auto it = lookup_.find(Word(w.begin(), w.begin() + level_));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t CylinderIndex::index_of(const Word& w) const {
  auto i = find(w);
  if (!i) throw std::out_of_range("CylinderIndex: no admissible level-" + std::to_string(level_) + " cylinder for " + word_string(w));
  return *i;
}

Rational CylinderMeasure::total() const {
  Rational s = 0;
  for (const auto& m : masses) s += m;
  return s;
}

Rational CylinderMeasure::mass(const Word& w) const {
  if (static_cast<int>(w.size()) > level()) throw std::invalid_argument("CylinderMeasure::mass: word longer than level");
  Rational s = 0;
  for (std::size_t i = 0; i < index->size(); ++i)
    if (std::equal(w.begin(), w.end(), index->word(i).begin())) s += masses[i];
  return s;
}

CylinderMeasure CylinderMeasure::marginal(int lv) const {
  if (lv < 1 || lv > level()) throw std::invalid_argument("CylinderMeasure::marginal: bad level");
  auto idx = make_index(index->matrix(), lv);
  CylinderMeasure out{idx, std::vector<Rational>(idx->size(), Rational(0))};
  for (std::size_t i = 0; i < index->size(); ++i) out.masses[idx->index_of(index->word(i))] += masses[i];
  return out;
}

std::vector<Rational> stationary_vector(const Matrix<Rational>& m) {
  const std::size_t n = m.rows();
  // Rows of (M - I)^T, last one replaced by the normalization.
  Matrix<Rational> b(n, n + 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = m(j, i) - (i == j ? Rational(1) : Rational(0));
  for (std::size_t j = 0; j < n; ++j) b(n - 1, j) = 1;
  b(n - 1, n) = 1;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && b(piv, col) == 0) ++piv;
    if (piv == n) throw std::domain_error("stationary_vector: fixed-point system is singular (stationary vector not unique)");
    if (piv != col)
      for (std::size_t j = 0; j <= n; ++j) std::swap(b(piv, j), b(col, j));
    Rational inv = Rational(1) / b(col, col);
    for (std::size_t j = col; j <= n; ++j) b(col, j) *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || b(r, col) == 0) continue;
      Rational f = b(r, col);
      for (std::size_t j = col; j <= n; ++j) b(r, j) -= f * b(col, j);
    }
  }
  std::vector<Rational> nu(n);
  for (std::size_t i = 0; i < n; ++i) nu[i] = b(i, n);
  return nu;
}

static void require_primitive(const TransitionMatrix& a, const char* who) {
  auto d = analyze_matrix(a);
  if (!d.irreducible)
    throw std::invalid_argument(std::string(who) + ": transition matrix is reducible (" + std::to_string(d.strong_components) +
                                " strongly connected classes); the invariant measure is not unique");
  if (!d.aperiodic)
    throw std::invalid_argument(std::string(who) + ": transition matrix is periodic (period " + std::to_string(d.period) +
                                "); no power of A is positive");
}

CylinderMeasure invariant_cylinder_measure(const TransitionMatrix& a, int level) {
  require_primitive(a, "invariant_cylinder_measure");
  auto idx = make_index(a, level);
  auto m = ruelle_matrix_one<Rational>(*idx);
  return CylinderMeasure{idx, stationary_vector(m)};
}

InvariantMeasure::InvariantMeasure(const TransitionMatrix& a) : a_(a) {
  level1_ = invariant_cylinder_measure(a, 1).masses;
}

Rational InvariantMeasure::mass(const Word& w) const {
  if (w.empty()) return 1;
  if (!is_admissible(a_, w)) return 0;
  Rational m = level1_[static_cast<std::size_t>(w.back() - 1)];
  for (std::size_t i = w.size() - 1; i-- > 0;) m /= a_.column_sum(w[i + 1]);
  return m;
}

CylinderMeasure InvariantMeasure::at_index(const IndexPtr& idx) const {
  if (!(idx->matrix() == a_)) throw std::invalid_argument("InvariantMeasure::at_index: index built for a different matrix");
  CylinderMeasure out{idx, {}};
  out.masses.reserve(idx->size());
  for (const auto& w : idx->words()) out.masses.push_back(mass(w));
  return out;
}

CylinderMeasure InvariantMeasure::at_level(int level) const { return at_index(make_index(a_, level)); }

}  // namespace tomra::symbolic
