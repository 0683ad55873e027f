#include "tomra/cantor.hpp"
#include "tomra/cli.hpp"
#include "tomra/filters.hpp"
#include "tomra/martingale.hpp"
#include "tomra/solenoid.hpp"
#include "tomra/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <regex>
#include <set>

namespace tomra::cli {

using json = nlohmann::json;
using symbolic::TransitionMatrix;
using symbolic::Word;

Rational EigenPair::hw(const Word& y) const { return h.at(Word(y.begin(), y.begin() + 2)); }
Rational EigenPair::w(const Word& y) const { return p.at({y[0], y[1]}) * hw(Word(y.begin() + 1, y.end())) / hw(y); }

namespace {

Rational random_rational(Engine& rng, int lo, int hi) {
  const int den = 1 + static_cast<int>(uniform_index(rng, 6));
  const int num = lo * den + static_cast<int>(uniform_index(rng, static_cast<std::size_t>((hi - lo) * den + 1)));
  return Rational(num, den);
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

EigenPair random_eigen_pair(const TransitionMatrix& a, Engine& rng) {
  EigenPair e{a, {}, {}};
  for (int x1 = 1; x1 <= a.size(); ++x1) {
    std::vector<int> pred;
    for (int s = 1; s <= a.size(); ++s)
      if (a.allowed(s, x1)) pred.push_back(s);
    std::vector<Rational> raw;
    Rational sum(0);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      raw.push_back(random_rational(rng, 1, 4));
      sum += raw.back();
    }
    for (std::size_t i = 0; i < pred.size(); ++i) e.p[{pred[i], x1}] = raw[i] * static_cast<int>(pred.size()) / sum;
  }
  for (const auto& w : symbolic::admissible_words(a, 2)) e.h[w] = random_rational(rng, 1, 3);
  return e;
}

PhaseFilter random_phase_filter(std::uint64_t seed) {
  PhaseFilter s;
  Engine rng = make_stream(seed, 0);
  std::map<Word, double> hv;
  for (const auto& w : symbolic::admissible_words(s.space.matrix(), 2)) hv[w] = 0.5 + uniform01(rng);
  const double p11 = 0.3 + 1.4 * uniform01(rng);
  const std::map<Word, double> p{{{1, 1}, p11}, {{2, 1}, 2.0 - p11}, {{1, 2}, 1.0}};
  s.h = s.space.from(2, [&](const Word& w) { return Complex(hv.at(w)); });
  s.m0 = s.space.from(3, [&](const Word& y) {
    const double w = p.at({y[0], y[1]}) * hv.at({y[1], y[2]}) / hv.at({y[0], y[1]});
    return std::polar(std::sqrt(w), kTwoPi * uniform01(rng));
  });
  return s;
}

namespace {

// ---------------------------------------------------------------- config access

const json& section(const json& c, const char* key) {
  static const json empty = json::object();
  auto it = c.find(key);
  if (it == c.end()) return empty;
  if (!it->is_object()) throw ConfigError(key, "expected an object");
  return *it;
}

const json& params(const json& c) { return section(c, "params"); }

std::string at_field(const std::string& key) { return "params." + key; }

long get_int(const json& c, const std::string& key, long def, long lo, long hi) {
  const auto& p = params(c);
  auto it = p.find(key);
  if (it == p.end()) return def;
  long v = 0;
  if (it->is_number_integer()) {
    v = it->get<long>();
  } else if (it->is_number_float() && std::floor(it->get<double>()) == it->get<double>() && std::abs(it->get<double>()) < 1e15) {
    v = static_cast<long>(it->get<double>());
  } else {
    throw ConfigError(at_field(key), "expected an integer");
  }
  if (v < lo || v > hi) throw ConfigError(at_field(key), "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

double get_double(const json& c, const std::string& key, double def, double lo, double hi) {
  const auto& p = params(c);
  auto it = p.find(key);
  if (it == p.end()) return def;
  if (!it->is_number()) throw ConfigError(at_field(key), "expected a number");
  const double v = it->get<double>();
  if (!(v >= lo && v <= hi)) throw ConfigError(at_field(key), "must be in [" + format_double(lo) + ", " + format_double(hi) + "]");
  return v;
}

std::string get_choice(const json& c, const std::string& key, const std::string& def, const std::vector<std::string>& allowed) {
  const auto& p = params(c);
  auto it = p.find(key);
  if (it == p.end()) return def;
  if (!it->is_string()) throw ConfigError(at_field(key), "expected a string");
  const auto v = it->get<std::string>();
  if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw ConfigError(at_field(key), "must be one of {" + list + "}");
  }
  return v;
}

std::vector<int> get_int_list(const json& c, const std::string& key, std::vector<int> def, int lo, int hi) {
  const auto& p = params(c);
  auto it = p.find(key);
  if (it == p.end()) return def;
  if (!it->is_array() || it->empty()) throw ConfigError(at_field(key), "expected a non-empty array of integers");
  std::vector<int> out;
  for (const auto& x : *it) {
    if (!x.is_number_integer()) throw ConfigError(at_field(key), "expected integers");
    const int v = x.get<int>();
    if (v < lo || v > hi) throw ConfigError(at_field(key), "entries must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    out.push_back(v);
  }
  return out;
}

std::uint64_t seed_of(const json& c) { return c.at("seed").get<std::uint64_t>(); }

Complex parse_complex(const json& v, const std::string& field) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(field, "expected a number or [re, im]");
}

Rational parse_rational(const json& v, const std::string& field) {
  if (v.is_number_integer()) return Rational(v.get<long>());
  if (v.is_string()) {
    static const std::regex re(R"(\s*(-?\d+)\s*(?:/\s*(\d+))?\s*)");
    std::smatch m;
    const auto s = v.get<std::string>();
    if (std::regex_match(s, m, re)) {
      Rational q(std::stol(m[1].str()));
      if (m[2].matched) {
        const long d = std::stol(m[2].str());
        if (d == 0) throw ConfigError(field, "zero denominator");
        q /= d;
      }
      return q;
    }
  }
  throw ConfigError(field, "expected an integer or a \"p/q\" string");
}

TrigPoly parse_trig(const json& v, const std::string& field) {
  if (!v.is_object() || !v.contains("coeffs")) throw ConfigError(field, "expected {\"low\": k, \"coeffs\": [...]}");
  const int low = v.value("low", 0);
  const auto& cs = v.at("coeffs");
  if (!cs.is_array() || cs.empty()) throw ConfigError(field + ".coeffs", "expected a non-empty array");
  std::vector<Complex> c;
  for (std::size_t i = 0; i < cs.size(); ++i) c.push_back(parse_complex(cs[i], field + ".coeffs[" + std::to_string(i) + "]"));
  return TrigPoly(low, c);
}

// ---------------------------------------------------------------- systems

struct SystemSpec {
  enum class Kind { subshift, circle, rational } kind = Kind::subshift;
  std::optional<TransitionMatrix> matrix;
  int N = 2;
  std::optional<complexdyn::RationalMap> map;
};

TransitionMatrix parse_matrix(const json& m) {
  if (!m.is_array() || m.empty()) throw ConfigError("system.matrix", "expected a non-empty array of rows");
  std::vector<std::vector<int>> rows;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const std::string f = "system.matrix[" + std::to_string(i) + "]";
    if (!m[i].is_array()) throw ConfigError(f, "expected an array of 0/1 entries");
    std::vector<int> row;
    for (std::size_t j = 0; j < m[i].size(); ++j) {
      if (!m[i][j].is_number_integer()) throw ConfigError(f + "[" + std::to_string(j) + "]", "expected 0 or 1");
      row.push_back(m[i][j].get<int>());
    }
    rows.push_back(std::move(row));
  }
  try {
    return TransitionMatrix(rows);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("system.matrix", e.what());
  }
}

std::vector<Complex> parse_coeffs(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) throw ConfigError(field, "expected a non-empty coefficient array, constant term first");
  std::vector<Complex> c;
  for (std::size_t i = 0; i < v.size(); ++i) c.push_back(parse_complex(v[i], field + "[" + std::to_string(i) + "]"));
  return c;
}

SystemSpec parse_system(const json& c, const std::string& def) {
  json s = c.contains("system") ? c.at("system") : json(def);
  SystemSpec out;
  if (s.is_string()) {
    const auto name = s.get<std::string>();
    static const std::regex full(R"(full-shift(?::(\d+))?)"), circle(R"((?:circle:|z\^)(\d+))");
    std::smatch m;
    if (name == "golden-mean") {
      out.matrix = TransitionMatrix::golden_mean();
    } else if (std::regex_match(name, m, full)) {
      const int n = m[1].matched ? std::stoi(m[1].str()) : 2;
      if (n < 2 || n > 16) throw ConfigError("system", "full shift needs 2..16 symbols");
      out.matrix = TransitionMatrix::full_shift(n);
    } else if (std::regex_match(name, m, circle)) {
      out.kind = SystemSpec::Kind::circle;
      out.N = std::stoi(m[1].str());
      if (out.N < 2 || out.N > 64) throw ConfigError("system", "circle power must be in [2, 64]");
    } else {
      throw ConfigError("system", "unknown system '" + name + "' (golden-mean, full-shift:N, circle:N, or an object)");
    }
    return out;
  }
  if (!s.is_object() || !s.contains("type") || !s.at("type").is_string()) throw ConfigError("system.type", "expected subshift, circle or rational");
  const auto type = s.at("type").get<std::string>();
  if (type == "subshift") {
    if (!s.contains("matrix")) throw ConfigError("system.matrix", "missing");
    out.matrix = parse_matrix(s.at("matrix"));
  } else if (type == "circle") {
    out.kind = SystemSpec::Kind::circle;
    if (!s.contains("N") || !s.at("N").is_number_integer()) throw ConfigError("system.N", "expected an integer");
    out.N = s.at("N").get<int>();
    if (out.N < 2 || out.N > 64) throw ConfigError("system.N", "must be in [2, 64]");
  } else if (type == "rational") {
    out.kind = SystemSpec::Kind::rational;
    if (!s.contains("numerator")) throw ConfigError("system.numerator", "missing");
    auto num = parse_coeffs(s.at("numerator"), "system.numerator");
    auto den = s.contains("denominator") ? parse_coeffs(s.at("denominator"), "system.denominator") : std::vector<Complex>{1.0};
    try {
      out.map = complexdyn::RationalMap(num, den);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("system", e.what());
    }
  } else {
    throw ConfigError("system.type", "unknown type '" + type + "'");
  }
  return out;
}

TransitionMatrix require_subshift(const SystemSpec& s, const std::string& op) {
  if (s.kind != SystemSpec::Kind::subshift) throw ConfigError("system", op + " needs a subshift");
  return *s.matrix;
}

int require_circle(const SystemSpec& s, const std::string& op) {
  if (s.kind != SystemSpec::Kind::circle) throw ConfigError("system", op + " needs a circle map z^N");
  return s.N;
}

// ---------------------------------------------------------------- weights and filters

filters::CircleFilterSystem parse_filter(const json& v, const std::string& field) {
  if (v.is_string()) {
    try {
      return filters::preset_filters(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(field, e.what());
    }
  }
  if (!v.is_object()) throw ConfigError(field, "expected a preset name or {\"N\", \"polys\", \"h\"}");
  if (!v.contains("N") || !v.at("N").is_number_integer()) throw ConfigError(field + ".N", "expected an integer");
  const int n = v.at("N").get<int>();
  if (n < 2 || n > 64) throw ConfigError(field + ".N", "must be in [2, 64]");
  if (!v.contains("polys") || !v.at("polys").is_array() || v.at("polys").empty()) throw ConfigError(field + ".polys", "expected a non-empty array");
  std::vector<TrigPoly> polys;
  for (std::size_t i = 0; i < v.at("polys").size(); ++i)
    polys.push_back(parse_trig(v.at("polys")[i], field + ".polys[" + std::to_string(i) + "]"));
  TrigPoly h = v.contains("h") ? parse_trig(v.at("h"), field + ".h") : TrigPoly::constant(1.0);
  return filters::from_polynomials(v.value("name", std::string("custom")), n, std::move(polys), std::move(h));
}

filters::CircleFilterSystem filter_of(const json& c, const std::string& def) {
  return parse_filter(c.contains("filter") ? c.at("filter") : json(def), "filter");
}

// |m0|^2 of a preset, the constant 1, or explicit coefficients.
TrigPoly circle_weight(const json& c, int n, const std::string& def) {
  json w = c.contains("weight") ? c.at("weight") : json(def);
  if (w.is_string() && w.get<std::string>() == "one") return TrigPoly::constant(1.0);
  if (w.is_object() && w.contains("coeffs")) return parse_trig(w, "weight");
  json f = w.is_object() && w.contains("filter") ? w.at("filter") : w;
  auto sys = parse_filter(f, "weight");
  if (sys.N != n) throw ConfigError("weight", "filter is for N = " + std::to_string(sys.N) + " but the system has N = " + std::to_string(n));
  if (sys.polys.empty()) throw ConfigError("weight", "filter has no polynomial form");
  return sys.polys.front().conj() * sys.polys.front();
}

TrigPoly density_of(const json& c) {
  if (!c.contains("density")) return TrigPoly::constant(1.0);
  return parse_trig(c.at("density"), "density");
}

struct ShiftWeight {
  int level = 1;
  std::vector<double> values;              // on admissible words of `level`
  std::optional<std::vector<Rational>> exact;
  symbolic::IndexPtr index;
  double operator()(const Word& y) const { return values[index->index_of(y)]; }
};

ShiftWeight shift_weight(const json& c, const TransitionMatrix& a, int max_level) {
  json w = c.contains("weight") ? c.at("weight") : json("one");
  ShiftWeight out;
  if (w.is_string()) {
    if (w.get<std::string>() != "one") throw ConfigError("weight", "unknown weight '" + w.get<std::string>() + "' (one, or an object)");
    out.index = symbolic::make_index(a, 1);
    out.values.assign(out.index->size(), 1.0);
    out.exact = std::vector<Rational>(out.index->size(), Rational(1));
    return out;
  }
  if (!w.is_object()) throw ConfigError("weight", "expected \"one\", {\"cylinder\": ...} or {\"random\": ...}");
  auto level_of = [&](const json& o, const std::string& f) {
    if (!o.contains("level") || !o.at("level").is_number_integer()) throw ConfigError(f + ".level", "expected an integer");
    const int l = o.at("level").get<int>();
    if (l < 1 || l > max_level) throw ConfigError(f + ".level", "must be in [1, " + std::to_string(max_level) + "]");
    return l;
  };
  if (w.contains("cylinder")) {
    const auto& o = w.at("cylinder");
    out.level = level_of(o, "weight.cylinder");
    out.index = symbolic::make_index(a, out.level);
    if (!o.contains("values") || !o.at("values").is_array() || o.at("values").size() != out.index->size())
      throw ConfigError("weight.cylinder.values", "expected " + std::to_string(out.index->size()) + " values, one per admissible word in lexicographic order");
    bool exact = true;
    std::vector<Rational> q;
    for (std::size_t i = 0; i < out.index->size(); ++i) {
      const auto& v = o.at("values")[i];
      const std::string f = "weight.cylinder.values[" + std::to_string(i) + "]";
      if (v.is_number_float()) {
        exact = false;
        out.values.push_back(v.get<double>());
      } else {
        q.push_back(parse_rational(v, f));
        out.values.push_back(static_cast<double>(q.back()));
      }
      if (out.values.back() < 0) throw ConfigError(f, "weights must be nonnegative");
    }
    if (exact) out.exact = q;
    return out;
  }
  if (w.contains("random")) {
    const auto& o = w.at("random");
    out.level = level_of(o, "weight.random");
    out.index = symbolic::make_index(a, out.level);
    const double lo = o.value("low", 0.1), hi = o.value("high", 1.1);
    if (!(lo > 0 && hi >= lo)) throw ConfigError("weight.random", "need 0 < low <= high");
    Engine rng = make_stream(seed_of(c), 1);
    for (std::size_t i = 0; i < out.index->size(); ++i) out.values.push_back(lo + (hi - lo) * uniform01(rng));
    return out;
  }
  throw ConfigError("weight", "expected \"one\", {\"cylinder\": ...} or {\"random\": ...}");
}

json rational_json(const Rational& q) { return rational_string(q); }

void add_table(RunReport& r, std::string name, std::vector<std::string> columns) { r.tables.push_back({std::move(name), Table{std::move(columns), {}}}); }
Table& table(RunReport& r, const std::string& name) {
  for (auto& [n, t] : r.tables)
    if (n == name) return t;
  throw std::logic_error("no table " + name);
}

// ---------------------------------------------------------------- commands

void analyze_shift(const json& c, RunReport& r) {
  auto a = require_subshift(parse_system(c, "golden-mean"), "analyze-shift");
  const int level = static_cast<int>(get_int(c, "level", 3, 1, 12));
  auto d = symbolic::analyze_matrix(a);
  r.results["symbols"] = a.size();
  r.results["onto"] = d.onto;
  r.results["irreducible"] = d.irreducible;
  r.results["aperiodic"] = d.aperiodic;
  r.results["period"] = d.period;
  r.results["primitivity_exponent"] = d.primitivity_exponent ? json(*d.primitivity_exponent) : json(nullptr);
  r.results["strong_components"] = d.strong_components;
  auto idx = symbolic::make_index(a, level);
  r.results["admissible_words"] = idx->size();
  add_table(r, "cylinders", {"word", "preimages", "mass", "mass_decimal"});
  std::optional<symbolic::CylinderMeasure> mu;
  if (d.irreducible && d.aperiodic) mu = symbolic::InvariantMeasure(a).at_index(idx);
  r.results["invariant_measure"] = mu.has_value();
  for (std::size_t i = 0; i < idx->size(); ++i) {
    const auto& w = idx->word(i);
    json mass = mu ? rational_json(mu->masses[i]) : json(nullptr);
    json dec = mu ? json(static_cast<double>(mu->masses[i])) : json(nullptr);
    table(r, "cylinders").rows.push_back({symbolic::word_string(w), symbolic::preimage_count(a, w.front()), mass, dec});
  }
}

void pf_solve_cmd(const json& c, RunReport& r) {
  auto sys = parse_system(c, "golden-mean");
  const std::string mode = get_choice(c, "mode", "eigen", {"eigen", "harmonic"});
  const double tol = get_double(c, "tol", 1e-12, 0.0, 1e-2);
  const long max_iter = get_int(c, "max_iter", 200000, 1, 100000000);
  r.results["mode"] = mode;
  if (sys.kind == SystemSpec::Kind::subshift) {
    const auto& a = *sys.matrix;
    const int level = static_cast<int>(get_int(c, "level", 3, 1, 10));
    const auto conv = get_choice(c, "convention", "averaged", {"averaged", "summed"}) == "averaged" ? Convention::averaged : Convention::summed;
    auto w = shift_weight(c, a, level + 1);
    auto idx = symbolic::make_index(a, level);
    auto op = symbolic::ruelle_matrix<double>(*idx, [&](const Word& y) { return w(y); }, conv);
    if (mode == "eigen") {
      auto pf = transfer::pf_solve(op, {tol, static_cast<int>(max_iter)});
      r.results["lambda0"] = pf.lambda0;
      r.results["iterations"] = pf.iterations;
      r.residuals["right_eigen"] = pf.residual_right;
      r.residuals["left_eigen"] = pf.residual_left;
      r.residuals["normalization"] = pf.normalization_error;
      add_table(r, "eigendata", {"word", "h", "nu"});
      for (std::size_t i = 0; i < idx->size(); ++i) table(r, "eigendata").rows.push_back({symbolic::word_string(idx->word(i)), pf.h[i], pf.nu[i]});
    } else {
      transfer::HarmonicOptions opt;
      opt.tol = tol;
      opt.max_iter = static_cast<int>(max_iter);
      auto h = transfer::harmonic_limit(transfer::cylinder_discretization(*idx, op), opt);
      r.results["iterations"] = h.iterations;
      r.residuals["harmonic"] = h.residual;
      add_table(r, "harmonic", {"word", "h_V"});
      for (std::size_t i = 0; i < idx->size(); ++i) table(r, "harmonic").rows.push_back({symbolic::word_string(idx->word(i)), h.values[i]});
    }
    return;
  }
  const int n = require_circle(sys, "pf-solve");
  // default harmonic weight on z^2: the stretched-Haar filter without its sqrt 2, |(1+z^2)/2|^2
  const TrigPoly v = mode == "harmonic" && n == 2 && !c.contains("weight") ? TrigPoly(-2, {0.25, 0.0, 0.5, 0.0, 0.25}) : circle_weight(c, n, "one");
  const int kdeg = static_cast<int>(get_int(c, "kmax", std::max(1L, static_cast<long>((v.high() - v.low()) / 2)), 1, 256));
  const int samples = static_cast<int>(get_int(c, "samples", 64, 1, 1 << 16));
  if (mode == "eigen") {
    auto pts = transfer::roots_of_unity(samples);
    auto d = transfer::fourier_discretization(v, n, kdeg, pts);
    auto pf = transfer::pf_solve(d.op, {tol, static_cast<int>(max_iter)});
    r.results["lambda0"] = pf.lambda0;
    r.results["iterations"] = pf.iterations;
    r.residuals["right_eigen"] = pf.residual_right;
    r.residuals["left_eigen"] = pf.residual_left;
    r.residuals["normalization"] = pf.normalization_error;
    auto hv = d.evaluate.apply(pf.h);
    add_table(r, "eigendata", {"theta", "h_re", "h_im"});
    for (std::size_t i = 0; i < pts.size(); ++i)
      table(r, "eigendata").rows.push_back({kTwoPi * static_cast<double>(i) / samples, hv[i].real(), hv[i].imag()});
    return;
  }
  const int tree = static_cast<int>(get_int(c, "depth", 2, 0, 8));
  complexdyn::CircleMap cm(n);
  auto pts = transfer::preimage_tree(cm, transfer::roots_of_unity(samples), tree);
  transfer::HarmonicOptions opt;
  opt.tol = tol;
  opt.max_iter = static_cast<int>(max_iter);
  opt.record = true;
  auto h = transfer::harmonic_limit(transfer::fourier_discretization(v, n, kdeg, pts), opt);
  double increase = -INFINITY, above_one = -INFINITY;
  for (std::size_t k = 0; k < h.iterates.size(); ++k)
    for (std::size_t i = 0; i < pts.size(); ++i) {
      above_one = std::max(above_one, h.iterates[k][i] - 1.0);
      if (k > 0) increase = std::max(increase, h.iterates[k][i] - h.iterates[k - 1][i]);
    }
  r.results["iterations"] = h.iterations;
  r.results["samples"] = pts.size();
  r.residuals["harmonic"] = h.residual;
  r.residuals["max_step_increase"] = increase;
  r.residuals["max_above_one"] = above_one;
  add_table(r, "harmonic", {"theta", "h_V"});
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double t = std::arg(pts[i]);
    if (t < 0) t += kTwoPi;
    table(r, "harmonic").rows.push_back({t, h.values[i]});
  }
}

void brolin_cmd(const json& c, RunReport& r, int threads) {
  auto sys = parse_system(c, "circle:2");
  complexdyn::RationalMap map = sys.kind == SystemSpec::Kind::rational ? *sys.map
                                : sys.kind == SystemSpec::Kind::circle
                                    ? [&] {
                                        std::vector<Complex> p(static_cast<std::size_t>(sys.N + 1), 0.0);
                                        p.back() = 1.0;
                                        return complexdyn::RationalMap::polynomial(p);
                                      }()
                                    : throw ConfigError("system", "brolin needs a rational map or circle:N");
  const int samples = static_cast<int>(get_int(c, "samples", 100000, 1, 10000000));
  const int depth = static_cast<int>(get_int(c, "depth", 30, 1, 1000));
  const int burn_in = static_cast<int>(get_int(c, "burn_in", 20, 0, 1000));
  const int moments = static_cast<int>(get_int(c, "moments", 8, 1, 64));
  Complex z0(0.3, 0.4);
  if (params(c).contains("z0")) z0 = parse_complex(params(c).at("z0"), "params.z0");
  auto mu = complexdyn::brolin_measure(map, z0, depth, samples, burn_in, seed_of(c), threads);
  r.results["points"] = mu.size();
  r.results["total_mass"] = mu.total_mass;
  r.results["degree"] = map.degree();
  add_table(r, "moments", {"k", "re", "im", "abs"});
  double worst = 0;
  for (int k = 1; k <= moments; ++k) {
    auto m = complexdyn::moment(mu, k);
    worst = std::max(worst, std::abs(m));
    table(r, "moments").rows.push_back({k, m.real(), m.imag(), std::abs(m)});
  }
  r.residuals["max_abs_moment"] = worst;
  r.cloud = std::move(mu);
}

void qmf_check(const json& c, RunReport& r) {
  std::vector<std::pair<std::string, filters::CircleFilterSystem>> list;
  if (c.contains("filters")) {
    const auto& fs = c.at("filters");
    if (!fs.is_array() || fs.empty()) throw ConfigError("filters", "expected a non-empty array");
    for (std::size_t i = 0; i < fs.size(); ++i) {
      auto f = parse_filter(fs[i], "filters[" + std::to_string(i) + "]");
      list.emplace_back(f.name, std::move(f));
    }
  } else {
    auto f = filter_of(c, "classical(2)");
    list.emplace_back(f.name, std::move(f));
  }
  const int samples = static_cast<int>(get_int(c, "samples", 1024, 1, 1 << 20));
  const double tol = get_double(c, "tol", 1e-12, 0, 1);
  add_table(r, "filters", {"name", "N", "filters", "residual", "m0_at_one_re", "m0_at_one_im", "pass"});
  double worst = 0;
  bool all = true;
  for (const auto& [name, f] : list) {
    complexdyn::CircleMap cm(f.N);
    const double res = filters::qmf_residual(f, cm, transfer::roots_of_unity(samples));
    const Complex m1 = f.m.front()(Complex(1.0));
    worst = std::max(worst, res);
    all = all && res <= tol;
    table(r, "filters").rows.push_back({name, f.N, f.m.size(), res, m1.real(), m1.imag(), res <= tol});
  }
  r.results["all_pass"] = all;
  r.residuals["max_qmf"] = worst;
}

void loopgroup_cmd(const json& c, RunReport& r) {
  auto f = filter_of(c, "classical(2)");
  if (static_cast<int>(f.m.size()) != f.N) throw ConfigError("filter", "the loop group acts on complete systems of N filters");
  const int elements = static_cast<int>(get_int(c, "elements", 50, 1, 100000));
  const int cells = static_cast<int>(get_int(c, "cells", 4, 1, 1024));
  const int samples = static_cast<int>(get_int(c, "samples", 1024, 1, 1 << 20));
  const double tol = get_double(c, "tol", 1e-10, 0, 1);
  complexdyn::CircleMap cm(f.N);
  auto pts = transfer::roots_of_unity(samples);
  const double before = filters::qmf_residual(f, cm, pts);
  Engine rng = make_stream(seed_of(c), 0);
  add_table(r, "elements", {"element", "cells", "unitarity_defect", "residual_before", "residual_after", "change"});
  double worst = 0;
  for (int e = 0; e < elements; ++e) {
    auto a = filters::random_loop_element(f.N, cells, rng);
    auto g = filters::loop_group_apply(a, f, cm);
    const double after = filters::qmf_residual(g, cm, pts);
    worst = std::max(worst, std::abs(after - before));
    table(r, "elements").rows.push_back({e, a.cell_count(), a.unitarity_defect(), before, after, std::abs(after - before)});
  }
  r.results["filter"] = f.name;
  r.results["pass"] = worst <= tol;
  r.residuals["max_change"] = worst;
}

void cascade_cmd(const json& c, RunReport& r) {
  filters::ScalingCoefficients a;
  int n = 2;
  if (c.contains("coefficients")) {
    const auto& o = c.at("coefficients");
    if (!o.is_object() || !o.contains("taps")) throw ConfigError("coefficients", "expected {\"N\", \"offset\", \"taps\"}");
    n = o.value("N", 2);
    if (n < 2 || n > 64) throw ConfigError("coefficients.N", "must be in [2, 64]");
    a.offset = o.value("offset", 0);
    a.taps = parse_coeffs(o.at("taps"), "coefficients.taps");
  } else {
    auto f = filter_of(c, "haar");
    const auto& p = f.polys.at(0);
    n = f.N;
    a.offset = p.low();
    a.taps = p.coeffs();
  }
  const int iterations = static_cast<int>(get_int(c, "iterations", 10, 0, 40));
  const int spu = static_cast<int>(get_int(c, "samples_per_unit", 16, 1, 4096));
  auto res = filters::cascade_approx(a, n, iterations, spu);
  r.results["support"] = res.support;
  r.results["grid_points"] = res.x.size();
  r.residuals["cascade"] = res.residual;
  add_table(r, "phi", {"x", "re", "im"});
  for (std::size_t i = 0; i < res.x.size(); ++i) table(r, "phi").rows.push_back({res.x[i], res.values[i].real(), res.values[i].imag()});
  add_table(r, "history", {"iteration", "residual"});
  for (std::size_t i = 0; i < res.residual_history.size(); ++i) table(r, "history").rows.push_back({i, res.residual_history[i]});
}

solenoid::CircleLift circle_lift_of(const json& c, int n, const std::string& def_weight) {
  const TrigPoly v = circle_weight(c, n, def_weight);
  const TrigPoly rho = density_of(c);
  const int kmax = static_cast<int>(get_int(c, "kmax", 16, 1, 256));
  try {
    return solenoid::lift_circle(n, v, rho, kmax);
  } catch (const std::domain_error& e) {
    throw ConfigError("density", e.what());
  }
}

void lift_cmd(const json& c, RunReport& r, int threads) {
  auto sys = parse_system(c, "circle:2");
  const int depth = static_cast<int>(get_int(c, "depth", 8, 0, 64));
  if (sys.kind == SystemSpec::Kind::circle) {
    auto lift = circle_lift_of(c, sys.N, "haar");
    const auto paths = static_cast<std::size_t>(get_int(c, "paths", 10000, 1, 10000000));
    const auto shown = static_cast<std::size_t>(get_int(c, "table_paths", 20, 0, 100000));
    auto sampled = solenoid::sample_lift(lift, depth, paths, seed_of(c), threads);
    auto mass = solenoid::mass_preservation_mc(lift, depth, paths, seed_of(c) + 1);
    r.results["fixed_point_residual"] = lift.fixed_point_residual;
    r.results["mass_expected"] = mass.expected;
    r.results["mass_estimate"] = mass.estimate;
    r.results["mass_sigma"] = mass.sigma;
    r.results["mass_within_3sigma"] = mass.within(3.0);
    r.residuals["mass"] = std::abs(mass.estimate - mass.expected);
    add_table(r, "paths", {"path", "k", "theta"});
    complexdyn::PointCloudMeasure cloud;
    for (std::size_t i = 0; i < sampled.size(); ++i) {
      cloud.points.push_back(sampled[i].theta(depth));
      cloud.weights.push_back(1.0 / static_cast<double>(sampled.size()));
      if (i < shown)
        for (int k = 0; k <= depth; ++k) {
          double t = std::arg(sampled[i].theta(k));
          if (t < 0) t += kTwoPi;
          table(r, "paths").rows.push_back({i, k, t});
        }
    }
    r.cloud = std::move(cloud);
    return;
  }
  const auto a = require_subshift(sys, "lift");
  const int base = static_cast<int>(get_int(c, "base_level", 3, 1, 8));
  std::function<Rational(const Word&)> v;
  symbolic::CylinderMeasure mu0 = symbolic::InvariantMeasure(a).at_level(base);
  json w = c.contains("weight") ? c.at("weight") : json("one");
  if (w == json("eigen-random")) {
    Engine rng = make_stream(seed_of(c), 2);
    auto e = random_eigen_pair(a, rng);
    if (base < 2) throw ConfigError("params.base_level", "eigen-random needs base_level >= 2");
    std::vector<Rational> hb;
    for (const auto& u : mu0.index->words()) hb.push_back(e.hw(u));
    mu0 = solenoid::weighted_measure(mu0, hb);
    v = [e](const Word& y) { return e.w(y); };
  } else {
    auto sw = shift_weight(c, a, base);
    if (!sw.exact) throw ConfigError("weight", "subshift lifts need exact (integer or p/q) weights");
    v = [sw](const Word& y) { return (*sw.exact)[sw.index->index_of(y)]; };
  }
  auto lift = [&] {
    try {
      return solenoid::lift_subshift(a, v, mu0);
    } catch (const std::domain_error& e) {
      throw ConfigError("weight", e.what());
    }
  }();
  r.results["base_total"] = rational_json(mu0.total());
  r.results["fixed_point_residual"] = lift.fixed_point_residual;
  add_table(r, "mass", {"n", "paths", "lifted_total", "base_total", "exact"});
  bool all = true;
  for (int n = 0; n <= std::min(depth, 10); ++n) {
    auto paths = solenoid::enumerate_lift(lift, n);
    Rational s = 0;
    for (const auto& p : paths) s += p.weight;
    all = all && s == mu0.total();
    table(r, "mass").rows.push_back({n, paths.size(), rational_json(s), rational_json(mu0.total()), s == mu0.total()});
  }
  r.results["mass_exact"] = all;
}

void pathspace_cmd(const json& c, RunReport& r, int threads) {
  const auto a = require_subshift(parse_system(c, "golden-mean"), "pathspace");
  const int depth = static_cast<int>(get_int(c, "depth", 8, 0, 12));
  const int rank = static_cast<int>(get_int(c, "rank", 4, 1, 6));
  const int start = static_cast<int>(get_int(c, "start_level", 3, 2, 6));
  const int consistency_depth = static_cast<int>(get_int(c, "consistency_depth", 5, 0, 8));
  const auto samples = static_cast<std::size_t>(get_int(c, "samples", 100000, 0, 10000000));
  json w = c.contains("weight") ? c.at("weight") : json("eigen-random");
  if (w != json("eigen-random") && w != json("one")) throw ConfigError("weight", "pathspace supports \"one\" and \"eigen-random\"");

  EigenPair e{a, {}, {}};
  if (w == json("one")) {
    for (int x1 = 1; x1 <= a.size(); ++x1)
      for (int s = 1; s <= a.size(); ++s)
        if (a.allowed(s, x1)) e.p[{s, x1}] = 1;
    for (const auto& u : symbolic::admissible_words(a, 2)) e.h[u] = 1;
  } else {
    Engine rng = make_stream(seed_of(c), 2);
    e = random_eigen_pair(a, rng);
  }
  transfer::SubshiftSystem g(a);
  transfer::WeightFunction<Word, Rational> wf([e](const Word& y) { return e.w(y); });
  std::function<Rational(const Word&)> hf = [e](const Word& y) { return e.hw(y); };
  std::function<Rational(const Word&)> wfn = [e](const Word& y) { return e.w(y); };
  auto pts = symbolic::admissible_words(a, start);
  solenoid::PathMeasureSampler<transfer::SubshiftSystem, Rational> wh(g, wf, hf, pts);
  solenoid::PathMeasureSampler<transfer::SubshiftSystem, Rational> dm(g, wh.modular_function());

  add_table(r, "telescoping", {"x0", "n", "paths", "delta_total", "wh_total", "h_x0", "exact"});
  bool tele = true;
  for (const auto& x0 : pts)
    for (int n = 0; n <= depth; ++n) {
      Rational sd = 0, sw = 0;
      for (const auto& p : dm.enumerate(x0, n)) sd += p.weight;
      auto paths = wh.enumerate(x0, n);
      for (const auto& p : paths) sw += p.weight;
      const bool ok = sd == 1 && sw == e.hw(x0);
      tele = tele && ok;
      table(r, "telescoping").rows.push_back({symbolic::word_string(x0), n, paths.size(), rational_json(sd), rational_json(sw), rational_json(e.hw(x0)), ok});
    }
  r.results["telescoping_exact"] = tele;

  // omega_n against the theta_n pushforward of the lift of (W, h).
  const int base = std::max(rank, 2);
  auto idx = symbolic::make_index(a, base);
  std::vector<Rational> hb;
  for (const auto& u : idx->words()) hb.push_back(e.hw(u));
  auto mu0 = solenoid::weighted_measure(symbolic::InvariantMeasure(a).at_index(idx), hb);
  auto lift = solenoid::lift_subshift(a, [e](const Word& y) { return e.w(y); }, mu0);
  add_table(r, "consistency", {"n", "word", "pushforward", "omega", "equal"});
  bool cons = true;
  for (int n = 0; n <= consistency_depth; ++n) {
    auto paths = solenoid::enumerate_lift(lift, n);
    for (int k = 1; k <= rank; ++k) {
      auto push = solenoid::theta_pushforward(paths, n, k);
      for (const auto& u : symbolic::admissible_words(a, k)) {
        std::vector<Rational> f;
        for (const auto& x : idx->words()) f.push_back(std::equal(u.begin(), u.end(), x.begin()) ? 1 : 0);
        const Rational om = solenoid::omega_n(*idx, wfn, hb, f, n);
        const bool ok = push[u] == om;
        cons = cons && ok;
        table(r, "consistency").rows.push_back({n, symbolic::word_string(u), rational_json(push[u]), rational_json(om), ok});
      }
    }
  }
  r.results["consistency_exact"] = cons;

  if (samples > 0) {
    const int n = std::min(2, depth);
    const int k = std::min(3, base);
    auto sampled = solenoid::sample_lift(lift, n, samples, seed_of(c), threads);
    std::map<Word, std::size_t> hits;
    for (const auto& p : sampled) ++hits[Word(p.theta(n).begin(), p.theta(n).begin() + k)];
    const double total = static_cast<double>(lift.total);
    double worst_z = 0;
    add_table(r, "monte_carlo", {"word", "probability", "frequency", "z_score"});
    for (const auto& [u, m] : solenoid::theta_pushforward(solenoid::enumerate_lift(lift, n), n, k)) {
      const double prob = static_cast<double>(m) / total;
      const double freq = static_cast<double>(hits[u]) / static_cast<double>(samples);
      const double sigma = std::sqrt(prob * (1 - prob) / static_cast<double>(samples));
      const double z = sigma > 0 ? std::abs(freq - prob) / sigma : (freq == prob ? 0.0 : INFINITY);
      worst_z = std::max(worst_z, z);
      table(r, "monte_carlo").rows.push_back({symbolic::word_string(u), prob, freq, z});
    }
    r.results["monte_carlo_within_3sigma"] = worst_z <= 3.0;
    r.residuals["monte_carlo_max_z"] = worst_z;
  }
}

void rn_check(const json& c, RunReport& r) {
  const int n = require_circle(parse_system(c, "circle:2"), "rn-check");
  auto f = filter_of(c, "haar");
  if (f.N != n) throw ConfigError("filter", "filter N does not match the system");
  const TrigPoly m0 = f.polys.at(0);
  const TrigPoly v = m0.conj() * m0;
  const TrigPoly rho = density_of(c);
  const int kmax = static_cast<int>(get_int(c, "kmax", 16, 1, 256));
  auto lift = [&] {
    try {
      return solenoid::lift_circle(n, v, rho, kmax);
    } catch (const std::domain_error& e) {
      throw ConfigError("density", e.what());
    }
  }();
  const int bins = static_cast<int>(get_int(c, "bins", 32, 1, 4096));
  const auto samples = static_cast<std::size_t>(get_int(c, "samples", 100000, 1, 100000000));
  const auto scheme = get_choice(c, "scheme", "stratified", {"stratified", "iid"}) == "iid" ? solenoid::Sampling::iid : solenoid::Sampling::stratified;
  const double exclude = get_double(c, "exclude", 0.0, 0.0, 1.0);
  const double tol = get_double(c, "tol", 0.02, 0.0, 10.0);
  auto est = solenoid::radon_nikodym_estimate(lift, m0, bins, samples, seed_of(c), scheme, exclude);
  r.results["singular"] = est.singular;
  r.results["pass"] = !est.singular && est.max_error <= tol;
  r.residuals["max_relative_error"] = est.max_error;
  add_table(r, "bins", {"lo", "hi", "unshifted", "shifted", "ratio", "oracle", "error", "excluded"});
  for (const auto& b : est.bins) table(r, "bins").rows.push_back({b.lo, b.hi, b.unshifted, b.shifted, b.ratio, b.oracle, b.error, b.excluded});
}

void multiplicity_cmd(const json& c, RunReport& r) {
  const auto a = require_subshift(parse_system(c, "golden-mean"), "multiplicity");
  const int level = static_cast<int>(get_int(c, "level", 3, 1, 10));
  auto idx = symbolic::make_index(a, level);
  auto brute = [&](const martingale::MultiplicityFunction& m, std::size_t i) {
    long s = 0;
    for (int sym = 1; sym <= a.size(); ++sym) {
      Word y{sym};
      y.insert(y.end(), idx->word(i).begin(), idx->word(i).end());
      if (symbolic::is_admissible(a, y)) s += m(Word(y.begin(), y.begin() + level));
    }
    return s;
  };
  if (params(c).contains("values")) {
    const auto& vs = params(c).at("values");
    if (!vs.is_array() || vs.size() != idx->size()) throw ConfigError("params.values", "expected " + std::to_string(idx->size()) + " nonnegative integers");
    martingale::MultiplicityFunction m{idx, {}};
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (!vs[i].is_number_integer() || vs[i].get<long>() < 0) throw ConfigError("params.values[" + std::to_string(i) + "]", "expected a nonnegative integer");
      m.values.push_back(vs[i].get<long>());
    }
    auto chk = martingale::multiplicity_sum_check(m);
    bool agree = true;
    add_table(r, "multiplicity", {"word", "m_V0", "m_V1", "m_W0", "brute_force_m_V1"});
    for (std::size_t i = 0; i < idx->size(); ++i) {
      const long b = brute(m, i);
      agree = agree && b == chk.mV1.values[i];
      table(r, "multiplicity").rows.push_back({symbolic::word_string(idx->word(i)), m.values[i], chk.mV1.values[i], chk.mW0.values[i], b});
    }
    r.results["exact"] = chk.exact;
    r.results["brute_force_agrees"] = agree;
    return;
  }
  const int trials = static_cast<int>(get_int(c, "trials", 100, 1, 100000));
  const long max_value = get_int(c, "max_value", 3, 0, 1000000);
  Engine rng = make_stream(seed_of(c), 0);
  add_table(r, "trials", {"trial", "exact", "witnesses", "brute_force_agrees", "sum_m_V0", "sum_m_V1"});
  bool agree_all = true;
  int exact_count = 0;
  for (int t = 0; t < trials; ++t) {
    martingale::MultiplicityFunction m{idx, {}};
    for (std::size_t i = 0; i < idx->size(); ++i) m.values.push_back(static_cast<long>(uniform_index(rng, static_cast<std::size_t>(max_value + 1))));
    auto chk = martingale::multiplicity_sum_check(m);
    bool agree = true;
    long s0 = 0, s1 = 0;
    for (std::size_t i = 0; i < idx->size(); ++i) {
      agree = agree && brute(m, i) == chk.mV1.values[i] && m.values[i] + chk.mW0.values[i] == chk.mV1.values[i];
      s0 += m.values[i];
      s1 += chk.mV1.values[i];
    }
    agree_all = agree_all && agree;
    exact_count += chk.exact ? 1 : 0;
    table(r, "trials").rows.push_back({t, chk.exact, chk.witnesses.size(), agree, s0, s1});
  }
  r.results["trials"] = trials;
  r.results["exact_tables"] = exact_count;
  r.results["brute_force_agrees"] = agree_all;
}

void martingale_check(const json& c, RunReport& r) {
  const auto a = require_subshift(parse_system(c, "golden-mean"), "martingale-check");
  if (!(a == TransitionMatrix::golden_mean())) throw ConfigError("system", "martingale-check uses the golden-mean random-phase filter");
  const int trials = static_cast<int>(get_int(c, "trials", 20, 1, 10000));
  const int level = static_cast<int>(get_int(c, "level", 4, 2, 6));
  const double tol = get_double(c, "tol", 1e-10, 0, 1);
  auto s = random_phase_filter(seed_of(c));
  martingale::CovariantSystem<martingale::SubshiftSpace<Complex>> cs(s.space, s.m0, s.h);
  Engine rng = make_stream(seed_of(c), 1);
  auto rnd = [&](int l) { return s.space.from(l, [&](const Word&) { return Complex(standard_normal(rng), standard_normal(rng)); }); };
  add_table(r, "vectors", {"trial", "covariance", "isometry", "consistency"});
  double cov = 0, iso = 0, con = 0;
  for (int t = 0; t < trials; ++t) {
    auto g = rnd(2);
    const int lv = 2 + t % (level - 1), lw = 2 + (t + 1) % (level - 1);
    auto v = cs.embed(rnd(lv), t % 3);
    auto w = cs.embed(rnd(lw), (t + 1) % 3);
    auto lhs = cs.U(cs.pi(g, cs.U_inverse(v)));
    auto rhs = cs.pi(s.space.compose_r(g, 1), v);
    const double dc = cs.norm(cs.sub(lhs, rhs));
    const double di = std::abs(cs.inner_product(cs.U(v), cs.U(w)) - cs.inner_product(v, w));
    const double dk = cs.consistency_residual(lhs);
    cov = std::max(cov, dc);
    iso = std::max(iso, di);
    con = std::max(con, dk);
    table(r, "vectors").rows.push_back({t, dc, di, dk});
  }
  r.results["pass"] = cov <= tol && iso <= tol;
  r.residuals["covariance"] = cov;
  r.residuals["isometry"] = iso;
  r.residuals["consistency"] = con;
}

void cantor_cmd(const json& c, RunReport& r) {
  const int levels = static_cast<int>(get_int(c, "levels", 8, 1, 12));
  const int orth = static_cast<int>(get_int(c, "orthogonality_levels", 6, 1, 7));
  auto f = cantor::cantor_filter_system();
  complexdyn::CircleMap cm(3);
  const double qmf = filters::qmf_residual(f, cm, transfer::roots_of_unity(1024));
  add_table(r, "levels", {"level", "scaling_residual", "additivity_defect", "functions", "orthogonal", "normalized"});
  bool exact = true;
  for (int n = 1; n <= std::max(levels, orth); ++n) {
    json sres = nullptr, add = nullptr, fn = nullptr, og = nullptr, nm = nullptr;
    if (n <= levels) {
      const long s = cantor::scaling_identity_residual(n);
      const Rational d = cantor::additivity_defect(n);
      sres = s;
      add = rational_json(d);
      exact = exact && s == 0 && d == 0;
    }
    if (n <= orth) {
      auto o = cantor::detail_orthogonality(n);
      fn = o.functions;
      og = o.orthogonal;
      nm = o.normalized;
      exact = exact && o.orthogonal && o.normalized;
    }
    table(r, "levels").rows.push_back({n, sres, add, fn, og, nm});
  }
  r.results["hausdorff_dimension"] = cantor::hausdorff_dimension();
  r.results["all_exact"] = exact;
  r.residuals["filter_qmf"] = qmf;
}

void cocycle_cmd(const json& c, RunReport& r) {
  const int n = require_circle(parse_system(c, "circle:2"), "cocycle");
  if (n != 2) throw ConfigError("system", "cocycle ships the stretched-Haar harmonic pair on z^2 only");
  if (c.contains("filter") && c.at("filter") != json("stretched-haar") && c.at("filter") != json("stretched_haar"))
    throw ConfigError("filter", "cocycle supports the stretched-haar preset only");
  auto depths = get_int_list(c, "depths", {4, 8, 12, 16, 20, 24}, 1, 60);
  const auto paths = static_cast<std::size_t>(get_int(c, "paths", 10000, 1, 10000000));
  const TrigPoly v(-2, {0.5, 0.0, 1.0, 0.0, 0.5});
  const TrigPoly rho(-1, {0.5, 1.0, 0.5});
  auto lift = solenoid::lift_circle(2, v, rho);
  auto h = [](Complex z) { return 1.0 + z.real(); };
  auto rep = martingale::harmonic_to_cocycle(martingale::stretched_haar_harmonic, h, lift, depths, paths, seed_of(c));
  r.residuals["harmonic"] = rep.harmonic_residual;
  r.results["sup_q_squared"] = rep.bound;
  r.results["invariance"] = rep.invariance;
  bool mono = true;
  for (std::size_t i = 1; i < rep.median_delta.size(); ++i) mono = mono && rep.median_delta[i] <= rep.median_delta[i - 1];
  r.results["median_delta_decreasing"] = mono;
  double mean = 0;
  for (double q : rep.limits) mean += q;
  r.results["mean_limit"] = mean / static_cast<double>(rep.limits.size());
  add_table(r, "convergence", {"depth_from", "depth_to", "median_delta"});
  for (std::size_t i = 0; i < rep.median_delta.size(); ++i) table(r, "convergence").rows.push_back({rep.depths[i], rep.depths[i + 1], rep.median_delta[i]});
}

}  // namespace

RunReport execute(const std::string& operation, const json& config, int threads) {
  if (!config.is_object()) throw ConfigError("", "config must be a JSON object");
  if (!config.contains("seed") || !config.at("seed").is_number_unsigned()) throw ConfigError("seed", "expected a nonnegative 64-bit integer");
  if (config.contains("operation") && config.at("operation") != json(operation))
    throw ConfigError("operation", "config is for '" + config.at("operation").dump() + "', not '" + operation + "'");
  RunReport r;
  r.operation = operation;
  r.config = config;
  r.config.erase("output");
  r.digest = config_digest(config);
  if (operation == "analyze-shift") analyze_shift(config, r);
  else if (operation == "pf-solve") pf_solve_cmd(config, r);
  else if (operation == "brolin") brolin_cmd(config, r, threads);
  else if (operation == "qmf-check") qmf_check(config, r);
  else if (operation == "loopgroup") loopgroup_cmd(config, r);
  else if (operation == "cascade") cascade_cmd(config, r);
  else if (operation == "lift") lift_cmd(config, r, threads);
  else if (operation == "pathspace") pathspace_cmd(config, r, threads);
  else if (operation == "rn-check") rn_check(config, r);
  else if (operation == "multiplicity") multiplicity_cmd(config, r);
  else if (operation == "martingale-check") martingale_check(config, r);
  else if (operation == "cantor") cantor_cmd(config, r);
  else if (operation == "cocycle") cocycle_cmd(config, r);
  else throw ConfigError("operation", "unknown subcommand '" + operation + "'");
  return r;
}

}  // namespace tomra::cli
