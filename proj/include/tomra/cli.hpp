#pragma once

#include "tomra/complexdyn.hpp"
#include "tomra/core.hpp"
#include "tomra/martingale.hpp"
#include "tomra/random.hpp"
#include "tomra/symbolic.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tomra::cli {

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"analyze-shift", "pf-solve",    "brolin", "qmf-check",        "loopgroup", "cascade", "lift",
                                              "pathspace",     "rn-check",    "multiplicity", "martingale-check", "cantor", "cocycle"};
  return names;
}

// Bad or missing config field; `field` is a dotted path such as "system.matrix".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : "field '" + field + "': " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
};

struct RunReport {
  std::string operation;
  nlohmann::json config;
  std::string digest;
  nlohmann::json results = nlohmann::json::object();
  nlohmann::json residuals = nlohmann::json::object();
  std::vector<std::pair<std::string, Table>> tables;  // the first one is the primary table
  std::string status = "ok";
  std::string message;
  std::optional<complexdyn::PointCloudMeasure> cloud;  // for --format svg
};

std::uint64_t fnv1a64(std::string_view bytes);
// Config with the effective seed and without output settings, serialized with sorted keys.
std::string canonical_config(const nlohmann::json& config);
std::string config_digest(const nlohmann::json& config);

std::string report_json(const RunReport& r);
// RFC 4180: header row, comma separated, quoted when needed, "\n" line ends.
std::string csv_table(const Table& t);
std::string csv_field(const nlohmann::json& v);
std::string format_double(double x);

// Square 2-D histogram of the cloud's weights, grid x grid cells; empty cells at zero intensity.
std::string density_svg(const complexdyn::PointCloudMeasure& cloud, int grid);
// Throws std::runtime_error when the path cannot be written.
void emit_density_svg(const complexdyn::PointCloudMeasure& cloud, int grid, const std::string& path);

// Runs one operation on a parsed config (seed already in config["seed"]).  Library exceptions propagate.
RunReport execute(const std::string& operation, const nlohmann::json& config, int threads);

// argv without the program name.  Returns the exit code: 0 ok, 2 config error, 3 non-convergence.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// ---- random fixtures shared by subcommands ----

// R_W h = h by construction: W(y) = P(y0 | y1) h(y1 y2) / h(y0 y1), P averaging to one over the
// predecessors of y1 and h a positive level-2 table.
struct EigenPair {
  symbolic::TransitionMatrix a;
  std::map<symbolic::Word, Rational> p;
  std::map<symbolic::Word, Rational> h;
  Rational hw(const symbolic::Word& y) const;
  Rational w(const symbolic::Word& y) const;
};
EigenPair random_eigen_pair(const symbolic::TransitionMatrix& a, Engine& rng);

// Golden mean, complex m0 at level 3 with random phases and |m0|^2 = P(y0|y1) h(y1 y2)/h(y0 y1).
struct PhaseFilter {
  martingale::SubshiftSpace<Complex> space{symbolic::TransitionMatrix::golden_mean(), 10};
  martingale::SubshiftSpace<Complex>::Function m0, h;
};
PhaseFilter random_phase_filter(std::uint64_t seed);

}  // namespace tomra::cli
