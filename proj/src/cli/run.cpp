#include "tomra/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace tomra::cli {

using json = nlohmann::json;

namespace {

const std::vector<std::pair<std::string, std::string>> kDescriptions{
    {"analyze-shift", "transition-matrix diagnostics and the invariant cylinder measure"},
    {"pf-solve", "Perron-Frobenius data or the harmonic limit of a Ruelle operator"},
    {"brolin", "backward-orbit sample of the Brolin measure, moments and density"},
    {"qmf-check", "QMF residuals of filter systems"},
    {"loopgroup", "QMF residual under random loop-group elements"},
    {"cascade", "cascade approximation of the scaling function"},
    {"lift", "path-space lift of a base measure and its mass"},
    {"pathspace", "path telescoping, omega_n consistency and Monte Carlo agreement"},
    {"rn-check", "binned Radon-Nikodym derivative of the shifted path measure"},
    {"multiplicity", "multiplicity sum identities against brute force"},
    {"martingale-check", "covariance and isometry of U on martingale vectors"},
    {"cantor", "Cantor scaling identity, measure and detail-function orthogonality"},
    {"cocycle", "cocycle limits of the stretched-Haar harmonic function"},
};

// Inline parameters, spelled with dashes on the command line and underscores in params.
const std::vector<std::string> kInlineParams{"level",   "tol",   "depth",      "samples",    "burn-in",          "bins",   "paths",
                                             "trials",  "elements", "cells",   "iterations", "samples-per-unit", "kmax",   "rank",
                                             "mode",    "scheme",   "levels",  "max-value",  "exclude",          "grid",   "base-level",
                                             "convention", "moments", "orthogonality-levels", "max-iter", "table-paths", "consistency-depth", "start-level"};

struct Options {
  std::string config, out, format, system, weight, filter;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::map<std::string, std::string> inline_params;
};

json loose_value(const std::string& s) {
  if (s.empty()) return s;
  json v = json::parse(s, nullptr, false);
  return v.is_discarded() ? json(s) : v;
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col > 1 ? col - 1 : 1);
}

json load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("--config", "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", path + ":" + line_col(text, e.byte) + ": " + e.what());
  }
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("--out", "cannot write " + p.string());
  f << text;
  if (!f) throw ConfigError("--out", "cannot write " + p.string());
}

int svg_grid(const json& cfg) {
  if (cfg.contains("params") && cfg.at("params").contains("grid")) {
    const auto& g = cfg.at("params").at("grid");
    if (!g.is_number_integer() || g.get<int>() < 1 || g.get<int>() > 1024) throw ConfigError("params.grid", "must be an integer in [1, 1024]");
    return g.get<int>();
  }
  return 64;
}

void emit(const RunReport& r, const std::string& format, const std::string& dir, int grid, std::ostream& out) {
  if (format == "svg" && !r.cloud) throw ConfigError("--format", "svg output needs a point cloud (brolin, or lift on the circle)");
  if (format == "csv" && r.tables.empty()) throw ConfigError("--format", "this run produced no table");
  if (dir.empty()) {
    if (format == "json") out << report_json(r);
    else if (format == "csv") out << csv_table(r.tables.front().second);
    else out << density_svg(*r.cloud, grid);
    return;
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("--out", "cannot create " + dir + ": " + ec.message());
  const std::filesystem::path base(dir);
  if (format == "json") {
    write_file(base / (r.operation + ".json"), report_json(r));
  } else if (format == "csv") {
    for (const auto& [name, t] : r.tables) write_file(base / (r.operation + "." + name + ".csv"), csv_table(t));
  } else {
    write_file(base / (r.operation + ".svg"), density_svg(*r.cloud, grid));
  }
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transfer-operator multiresolution analysis: subshifts, circle maps, Julia sets, filters and path-space measures.", "tomra"};
  app.require_subcommand(0, 1);
  app.set_version_flag("--version", kVersion);
  Options o;
  for (const auto& [name, desc] : kDescriptions) {
    auto* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", o.config, "JSON experiment config (the full run description)");
    sub->add_option("--seed", o.seed, "64-bit seed, overrides the config");
    sub->add_option("--out", o.out, "output directory (default: standard output)");
    sub->add_option("--threads", o.threads, "sampling threads; results do not depend on it")->check(CLI::Range(1, 256));
    sub->add_option("--format", o.format, "json, csv or svg")->check(CLI::IsMember({"json", "csv", "svg"}));
    sub->add_option("--system", o.system, "inline system: golden-mean, full-shift:N, circle:N, or JSON");
    sub->add_option("--weight", o.weight, "inline weight: one, a preset filter, or JSON");
    sub->add_option("--filter", o.filter, "inline filter preset or JSON");
    for (const auto& p : kInlineParams)
      sub->add_option_function<std::string>("--" + p, [&o, p](const std::string& v) { o.inline_params[p] = v; }, "inline parameter");
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  if (app.get_subcommands().empty()) {
    err << app.help();
    return 2;
  }
  const std::string op = app.get_subcommands().front()->get_name();
  const auto started = std::chrono::steady_clock::now();

  json cfg;
  std::string format, dir;
  try {
    if (!o.config.empty()) {
      if (!o.system.empty() || !o.weight.empty() || !o.filter.empty() || !o.inline_params.empty())
        throw ConfigError("--config", "inline parameters cannot be combined with --config (only --seed, --out, --format and --threads override it)");
      cfg = load_config(o.config);
      if (!cfg.is_object()) throw ConfigError("", "config must be a JSON object");
    } else {
      cfg = json::object();
      if (!o.system.empty()) cfg["system"] = loose_value(o.system);
      if (!o.weight.empty()) cfg["weight"] = loose_value(o.weight);
      if (!o.filter.empty()) cfg["filter"] = loose_value(o.filter);
      if (!o.inline_params.empty()) {
        json p = json::object();
        for (const auto& [k, v] : o.inline_params) {
          std::string key = k;
          std::replace(key.begin(), key.end(), '-', '_');
          p[key] = loose_value(v);
        }
        cfg["params"] = p;
      }
    }
    if (o.seed) cfg["seed"] = *o.seed;
    else if (!cfg.contains("seed")) cfg["seed"] = std::uint64_t{0};
    if (!cfg.at("seed").is_number_unsigned()) throw ConfigError("seed", "expected a nonnegative 64-bit integer");

    json output = cfg.contains("output") ? cfg.at("output") : json::object();
    if (!output.is_object()) throw ConfigError("output", "expected {\"dir\": ..., \"format\": ...}");
    format = !o.format.empty() ? o.format : output.value("format", std::string("json"));
    if (format != "json" && format != "csv" && format != "svg") throw ConfigError("output.format", "must be json, csv or svg");
    dir = !o.out.empty() ? o.out : output.value("dir", std::string());
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }

  int code = 0;
  try {
    RunReport r;
    try {
      r = execute(op, cfg, o.threads);
    } catch (const ConvergenceError& e) {
      r = RunReport{};
      r.operation = op;
      r.config = cfg;
      r.config.erase("output");
      r.digest = config_digest(cfg);
      r.status = "non-convergence";
      r.message = e.what();
      r.results["iterations"] = e.iterations();
      r.residuals["last"] = e.last_residual();
      code = 3;
      err << "non-convergence: " << e.what() << "\n";
      emit(r, "json", dir, 64, out);
      return code;
    }
    emit(r, format, dir, svg_grid(cfg), out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const BudgetError& e) {
    err << "config error: work budget exceeded: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  err << op << ": done in " << secs << " s\n";
  return code;
}

}  // namespace tomra::cli
