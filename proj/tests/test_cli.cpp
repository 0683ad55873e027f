#include "doctest.h"
#include "tomra/cli.hpp"

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace tomra;
using namespace tomra::cli;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("tomra_test_cli_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  json a = {{"seed", 1u}, {"system", "golden-mean"}};
  json b = a;
  b["output"] = {{"dir", "x"}};
  CHECK(config_digest(a) == config_digest(b));
  b["seed"] = 2u;
  CHECK(config_digest(a) != config_digest(b));
}

TEST_CASE("help and usage") {
  auto r = run({"--help"});
  CHECK(r.code == 0);
  for (const auto& s : subcommands()) CHECK(r.out.find(s) != std::string::npos);
  CHECK(run({"pf-solve", "--help"}).code == 0);
  CHECK(run({}).code == 2);
  CHECK(run({"no-such-command"}).code == 2);
}

TEST_CASE("pf-solve inline example") {
  auto r = run({"pf-solve", "--system", "golden-mean", "--weight", "one", "--level", "3", "--tol", "1e-10"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(std::abs(j["results"]["lambda0"].get<double>() - 1.0) <= 1e-10);
  CHECK(j["status"] == "ok");
  CHECK(j["version"] == tomra::kVersion);
  CHECK(j["config_digest"].get<std::string>().rfind("fnv1a64:", 0) == 0);
  CHECK(j["config_digest"] == config_digest(j["config"]));
  for (const auto& row : j["tables"]["eigendata"]["rows"]) CHECK(std::abs(row[1].get<double>() - 1.0) <= 1e-9);
}

TEST_CASE("config errors name the field") {
  const auto dir = temp_dir("config");
  {
    std::ofstream f(dir + "/bad.json");
    f << "{\n  \"system\": {\"type\": \"subshift\", \"matrix\": [[1, 1], [1, 2]]}\n}\n";
  }
  auto r = run({"analyze-shift", "--config", dir + "/bad.json"});
  CHECK(r.code == 2);
  CHECK(r.err.find("system.matrix") != std::string::npos);
  {
    std::ofstream f(dir + "/syntax.json");
    f << "{\n  \"system\": \"golden-mean\",\n  \"params\": {\"level\": }\n}\n";
  }
  r = run({"analyze-shift", "--config", dir + "/syntax.json"});
  CHECK(r.code == 2);
  CHECK(r.err.find("syntax.json:3:") != std::string::npos);
  CHECK(run({"analyze-shift", "--config", dir + "/missing.json"}).code == 2);
  CHECK(run({"analyze-shift", "--config", dir + "/bad.json", "--level", "2"}).code == 2);
  CHECK(run({"pf-solve", "--level", "abc"}).code == 2);
  CHECK(run({"pf-solve", "--system", "circle:2", "--mode", "harmonic", "--weight", "stretched-haar"}).code == 2);  // R 1 exceeds 1
  CHECK(run({"qmf-check", "--format", "svg"}).code == 2);
  CHECK(run({"analyze-shift", "--format", "xml"}).code == 2);
}

TEST_CASE("non-convergence writes a report and exits 3") {
  const auto dir = temp_dir("nc");
  {
    std::ofstream f(dir + "/nc.json");
    f << R"({"system": "golden-mean", "weight": {"random": {"level": 4}}, "params": {"level": 3, "tol": 0, "max_iter": 3}})";
  }
  auto r = run({"pf-solve", "--config", dir + "/nc.json", "--out", dir});
  CHECK(r.code == 3);
  auto j = json::parse(slurp(dir + "/pf-solve.json"));
  CHECK(j["status"] == "non-convergence");
  CHECK(j["results"]["iterations"] == 3);
}

TEST_CASE("CSV follows RFC 4180 quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("(1,2)") == "\"(1,2)\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field(0.5) == "0.5");
  CHECK(csv_field(true) == "true");
  Table t{{"a", "b"}, {{1, "x,y"}}};
  CHECK(csv_table(t) == "a,b\n1,\"x,y\"\n");
  auto r = run({"analyze-shift", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("word,preimages,mass,mass_decimal\n", 0) == 0);
  CHECK(r.out.find("\"(1,2,1)\",2,1/3,") != std::string::npos);
}

TEST_CASE("density SVG") {
  complexdyn::PointCloudMeasure cloud;
  CHECK_THROWS_AS(density_svg(cloud, 8), std::invalid_argument);
  cloud.points = {{0.0, 0.0}, {1.0, 1.0}};
  cloud.weights = {0.5, 0.5};
  const auto svg = density_svg(cloud, 4);
  CHECK(svg == density_svg(cloud, 4));
  std::regex rect(R"re(<rect [^>]*fill="rgb\((\d+),(\d+),(\d+)\)"/>)re");
  int cells = 0, empty = 0;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), rect); it != std::sregex_iterator(); ++it) {
    ++cells;
    if ((*it)[1] == "255") ++empty;
  }
  CHECK(cells == 16);
  CHECK(empty == 14);  // zero-intensity cells are still drawn

  // Brolin cloud of z^2: the central cell stays empty, the ring does not.
  auto r = run({"brolin", "--samples", "4000", "--format", "svg", "--grid", "9"});
  REQUIRE(r.code == 0);
  std::vector<std::string> fills;
  for (auto it = std::sregex_iterator(r.out.begin(), r.out.end(), rect); it != std::sregex_iterator(); ++it) fills.push_back((*it)[1]);
  REQUIRE(fills.size() == 81);
  CHECK(fills[4 * 9 + 4] == "255");
  CHECK(fills[4 * 9 + 0] != "255");

  const auto dir = temp_dir("svg");
  emit_density_svg(cloud, 4, dir + "/a.svg");
  CHECK(slurp(dir + "/a.svg") == svg);
  CHECK_THROWS_AS(emit_density_svg(cloud, 4, dir + "/missing/dir/a.svg"), std::runtime_error);
}

TEST_CASE("artifacts are byte-identical across reruns and thread counts") {
  const auto d1 = temp_dir("rerun1"), d2 = temp_dir("rerun2");
  const std::vector<std::vector<std::string>> cmds{
      {"brolin", "--samples", "3000", "--seed", "11"},
      {"lift", "--paths", "2000", "--seed", "4"},
      {"pathspace", "--samples", "5000", "--depth", "5"},
  };
  for (const auto& fmt : {"json", "csv"})
    for (auto c : cmds) {
      c.insert(c.end(), {"--format", fmt});
      auto a = c, b = c;
      a.insert(a.end(), {"--out", d1, "--threads", "1"});
      b.insert(b.end(), {"--out", d2, "--threads", "3"});
      CHECK(run(a).code == 0);
      CHECK(run(b).code == 0);
    }
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(d1)) {
    ++files;
    CHECK(slurp(e.path().string()) == slurp(d2 + "/" + e.path().filename().string()));
  }
  CHECK(files >= 6);
  // a different seed changes the sampled numbers
  auto x = run({"brolin", "--samples", "500", "--seed", "1"}), y = run({"brolin", "--samples", "500", "--seed", "2"});
  CHECK(x.out != y.out);
}

TEST_CASE("every subcommand runs on small inputs") {
  const std::vector<std::vector<std::string>> cmds{
      {"analyze-shift", "--system", "full-shift:3"},
      {"pf-solve", "--system", "circle:2", "--mode", "harmonic"},
      {"brolin", "--samples", "200"},
      {"qmf-check", "--filter", "cantor"},
      {"loopgroup", "--elements", "5"},
      {"cascade", "--filter", "stretched-haar"},
      {"lift", "--system", "golden-mean"},
      {"pathspace", "--depth", "3", "--samples", "1000"},
      {"rn-check", "--bins", "8", "--samples", "5000"},
      {"multiplicity", "--trials", "5"},
      {"martingale-check", "--trials", "3"},
      {"cantor", "--levels", "4", "--orthogonality-levels", "3"},
      {"cocycle", "--paths", "200"},
  };
  CHECK(cmds.size() == subcommands().size());
  for (const auto& c : cmds) {
    auto r = run(c);
    INFO(c.front() << ": " << r.err);
    CHECK(r.code == 0);
    if (r.code == 0) CHECK(json::parse(r.out)["operation"] == c.front());
  }
}
