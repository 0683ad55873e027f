#include "tomra/cli.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tomra::cli {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string canonical_config(const nlohmann::json& config) {
  nlohmann::json c = config;
  if (c.is_object()) c.erase("output");
  return c.dump();  // object keys are kept sorted
}

std::string config_digest(const nlohmann::json& config) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, fnv1a64(canonical_config(config)));
  return buf;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string report_json(const RunReport& r) {
  nlohmann::json j;
  j["tool"] = "tomra";
  j["version"] = kVersion;
  j["operation"] = r.operation;
  j["config_digest"] = r.digest;
  j["config"] = r.config;
  j["status"] = r.status;
  if (!r.message.empty()) j["message"] = r.message;
  j["results"] = r.results;
  j["residuals"] = r.residuals;
  nlohmann::json tables = nlohmann::json::object();
  for (const auto& [name, t] : r.tables) {
    nlohmann::json tj;
    tj["columns"] = t.columns;
    tj["rows"] = t.rows;
    tables[name] = tj;
  }
  j["tables"] = tables;
  return j.dump(2) + "\n";
}

std::string csv_field(const nlohmann::json& v) {
  std::string s;
  if (v.is_string()) {
    s = v.get<std::string>();
  } else if (v.is_number_float()) {
    s = format_double(v.get<double>());
  } else if (v.is_null()) {
    s = "";
  } else {
    s = v.dump();
  }
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string csv_table(const Table& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
    os << "\n";
  }
  return os.str();
}

std::string density_svg(const complexdyn::PointCloudMeasure& cloud, int grid) {
  if (cloud.points.empty()) throw std::invalid_argument("density_svg: empty cloud");
  if (grid < 1 || grid > 1024) throw std::invalid_argument("density_svg: grid must be in [1, 1024]");
  double xmin = cloud.points.front().real(), xmax = xmin, ymin = cloud.points.front().imag(), ymax = ymin;
  for (const auto& z : cloud.points) {
    xmin = std::min(xmin, z.real());
    xmax = std::max(xmax, z.real());
    ymin = std::min(ymin, z.imag());
    ymax = std::max(ymax, z.imag());
  }
  const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
  const double half = 0.525 * std::max({xmax - xmin, ymax - ymin, 1e-9});
  const double lo_x = cx - half, lo_y = cy - half, side = 2 * half;

  std::vector<double> mass(static_cast<std::size_t>(grid * grid), 0.0);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const auto& z = cloud.points[i];
    int col = std::clamp(static_cast<int>((z.real() - lo_x) / side * grid), 0, grid - 1);
    int row = std::clamp(static_cast<int>((lo_y + side - z.imag()) / side * grid), 0, grid - 1);  // y up
    mass[static_cast<std::size_t>(row * grid + col)] += i < cloud.weights.size() ? cloud.weights[i] : 1.0;
  }
  const double peak = *std::max_element(mass.begin(), mass.end());

  const int cell = 8, size = grid * cell;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 " << size << ' '
     << size << "\">\n";
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.6g %.6g %.6g %.6g", lo_x, lo_y, side, side);
  os << "<desc>density of " << cloud.points.size() << " points over box (x y w h) " << buf << "</desc>\n";
  for (int r = 0; r < grid; ++r)
    for (int c = 0; c < grid; ++c) {
      const double t = peak > 0 ? mass[static_cast<std::size_t>(r * grid + c)] / peak : 0.0;
      const int shade = static_cast<int>(std::lround(255.0 * (1.0 - t)));
      const int blue = static_cast<int>(std::lround(255.0 - 115.0 * t));
      os << "<rect x=\"" << c * cell << "\" y=\"" << r * cell << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb("
         << shade << ',' << shade << ',' << blue << ")\"/>\n";
    }
  os << "</svg>\n";
  return os.str();
}

void emit_density_svg(const complexdyn::PointCloudMeasure& cloud, int grid, const std::string& path) {
  const std::string text = density_svg(cloud, grid);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + path);
}

}  // namespace tomra::cli
