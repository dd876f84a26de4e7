#include "bisweep/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace bisweep {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

double parse_real(const std::string& token, const std::string& where) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw input_error(where + ": cannot parse real '" + token + "'");
  }
  if (used != token.size()) throw input_error(where + ": trailing characters in '" + token + "'");
  return v;
}

long parse_int(const std::string& token, const std::string& where) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(token, &used);
  } catch (const std::exception&) {
    throw input_error(where + ": cannot parse integer '" + token + "'");
  }
  if (used != token.size()) throw input_error(where + ": trailing characters in '" + token + "'");
  return v;
}

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(strip(item));
  return out;
}

// Non-comment, non-blank lines of a text file.
std::vector<std::string> content_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

Eigen::MatrixXd load_square_csv(const std::string& path, const std::string& kind, long min_size) {
  const auto lines = content_lines(path);
  if (lines.empty()) throw input_error(path + ": empty " + kind + " file");
  const long n = parse_int(lines[0], path + " header");
  if (n < min_size) throw input_error(path + ": " + kind + " size " + std::to_string(n) +
                                      " below the minimum " + std::to_string(min_size));
  if (static_cast<long>(lines.size()) != n + 1)
    throw input_error(path + ": expected " + std::to_string(n) + " data rows, found " +
                      std::to_string(lines.size() - 1));
  Eigen::MatrixXd m(n, n);
  for (long i = 0; i < n; ++i) {
    const auto cells = split(lines[i + 1], ',');
    if (static_cast<long>(cells.size()) != n)
      throw input_error(path + " row " + std::to_string(i + 1) + ": expected " +
                        std::to_string(n) + " entries, found " + std::to_string(cells.size()));
    for (long j = 0; j < n; ++j)
      m(i, j) = parse_real(cells[j], path + " row " + std::to_string(i + 1));
  }
  return m;
}

void check_symmetric(const Eigen::MatrixXd& m, const std::string& path, bool zero_diagonal) {
  const double scale = m.cwiseAbs().maxCoeff();
  const double tol = 1e-9 * std::max(scale, 1e-300);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol)
    throw input_error(path + ": matrix is not symmetric");
  if (zero_diagonal && m.diagonal().cwiseAbs().maxCoeff() > tol)
    throw input_error(path + ": diagonal is not zero");
}

std::string matrix_csv(const Eigen::MatrixXd& m, long header) {
  std::ostringstream os;
  os << header << '\n';
  for (long i = 0; i < m.rows(); ++i) {
    for (long j = 0; j < m.cols(); ++j) os << (j ? "," : "") << fmt(m(i, j));
    os << '\n';
  }
  return os.str();
}

json phantom_to_json(const Phantom& phantom) {
  json doc;
  doc["vertices"] = json::array();
  for (const auto& v : phantom.domain.vertices) doc["vertices"].push_back({v.x(), v.y()});
  doc["inclusions"] = json::array();
  for (const auto& inc : phantom.inclusions) {
    json j;
    j["kappa"] = inc.kappa;
    if (inc.shape == Inclusion::Shape::disk) {
      j["type"] = "disk";
      j["center"] = {inc.center.x(), inc.center.y()};
      j["radius"] = inc.radius;
    } else {
      j["type"] = "polygon";
      j["vertices"] = json::array();
      for (const auto& v : inc.vertices) j["vertices"].push_back({v.x(), v.y()});
    }
    doc["inclusions"].push_back(j);
  }
  return doc;
}

std::vector<Vec2> json_points(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw input_error(where + " must be an array of [x,y] pairs");
  std::vector<Vec2> pts;
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw input_error(where + " entries must be [x,y] number pairs");
    pts.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return pts;
}

}  // namespace

void atomic_write(const std::string& path, const std::string& content) {
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.good()) throw input_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target, ec);
  if (ec) throw input_error("cannot rename '" + tmp.string() + "' to '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

PolygonDomain load_polygon(const std::string& path) {
  std::vector<Vec2> vertices;
  for (const auto& line : content_lines(path)) {
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    std::string t;
    while (ss >> t) tokens.push_back(t);
    if (tokens.size() != 2)
      throw input_error(path + ": expected 'x y' per line, got '" + line + "'");
    vertices.emplace_back(parse_real(tokens[0], path), parse_real(tokens[1], path));
  }
  return PolygonDomain::from_vertices(vertices);
}

void save_polygon(const PolygonDomain& polygon, const std::string& path) {
  std::ostringstream os;
  os << "# polygon vertices, counterclockwise, one 'x y' per line\n";
  for (const auto& v : polygon.vertices) os << fmt(v.x()) << ' ' << fmt(v.y()) << '\n';
  atomic_write(path, os.str());
}

Phantom parse_phantom(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw input_error(std::string("phantom JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("vertices"))
    throw input_error("phantom JSON: missing 'vertices'");
  auto domain = PolygonDomain::from_vertices(json_points(doc["vertices"], "'vertices'"));
  std::vector<Inclusion> inclusions;
  for (const auto& j : doc.value("inclusions", json::array())) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
      throw input_error("phantom JSON: inclusion without a 'type' string");
    if (!j.contains("kappa") || !j["kappa"].is_number())
      throw input_error("phantom JSON: inclusion without a numeric 'kappa'");
    const std::string type = j["type"].get<std::string>();
    const double kappa = j["kappa"].get<double>();
    if (type == "disk") {
      if (!j.contains("center") || !j.contains("radius") || !j["radius"].is_number())
        throw input_error("phantom JSON: disk inclusion needs 'center' and 'radius'");
      const auto c = json_points(json::array({j["center"]}), "'center'");
      inclusions.push_back(Inclusion::disk(c[0], j["radius"].get<double>(), kappa));
    } else if (type == "polygon") {
      if (!j.contains("vertices"))
        throw input_error("phantom JSON: polygon inclusion needs 'vertices'");
      inclusions.push_back(Inclusion::polygon(json_points(j["vertices"], "inclusion 'vertices'"), kappa));
    } else {
      throw input_error("phantom JSON: unknown inclusion type '" + type + "'");
    }
  }
  return Phantom::create(std::move(domain), std::move(inclusions));
}

Phantom load_phantom(const std::string& path) {
  try {
    return parse_phantom(read_file(path));
  } catch (const input_error& e) {
    throw input_error(path + ": " + e.what());
  }
}

void save_phantom(const Phantom& phantom, const std::string& path) {
  atomic_write(path, phantom_to_json(phantom).dump(2) + "\n");
}

void save_bisweep(const BisweepMatrix& s, const std::string& path) {
  atomic_write(path, matrix_csv(s.entries, s.n));
}

BisweepMatrix load_bisweep(const std::string& path) {
  BisweepMatrix out;
  out.entries = load_square_csv(path, "bisweep", 2);
  out.n = static_cast<int>(out.entries.rows());
  check_symmetric(out.entries, path, true);
  out.entries = 0.5 * (out.entries + out.entries.transpose()).eval();
  out.entries.diagonal().setZero();
  out.theta.resize(out.n);
  for (int l = 0; l < out.n; ++l) out.theta[l] = 2 * pi * l / out.n;
  return out;
}

void save_ntd(const NtdMatrix& lambda, const std::string& path) {
  atomic_write(path, matrix_csv(lambda.entries, lambda.M));
}

NtdMatrix load_ntd(const std::string& path) {
  NtdMatrix out;
  out.entries = load_square_csv(path, "NtD", 1);
  out.M = static_cast<int>(out.entries.rows());
  check_symmetric(out.entries, path, false);
  out.entries = 0.5 * (out.entries + out.entries.transpose()).eval();
  return out;
}

void save_sweep(const std::vector<SweepSeries>& series, const std::string& path) {
  std::ostringstream os;
  os << "series,theta,value\n";
  for (const auto& s : series) {
    if (s.label.empty() || s.label.find(',') != std::string::npos)
      throw input_error("sweep series label '" + s.label + "' is empty or contains a comma");
    if (s.theta.size() != s.value.size())
      throw input_error("sweep series '" + s.label + "': theta/value size mismatch");
    for (std::size_t i = 0; i < s.theta.size(); ++i)
      os << s.label << ',' << fmt(s.theta[i]) << ',' << fmt(s.value[i]) << '\n';
  }
  atomic_write(path, os.str());
}

std::vector<SweepSeries> load_sweep(const std::string& path) {
  const auto lines = content_lines(path);
  if (lines.empty() || split(lines[0], ',') != std::vector<std::string>{"series", "theta", "value"})
    throw input_error(path + ": missing 'series,theta,value' header");
  std::vector<SweepSeries> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    if (cells.size() != 3)
      throw input_error(path + " row " + std::to_string(i) + ": expected 3 fields");
    std::size_t k = 0;
    while (k < out.size() && out[k].label != cells[0]) ++k;
    if (k == out.size()) out.push_back({cells[0], {}, {}});
    out[k].theta.push_back(parse_real(cells[1], path + " row " + std::to_string(i)));
    out[k].value.push_back(parse_real(cells[2], path + " row " + std::to_string(i)));
  }
  return out;
}

void save_reconstruction_csv(const ReconstructionGrid& grid, const std::string& path) {
  std::ostringstream os;
  os << "x_D,y_D,x_B,y_B,Ind\n";
  for (std::size_t i = 0; i < grid.indicator.size(); ++i)
    os << fmt(grid.domain_point[i].x()) << ',' << fmt(grid.domain_point[i].y()) << ','
       << fmt(grid.disk_point[i].x()) << ',' << fmt(grid.disk_point[i].y()) << ','
       << fmt(grid.indicator[i]) << '\n';
  atomic_write(path, os.str());
}

void save_reconstruction_pgm(const Reconstruction& rec, const std::string& path) {
  const auto& G = rec.grid;
  if (G.nx < 1 || G.ny < 1 || G.pixel.size() != static_cast<std::size_t>(G.nx) * G.ny)
    throw input_error("PGM output needs raster metadata on the reconstruction grid");
  const std::size_t K = rec.cutoff.size();
  if (K == 0) throw input_error("PGM output needs at least one cutoff");
  std::ostringstream os;
  os << "P2\n" << G.nx << ' ' << G.ny << "\n255\n";
  int on_line = 0;
  for (std::size_t p = 0; p < G.pixel.size(); ++p) {
    int gray = 255;
    if (G.pixel[p] >= 0) {
      const double v = G.indicator[G.pixel[p]];
      std::size_t bucket = K;
      while (bucket > 0 && v < rec.cutoff[bucket - 1]) --bucket;
      gray = static_cast<int>(std::lround(235.0 * bucket / K));
    }
    os << gray << (++on_line % 15 == 0 || p + 1 == G.pixel.size() ? '\n' : ' ');
  }
  atomic_write(path, os.str());
}

}  // namespace bisweep
