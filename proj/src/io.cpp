#include "hokdv/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace hokdv {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_snapshot(const FourierField& u, double t) {
  const GridSpec& g = u.grid();
  json doc;
  doc["schema_version"] = kSnapshotSchemaVersion;
  doc["j"] = g.j;
  doc["mu"] = g.mu;
  doc["K"] = g.K;
  doc["t"] = t;
  json coeffs = json::array();
  for (int n = 1; n <= g.K; ++n) {
    const Complex c = u.coeffs()[n - 1];
    coeffs.push_back(json::array({n, c.real(), c.imag()}));
  }
  doc["coeffs"] = std::move(coeffs);
  return doc.dump(1) + "\n";
}

namespace {

template <class T>
T required(const json& doc, const char* key) {
  if (!doc.contains(key)) throw FormatError(std::string("snapshot missing key '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("snapshot key '") + key + "' has the wrong type");
  }
}

}  // namespace

Snapshot parse_snapshot(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("snapshot is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("snapshot must be a JSON object");
  static const std::set<std::string> known{"schema_version", "j", "mu", "K", "t", "coeffs"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw FormatError("snapshot has unknown key '" + key + "'");
  }
  const int version = required<int>(doc, "schema_version");
  if (version != kSnapshotSchemaVersion) {
    throw FormatError("unsupported snapshot schema_version " + std::to_string(version));
  }
  GridSpec grid;
  try {
    grid = make_grid(required<int>(doc, "j"), required<int>(doc, "K"), required<double>(doc, "mu"));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("snapshot grid invalid: ") + e.what());
  }
  const double t = doc.contains("t") ? required<double>(doc, "t") : 0.0;

  const json& list = doc.contains("coeffs") ? doc.at("coeffs") : json();
  if (!list.is_array()) throw FormatError("snapshot 'coeffs' must be a list");
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(grid.K);
  std::set<long long> seen;
  for (const auto& entry : list) {
    if (!entry.is_array() || entry.size() != 3 || !entry[0].is_number_integer() ||
        !entry[1].is_number() || !entry[2].is_number()) {
      throw FormatError("coeff entries must be [k_index, re, im]");
    }
    const long long n = entry[0].get<long long>();
    if (n == 0) throw FormatError("k_index 0 is not allowed: fields are mean-zero");
    if (n < 0) {
      throw FormatError("negative k_index " + std::to_string(n) +
                        ": only k > 0 is stored, negative modes follow by conjugate symmetry");
    }
    if (n > grid.K) {
      throw FormatError("k_index " + std::to_string(n) + " exceeds K = " + std::to_string(grid.K));
    }
    if (!seen.insert(n).second) throw FormatError("duplicate k_index " + std::to_string(n));
    c[n - 1] = Complex(entry[1].get<double>(), entry[2].get<double>());
  }
  return Snapshot{FourierField(grid, std::move(c)), t};
}

void write_snapshot(const fs::path& path, const FourierField& u, double t) {
  write_file_atomic(path, format_snapshot(u, t));
}

Snapshot read_snapshot(const fs::path& path) { return parse_snapshot(read_file(path)); }

}  // namespace hokdv
