#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hokdv/fourier_field.hpp"

namespace hokdv {

/// Malformed snapshot or configuration input.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

inline constexpr int kSnapshotSchemaVersion = 1;

struct Snapshot {
  FourierField field;
  double t = 0.0;
};

/// JSON text with keys schema_version, j, mu, K, t and coeffs = [[n, re, im], ...]
/// for n > 0 only.
std::string format_snapshot(const FourierField& u, double t = 0.0);
Snapshot parse_snapshot(std::string_view text);

void write_snapshot(const std::filesystem::path& path, const FourierField& u, double t = 0.0);
Snapshot read_snapshot(const std::filesystem::path& path);

/// printf("%.17g") so CSV output round-trips and is byte-stable.
std::string format_double(double value);

}  // namespace hokdv
