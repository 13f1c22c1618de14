#include "hokdv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hokdv {

namespace {

bool is_smooth(int n) {
  for (int p : {2, 3, 5}) {
    while (n % p == 0) n /= p;
  }
  return n == 1;
}

}  // namespace

DealiasRule parse_dealias_rule(std::string_view name) {
  if (name == "padded" || name == "default") return DealiasRule::kPadded;
  if (name == "pow2" || name == "power_of_two") return DealiasRule::kPowerOfTwo;
  throw std::invalid_argument("unknown dealias rule '" + std::string(name) + "'");
}

std::string to_string(DealiasRule rule) {
  switch (rule) {
    case DealiasRule::kPadded: return "padded";
    case DealiasRule::kPowerOfTwo: return "pow2";
  }
  return "padded";
}

double GridSpec::length() const { return 2.0 * std::numbers::pi * mu; }

int GridSpec::index_cutoff(double frequency_cutoff) const {
  if (frequency_cutoff < 0.0) return 0;
  // n / mu <= cutoff, with a relative guard against representation error
  const double bound = frequency_cutoff * mu;
  const auto n = static_cast<long long>(std::floor(bound * (1.0 + 1e-12) + 1e-12));
  return static_cast<int>(std::min<long long>(n, K));
}

int transform_size(int min_points, DealiasRule rule) {
  if (min_points < 1) min_points = 1;
  int n = min_points;
  if (rule == DealiasRule::kPowerOfTwo) {
    int p = 1;
    while (p < n) p *= 2;
    return p;
  }
  while (!is_smooth(n)) ++n;
  return n;
}

GridSpec make_grid(int j, int K, double mu, DealiasRule rule) {
  if (j < 1) throw std::invalid_argument("dispersion order j must be positive");
  if (K < 1) throw std::invalid_argument("mode cutoff K must be positive");
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("period parameter mu must be positive");
  }
  GridSpec grid;
  grid.j = j;
  grid.K = K;
  grid.mu = mu;
  grid.dealias = rule;
  grid.physical_points = transform_size(3 * K + 1, rule);
  return grid;
}

}  // namespace hokdv
