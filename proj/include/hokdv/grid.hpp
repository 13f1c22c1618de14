#pragma once

#include <string>
#include <string_view>

namespace hokdv {

/// How the number of collocation points is chosen from the mode cutoff.
enum class DealiasRule {
  /// Smallest 2^a 3^b 5^c size >= 3K+1.
  kPadded,
  /// Smallest power of two >= 3K+1.
  kPowerOfTwo,
};

DealiasRule parse_dealias_rule(std::string_view name);
std::string to_string(DealiasRule rule);

/// Model and discretisation parameters.
///
/// The torus has circumference 2*pi*mu and the frequency lattice is
/// {n / mu : n integer}. Fields keep the lattice indices 0 < |n| <= K.
struct GridSpec {
  int j = 1;                 ///< dispersion order; linear operator is d_x^{2j+1}
  int K = 1;                 ///< largest retained lattice index
  double mu = 1.0;           ///< period parameter
  int physical_points = 4;   ///< collocation points, >= 3K+1
  DealiasRule dealias = DealiasRule::kPadded;

  double frequency(int n) const { return n / mu; }
  double length() const;

  /// Lattice index cutoff for the frequency band |k| <= cutoff.
  int index_cutoff(double frequency_cutoff) const;

  bool operator==(const GridSpec&) const = default;
};

/// Validates the parameters and picks the collocation size.
/// Throws std::invalid_argument for nonpositive j, K or mu.
GridSpec make_grid(int j, int K, double mu = 1.0,
                   DealiasRule rule = DealiasRule::kPadded);

/// Smallest transform size >= min_points under the given rule.
int transform_size(int min_points, DealiasRule rule = DealiasRule::kPadded);

}  // namespace hokdv
