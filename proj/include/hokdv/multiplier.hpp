#pragma once

#include <string>
#include <string_view>

#include "hokdv/fourier_field.hpp"

namespace hokdv {

enum class MultiplierShape {
  /// min(1, (|k|/N)^s)
  kClippedPower,
  /// 1 below N, N^{-s}|k|^s above 2N, cubic Hermite in log|k| between.
  kSmoothLog,
};

MultiplierShape parse_multiplier_shape(std::string_view name);
std::string to_string(MultiplierShape shape);

/// Fourier multiplier m of the smoothing operator I.
struct IMultiplier {
  double s = -0.5;
  double N = 1.0;
  MultiplierShape shape = MultiplierShape::kClippedPower;

  double operator()(double k) const;
};

/// Throws std::invalid_argument unless N > 0 and s is finite.
IMultiplier make_multiplier(double s, double N,
                            MultiplierShape shape = MultiplierShape::kClippedPower);

inline double eval_m(const IMultiplier& mult, double k) { return mult(k); }

/// Multiplies each coefficient by m(k).
FourierField apply_I(const FourierField& u, const IMultiplier& mult);

}  // namespace hokdv
