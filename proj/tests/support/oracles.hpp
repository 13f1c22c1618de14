#pragma once

// Reference computations that bypass the library's spectral machinery: fields
// are evaluated pointwise from their cosine/sine series and integrated with
// trapezoid or Gauss-Legendre rules.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "hokdv/fourier_field.hpp"

namespace oracle {

/// u(x) = sum_n 2 (Re c_n cos(nx/mu) - Im c_n sin(nx/mu)).
inline double eval(const hokdv::FourierField& u, double x) {
  double acc = 0.0;
  const double mu = u.grid().mu;
  for (int n = 1; n <= u.K(); ++n) {
    const auto c = u.coeffs()[n - 1];
    const double th = n * x / mu;
    acc += 2.0 * (c.real() * std::cos(th) - c.imag() * std::sin(th));
  }
  return acc;
}

/// Periodic trapezoid rule over [0, L); exact for trigonometric polynomials of
/// degree below `points`.
inline double periodic_integral(const std::function<double(double)>& f, double L, int points) {
  double acc = 0.0;
  for (int m = 0; m < points; ++m) acc += f(L * m / points);
  return acc * L / points;
}

/// Composite 8-point Gauss-Legendre rule on [a, b].
inline double gauss_integral(const std::function<double(double)>& f, double a, double b,
                             int panels = 64) {
  static const double x[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                              0.9602898564975363};
  static const double w[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                              0.1012285362903763};
  double acc = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int i = 0; i < 4; ++i) {
      acc += w[i] * (f(mid + 0.5 * h * x[i]) + f(mid - 0.5 * h * x[i]));
    }
  }
  return acc * 0.5 * h;
}

inline hokdv::FourierField random_field(const hokdv::GridSpec& g, std::mt19937_64& rng,
                                        int support = -1) {
  std::normal_distribution<double> nd;
  if (support < 0 || support > g.K) support = g.K;
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(g.K);
  for (int n = 1; n <= support; ++n) c[n - 1] = {nd(rng), nd(rng)};
  return hokdv::FourierField(g, c);
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace oracle
