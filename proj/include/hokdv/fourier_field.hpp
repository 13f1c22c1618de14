#pragma once

#include <complex>

#include <Eigen/Core>

#include "hokdv/grid.hpp"

namespace hokdv {

using Complex = std::complex<double>;

/// Real-valued, mean-zero field on the torus of circumference 2*pi*mu.
///
///   u(x) = sum_{0 < |n| <= K} c_n exp(i n x / mu),   c_{-n} = conj(c_n).
///
/// Only c_1..c_K are stored; negative indices are reconstructed by symmetry
/// and the zero mode does not exist. Values are immutable after construction.
class FourierField {
 public:
  explicit FourierField(const GridSpec& grid);
  FourierField(const GridSpec& grid, Eigen::VectorXcd coeffs);

  static FourierField single_mode(const GridSpec& grid, int n, Complex c);
  /// cos(n x / mu).
  static FourierField cosine(const GridSpec& grid, int n, double amplitude = 1.0);
  /// sin(n x / mu).
  static FourierField sine(const GridSpec& grid, int n, double amplitude = 1.0);

  const GridSpec& grid() const { return grid_; }
  int K() const { return grid_.K; }

  /// Stored coefficients, entry n-1 holds c_n.
  const Eigen::VectorXcd& coeffs() const { return coeffs_; }

  /// c_n for any integer n; zero outside 0 < |n| <= K.
  Complex coeff(int n) const {
    if (n > 0) return n <= grid_.K ? coeffs_[n - 1] : Complex{};
    if (n < 0) return -n <= grid_.K ? std::conj(coeffs_[-n - 1]) : Complex{};
    return Complex{};
  }

  /// Torus Fourier transform  hat u(k) = int e^{-ikx} u dx = 2*pi*mu * c_n.
  Complex hat(int n) const { return grid_.length() * coeff(n); }

  /// Largest index with a nonzero coefficient, 0 for the zero field.
  int support() const;

  FourierField with_grid(const GridSpec& grid) const;

  friend FourierField operator+(const FourierField& a, const FourierField& b);
  friend FourierField operator-(const FourierField& a, const FourierField& b);
  friend FourierField operator*(double s, const FourierField& a);
  friend FourierField operator*(const FourierField& a, double s) { return s * a; }

 private:
  GridSpec grid_;
  Eigen::VectorXcd coeffs_;
};

/// Throws std::invalid_argument when the two fields live on different grids.
void require_same_grid(const FourierField& a, const FourierField& b);

}  // namespace hokdv
