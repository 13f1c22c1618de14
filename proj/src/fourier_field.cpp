#include "hokdv/fourier_field.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hokdv {

FourierField::FourierField(const GridSpec& grid)
    : grid_(grid), coeffs_(Eigen::VectorXcd::Zero(grid.K)) {}

FourierField::FourierField(const GridSpec& grid, Eigen::VectorXcd coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.K) {
    throw std::invalid_argument("coefficient vector has length " +
                                std::to_string(coeffs_.size()) + ", grid expects " +
                                std::to_string(grid_.K));
  }
}

FourierField FourierField::single_mode(const GridSpec& grid, int n, Complex c) {
  if (n < 1 || n > grid.K) {
    throw std::out_of_range("mode index " + std::to_string(n) + " outside 1.." +
                            std::to_string(grid.K));
  }
  Eigen::VectorXcd coeffs = Eigen::VectorXcd::Zero(grid.K);
  coeffs[n - 1] = c;
  return FourierField(grid, std::move(coeffs));
}

FourierField FourierField::cosine(const GridSpec& grid, int n, double amplitude) {
  return single_mode(grid, n, Complex(0.5 * amplitude, 0.0));
}

FourierField FourierField::sine(const GridSpec& grid, int n, double amplitude) {
  return single_mode(grid, n, Complex(0.0, -0.5 * amplitude));
}

int FourierField::support() const {
  for (int n = grid_.K; n >= 1; --n) {
    if (coeffs_[n - 1] != Complex{}) return n;
  }
  return 0;
}

FourierField FourierField::with_grid(const GridSpec& grid) const {
  Eigen::VectorXcd coeffs = Eigen::VectorXcd::Zero(grid.K);
  const int n = std::min(grid.K, grid_.K);
  coeffs.head(n) = coeffs_.head(n);
  return FourierField(grid, std::move(coeffs));
}

void require_same_grid(const FourierField& a, const FourierField& b) {
  if (!(a.grid() == b.grid())) {
    throw std::invalid_argument("fields live on different grids");
  }
}

FourierField operator+(const FourierField& a, const FourierField& b) {
  require_same_grid(a, b);
  return FourierField(a.grid_, a.coeffs_ + b.coeffs_);
}

FourierField operator-(const FourierField& a, const FourierField& b) {
  require_same_grid(a, b);
  return FourierField(a.grid_, a.coeffs_ - b.coeffs_);
}

FourierField operator*(double s, const FourierField& a) {
  return FourierField(a.grid_, s * a.coeffs_);
}

}  // namespace hokdv
