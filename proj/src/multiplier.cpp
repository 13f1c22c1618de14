#include "hokdv/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hokdv {

MultiplierShape parse_multiplier_shape(std::string_view name) {
  if (name == "clipped_power") return MultiplierShape::kClippedPower;
  if (name == "smooth_log") return MultiplierShape::kSmoothLog;
  throw std::invalid_argument("unknown multiplier shape '" + std::string(name) + "'");
}

std::string to_string(MultiplierShape shape) {
  return shape == MultiplierShape::kSmoothLog ? "smooth_log" : "clipped_power";
}

IMultiplier make_multiplier(double s, double N, MultiplierShape shape) {
  if (!(N > 0.0) || !std::isfinite(N)) throw std::invalid_argument("multiplier N must be positive");
  if (!std::isfinite(s)) throw std::invalid_argument("multiplier s must be finite");
  return IMultiplier{s, N, shape};
}

double IMultiplier::operator()(double k) const {
  const double r = std::abs(k) / N;
  if (r <= 1.0) return 1.0;
  if (shape == MultiplierShape::kClippedPower || r >= 2.0) {
    return std::min(1.0, std::pow(r, s));
  }
  const double tau = std::log2(r);
  return std::exp(s * std::numbers::ln2 * tau * tau * (2.0 - tau));
}

FourierField apply_I(const FourierField& u, const IMultiplier& mult) {
  const GridSpec& g = u.grid();
  Eigen::VectorXcd c = u.coeffs();
  for (int n = 1; n <= g.K; ++n) c[n - 1] *= mult(g.frequency(n));
  return FourierField(g, std::move(c));
}

}  // namespace hokdv
