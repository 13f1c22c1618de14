#include "hokdv/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hokdv/spectral.hpp"

namespace hokdv {

namespace {

// Box-Muller by hand: std::normal_distribution output is implementation defined,
// which would make seeded runs differ across standard libraries.
double standard_normal(Rng& rng) {
  constexpr double scale = 1.0 / 18446744073709551616.0;
  const double u1 = (static_cast<double>(rng()) + 0.5) * scale;
  const double u2 = (static_cast<double>(rng()) + 0.5) * scale;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t st = seed ^ (0xD1B54A32D192ED03ULL * (stream + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(st)), static_cast<std::uint32_t>(splitmix64(st)),
                    static_cast<std::uint32_t>(splitmix64(st)), static_cast<std::uint32_t>(splitmix64(st))};
  return Rng(seq);
}

FourierField smooth_random_field(const GridSpec& grid, Rng& rng, double decay, int support) {
  if (support < 0 || support > grid.K) support = grid.K;
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(grid.K);
  for (int n = 1; n <= support; ++n) {
    const double re = standard_normal(rng);
    const double im = standard_normal(rng);
    c[n - 1] = Complex(re, im) * std::exp(-decay * std::abs(grid.frequency(n)));
  }
  return FourierField(grid, std::move(c));
}

FourierField normalized(const FourierField& u, double s, double target) {
  const double norm = sobolev_norm(u, s);
  if (!(norm > 0.0)) throw std::invalid_argument("cannot normalise the zero field");
  return (target / norm) * u;
}

Eigen::VectorXd sphere_point(int dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("sphere dimension must be positive");
  Eigen::VectorXd x(dim);
  double n2 = 0.0;
  do {
    for (int i = 0; i < dim; ++i) x[i] = standard_normal(rng);
    n2 = x.squaredNorm();
  } while (n2 == 0.0);
  return x / std::sqrt(n2);
}

}  // namespace hokdv
