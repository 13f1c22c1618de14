#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "hokdv/fourier_field.hpp"

namespace hokdv {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t& state);

/// Independent generator for (seed, stream); streams never share state.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// c_n = (g + i g') exp(-decay |k|) for 0 < n <= support (default K), with g, g'
/// standard normal.
FourierField smooth_random_field(const GridSpec& grid, Rng& rng, double decay = 1.0,
                                 int support = -1);

/// u scaled so that ||u||_{H^s} = target. Throws std::invalid_argument for u = 0.
FourierField normalized(const FourierField& u, double s, double target = 1.0);

/// Uniform point on the unit sphere in R^dim.
Eigen::VectorXd sphere_point(int dim, Rng& rng);

}  // namespace hokdv
