#pragma once

#include <Eigen/Core>

#include "hokdv/flow.hpp"

namespace hokdv {

// Real coordinates on P_{<=N} fields: x_{2(n-1)} = Re u_hat(n), x_{2(n-1)+1} = Im u_hat(n)
// for n = 1..N_index.

Eigen::VectorXd to_real_coordinates(const FourierField& u, int modes);
FourierField from_real_coordinates(const GridSpec& grid, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Matrix of omega(u, v) = int u d_x^{-1} v on the coordinate basis fields, so
/// that omega(u, v) = x_u^T Omega x_v.
Eigen::MatrixXd symplectic_matrix(const GridSpec& grid, int modes);

/// Central-difference Jacobian of u0 -> S^N(T) u0 in real coordinates. Needs the
/// truncated flavor; dimension above 64 is rejected. Columns run on `threads`
/// workers and do not depend on the thread count.
Eigen::MatrixXd flow_jacobian(const FourierField& u0, const FlowSpec& spec, double h,
                              int threads = 1);

/// Exact Jacobian of the linear propagator: 2x2 rotations by k^{2j+1} T.
Eigen::MatrixXd linear_jacobian(const GridSpec& grid, int modes, double T);

/// max |J^T Omega J - Omega|. Throws std::invalid_argument on a non-square or
/// odd-dimensional J.
double check_symplectic(const Eigen::Ref<const Eigen::MatrixXd>& J, const GridSpec& grid);

}  // namespace hokdv
