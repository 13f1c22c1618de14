#pragma once

#include <vector>

#include "hokdv/flow.hpp"
#include "hokdv/imethod.hpp"

namespace hokdv {

struct DriftReport {
  int order = 2;
  int stencil_order = 8;              ///< accuracy order of the central stencil used
  std::vector<double> times;          ///< interior instants where a stencil fits
  std::vector<double> energy;         ///< E^order_I at those instants
  std::vector<double> fd_rate;        ///< finite-difference dE/dt
  std::vector<double> predicted_rate; ///< Lambda_{order+1}(M_{order+1}), 0 for linear runs
  double max_abs_discrepancy = 0.0;
  /// max |fd - predicted| / max |predicted|
  double max_rel_discrepancy = 0.0;
  double rate_scale = 0.0;            ///< max |predicted|
};

/// Compares the centred finite-difference derivative of E^order_I along a
/// uniformly sampled trajectory with the exact rate Lambda_{order+1}(M_{order+1}).
///
/// The stencil has accuracy `fd_order` (2, 4, 6 or 8); it shrinks when the
/// trajectory is too short, down to 3 samples. The hierarchy's merge cutoff
/// must equal the trajectory's nonlinearity cutoff. Throws
/// std::invalid_argument on fewer than 3 samples or non-uniform spacing.
DriftReport drift_oracle(const Trajectory& traj, const EnergyHierarchy& hierarchy, int order,
                         int fd_order = 8, int threads = 1);

DriftReport drift_oracle(const Trajectory& traj, const IMultiplier& mult, int order,
                         int fd_order = 8, int threads = 1);

/// E^order_I(t_i) - E^order_I(t_0) at every sample, from the rate identity
/// integrated tuple by tuple: on each sample interval the interaction-picture
/// product prod_i exp(-i w_{n_i} t) c_{n_i}(t) is interpolated linearly and its
/// phase exp(i alpha t) integrated exactly. Unlike differencing E along an
/// approximate trajectory, the error is relative to the drift itself. Same
/// preconditions as drift_oracle, plus at least 2 samples.
std::vector<double> integrated_drift(const Trajectory& traj, const EnergyHierarchy& hierarchy,
                                     int order, int threads = 1);

/// Centred first-derivative weights w_{-p/2..p/2} of accuracy p.
std::vector<double> central_difference_weights(int accuracy);

}  // namespace hokdv
