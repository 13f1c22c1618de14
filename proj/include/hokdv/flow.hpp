#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hokdv/fourier_field.hpp"
#include "hokdv/spectral.hpp"

namespace hokdv {

enum class FlowFlavor {
  /// Galerkin flow on all modes 0 < |n| <= K.
  kFull,
  /// Nonlinearity projected to |k| <= N, data projected likewise.
  kTruncated,
};

/// kFilon: second order in the interaction picture, with every triad phase
/// exp(i (w_a + w_b - w_k) t) integrated exactly against a linear-in-time
/// amplitude. Costs O(K^2) per stage but stays accurate when those phases are far
/// beyond 1/dt, where the Runge-Kutta stages alias them.
enum class Scheme { kEtdrk4, kLawsonRk4, kFilon };

Scheme parse_scheme(std::string_view name);
std::string to_string(Scheme scheme);

struct FlowSpec {
  GridSpec grid;
  FlowFlavor flavor = FlowFlavor::kFull;
  double N = 0.0;  ///< frequency cutoff of the truncated flavor
  Scheme scheme = Scheme::kEtdrk4;
  double dt = 1e-3;
  /// Horizon; a negative value integrates backwards in time.
  double T = 1.0;
  bool nonlinear = true;
  /// Spacing of recorded samples; 0 records every step. Rounded to a whole
  /// number of steps.
  double sample_interval = 0.0;
  double blowup_threshold = 1e12;
  long max_steps = 50'000'000;

  /// Largest lattice index that the nonlinearity feeds.
  int active_cutoff() const;
};

/// Throws std::invalid_argument for dt <= 0, N outside (0, K] on the truncated
/// flavor, or a non-finite horizon.
void validate(const FlowSpec& spec);

struct Sample {
  double t;
  FourierField u;
};

struct TrajectoryStats {
  long steps = 0;
  double dt_used = 0.0;
  double max_nonlinear = 0.0;  ///< largest |N(u)_k| seen at stage evaluations
};

/// Samples are ordered in the direction of integration with uniform spacing.
struct Trajectory {
  std::vector<Sample> samples;
  FlowSpec spec;
  TrajectoryStats stats;

  const FourierField& final() const { return samples.back().u; }
};

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, double t, long step)
      : std::runtime_error(what), t_(t), step_(step) {}
  double t() const { return t_; }
  long step() const { return step_; }

 private:
  double t_;
  long step_;
};

/// k^{2j+1} for lattice index n, in extended precision.
long double dispersion_frequency(const GridSpec& grid, int n);

/// exp(i k^{2j+1} t), with the angle reduced modulo 2 pi in extended precision.
Complex linear_phase(const GridSpec& grid, int n, double t);

/// sum_i (n_i / mu)^{2j+1}, exact in integer arithmetic while it fits.
long double resonance_frequency(const GridSpec& grid, std::span<const int> n);

/// (int_0^h exp(i W t) dt, int_0^h t exp(i W t) dt / h); the angle W h is
/// reduced in extended precision and small |W h| uses the power series.
std::pair<Complex, Complex> oscillatory_weights(long double W, double h);

/// u_hat(k) -> exp(i k^{2j+1} t) u_hat(k).
FourierField linear_propagate(const FourierField& u, double t);

/// -(1/2) d_x P(u^2) with P the projection to |n| <= cutoff (cutoff <= K),
/// using an alias-free padded product.
FourierField nonlinear_rhs(const FourierField& u, int cutoff);
FourierField nonlinear_rhs(const FourierField& u, const FlowSpec& spec);

/// Exponential integrator run. The linear phase is applied through exact
/// multipliers; only the nonlinearity is stepped. The step is shrunk so that
/// |T| / dt is an integer. Throws BlowUpError when a coefficient exceeds the
/// guard or turns non-finite.
Trajectory integrate(const FourierField& u0, const FlowSpec& spec);

/// Final state only; skips sample storage.
FourierField evolve(const FourierField& u0, const FlowSpec& spec);

struct ConservationSummary {
  std::vector<ConservedReport> reports;
  double max_mass = 0.0;
  double max_energy_drift = 0.0;       ///< relative to E(0)
  double max_hamiltonian_drift = 0.0;  ///< relative to |H(0)| (absolute if H(0) = 0)
};

ConservationSummary conservation_report(const Trajectory& traj);

}  // namespace hokdv
