#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hokdv/flow.hpp"
#include "hokdv/multiplier.hpp"
#include "hokdv/random.hpp"

namespace hokdv {

enum class ExperimentKind { kApproxTruncated, kTailInsensitivity, kAlmostConservation, kSqueeze, kScaling };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kApproxTruncated;

  int j = 2;
  int K = 64;  ///< reference / working resolution (lattice index)
  double mu = 1.0;
  DealiasRule dealias = DealiasRule::kPadded;
  Scheme scheme = Scheme::kEtdrk4;
  double dt = 1e-3;
  double T = 1.0;
  bool nonlinear = true;
  /// "sup over t <= T" uses this many uniform interior times plus both ends.
  int time_samples = 32;

  std::vector<double> N_list;
  double s = -0.5;  ///< Sobolev index of the I-method sweeps and the scaling norm check
  MultiplierShape shape = MultiplierShape::kClippedPower;

  /// Initial data: explicit field, or random data with spectrum
  /// exp(-data_decay |k|) <k>^{-data_power} scaled to homogeneous H^{data_s} size data_norm.
  std::optional<FourierField> initial;
  double data_norm = 1.0;
  double data_s = -0.5;
  double data_decay = 1.0;
  double data_power = 0.0;
  int data_support = 0;  ///< lattice band limit; 0 picks the experiment default

  /// Almost-conservation: drifts come from integrating dE/dt = Lambda(M) over this
  /// many quadrature intervals per sample interval.
  int quadrature_substeps = 8;

  /// Tail sweep: explicit perturbation, or random data on 2N < |k| <= tail_width * 2N.
  std::optional<FourierField> tail;
  double tail_norm = 0.1;  ///< homogeneous H^{-1/2} size
  double tail_width = 2.0;

  /// Squeeze: truncated flow at squeeze_N, ball B_R(center), cylinder over mode k0.
  double squeeze_N = 8.0;
  std::optional<FourierField> center;
  double R = 1.0;
  int k0 = 1;
  Complex z{};
  double r = 0.0;  ///< cylinder radius; reported against, never used by the search
  int samples = 64;
  int ascent_steps = 200;

  double fit_threshold = 0.25;  ///< RMS log-residual above which a fit is flagged
  std::uint64_t seed = 1;
  int threads = 1;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const ExperimentConfig& cfg);

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);

struct PowerFit {
  double exponent = std::numeric_limits<double>::quiet_NaN();
  double log_prefactor = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();  ///< RMS in log space
  int points = 0;
  bool flagged = true;
  std::string note;
};

/// Least squares of log y on log x. Needs at least 3 positive pairs; otherwise
/// the fit is flagged with a note and NaN exponent.
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                       double threshold = 0.25);

struct SweepResult {
  std::string name;
  std::vector<std::string> columns;  ///< columns[0] is the swept parameter
  std::vector<std::vector<double>> rows;
  std::optional<PowerFit> fit;       ///< on column 1 against column 0
  std::vector<std::string> diagnostics;

  std::vector<double> column(std::size_t c) const;
  /// First consecutive pair (p_i, p_{i+1}) where column 1 fails to strictly decrease.
  std::optional<std::pair<double, double>> first_non_decreasing() const;
};

/// Header plus rows, numbers through format_double.
std::string to_csv(const SweepResult& result);

/// The 'sup over t' sample grid: time_samples + 2 uniform instants on [0, T].
std::vector<double> sample_times(const ExperimentConfig& cfg);

/// Initial data for the configuration on `grid`, band-limited to data_support when
/// set and to `default_support` otherwise.
FourierField experiment_data(const ExperimentConfig& cfg, const GridSpec& grid, int default_support);

/// sup_t ||P_{<=sqrt N}(S(t)u0 - S^N(t)u0)||_{H_0^{-1/2}} for every N, against a
/// full solve at resolution K. Throws when K < 4 * max index cutoff.
SweepResult approx_truncated_sweep(const ExperimentConfig& cfg);

/// sup_t ||P_{<=N}(S(t)u0 - S(t)(u0 + tail_N))||_{H_0^{-1/2}} with tail_N on |k| > 2N.
SweepResult high_freq_insensitivity(const ExperimentConfig& cfg);

/// Random tail on 2N < |k| <= width * 2N with homogeneous H^{-1/2} size `norm`.
FourierField tail_perturbation(const GridSpec& grid, double N, double width, double norm, Rng& rng);

/// Throws std::invalid_argument when `tail` has a mode with |k| <= 2N.
void check_tail(const FourierField& tail, double N);

/// sup_t |E^4_I(t) - E^4_I(0)| (plus E^2, E^3) along one full-flow solve on [0, T],
/// from the rate identity integrated with exact phases (integrated_drift). The
/// last column differences E^4 directly and carries the integrator's L2 error.
SweepResult almost_conservation_sweep(const ExperimentConfig& cfg);

struct Witness {
  explicit Witness(FourierField start) : u0(std::move(start)) {}

  FourierField u0;
  double value = 0.0;         ///< cylinder coordinate re-evaluated on u0
  double search_value = 0.0;  ///< what the search believed
  double radius = 0.0;        ///< ||u0 - center|| in H_0^{-1/2}
  double center_value = 0.0;  ///< cylinder coordinate of the center
  long evaluations = 0;
  std::vector<std::pair<long, double>> trace;  ///< (evaluations so far, best so far)
};

/// Cylinder coordinate |k0|^{-1/2} |F(S^N(T)u0)(k0) - z| with the Darboux coordinate F.
double cylinder_coordinate(const FourierField& u0, const ExperimentConfig& cfg);

/// Seeded sampling on the ball's boundary sphere, a linear-flow-optimal seed
/// candidate, then projected coordinate ascent on the sphere.
Witness squeeze_witness(const ExperimentConfig& cfg);

struct ScalingResult {
  double mu = 1.0;
  std::vector<double> times;     ///< base-torus times
  std::vector<double> mismatch;  ///< L2 distance at each time
  double max_mismatch = 0.0;
  double max_relative_mismatch = 0.0;
  double norm_ratio = 0.0;       ///< ||u_{0,mu}||_{H_0^s(T_mu)} / ||u_0||_{H_0^s(T)}
  double expected_ratio = 0.0;   ///< mu^{-2j-s+1/2}
  double norm_rel_error = 0.0;
};

/// Solves on the base torus and on T_mu with u_{0,mu}(x) = mu^{-2j} u0(x / mu), each
/// with step dt in its own time, and compares mu^{2j} u_mu(mu^{2j+1} t, mu x) to u(t, x).
ScalingResult scaling_check(const ExperimentConfig& cfg);

SweepResult to_sweep(const ScalingResult& result);
SweepResult to_sweep(const Witness& witness);

}  // namespace hokdv
