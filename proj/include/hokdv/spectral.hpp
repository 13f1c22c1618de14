#pragma once

#include <memory>

#include <Eigen/Core>

#include "hokdv/fourier_field.hpp"

namespace hokdv {

/// FFT between c_1..c_K and real samples u(x_m), x_m = 2*pi*mu*m/M.
///
/// Holds its own buffers; one instance per thread.
class Transformer {
 public:
  explicit Transformer(int points);
  ~Transformer();
  Transformer(Transformer&&) noexcept;
  Transformer& operator=(Transformer&&) noexcept;

  int points() const { return points_; }

  /// Samples of sum_{0<|n|<=K} c_n e^{inx}; requires points > 2K.
  void to_physical(const Eigen::Ref<const Eigen::VectorXcd>& coeffs,
                   Eigen::Ref<Eigen::VectorXd> samples);
  /// Discrete coefficients c_1..c_K of the samples (mean and |n| > K dropped).
  void from_physical(const Eigen::Ref<const Eigen::VectorXd>& samples,
                     Eigen::Ref<Eigen::VectorXcd> coeffs);

 private:
  struct Impl;
  int points_;
  std::unique_ptr<Impl> impl_;
};

/// Samples on the grid's collocation points.
Eigen::VectorXd transform(const FourierField& u);
/// Samples on `points` equispaced points (points > 2K).
Eigen::VectorXd transform(const FourierField& u, int points);
/// Inverse of `transform`. Throws std::invalid_argument when the length does
/// not match grid.physical_points.
FourierField inverse(const Eigen::Ref<const Eigen::VectorXd>& samples, const GridSpec& grid);

/// Frequency band selected by `project`.
struct Band {
  enum class Kind { kLow, kHigh, kDyadic };
  Kind kind = Kind::kLow;
  double N = 1.0;

  static Band low(double N) { return {Kind::kLow, N}; }        ///< |k| <= N
  static Band high(double N) { return {Kind::kHigh, N}; }      ///< |k| >= N
  static Band dyadic(double N) { return {Kind::kDyadic, N}; }  ///< N <= |k| < 2N

  bool contains(double k) const;
};

FourierField project(const FourierField& u, const Band& band);

/// d_x^m u for m >= -1; m = -1 is the mean-zero antiderivative.
FourierField derivative(const FourierField& u, int m);

/// Inhomogeneous Sobolev norm with the counting measure of the mu-lattice,
///   ||u||_{H^s}^2 = 2*pi*mu * sum_{n != 0} <k>^{2s} |c_n|^2,  k = n/mu.
/// For mu = 1 this is (2 pi)^{-1} sum <k>^{2s} |hat u(k)|^2.
double sobolev_norm(const FourierField& u, double s);

/// Same with the homogeneous weight |k|^{2s}; equivalent to the inhomogeneous
/// norm on mean-zero fields and exactly covariant under the scaling symmetry.
double homogeneous_sobolev_norm(const FourierField& u, double s);

/// int u v dx over the torus.
double l2_inner(const FourierField& u, const FourierField& v);

/// omega(u, v) = int u d_x^{-1} v dx.
double symplectic_form(const FourierField& u, const FourierField& v);

/// Darboux-normalised Fourier coordinate F(n) = sqrt(4 pi mu) c_n.
///
/// In these coordinates omega pairs (Re F, Im F) of mode n with weight 1/k and
/// ||u||^2 in homogeneous H^{-1/2} is sum_{n>0} |F(n)|^2 / k.
Complex symplectic_coordinate(const FourierField& u, int n);
FourierField from_symplectic_coordinates(const GridSpec& grid,
                                         const Eigen::Ref<const Eigen::VectorXcd>& F);

struct ConservedReport {
  double mass = 0.0;
  double l2_energy = 0.0;
  double hamiltonian = 0.0;
  double timestamp = 0.0;
};

/// Mean, int u^2, and int (1/2)(d_x^j u)^2 - u^3/6. The cubic term uses a
/// quadrature with at least 4K+1 points.
ConservedReport conserved_quantities(const FourierField& u, double timestamp = 0.0);

/// int u^3 dx by alias-free quadrature.
double cubic_integral(const FourierField& u);

}  // namespace hokdv
