#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>

#include "hokdv/fourier_field.hpp"
#include "hokdv/multilinear.hpp"
#include "hokdv/multiplier.hpp"

namespace hokdv {

/// Tallies of the check that M4 vanishes wherever alpha_4 does.
struct ResonantAudit {
  std::uint64_t resonant_tuples = 0;
  /// max |M4| / (largest |term| of its pair sum) over resonant tuples
  double max_relative = 0.0;
  double max_abs = 0.0;
};

/// The correction symbols M3, sigma3, M4, sigma4, M5 of the modified-energy
/// hierarchy for one grid and multiplier, plus the energies E^2, E^3, E^4.
///
/// Symbols are evaluated on integer lattice indices. sigma3 and sigma4 are
/// tabulated (sigma4 lazily, on first use). Each pair-sum term inside M4 and
/// M5 is switched off unless 0 < |n_a + n_b| <= merge_cutoff; with the default
/// cutoff K this matches the truncated flow exactly, so
///   d/dt E^2 = Lambda_3(M3), d/dt E^3 = Lambda_4(M4), d/dt E^4 = Lambda_5(M5)
/// hold along Galerkin trajectories.
///
/// Copies share the tables; all members are safe to call concurrently.
class EnergyHierarchy {
 public:
  EnergyHierarchy(const GridSpec& grid, const IMultiplier& mult, int merge_cutoff = 0);

  const GridSpec& grid() const;
  const IMultiplier& multiplier() const;
  int merge_cutoff() const;

  /// m at lattice index n.
  double m(int n) const;

  /// Closed form (i/3) sum m^2(k_i) k_i.
  Complex big_m3(int a, int b, int c) const;
  /// Real; requires nonzero entries summing to zero.
  double sigma3(int a, int b, int c) const;
  Complex big_m4(std::span<const int> n) const;
  /// Zero on resonant tuples, where M4 is asserted to vanish.
  double sigma4(std::span<const int> n) const;
  Complex big_m5(std::span<const int> n) const;

  /// Unsymmetrized generators whose permutation averages are M3, M4, M5.
  Complex m3_generator(std::span<const int> n) const;
  Complex m4_generator(std::span<const int> n) const;
  Complex m5_generator(std::span<const int> n) const;

  MultilinearForm form(FormTag tag) const;

  /// E^order_I for order in {2, 3, 4}.
  double energy(const FourierField& u, int order, int threads = 1) const;
  /// Lambda_{order+1}(M_{order+1}), the exact time derivative of E^order_I.
  double energy_rate(const FourierField& u, int order, int threads = 1) const;

  /// Builds the sigma4 table if needed and reports the resonant-set check.
  ResonantAudit resonant_audit() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

enum class M3Route { kClosedForm, kSymmetrized };

MultilinearForm big_m3(const IMultiplier& mult, const GridSpec& grid,
                       M3Route route = M3Route::kClosedForm);
MultilinearForm sigma3(const IMultiplier& mult, const GridSpec& grid);
MultilinearForm big_m4(const IMultiplier& mult, const GridSpec& grid);
MultilinearForm sigma4(const IMultiplier& mult, const GridSpec& grid);
MultilinearForm big_m5(const IMultiplier& mult, const GridSpec& grid);

/// E^2_I = ||Iu||^2, E^3_I = E^2_I + Lambda_3(sigma3), E^4_I = E^3_I + Lambda_4(sigma4).
double modified_energy(const FourierField& u, const IMultiplier& mult, int order);

}  // namespace hokdv
