#pragma once

#include <cstdint>
#include <iosfwd>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hokdv/polynomial.hpp"

namespace hokdv::resonance {

using Rational = boost::multiprecision::cpp_rational;

/// Point of the hyperplane sum(entries) = 0 with n in {3, 4, 5} entries.
/// Zero entries are rejected unless the tuple is built as a degenerate probe.
class FreqTuple {
 public:
  FreqTuple(std::vector<Rational> entries, int j, bool degenerate_probe = false);

  static FreqTuple lattice(std::initializer_list<long long> entries, int j,
                           bool degenerate_probe = false);

  int size() const { return static_cast<int>(entries_.size()); }
  int j() const { return j_; }
  bool degenerate_probe() const { return degenerate_; }
  const std::vector<Rational>& entries() const { return entries_; }
  const Rational& operator[](int i) const { return entries_.at(i); }

 private:
  std::vector<Rational> entries_;
  int j_;
  bool degenerate_;
};

/// Value i * imag. The real part is structurally zero.
template <class Scalar>
struct Imaginary {
  Scalar imag{};
  Scalar real() const { return Scalar(0); }
  friend bool operator==(const Imaginary&, const Imaginary&) = default;
};

template <class Scalar>
Scalar ipow(const Scalar& x, int e) {
  Scalar r(1);
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

/// Sum of (2j+1)-th powers.
template <class Scalar>
Scalar power_sum(std::span<const Scalar> xs, int j) {
  Scalar acc(0);
  for (const auto& x : xs) acc += ipow(x, 2 * j + 1);
  return acc;
}

/// x y z on three entries, (x+y)(x+z)(x+w) on four.
template <class Scalar>
Scalar prefactor(std::span<const Scalar> xs) {
  if (xs.size() == 3) return xs[0] * xs[1] * xs[2];
  if (xs.size() == 4) return (xs[0] + xs[1]) * (xs[0] + xs[2]) * (xs[0] + xs[3]);
  throw std::invalid_argument("prefactor is defined for 3 or 4 entries");
}

Rational p_n(const FreqTuple& t);
/// P_n / prefactor, or nullopt when the prefactor vanishes (resonant tuple).
std::optional<Rational> q_n(const FreqTuple& t);
Imaginary<Rational> alpha_n(const FreqTuple& t);

/// Closed cofactors obtained by exact polynomial division. Q3 is a polynomial in
/// (x, y) with z = -x-y eliminated; Q4 in (x, y, z) with w = -x-y-z eliminated.
Polynomial cofactor3(int j);
Polynomial cofactor4(int j);

struct FactorizationReport {
  int n = 0;
  int K = 0;
  std::uint64_t count = 0;     // tuples with nonzero prefactor
  std::uint64_t resonant = 0;  // tuples with vanishing prefactor, where P_n must vanish too
  Rational min_ratio;          // of |Q_n| / max|entry|^(2j-2)
  Rational max_ratio;
  std::uint64_t failure_count = 0;
  std::vector<std::string> failures;  // first few offending tuples
  Polynomial cofactor;

  bool ok() const { return failure_count == 0 && count > 0; }
};

struct VerificationReport {
  int j = 0;
  FactorizationReport gamma3;
  FactorizationReport gamma4;

  bool ok() const { return gamma3.ok() && gamma4.ok(); }
  std::string summary() const;
};

/// Exhaustive check over Gamma_3 with |entries| <= K and Gamma_4 with
/// |entries| <= K4 (K4 < 0 means K4 = K). When csv is given, one row per
/// non-resonant tuple is written in enumeration order.
VerificationReport verify_factorization(int j, int K, int K4 = -1, int threads = 1,
                                        std::ostream* csv = nullptr);

/// Exact sum of n_i^(2j+1) over integer lattice indices. Throws std::overflow_error
/// if the value leaves the int64 range.
std::int64_t lattice_power_sum(std::span<const int> n, int j);

}  // namespace hokdv::resonance
