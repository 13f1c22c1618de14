#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace hokdv::resonance {

using Integer = boost::multiprecision::cpp_int;

/// Polynomial in up to three variables with exact integer coefficients.
class Polynomial {
 public:
  using Exponents = std::array<int, 3>;

  Polynomial() = default;

  static Polynomial constant(const Integer& c);
  static Polynomial variable(int var);

  void add_term(const Exponents& e, const Integer& c);
  const std::map<Exponents, Integer>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;

  Polynomial pow(int k) const;

  /// Exact quotient by the monomial x_var. Throws std::domain_error if some
  /// term is not divisible.
  Polynomial divide_by_variable(int var) const;
  /// Exact quotient by (x_a + x_b) via synthetic division in x_a. Throws
  /// std::domain_error on a nonzero remainder.
  Polynomial divide_by_sum(int a, int b) const;

  /// Evaluates at (v0, v1, v2) in any ring that accepts Integer coefficients.
  template <class T>
  T evaluate(const T& v0, const T& v1, const T& v2) const {
    T acc = 0;
    for (const auto& [e, c] : terms_) {
      T term = T(c);
      for (int i = 0; i < e[0]; ++i) term *= v0;
      for (int i = 0; i < e[1]; ++i) term *= v1;
      for (int i = 0; i < e[2]; ++i) term *= v2;
      acc += term;
    }
    return acc;
  }

  std::string to_string() const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

 private:
  std::map<Exponents, Integer> terms_;
};

}  // namespace hokdv::resonance
