#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hokdv/fourier_field.hpp"

namespace hokdv {

enum class FormTag { kConstant, kM3, kSigma3, kM4, kSigma4, kM5, kCustom };

std::string to_string(FormTag tag);

/// Symbol of an n-linear form, evaluated on integer lattice indices
/// (n_1, ..., n_n) with n_1 + ... + n_n = 0; the frequencies are n_i / mu.
class MultilinearForm {
 public:
  using Weight = std::function<Complex(std::span<const int>)>;

  MultilinearForm(int arity, FormTag tag, Weight weight, double mu = 1.0);

  /// Wraps a symbol given on frequencies k_i = n_i / mu.
  static MultilinearForm on_frequencies(int arity, double mu,
                                        std::function<Complex(std::span<const double>)> symbol,
                                        FormTag tag = FormTag::kCustom);
  static MultilinearForm constant(int arity, Complex value = 1.0, double mu = 1.0);

  int arity() const { return arity_; }
  FormTag tag() const { return tag_; }
  double mu() const { return mu_; }

  Complex operator()(std::span<const int> n) const { return weight_(n); }
  Complex operator()(std::initializer_list<int> n) const {
    return weight_(std::span<const int>(n.begin(), n.size()));
  }

 private:
  int arity_;
  FormTag tag_;
  Weight weight_;
  double mu_;
};

/// Average of the symbol over all permutations of its arguments.
MultilinearForm symmetrize(const MultilinearForm& form);

struct LambdaValue {
  Complex value;
  /// Sum of |term| over the hyperplane; the scale for round-off judgements.
  double magnitude = 0.0;
};

/// Lambda_n(M; u_1, ..., u_n) = 2 pi mu * sum over the hyperplane of
/// M(n_1, ..., n_n) c_1(n_1) ... c_n(n_n), with every 0 < |n_i| <= K.
/// For mu = 1 this is (2 pi)^{1-n} sum M u_hat_1 ... u_hat_n, and
/// Lambda_3(1; u, u, u) = int u^3.
///
/// The outer index is split into fixed blocks that are summed with a pairwise
/// tree, so the result does not depend on `threads`.
LambdaValue lambda_n(const MultilinearForm& form, std::span<const FourierField* const> fields,
                     int threads = 1);
LambdaValue lambda_n(const MultilinearForm& form, const FourierField& u, int threads = 1);

/// Real part of a Lambda value that must be real, after checking that the
/// imaginary residue is below tol * magnitude. Throws std::logic_error.
double checked_real(const LambdaValue& v, const char* what, double tol = 1e-10);

}  // namespace hokdv
