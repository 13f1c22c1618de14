#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "hokdv/resonance.hpp"

using namespace hokdv::resonance;

TEST(PowerSum, Examples) {
  EXPECT_EQ(p_n(FreqTuple::lattice({1, 2, -3}, 1)), -18);
  EXPECT_EQ(p_n(FreqTuple::lattice({1, 1, -2}, 2)), -30);
  EXPECT_EQ(p_n(FreqTuple::lattice({1, -1, 2, -2}, 3)), 0);
  EXPECT_THROW(p_n(FreqTuple::lattice({1, 1, 1, 1, -4}, 1)), std::invalid_argument);
}

TEST(Quotient, Examples) {
  EXPECT_EQ(q_n(FreqTuple::lattice({1, 2, -3}, 1)), Rational(3));
  EXPECT_EQ(q_n(FreqTuple::lattice({1, 1, -2}, 2)), Rational(15));
  EXPECT_EQ(q_n(FreqTuple::lattice({1, 2, 3, -6}, 1)), Rational(3));
  EXPECT_FALSE(q_n(FreqTuple::lattice({3, -3, 5, -5}, 2)).has_value());
}

TEST(Alpha, Examples) {
  const auto a = alpha_n(FreqTuple::lattice({1, 2, -3}, 1));
  EXPECT_EQ(a.imag, -18);
  EXPECT_EQ(a.real(), 0);
  for (int j = 1; j <= 4; ++j) EXPECT_EQ(alpha_n(FreqTuple::lattice({7, -7, 2, -2}, j)).imag, 0);
  EXPECT_EQ(alpha_n(FreqTuple::lattice({1, 1, -2}, 2)).imag, -30);
  EXPECT_EQ(alpha_n(FreqTuple::lattice({1, 1, 1, 1, -4}, 1)).imag, 4 - 64);
}

TEST(Tuple, Validation) {
  EXPECT_THROW(FreqTuple::lattice({1, 2, 3}, 1), std::invalid_argument);
  EXPECT_THROW(FreqTuple::lattice({1, -1}, 1), std::invalid_argument);
  EXPECT_THROW(FreqTuple::lattice({0, 1, -1}, 1), std::invalid_argument);
  EXPECT_NO_THROW(FreqTuple::lattice({0, 1, -1}, 1, true));
  EXPECT_THROW(FreqTuple::lattice({1, 2, -3}, 0), std::invalid_argument);
}

TEST(Cofactor, LinearDispersionIsConstantThree) {
  EXPECT_EQ(cofactor3(1), Polynomial::constant(3));
  EXPECT_EQ(cofactor4(1), Polynomial::constant(3));
}

TEST(Cofactor, FifthOrderClosedForm) {
  // ((x+y)^5 - x^5 - y^5) / (xy(x+y)) = 5(x^2 + xy + y^2).
  Polynomial expected;
  expected.add_term({2, 0, 0}, 5);
  expected.add_term({1, 1, 0}, 5);
  expected.add_term({0, 2, 0}, 5);
  EXPECT_EQ(cofactor3(2), expected);
  EXPECT_EQ(cofactor4(2).degree(), 2);
  EXPECT_EQ(cofactor4(3).degree(), 4);
}

TEST(Cofactor, DivisionDetectsRemainder) {
  const Polynomial x = Polynomial::variable(0);
  const Polynomial y = Polynomial::variable(1);
  EXPECT_THROW((x * x + y).divide_by_sum(0, 1), std::domain_error);
  EXPECT_THROW((x + y).divide_by_variable(0), std::domain_error);
  EXPECT_EQ((x * x - y * y).divide_by_sum(0, 1), x - y);
}

TEST(Properties, PermutationInvariance) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> d(-40, 40);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<long long> v;
    long long sum = 0;
    while (v.size() < 3) {
      const int x = d(rng);
      if (x != 0) { v.push_back(x); sum += x; }
    }
    if (sum == 0) continue;
    v.push_back(-sum);
    const int j = 1 + trial % 3;
    std::vector<Rational> r(v.begin(), v.end());
    const Rational base = p_n(FreqTuple(r, j));
    std::sort(r.begin(), r.end());
    do {
      EXPECT_EQ(p_n(FreqTuple(r, j)), base);
      EXPECT_EQ(alpha_n(FreqTuple(r, j)).imag, base);
    } while (std::next_permutation(r.begin(), r.end()));
  }
}

TEST(Properties, HomogeneousScaling) {
  const Rational lambda(7, 3);
  for (int j = 1; j <= 3; ++j) {
    const FreqTuple t({Rational(1, 2), Rational(5, 4), Rational(-7, 4)}, j);
    const FreqTuple s({lambda / 2, lambda * 5 / 4, -lambda * 7 / 4}, j);
    EXPECT_EQ(p_n(s), ipow(lambda, 2 * j + 1) * p_n(t));
  }
}

TEST(Verify, LinearDispersionRatiosAreThree) {
  const VerificationReport r = verify_factorization(1, 64, 12);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.gamma3.min_ratio, 3);
  EXPECT_EQ(r.gamma3.max_ratio, 3);
  EXPECT_EQ(r.gamma4.min_ratio, 3);
  EXPECT_EQ(r.gamma4.max_ratio, 3);
  EXPECT_GT(r.gamma4.resonant, 0u);
}

TEST(Verify, HigherOrderRatiosArePositiveAndBounded) {
  for (int j : {2, 3}) {
    const VerificationReport r = verify_factorization(j, 32, 10);
    EXPECT_TRUE(r.ok()) << r.summary();
    EXPECT_GT(r.gamma3.min_ratio, 0);
    EXPECT_GT(r.gamma4.min_ratio, 0);
    EXPECT_GE(r.gamma3.max_ratio, r.gamma3.min_ratio);
  }
}

TEST(Verify, ThreadCountDoesNotChangeOutput) {
  std::ostringstream a, b;
  const auto r1 = verify_factorization(2, 12, 6, 1, &a);
  const auto r2 = verify_factorization(2, 12, 6, 3, &b);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(r1.summary(), r2.summary());
  EXPECT_EQ(a.str().substr(0, 9), "n,k1,k2,k");
}

TEST(Verify, RejectsSmallCutoff) {
  EXPECT_THROW(verify_factorization(1, 1), std::invalid_argument);
}

TEST(Lattice, PowerSumMatchesExact) {
  const int xs[4] = {64, -63, 1, -2};
  EXPECT_EQ(lattice_power_sum(xs, 3), static_cast<long long>(power_sum<Integer>(
                                          std::vector<Integer>{64, -63, 1, -2}, 3)));
  const int big[2] = {1 << 20, 1};
  EXPECT_THROW(lattice_power_sum(big, 3), std::overflow_error);
}
