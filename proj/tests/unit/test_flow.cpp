#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>

#include "hokdv/drift.hpp"
#include "hokdv/flow.hpp"
#include "hokdv/random.hpp"
#include "hokdv/symplectic.hpp"
#include "oracles.hpp"

using namespace hokdv;
using std::numbers::pi;

namespace {

double l2_distance(const FourierField& a, const FourierField& b) { return sobolev_norm(a - b, 0.0); }

// exp(i k^{2j+1} t) from a 50-digit evaluation.
Complex reference_phase(int k, int j, double t) {
  using big = boost::multiprecision::cpp_bin_float_50;
  big w = 1;
  for (int i = 0; i < 2 * j + 1; ++i) w *= k;
  const big theta = w * big(t);
  return {static_cast<double>(cos(theta)), static_cast<double>(sin(theta))};
}

FlowSpec spec_for(const GridSpec& g, double T, double dt) {
  FlowSpec s;
  s.grid = g;
  s.T = T;
  s.dt = dt;
  return s;
}

// Spectrum ~ exp(-5|k|): rough enough data drives ETDRK4 into order reduction at
// these step sizes (fast nonlinear phases are not resolved).
FourierField unit_smooth(const GridSpec& g, std::uint64_t seed, double decay = 5.0) {
  Rng rng = make_rng(seed);
  return normalized(smooth_random_field(g, rng, decay), 0.0, 1.0);
}

}  // namespace

TEST(LinearPropagate, CosineShiftsByOneForAnyJ) {
  for (int j = 1; j <= 3; ++j) {
    const GridSpec g = make_grid(j, 4);
    const double t = 0.37;
    const FourierField v = linear_propagate(FourierField::cosine(g, 1), t);
    for (double x : {0.0, 0.4, 1.9, 5.5}) {
      EXPECT_NEAR(oracle::eval(v, x), std::cos(x + t), 1e-14);
    }
  }
}

TEST(LinearPropagate, Cos2xWithJ2RotatesBy32t) {
  const GridSpec g = make_grid(2, 4);
  for (double t : {0.1, 0.9, 123.25}) {
    const FourierField v = linear_propagate(FourierField::cosine(g, 2), t);
    const Complex ref = 0.5 * reference_phase(2, 2, t);
    EXPECT_NEAR(std::abs(v.coeff(2) - ref), 0.0, 1e-13) << "t = " << t;
    EXPECT_NEAR(oracle::eval(v, 0.3), std::cos(0.6 + std::fmod(32.0 * t, 2 * pi)), 1e-12);
  }
}

TEST(LinearPropagate, ZeroTimeIsIdentity) {
  const GridSpec g = make_grid(3, 16);
  const FourierField u = unit_smooth(g, 4);
  EXPECT_EQ(linear_propagate(u, 0.0).coeffs(), u.coeffs());
}

TEST(LinearPropagate, HighFrequencyPhaseMatchesExtendedReference) {
  const GridSpec g = make_grid(3, 32);
  const FourierField v = linear_propagate(FourierField::single_mode(g, 32, {1.0, 0.0}), 1.0);
  // k^7 = 3.4e10 radians: naive double reduction would lose ~5 digits.
  EXPECT_LT(std::abs(v.coeff(32) - reference_phase(32, 3, 1.0)), 1e-6);
}

TEST(LinearPropagate, UnitaryOnSobolevNorms) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const GridSpec g = make_grid(1 + trial % 3, 24, trial % 2 ? 1.0 : 2.0);
    const FourierField u = oracle::random_field(g, rng);
    const double t = std::uniform_real_distribution<double>(-5.0, 5.0)(rng);
    const FourierField v = linear_propagate(u, t);
    for (double s : {-1.5, -0.5, 0.0, 1.0, 2.0}) {
      EXPECT_NEAR(sobolev_norm(v, s) / sobolev_norm(u, s), 1.0, 1e-13);
    }
  }
}

TEST(NonlinearRhs, CosineGivesHalfSin2x) {
  const GridSpec g = make_grid(1, 8);
  const FourierField r = nonlinear_rhs(FourierField::cosine(g, 1), g.K);
  for (int m = 0; m < 13; ++m) {
    const double x = 2 * pi * m / 13;
    EXPECT_NEAR(oracle::eval(r, x), 0.5 * std::sin(2 * x), 1e-15);
  }
}

TEST(NonlinearRhs, MatchesQuadratureOfSquare) {
  std::mt19937_64 rng(3);
  const GridSpec g = make_grid(2, 10, 1.5);
  const FourierField u = oracle::random_field(g, rng);
  const FourierField r = nonlinear_rhs(u, g.K);
  const double L = g.length();
  for (int n = 1; n <= g.K; ++n) {
    const double kk = g.frequency(n);
    const double re = oracle::periodic_integral(
        [&](double x) { return oracle::eval(u, x) * oracle::eval(u, x) * std::cos(kk * x); }, L, 64);
    const double im = oracle::periodic_integral(
        [&](double x) { return -oracle::eval(u, x) * oracle::eval(u, x) * std::sin(kk * x); }, L, 64);
    const Complex expected = Complex(0.0, -0.5 * kk) * Complex(re, im) / L;
    EXPECT_NEAR(std::abs(r.coeff(n) - expected), 0.0, 1e-12) << "n = " << n;
  }
}

TEST(NonlinearRhs, TruncatedCosineVanishes) {
  const GridSpec g = make_grid(2, 8);
  FlowSpec s = spec_for(g, 1.0, 1e-3);
  s.flavor = FlowFlavor::kTruncated;
  s.N = 1;
  const FourierField r = nonlinear_rhs(FourierField::cosine(g, 1), s);
  EXPECT_LT(r.coeffs().cwiseAbs().maxCoeff(), 1e-16);
  EXPECT_LE(r.support(), 1);
}

TEST(NonlinearRhs, ZeroFieldGivesZero) {
  const GridSpec g = make_grid(2, 8);
  EXPECT_EQ(nonlinear_rhs(FourierField(g), g.K).support(), 0);
}

TEST(NonlinearRhs, NoAliasingAtTheEdge) {
  // cos(Kx)^2 has a 2K component which must not fold back onto low modes.
  const GridSpec g = make_grid(1, 16);
  const FourierField r = nonlinear_rhs(FourierField::cosine(g, 16), g.K);
  EXPECT_LT(r.coeffs().cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Integrate, LinearRunMatchesPropagator) {
  const GridSpec g = make_grid(3, 32);
  const FourierField u = unit_smooth(g, 9);
  for (Scheme sc : {Scheme::kEtdrk4, Scheme::kLawsonRk4}) {
    FlowSpec s = spec_for(g, 1.0, 1e-3);
    s.scheme = sc;
    s.nonlinear = false;
    const FourierField a = evolve(u, s);
    EXPECT_LE(l2_distance(a, linear_propagate(u, 1.0)), 1e-12 * sobolev_norm(u, 0.0));
  }
}

TEST(Integrate, StepIsShrunkToHitTheHorizon) {
  const GridSpec g = make_grid(1, 8);
  FlowSpec s = spec_for(g, 0.35, 0.1);
  s.sample_interval = 0.0;
  const Trajectory tr = integrate(FourierField::cosine(g, 1, 0.1), s);
  EXPECT_EQ(tr.stats.steps, 4);
  EXPECT_DOUBLE_EQ(tr.stats.dt_used, 0.0875);
  ASSERT_EQ(tr.samples.size(), 5u);
  EXPECT_EQ(tr.samples.back().t, 0.35);
  for (std::size_t i = 1; i < tr.samples.size(); ++i) EXPECT_GT(tr.samples[i].t, tr.samples[i - 1].t);
}

TEST(Integrate, SampleIntervalRoundsToSteps) {
  const GridSpec g = make_grid(1, 8);
  FlowSpec s = spec_for(g, 1.0, 0.01);
  s.sample_interval = 0.25;
  const Trajectory tr = integrate(FourierField::cosine(g, 1, 0.1), s);
  ASSERT_EQ(tr.samples.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(tr.samples[i].t, 0.25 * i, 1e-12);
}

TEST(Integrate, TruncatedSingleModeIsPurePhase) {
  const GridSpec g = make_grid(2, 16);
  FlowSpec s = spec_for(g, 2.0, 1e-2);
  s.flavor = FlowFlavor::kTruncated;
  s.N = 1;
  s.sample_interval = 0.1;
  const double eps = 0.3;
  const Trajectory tr = integrate(FourierField::cosine(g, 1, eps), s);
  for (const auto& smp : tr.samples) {
    EXPECT_NEAR(std::abs(smp.u.hat(1)), eps * pi, 1e-13);
    EXPECT_NEAR(std::abs(smp.u.coeff(1) - 0.5 * eps * reference_phase(1, 2, smp.t)), 0.0, 1e-13);
    EXPECT_EQ(smp.u.support(), 1);
  }
}

TEST(Integrate, TruncatedFlowKeepsHighModesExactlyZero) {
  const GridSpec g = make_grid(2, 24);
  FlowSpec s = spec_for(g, 0.5, 1e-3);
  s.flavor = FlowFlavor::kTruncated;
  s.N = 6;
  s.sample_interval = 0.05;
  const Trajectory tr = integrate(unit_smooth(g, 12, 0.5), s);  // data projected on entry
  for (const auto& smp : tr.samples) EXPECT_LE(smp.u.support(), 6);
  EXPECT_GT(tr.samples.back().u.support(), 0);
}

TEST(Integrate, FourthOrderSelfConvergence) {
  const GridSpec g = make_grid(2, 32);
  const FourierField u0 = unit_smooth(g, 5);
  FourierField runs[3] = {u0, u0, u0};
  double dt = 4e-3;
  for (int i = 0; i < 3; ++i, dt /= 2) runs[i] = evolve(u0, spec_for(g, 0.5, dt));
  const double ratio = l2_distance(runs[0], runs[1]) / l2_distance(runs[1], runs[2]);
  RecordProperty("richardson_ratio", std::to_string(ratio));
  EXPECT_GT(ratio, 12.0);
  EXPECT_LT(ratio, 20.0);
}

TEST(Integrate, LawsonIsAlsoFourthOrder) {
  const GridSpec g = make_grid(1, 16);
  const FourierField u0 = unit_smooth(g, 6);
  FourierField runs[3] = {u0, u0, u0};
  double dt = 1e-2;
  for (int i = 0; i < 3; ++i, dt /= 2) {
    FlowSpec s = spec_for(g, 0.5, dt);
    s.scheme = Scheme::kLawsonRk4;
    runs[i] = evolve(u0, s);
  }
  const double ratio = l2_distance(runs[0], runs[1]) / l2_distance(runs[1], runs[2]);
  EXPECT_GT(ratio, 12.0);
  EXPECT_LT(ratio, 20.0);
}

TEST(Integrate, SchemesAgree) {
  const GridSpec g = make_grid(2, 16);
  const FourierField u0 = unit_smooth(g, 8);
  FlowSpec a = spec_for(g, 0.3, 1e-3), b = a;
  b.scheme = Scheme::kLawsonRk4;
  EXPECT_LT(l2_distance(evolve(u0, a), evolve(u0, b)), 1e-9);
}

TEST(Integrate, FilonIsSecondOrder) {
  const GridSpec g = make_grid(1, 16);
  const FourierField u0 = unit_smooth(g, 6);
  FourierField runs[3] = {u0, u0, u0};
  double dt = 1e-2;
  for (int i = 0; i < 3; ++i, dt /= 2) {
    FlowSpec s = spec_for(g, 0.5, dt);
    s.scheme = Scheme::kFilon;
    runs[i] = evolve(u0, s);
  }
  const double ratio = l2_distance(runs[0], runs[1]) / l2_distance(runs[1], runs[2]);
  EXPECT_GT(ratio, 3.0);
  EXPECT_LT(ratio, 5.0);
}

TEST(Integrate, FilonAgreesWithEtdrk4) {
  const GridSpec g = make_grid(2, 16);
  const FourierField u0 = unit_smooth(g, 8);
  FlowSpec a = spec_for(g, 0.3, 1e-3), b = spec_for(g, 0.3, 1e-4);
  b.scheme = Scheme::kFilon;
  EXPECT_LT(l2_distance(evolve(u0, a), evolve(u0, b)), 1e-7);
}

// Modes 40 and 39 force mode 1 through one triad with phase W = 40^5 - 39^5 - 1,
// about 1.3e7, so W dt ~ 1e4. To leading order in the amplitude,
// v_1(t) = -i v_40 conj(v_39) (exp(i W t) - 1) / (i W).
TEST(Integrate, FilonResolvesFastTriads) {
  const GridSpec g = make_grid(2, 128);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(g.K);
  const Complex v40(0.05, 0.02), v39(-0.03, 0.04);
  c[39] = v40;
  c[38] = v39;
  const FourierField u0(g, c);
  const double t = 0.05;
  FlowSpec s = spec_for(g, t, 1e-3);
  s.scheme = Scheme::kFilon;
  const FourierField u = evolve(u0, s);
  const long double W = 102400000.0L - 90224199.0L - 1.0L;
  const long double th = std::fmod(W * t, 2.0L * std::numbers::pi_v<long double>);
  const Complex e(static_cast<double>(std::cos(th)), static_cast<double>(std::sin(th)));
  const Complex v1 = -Complex(0.0, 1.0) * v40 * std::conj(v39) * (e - 1.0) /
                     Complex(0.0, static_cast<double>(W));
  const Complex expected = linear_phase(g, 1, t) * v1;
  EXPECT_NEAR(std::abs(u.coeff(1) - expected), 0.0, 1e-4 * std::abs(expected));
}

TEST(Integrate, FilonTruncatedKeepsHighModesZero) {
  const GridSpec g = make_grid(2, 24);
  FlowSpec s = spec_for(g, 0.2, 1e-3);
  s.scheme = Scheme::kFilon;
  s.flavor = FlowFlavor::kTruncated;
  s.N = 6;
  const FourierField u = evolve(unit_smooth(g, 12, 0.5), s);
  EXPECT_LE(u.support(), 6);
  EXPECT_EQ(parse_scheme("filon"), Scheme::kFilon);
  EXPECT_EQ(to_string(Scheme::kFilon), "filon");
}

TEST(Integrate, TimeReversible) {
  const GridSpec g = make_grid(2, 16);
  const FourierField u0 = unit_smooth(g, 10);
  const FlowSpec fwd = spec_for(g, 0.5, 1e-2);
  const FourierField uT = evolve(u0, fwd);
  const double one_way = l2_distance(uT, evolve(u0, spec_for(g, 0.5, 5e-3)));
  const FourierField back = evolve(uT, spec_for(g, -0.5, 1e-2));
  EXPECT_LE(l2_distance(back, u0), 10.0 * one_way);
  EXPECT_GT(one_way, 0.0);
}

TEST(Integrate, BackwardTimestampsRunDown) {
  const GridSpec g = make_grid(1, 8);
  FlowSpec s = spec_for(g, -0.2, 0.05);
  const Trajectory tr = integrate(FourierField::cosine(g, 1, 0.1), s);
  ASSERT_EQ(tr.samples.size(), 5u);
  EXPECT_EQ(tr.samples.back().t, -0.2);
  for (std::size_t i = 1; i < tr.samples.size(); ++i) EXPECT_LT(tr.samples[i].t, tr.samples[i - 1].t);
}

TEST(Integrate, BlowUpGuardTrips) {
  const GridSpec g = make_grid(1, 8);
  FlowSpec s = spec_for(g, 1.0, 1e-2);
  s.blowup_threshold = 1e-3;
  try {
    integrate(FourierField::cosine(g, 1, 1.0), s);
    FAIL() << "guard did not trip";
  } catch (const BlowUpError& e) {
    EXPECT_EQ(e.step(), 1);
    EXPECT_NE(std::string(e.what()).find("blow-up"), std::string::npos);
  }
}

TEST(Integrate, NonFiniteDataTripsGuard) {
  const GridSpec g = make_grid(1, 4);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(4);
  c[0] = {std::nan(""), 0.0};
  EXPECT_THROW(evolve(FourierField(g, c), spec_for(g, 0.1, 0.05)), BlowUpError);
}

TEST(Integrate, RejectsBadSpecs) {
  const GridSpec g = make_grid(1, 8);
  const FourierField u = FourierField::cosine(g, 1);
  EXPECT_THROW(evolve(u, spec_for(g, 1.0, 0.0)), std::invalid_argument);
  EXPECT_THROW(evolve(u, spec_for(g, 1.0, -1e-3)), std::invalid_argument);
  FlowSpec s = spec_for(g, 1.0, 1e-2);
  s.flavor = FlowFlavor::kTruncated;
  s.N = 9;
  EXPECT_THROW(evolve(u, s), std::invalid_argument);
  EXPECT_THROW(evolve(FourierField::cosine(make_grid(1, 9), 1), spec_for(g, 1.0, 1e-2)),
               std::invalid_argument);
  EXPECT_THROW(parse_scheme("euler"), std::invalid_argument);
  EXPECT_EQ(parse_scheme("lawson_rk4"), Scheme::kLawsonRk4);
}

TEST(Conservation, MassIsExactlyZeroAndEnergiesHold) {
  const GridSpec g = make_grid(2, 32);
  const FourierField u0 = unit_smooth(g, 21);
  FlowSpec s = spec_for(g, 1.0, 1e-3);
  s.sample_interval = 0.1;
  const ConservationSummary full = conservation_report(integrate(u0, s));
  EXPECT_EQ(full.max_mass, 0.0);
  EXPECT_LE(full.max_energy_drift, 1e-7);
  EXPECT_LE(full.max_hamiltonian_drift, 1e-7);

  s.flavor = FlowFlavor::kTruncated;
  s.N = 16;
  const ConservationSummary tr = conservation_report(integrate(project(u0, Band::low(16)), s));
  EXPECT_EQ(tr.max_mass, 0.0);
  EXPECT_LE(tr.max_energy_drift, 1e-7);
  EXPECT_LE(tr.max_hamiltonian_drift, 1e-7);
}

TEST(Jacobian, ZeroHorizonIsIdentity) {
  const GridSpec g = make_grid(2, 8);
  FlowSpec s = spec_for(g, 0.0, 1e-3);
  s.flavor = FlowFlavor::kTruncated;
  s.N = 4;
  const Eigen::MatrixXd J = flow_jacobian(unit_smooth(g, 2), s, 1e-5);
  EXPECT_LT((J - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Jacobian, LinearFlowGivesRotationBlocks) {
  const GridSpec g = make_grid(2, 8);
  FlowSpec s = spec_for(g, 0.2, 1e-3);
  s.flavor = FlowFlavor::kTruncated;
  s.N = 4;
  s.nonlinear = false;
  const Eigen::MatrixXd J = flow_jacobian(unit_smooth(g, 2), s, 1e-5);
  EXPECT_LT((J - linear_jacobian(g, 4, 0.2)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Jacobian, TruncatedFlowIsSymplectic) {
  const GridSpec g = make_grid(2, 4);
  FlowSpec s = spec_for(g, 0.2, 1e-3);
  s.flavor = FlowFlavor::kTruncated;
  s.N = 4;
  const Eigen::MatrixXd J = flow_jacobian(unit_smooth(g, 33), s, 1e-5, 2);
  const double defect = check_symplectic(J, g);
  RecordProperty("symplectic_defect", std::to_string(defect));
  EXPECT_LE(defect, 1e-5);
  // and the map is genuinely nonlinear
  EXPECT_GT((J - linear_jacobian(g, 4, 0.2)).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Jacobian, ThreadCountDoesNotChangeColumns) {
  const GridSpec g = make_grid(1, 3);
  FlowSpec s = spec_for(g, 0.1, 1e-2);
  s.flavor = FlowFlavor::kTruncated;
  s.N = 3;
  const FourierField u = unit_smooth(g, 1);
  EXPECT_EQ(flow_jacobian(u, s, 1e-5, 1), flow_jacobian(u, s, 1e-5, 3));
}

TEST(Jacobian, Guards) {
  const GridSpec g = make_grid(1, 40);
  FlowSpec s = spec_for(g, 0.1, 1e-2);
  EXPECT_THROW(flow_jacobian(FourierField(g), s, 1e-5), std::invalid_argument);  // full flavor
  s.flavor = FlowFlavor::kTruncated;
  s.N = 33;
  EXPECT_THROW(flow_jacobian(FourierField(g), s, 1e-5), std::invalid_argument);  // d = 66
  s.N = 2;
  EXPECT_THROW(flow_jacobian(FourierField(g), s, 0.0), std::invalid_argument);
}

TEST(Symplectic, MatrixMatchesFormOnCoordinates) {
  std::mt19937_64 rng(8);
  const GridSpec g = make_grid(2, 5, 1.5);
  const Eigen::MatrixXd W = symplectic_matrix(g, 5);
  EXPECT_LT((W + W.transpose()).cwiseAbs().maxCoeff(), 1e-18);
  for (int trial = 0; trial < 10; ++trial) {
    const FourierField u = oracle::random_field(g, rng), v = oracle::random_field(g, rng);
    const double viaW = to_real_coordinates(u, 5).dot(W * to_real_coordinates(v, 5));
    EXPECT_NEAR(viaW, symplectic_form(u, v), 1e-12 * (1 + std::abs(viaW)));
  }
}

TEST(Symplectic, RoundTripCoordinates) {
  std::mt19937_64 rng(2);
  const GridSpec g = make_grid(1, 6, 2.0);
  const FourierField u = oracle::random_field(g, rng, 4);
  const FourierField w = from_real_coordinates(g, to_real_coordinates(u, 4));
  EXPECT_LT((u.coeffs() - w.coeffs()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Symplectic, CheckExamples) {
  const GridSpec g = make_grid(2, 8);
  EXPECT_EQ(check_symplectic(Eigen::MatrixXd::Identity(8, 8), g), 0.0);
  EXPECT_LE(check_symplectic(linear_jacobian(g, 4, 0.73), g), 1e-12);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd R(8, 8);
  for (int i = 0; i < 64; ++i) R(i / 8, i % 8) = nd(rng);
  EXPECT_GT(check_symplectic(R, g), 0.0);
  EXPECT_THROW(check_symplectic(Eigen::MatrixXd::Identity(7, 7), g), std::invalid_argument);
  EXPECT_THROW(check_symplectic(Eigen::MatrixXd::Identity(8, 6), g), std::invalid_argument);
}

TEST(Drift, StencilWeightsDifferentiatePolynomialsExactly) {
  for (int p : {2, 4, 6, 8}) {
    const auto w = central_difference_weights(p);
    const int half = p / 2;
    for (int deg = 0; deg <= p; ++deg) {
      double acc = 0.0;
      for (int k = -half; k <= half; ++k) acc += w[k + half] * std::pow(k, deg);
      EXPECT_NEAR(acc, deg == 1 ? 1.0 : 0.0, 1e-13) << "p=" << p << " deg=" << deg;
    }
  }
  EXPECT_THROW(central_difference_weights(3), std::invalid_argument);
}

TEST(Drift, LinearRunHasNoDrift) {
  const GridSpec g = make_grid(2, 8);
  FlowSpec s = spec_for(g, 0.01, 1e-3);
  s.nonlinear = false;
  const Trajectory tr = integrate(unit_smooth(g, 3), s);
  const DriftReport r = drift_oracle(tr, make_multiplier(-0.5, 2.0), 2);
  EXPECT_LT(r.max_abs_discrepancy, 1e-9);
  EXPECT_EQ(r.rate_scale, 0.0);
}

TEST(Drift, EnergyRatesMatchLambdaCascadeOnKdV) {
  // j = 1 keeps every resonant phase resolved by the stencil.
  const GridSpec g = make_grid(1, 6);
  FlowSpec s = spec_for(g, 8e-3, 6.25e-5);
  s.sample_interval = 1e-3;
  const Trajectory tr = integrate(unit_smooth(g, 3, 0.3), s);
  const EnergyHierarchy h(g, make_multiplier(-0.5, 2.0));
  const double tol[5] = {0, 0, 1e-8, 1e-7, 1e-6};
  for (int order = 2; order <= 4; ++order) {
    const DriftReport r = drift_oracle(tr, h, order);
    EXPECT_EQ(r.stencil_order, 8);
    EXPECT_EQ(r.times.size(), 1u);
    EXPECT_GT(r.rate_scale, 1e-6);
    EXPECT_LE(r.max_rel_discrepancy, tol[order]) << "order " << order;
  }
}

TEST(Drift, IntegratedDriftMatchesEnergyDifferences) {
  const GridSpec g = make_grid(1, 6);
  FlowSpec s = spec_for(g, 0.5, 1e-5);
  s.sample_interval = 5e-4;
  const Trajectory tr = integrate(unit_smooth(g, 3, 0.3), s);
  const EnergyHierarchy h(g, make_multiplier(-0.5, 2.0));
  for (int order = 2; order <= 4; ++order) {
    const std::vector<double> d = integrated_drift(tr, h, order);
    ASSERT_EQ(d.size(), tr.samples.size());
    EXPECT_EQ(d[0], 0.0);
    const double e0 = h.energy(tr.samples[0].u, order);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double direct = h.energy(tr.samples[i].u, order) - e0;
      worst = std::max(worst, std::abs(direct - d[i]));
      scale = std::max(scale, std::abs(direct));
    }
    EXPECT_GT(scale, 1e-7);
    EXPECT_LE(worst, 1e-5 * scale) << "order " << order;
  }
}

TEST(Drift, IntegratedDriftIsSecondOrderInSpacing) {
  const GridSpec g = make_grid(1, 6);
  const EnergyHierarchy h(g, make_multiplier(-0.5, 2.0));
  const FourierField u0 = unit_smooth(g, 3, 0.3);
  double err[2];
  for (int i = 0; i < 2; ++i) {
    FlowSpec s = spec_for(g, 0.4, 1e-5);
    s.sample_interval = i == 0 ? 2e-3 : 1e-3;
    const Trajectory tr = integrate(u0, s);
    const std::vector<double> d = integrated_drift(tr, h, 2);
    err[i] = std::abs(d.back() - (h.energy(tr.final(), 2) - h.energy(u0, 2)));
  }
  EXPECT_GT(err[0] / err[1], 3.0);
  EXPECT_LT(err[0] / err[1], 5.0);
}

TEST(Drift, IntegratedDriftVanishesWhenMultiplierIsOne) {
  const GridSpec g = make_grid(3, 8);
  FlowSpec s = spec_for(g, 0.1, 1e-3);
  s.scheme = Scheme::kFilon;
  s.sample_interval = 1e-2;
  const Trajectory tr = integrate(unit_smooth(g, 4, 0.3), s);
  const EnergyHierarchy h(g, make_multiplier(-1.5, 8.0));
  for (double v : integrated_drift(tr, h, 4)) EXPECT_EQ(v, 0.0);
}

TEST(Drift, IntegratedDriftThreadInvariantAndGuarded) {
  const GridSpec g = make_grid(2, 8);
  FlowSpec s = spec_for(g, 0.05, 1e-3);
  s.sample_interval = 1e-2;
  const Trajectory tr = integrate(unit_smooth(g, 2, 0.3), s);
  const EnergyHierarchy h(g, make_multiplier(-0.5, 2.0));
  EXPECT_EQ(integrated_drift(tr, h, 3, 1), integrated_drift(tr, h, 3, 4));
  EXPECT_THROW(integrated_drift(tr, EnergyHierarchy(g, make_multiplier(-0.5, 2.0), 4), 3),
               std::invalid_argument);
  EXPECT_THROW(integrated_drift(tr, h, 5), std::invalid_argument);
  FlowSpec lin = s;
  lin.nonlinear = false;
  for (double v : integrated_drift(integrate(unit_smooth(g, 2, 0.3), lin), h, 4)) EXPECT_EQ(v, 0.0);
}

TEST(Drift, ShortTrajectoryShrinksStencil) {
  const GridSpec g = make_grid(1, 4);
  const Trajectory tr = integrate(unit_smooth(g, 1), spec_for(g, 4e-4, 1e-4));
  EXPECT_EQ(drift_oracle(tr, make_multiplier(-0.5, 2.0), 2).stencil_order, 4);
  const Trajectory tiny = integrate(unit_smooth(g, 1), spec_for(g, 1e-4, 1e-4));
  EXPECT_THROW(drift_oracle(tiny, make_multiplier(-0.5, 2.0), 2), std::invalid_argument);
}

TEST(Drift, RejectsMismatchedCutoff) {
  const GridSpec g = make_grid(1, 8);
  FlowSpec s = spec_for(g, 1e-3, 1e-4);
  s.flavor = FlowFlavor::kTruncated;
  s.N = 4;
  const Trajectory tr = integrate(unit_smooth(g, 1), s);
  const EnergyHierarchy full(g, make_multiplier(-0.5, 2.0));
  EXPECT_THROW(drift_oracle(tr, full, 3), std::invalid_argument);
  EXPECT_NO_THROW(drift_oracle(tr, make_multiplier(-0.5, 2.0), 3));
}
