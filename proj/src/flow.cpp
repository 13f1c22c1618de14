#include "hokdv/flow.hpp"

#include <cmath>
#include <numbers>
#include <complex>
#include <sstream>
#include <utility>

namespace hokdv {

Scheme parse_scheme(std::string_view name) {
  if (name == "etdrk4") return Scheme::kEtdrk4;
  if (name == "lawson_rk4" || name == "lawson") return Scheme::kLawsonRk4;
  if (name == "filon") return Scheme::kFilon;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kLawsonRk4: return "lawson_rk4";
    case Scheme::kFilon: return "filon";
    default: return "etdrk4";
  }
}

int FlowSpec::active_cutoff() const {
  return flavor == FlowFlavor::kTruncated ? grid.index_cutoff(N) : grid.K;
}

void validate(const FlowSpec& spec) {
  if (!(spec.dt > 0.0) || !std::isfinite(spec.dt)) throw std::invalid_argument("dt must be positive");
  if (!std::isfinite(spec.T)) throw std::invalid_argument("horizon T must be finite");
  if (spec.sample_interval < 0.0) throw std::invalid_argument("sample_interval must be >= 0");
  if (spec.flavor == FlowFlavor::kTruncated) {
    if (!(spec.N > 0.0)) throw std::invalid_argument("truncated flow needs N > 0");
    if (spec.N > spec.grid.K / spec.grid.mu + 1e-12) {
      throw std::invalid_argument("truncation N exceeds the grid cutoff K");
    }
  }
  if (!(spec.blowup_threshold > 0.0)) throw std::invalid_argument("blow-up threshold must be positive");
}

long double dispersion_frequency(const GridSpec& grid, int n) {
  const long double k = static_cast<long double>(n) / static_cast<long double>(grid.mu);
  long double w = 1.0L;
  for (int i = 0; i < 2 * grid.j + 1; ++i) w *= k;
  return w;
}

Complex linear_phase(const GridSpec& grid, int n, double t) {
  constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  const long double theta = std::fmod(dispersion_frequency(grid, n) * static_cast<long double>(t), two_pi);
  return {static_cast<double>(std::cos(theta)), static_cast<double>(std::sin(theta))};
}

FourierField linear_propagate(const FourierField& u, double t) {
  const GridSpec& g = u.grid();
  Eigen::VectorXcd c = u.coeffs();
  for (int n = 1; n <= g.K; ++n) c[n - 1] *= linear_phase(g, n, t);
  return FourierField(g, std::move(c));
}

namespace {

// Evaluates -(1/2) i k (u^2)_k on |n| <= cutoff with reusable buffers.
class Nonlinearity {
 public:
  Nonlinearity(const GridSpec& grid, int cutoff)
      : grid_(grid), cutoff_(cutoff), tr_(grid.physical_points), samples_(grid.physical_points),
        square_(grid.K) {}

  double operator()(const Eigen::VectorXcd& c, Eigen::VectorXcd& out) {
    tr_.to_physical(c, samples_);
    samples_ = samples_.array().square();
    tr_.from_physical(samples_, square_);
    double big = 0.0;
    for (int n = 1; n <= grid_.K; ++n) {
      if (n > cutoff_) {
        out[n - 1] = Complex{};
        continue;
      }
      out[n - 1] = Complex(0.0, -0.5 * grid_.frequency(n)) * square_[n - 1];
      big = std::max(big, std::abs(out[n - 1]));
    }
    return big;
  }

 private:
  GridSpec grid_;
  int cutoff_;
  Transformer tr_;
  Eigen::VectorXd samples_;
  Eigen::VectorXcd square_;
};

struct EtdCoefficients {
  Complex q, f1, f2, f3;
};

// Cox-Matthews coefficients for z = h * L. Small |z| uses the contour mean of
// Kassam and Trefethen on a unit circle around z to avoid cancellation.
EtdCoefficients etd_coefficients(Complex z, Complex ez, Complex ez2, double h) {
  auto direct = [](Complex r, Complex er, Complex er2) {
    const Complex r3 = r * r * r;
    return EtdCoefficients{(er2 - 1.0) / r, (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3,
                           (2.0 + r + er * (r - 2.0)) / r3,
                           (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3};
  };
  EtdCoefficients c;
  if (std::abs(z) >= 0.5) {
    c = direct(z, ez, ez2);
  } else {
    constexpr int M = 32;
    c = {};
    for (int m = 0; m < M; ++m) {
      const Complex r = z + std::polar(1.0, 2.0 * std::numbers::pi * (m + 0.5) / M);
      const EtdCoefficients d = direct(r, std::exp(r), std::exp(0.5 * r));
      c.q += d.q;
      c.f1 += d.f1;
      c.f2 += d.f2;
      c.f3 += d.f3;
    }
    c.q /= M;
    c.f1 /= M;
    c.f2 /= M;
    c.f3 /= M;
  }
  c.q *= h;
  c.f1 *= h;
  c.f2 *= h;
  c.f3 *= h;
  return c;
}

class Stepper {
 public:
  Stepper(const FlowSpec& spec, double h)
      : spec_(spec), h_(h), K_(spec.grid.K), nl_(spec.grid, spec.active_cutoff()),
        E_(K_), E2_(K_), Nu_(K_), Na_(K_), Nb_(K_), Nc_(K_), a_(K_), b_(K_), c_(K_) {
    if (spec.scheme == Scheme::kEtdrk4) {
      Q_.resize(K_);
      f1_.resize(K_);
      f2_.resize(K_);
      f3_.resize(K_);
    }
    for (int n = 1; n <= K_; ++n) {
      E_[n - 1] = linear_phase(spec.grid, n, h);
      E2_[n - 1] = linear_phase(spec.grid, n, 0.5 * h);
      if (spec.scheme == Scheme::kEtdrk4) {
        const Complex z(0.0, static_cast<double>(dispersion_frequency(spec.grid, n) * h));
        const EtdCoefficients co = etd_coefficients(z, E_[n - 1], E2_[n - 1], h);
        Q_[n - 1] = co.q;
        f1_[n - 1] = co.f1;
        f2_[n - 1] = co.f2;
        f3_[n - 1] = co.f3;
      }
    }
  }

  void step(Eigen::VectorXcd& u) {
    if (spec_.scheme == Scheme::kEtdrk4) {
      eval(u, Nu_);
      a_ = E2_.cwiseProduct(u) + Q_.cwiseProduct(Nu_);
      eval(a_, Na_);
      b_ = E2_.cwiseProduct(u) + Q_.cwiseProduct(Na_);
      eval(b_, Nb_);
      c_ = E2_.cwiseProduct(a_) + Q_.cwiseProduct(2.0 * Nb_ - Nu_);
      eval(c_, Nc_);
      u = E_.cwiseProduct(u) + f1_.cwiseProduct(Nu_) + 2.0 * f2_.cwiseProduct(Na_ + Nb_) +
          f3_.cwiseProduct(Nc_);
    } else {
      const double h = h_;
      eval(u, Nu_);
      a_ = E2_.cwiseProduct(u + 0.5 * h * Nu_);
      eval(a_, Na_);
      b_ = E2_.cwiseProduct(u) + 0.5 * h * Na_;
      eval(b_, Nb_);
      c_ = E_.cwiseProduct(u) + h * E2_.cwiseProduct(Nb_);
      eval(c_, Nc_);
      u = E_.cwiseProduct(u) +
          (h / 6.0) * (E_.cwiseProduct(Nu_) + 2.0 * E2_.cwiseProduct(Na_ + Nb_) + Nc_);
    }
  }

  double max_nonlinear() const { return max_nl_; }

 private:
  void eval(const Eigen::VectorXcd& u, Eigen::VectorXcd& out) {
    max_nl_ = std::max(max_nl_, nl_(u, out));
  }

  const FlowSpec& spec_;
  double h_;
  int K_;
  Nonlinearity nl_;
  Eigen::VectorXcd E_, E2_, Q_, f1_, f2_, f3_;
  Eigen::VectorXcd Nu_, Na_, Nb_, Nc_, a_, b_, c_;
  double max_nl_ = 0.0;
};

}  // namespace

long double resonance_frequency(const GridSpec& g, std::span<const int> n) {
  __int128 acc = 0;
  bool exact = true;
  for (int v : n) {
    __int128 p = 1;
    for (int e = 0; e < 2 * g.j + 1 && exact; ++e) {
      exact = !__builtin_mul_overflow(p, static_cast<__int128>(v), &p);
    }
    exact = exact && !__builtin_add_overflow(acc, p, &acc);
  }
  if (!exact) {
    long double w = 0.0L;
    for (int v : n) w += dispersion_frequency(g, v);
    return w;
  }
  long double scale = 1.0L;
  for (int e = 0; e < 2 * g.j + 1; ++e) scale *= static_cast<long double>(g.mu);
  return static_cast<long double>(acc) / scale;
}

std::pair<Complex, Complex> oscillatory_weights(long double W, double h) {
  const long double x = W * static_cast<long double>(h);
  if (std::abs(x) < 0.5L) {
    // sum (i x)^m / (m+1)!  and  sum (i x)^m / (m! (m+2))
    std::complex<long double> p0{}, p1{}, term{1.0L, 0.0L};
    long double fact = 1.0L;
    for (int m = 0; m < 24; ++m) {
      if (m > 0) {
        term *= std::complex<long double>(0.0L, x);
        fact *= m;
      }
      p0 += term / (fact * (m + 1));
      p1 += term / (fact * (m + 2));
    }
    return {Complex(static_cast<double>(p0.real()), static_cast<double>(p0.imag())) * h,
            Complex(static_cast<double>(p1.real()), static_cast<double>(p1.imag())) * h};
  }
  constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  const long double th = std::fmod(x, two_pi);
  const std::complex<long double> e(std::cos(th), std::sin(th));
  const std::complex<long double> z(0.0L, x);
  const std::complex<long double> p0 = (e - 1.0L) / z;
  const std::complex<long double> p1 = (e * (z - 1.0L) + 1.0L) / (z * z);
  return {Complex(static_cast<double>(p0.real()), static_cast<double>(p0.imag())) * h,
          Complex(static_cast<double>(p1.real()), static_cast<double>(p1.imag())) * h};
}

namespace {

// Interaction picture v_k = exp(-i w_k t) u_k over one step:
//   v_k' = -(i k / 2) sum_{a+b=k} v_a v_b exp(i W_abk t).
// Predictor freezes the products at t = 0; the corrector interpolates them
// linearly between both ends. Each weight integrates its own phase exactly.
class FilonStepper {
 public:
  FilonStepper(const FlowSpec& spec, double h)
      : K_(spec.grid.K), cutoff_(spec.active_cutoff()), width_(2 * K_ + 1), E_(K_),
        A_(static_cast<std::size_t>(cutoff_) * width_), B_(A_.size()), V_(width_), P_(width_) {
    const GridSpec& g = spec.grid;
    for (int n = 1; n <= K_; ++n) E_[n - 1] = linear_phase(g, n, h);
    for (int k = 1; k <= cutoff_; ++k) {
      const Complex pre(0.0, -0.5 * g.frequency(k));
      for (int a = k - K_; a <= K_; ++a) {
        const int b = k - a;
        if (a == 0 || b == 0) continue;
        const int triad[3] = {a, b, -k};
        const auto [w0, w1] = oscillatory_weights(resonance_frequency(g, triad), h);
        const std::size_t at = index(k, a);
        A_[at] = pre * (w0 - w1);
        B_[at] = pre * w1;
      }
    }
  }

  void step(Eigen::VectorXcd& u) {
    spread(u, V_);
    Eigen::VectorXcd predicted = u;
    Eigen::VectorXcd partial(cutoff_);
    for (int k = 1; k <= cutoff_; ++k) {
      Complex sa{}, sb{};
      for (int a = k - K_; a <= K_; ++a) {
        const Complex g0 = V_[a + K_] * V_[k - a + K_];
        sa += A_[index(k, a)] * g0;
        sb += B_[index(k, a)] * g0;
      }
      partial[k - 1] = sa;
      predicted[k - 1] += sa + sb;
      max_nl_ = std::max(max_nl_, std::abs(sa + sb));
    }
    spread(predicted, P_);
    for (int k = 1; k <= cutoff_; ++k) {
      Complex sb{};
      for (int a = k - K_; a <= K_; ++a) sb += B_[index(k, a)] * (P_[a + K_] * P_[k - a + K_]);
      u[k - 1] += partial[k - 1] + sb;
    }
    u = E_.cwiseProduct(u);
  }

  /// Largest stage increment seen; a per-step quantity, unlike the other schemes.
  double max_nonlinear() const { return max_nl_; }

 private:
  std::size_t index(int k, int a) const {
    return static_cast<std::size_t>(k - 1) * width_ + static_cast<std::size_t>(a + K_);
  }

  void spread(const Eigen::VectorXcd& c, std::vector<Complex>& out) const {
    out[K_] = Complex{};
    for (int n = 1; n <= K_; ++n) {
      out[K_ + n] = c[n - 1];
      out[K_ - n] = std::conj(c[n - 1]);
    }
  }

  int K_, cutoff_, width_;
  Eigen::VectorXcd E_;
  std::vector<Complex> A_, B_, V_, P_;
  double max_nl_ = 0.0;
};

void guard(const Eigen::VectorXcd& u, const FlowSpec& spec, double t, long step) {
  double big = 0.0;
  bool finite = true;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    finite = finite && std::isfinite(a);
    big = std::max(big, a);
  }
  if (!finite || big > spec.blowup_threshold) {
    std::ostringstream os;
    os << "blow-up guard tripped at t = " << t << " (step " << step << "): max |c_n| = " << big
       << " exceeds " << spec.blowup_threshold;
    throw BlowUpError(os.str(), t, step);
  }
}

template <class OnSample>
TrajectoryStats run(const FourierField& u0, const FlowSpec& spec, OnSample&& on_sample) {
  validate(spec);
  if (!(u0.grid() == spec.grid)) throw std::invalid_argument("initial data lives on a different grid");
  FourierField start = u0;
  if (spec.flavor == FlowFlavor::kTruncated) start = project(u0, Band::low(spec.N));

  TrajectoryStats stats;
  const double span = std::abs(spec.T);
  const long steps = span == 0.0 ? 0 : static_cast<long>(std::ceil(span / spec.dt - 1e-9));
  if (steps > spec.max_steps) {
    throw std::invalid_argument("run needs " + std::to_string(steps) + " steps, above max_steps");
  }
  const double h = steps == 0 ? 0.0 : spec.T / steps;
  stats.steps = steps;
  stats.dt_used = std::abs(h);
  long every = 1;
  if (spec.sample_interval > 0.0 && steps > 0) {
    every = std::max(1L, std::lround(spec.sample_interval / std::abs(h)));
  }

  Eigen::VectorXcd u = start.coeffs();
  on_sample(0.0, u);
  if (steps == 0) return stats;
  if (!spec.nonlinear) {
    // Phases from the absolute time: stepping would accumulate h-rounding times k^{2j+1}.
    for (long s = 1; s <= steps; ++s) {
      if (s % every != 0 && s != steps) continue;
      const double t = s == steps ? spec.T : s * h;
      on_sample(t, linear_propagate(start, t).coeffs());
    }
    return stats;
  }
  auto march = [&](auto& stepper) {
    for (long s = 1; s <= steps; ++s) {
      stepper.step(u);
      guard(u, spec, s * h, s);
      if (s % every == 0 || s == steps) on_sample(s == steps ? spec.T : s * h, u);
    }
    stats.max_nonlinear = stepper.max_nonlinear();
  };
  if (spec.scheme == Scheme::kFilon) {
    FilonStepper stepper(spec, h);
    march(stepper);
  } else {
    Stepper stepper(spec, h);
    march(stepper);
  }
  return stats;
}

}  // namespace

FourierField nonlinear_rhs(const FourierField& u, int cutoff) {
  if (cutoff < 0 || cutoff > u.K()) throw std::invalid_argument("nonlinearity cutoff outside [0, K]");
  Nonlinearity nl(u.grid(), cutoff);
  Eigen::VectorXcd out(u.K());
  nl(u.coeffs(), out);
  return FourierField(u.grid(), std::move(out));
}

FourierField nonlinear_rhs(const FourierField& u, const FlowSpec& spec) {
  return nonlinear_rhs(u, spec.active_cutoff());
}

Trajectory integrate(const FourierField& u0, const FlowSpec& spec) {
  Trajectory traj;
  traj.spec = spec;
  traj.stats = run(u0, spec, [&](double t, const Eigen::VectorXcd& c) {
    traj.samples.push_back({t, FourierField(spec.grid, c)});
  });
  return traj;
}

FourierField evolve(const FourierField& u0, const FlowSpec& spec) {
  Eigen::VectorXcd last;
  run(u0, spec, [&](double, const Eigen::VectorXcd& c) { last = c; });
  return FourierField(spec.grid, std::move(last));
}

ConservationSummary conservation_report(const Trajectory& traj) {
  ConservationSummary out;
  for (const auto& s : traj.samples) out.reports.push_back(conserved_quantities(s.u, s.t));
  if (out.reports.empty()) return out;
  const ConservedReport& r0 = out.reports.front();
  const double escale = r0.l2_energy != 0.0 ? std::abs(r0.l2_energy) : 1.0;
  const double hscale = r0.hamiltonian != 0.0 ? std::abs(r0.hamiltonian) : 1.0;
  for (const auto& r : out.reports) {
    out.max_mass = std::max(out.max_mass, std::abs(r.mass));
    out.max_energy_drift = std::max(out.max_energy_drift, std::abs(r.l2_energy - r0.l2_energy) / escale);
    out.max_hamiltonian_drift =
        std::max(out.max_hamiltonian_drift, std::abs(r.hamiltonian - r0.hamiltonian) / hscale);
  }
  return out;
}

}  // namespace hokdv
