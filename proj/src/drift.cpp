#include "hokdv/drift.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hokdv/parallel.hpp"

namespace hokdv {

std::vector<double> central_difference_weights(int accuracy) {
  switch (accuracy) {
    case 2: return {-1.0 / 2, 0.0, 1.0 / 2};
    case 4: return {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12};
    case 6: return {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
    case 8:
      return {1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0, 4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
  }
  throw std::invalid_argument("stencil accuracy must be 2, 4, 6 or 8");
}

DriftReport drift_oracle(const Trajectory& traj, const EnergyHierarchy& hierarchy, int order,
                         int fd_order, int threads) {
  if (order < 2 || order > 4) throw std::invalid_argument("drift order must be 2, 3 or 4");
  const auto& s = traj.samples;
  if (s.size() < 3) throw std::invalid_argument("drift oracle needs at least 3 samples");
  if (!(s.front().u.grid() == hierarchy.grid())) {
    throw std::invalid_argument("trajectory and hierarchy use different grids");
  }
  if (traj.spec.nonlinear && hierarchy.merge_cutoff() != traj.spec.active_cutoff()) {
    throw std::invalid_argument("hierarchy merge cutoff " + std::to_string(hierarchy.merge_cutoff()) +
                                " differs from the flow's nonlinearity cutoff " +
                                std::to_string(traj.spec.active_cutoff()));
  }
  const double dt = s[1].t - s[0].t;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (std::abs((s[i].t - s[i - 1].t) - dt) > 1e-9 * std::abs(dt)) {
      throw std::invalid_argument("drift oracle needs uniformly spaced samples");
    }
  }
  int acc = fd_order;
  while (acc > 2 && static_cast<int>(s.size()) < acc + 1) acc -= 2;
  const std::vector<double> w = central_difference_weights(acc);
  const int half = acc / 2;

  std::vector<double> e(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) e[i] = hierarchy.energy(s[i].u, order, threads);

  DriftReport r;
  r.order = order;
  r.stencil_order = acc;
  for (std::size_t i = half; i + half < s.size(); ++i) {
    double d = 0.0;
    for (int k = -half; k <= half; ++k) d += w[k + half] * e[i + k];
    d /= dt;
    const double pred = traj.spec.nonlinear ? hierarchy.energy_rate(s[i].u, order, threads) : 0.0;
    r.times.push_back(s[i].t);
    r.energy.push_back(e[i]);
    r.fd_rate.push_back(d);
    r.predicted_rate.push_back(pred);
    r.max_abs_discrepancy = std::max(r.max_abs_discrepancy, std::abs(d - pred));
    r.rate_scale = std::max(r.rate_scale, std::abs(pred));
  }
  r.max_rel_discrepancy = r.rate_scale > 0.0 ? r.max_abs_discrepancy / r.rate_scale
                                             : (r.max_abs_discrepancy == 0.0 ? 0.0 : INFINITY);
  return r;
}

std::vector<double> integrated_drift(const Trajectory& traj, const EnergyHierarchy& hierarchy,
                                     int order, int threads) {
  if (order < 2 || order > 4) throw std::invalid_argument("drift order must be 2, 3 or 4");
  const auto& smp = traj.samples;
  if (smp.size() < 2) throw std::invalid_argument("integrated drift needs at least 2 samples");
  const GridSpec& g = smp.front().u.grid();
  if (!(g == hierarchy.grid())) throw std::invalid_argument("trajectory and hierarchy use different grids");
  const std::size_t S = smp.size();
  std::vector<double> out(S, 0.0);
  if (!traj.spec.nonlinear) return out;
  if (hierarchy.merge_cutoff() != traj.spec.active_cutoff()) {
    throw std::invalid_argument("hierarchy merge cutoff " + std::to_string(hierarchy.merge_cutoff()) +
                                " differs from the flow's nonlinearity cutoff " +
                                std::to_string(traj.spec.active_cutoff()));
  }
  const double h = smp[1].t - smp[0].t;
  for (std::size_t i = 1; i < S; ++i) {
    if (std::abs((smp[i].t - smp[i - 1].t) - h) > 1e-9 * std::abs(h)) {
      throw std::invalid_argument("integrated drift needs uniformly spaced samples");
    }
  }

  const int K = g.K;
  const int width = 2 * K + 1;
  std::vector<Complex> table(S * width);
  for (std::size_t s = 0; s < S; ++s) {
    for (int v = -K; v <= K; ++v) table[s * width + (v + K)] = smp[s].u.coeff(v);
  }
  const int arity = order + 1;
  auto weight = [&](std::span<const int> n) {
    switch (order) {
      case 2: return hierarchy.m3_generator(n);
      case 3: return hierarchy.m4_generator(n);
      default: return hierarchy.m5_generator(n);
    }
  };

  // One chunk per leading index; increments summed in chunk order afterwards.
  const std::size_t chunks = 2 * static_cast<std::size_t>(K);
  std::vector<std::vector<Complex>> parts(chunks);
  parallel_chunks(chunks, chunks, threads, [&](std::size_t, std::size_t b, std::size_t e) {
    std::vector<int> n(arity);
    std::vector<Complex> q(S);
    for (std::size_t c = b; c < e; ++c) {
      std::vector<Complex> inc(S - 1);
      const int lead = static_cast<int>(c) - K;
      n[0] = lead >= 0 ? lead + 1 : lead;
      // Odometer over n[1..arity-2]; the last entry closes the sum.
      std::vector<int> mid(arity - 2, -K);
      for (;;) {
        int sum = n[0];
        bool ok = true;
        for (int i = 0; i < arity - 2; ++i) {
          n[i + 1] = mid[i];
          ok = ok && mid[i] != 0;
          sum += mid[i];
        }
        n[arity - 1] = -sum;
        if (ok && sum != 0 && sum >= -K && sum <= K) {
          const Complex m = weight(n);
          if (m != Complex{}) {
            const auto [w0, w1] = oscillatory_weights(resonance_frequency(g, n), h);
            const long double back = -resonance_frequency(g, n) * static_cast<long double>(h);
            constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
            const long double th = std::fmod(back, two_pi);
            const Complex a = m * (w0 - w1);
            const Complex bw = m * w1 * Complex(static_cast<double>(std::cos(th)),
                                                static_cast<double>(std::sin(th)));
            for (std::size_t s = 0; s < S; ++s) {
              const Complex* row = &table[s * width + K];
              Complex p = row[n[0]];
              for (int i = 1; i < arity; ++i) p *= row[n[i]];
              q[s] = p;
            }
            for (std::size_t s = 0; s + 1 < S; ++s) inc[s] += a * q[s] + bw * q[s + 1];
          }
        }
        int i = 0;
        while (i < arity - 2 && ++mid[i] > K) mid[i++] = -K;
        if (i == arity - 2) break;
      }
      parts[c] = std::move(inc);
    }
  });
  double acc = 0.0;
  for (std::size_t s = 0; s + 1 < S; ++s) {
    std::vector<Complex> col(chunks);
    for (std::size_t c = 0; c < chunks; ++c) col[c] = parts[c][s];
    acc += g.length() * tree_sum(std::move(col)).real();
    out[s + 1] = acc;
  }
  return out;
}

DriftReport drift_oracle(const Trajectory& traj, const IMultiplier& mult, int order, int fd_order,
                         int threads) {
  const GridSpec& g = traj.samples.at(0).u.grid();
  const int cutoff = traj.spec.nonlinear ? traj.spec.active_cutoff() : 0;
  return drift_oracle(traj, EnergyHierarchy(g, mult, cutoff), order, fd_order, threads);
}

}  // namespace hokdv
