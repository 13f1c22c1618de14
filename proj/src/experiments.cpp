#include "hokdv/experiments.hpp"

#include "hokdv/drift.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hokdv/drift.hpp"
#include "hokdv/imethod.hpp"
#include "hokdv/io.hpp"
#include "hokdv/parallel.hpp"
#include "hokdv/spectral.hpp"

namespace hokdv {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

FourierField scaled_to(const FourierField& u, double s, double target) {
  const double norm = homogeneous_sobolev_norm(u, s);
  if (!(norm > 0.0)) return u;
  return (target / norm) * u;
}

FourierField band_limit(const FourierField& u, int support) {
  Eigen::VectorXcd c = u.coeffs();
  for (int n = support + 1; n <= u.K(); ++n) c[n - 1] = Complex{};
  return FourierField(u.grid(), std::move(c));
}

// Moves a field between grids of the same model (j, mu).
FourierField onto(const FourierField& u, const GridSpec& grid, const char* what) {
  if (u.grid().j != grid.j || u.grid().mu != grid.mu) {
    throw std::invalid_argument(std::string(what) + " was built for a different j or mu");
  }
  return u.with_grid(grid);
}

// Flow whose step divides the time_samples + 1 sampling intervals exactly.
// `refine` records that many samples per sample interval.
FlowSpec flow_spec(const ExperimentConfig& cfg, const GridSpec& grid, double T, int refine = 1) {
  FlowSpec f;
  f.grid = grid;
  f.scheme = cfg.scheme;
  f.nonlinear = cfg.nonlinear;
  f.T = T;
  const int intervals = (cfg.time_samples + 1) * refine;
  const double span = std::abs(T);
  if (span == 0.0) {
    f.dt = cfg.dt;
    return f;
  }
  const long per = std::max(1L, static_cast<long>(std::ceil(span / (intervals * cfg.dt) - 1e-9)));
  f.dt = span / static_cast<double>(intervals * per);
  f.sample_interval = span / intervals;
  return f;
}

std::vector<FourierField> sampled_solve(const FourierField& u0, const FlowSpec& spec, int expected) {
  Trajectory tr = integrate(u0, spec);
  if (static_cast<int>(tr.samples.size()) != expected) {
    throw std::logic_error("sampling produced " + std::to_string(tr.samples.size()) +
                           " instants, expected " + std::to_string(expected));
  }
  std::vector<FourierField> out;
  out.reserve(tr.samples.size());
  for (auto& s : tr.samples) out.push_back(std::move(s.u));
  return out;
}

SweepResult finish_sweep(SweepResult r, const ExperimentConfig& cfg) {
  r.fit = fit_power_law(r.column(0), r.column(1), cfg.fit_threshold);
  if (r.fit->flagged) r.diagnostics.push_back("fit flagged: " + r.fit->note);
  return r;
}

std::string describe(double v) { return format_double(v); }

}  // namespace

void validate(const ExperimentConfig& cfg) {
  require(cfg.j >= 1, "j must be >= 1");
  require(cfg.K >= 1, "K must be >= 1");
  require(cfg.mu > 0.0 && std::isfinite(cfg.mu), "mu must be positive");
  require(cfg.dt > 0.0 && std::isfinite(cfg.dt), "dt must be positive");
  require(std::isfinite(cfg.T), "T must be finite");
  require(cfg.time_samples >= 1, "time_samples must be >= 1");
  require(cfg.samples >= 1, "samples must be >= 1");
  require(cfg.ascent_steps >= 0, "ascent_steps must be >= 0");
  require(cfg.quadrature_substeps >= 1, "quadrature_substeps must be >= 1");
  require(cfg.R > 0.0 && std::isfinite(cfg.R), "R must be positive");
  require(cfg.k0 != 0, "k0 must be nonzero");
  require(cfg.data_norm >= 0.0, "data_norm must be >= 0");
  require(cfg.data_decay >= 0.0, "data_decay must be >= 0");
  require(std::isfinite(cfg.data_power), "data_power must be finite");
  require(cfg.data_support >= 0, "data_support must be >= 0");
  require(cfg.tail_norm >= 0.0, "tail_norm must be >= 0");
  require(cfg.tail_width > 1.0, "tail_width must exceed 1");
  require(cfg.fit_threshold > 0.0, "fit_threshold must be positive");
  for (std::size_t i = 0; i < cfg.N_list.size(); ++i) {
    require(cfg.N_list[i] > 0.0, "N_list entries must be positive");
    if (i > 0) require(cfg.N_list[i] > cfg.N_list[i - 1], "N_list must be strictly increasing");
  }
  const bool sweep = cfg.kind == ExperimentKind::kApproxTruncated ||
                     cfg.kind == ExperimentKind::kTailInsensitivity ||
                     cfg.kind == ExperimentKind::kAlmostConservation;
  if (sweep) {
    require(!cfg.N_list.empty(), "N_list must not be empty");
    require(cfg.T > 0.0, "T must be positive for sweeps");
  }
  if (cfg.kind == ExperimentKind::kAlmostConservation) {
    require(cfg.s < 0.0 && cfg.s >= -cfg.j / 2.0, "s must lie in [-j/2, 0)");
  }
  if (cfg.kind == ExperimentKind::kSqueeze) {
    require(cfg.squeeze_N > 0.0, "squeeze_N must be positive");
    require(cfg.T >= 0.0, "T must be >= 0 for the squeeze search");
  }
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kApproxTruncated: return "approx-sweep";
    case ExperimentKind::kTailInsensitivity: return "tail-sweep";
    case ExperimentKind::kAlmostConservation: return "almost-cons";
    case ExperimentKind::kSqueeze: return "squeeze";
    case ExperimentKind::kScaling: return "scaling-check";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (auto k : {ExperimentKind::kApproxTruncated, ExperimentKind::kTailInsensitivity,
                 ExperimentKind::kAlmostConservation, ExperimentKind::kSqueeze, ExperimentKind::kScaling}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown experiment kind '" + std::string(name) + "'");
}

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y, double threshold) {
  if (x.size() != y.size()) throw std::invalid_argument("fit needs paired samples");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  PowerFit f;
  f.points = static_cast<int>(lx.size());
  if (f.points < 3) {
    f.note = "only " + std::to_string(f.points) + " positive points (need 3)";
    return f;
  }
  const double n = f.points;
  double mx = 0, my = 0;
  for (int i = 0; i < f.points; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < f.points; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) {
    f.note = "degenerate abscissae";
    return f;
  }
  f.exponent = sxy / sxx;
  f.log_prefactor = my - f.exponent * mx;
  double rss = 0;
  for (int i = 0; i < f.points; ++i) {
    const double e = ly[i] - (f.log_prefactor + f.exponent * lx[i]);
    rss += e * e;
  }
  f.residual = std::sqrt(rss / n);
  f.flagged = f.residual > threshold;
  if (f.flagged) f.note = "log-residual " + describe(f.residual) + " above " + describe(threshold);
  return f;
}

std::vector<double> SweepResult::column(std::size_t c) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(c));
  return out;
}

std::optional<std::pair<double, double>> SweepResult::first_non_decreasing() const {
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    if (!(rows[i + 1].at(1) < rows[i].at(1))) return std::pair{rows[i][0], rows[i + 1][0]};
  }
  return std::nullopt;
}

std::string to_csv(const SweepResult& result) {
  std::ostringstream os;
  for (std::size_t c = 0; c < result.columns.size(); ++c) os << (c ? "," : "") << result.columns[c];
  os << '\n';
  for (const auto& row : result.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_double(row[c]);
    os << '\n';
  }
  return os.str();
}

std::vector<double> sample_times(const ExperimentConfig& cfg) {
  const int intervals = cfg.time_samples + 1;
  std::vector<double> t(intervals + 1);
  for (int i = 0; i <= intervals; ++i) t[i] = i == intervals ? cfg.T : cfg.T * i / intervals;
  return t;
}

FourierField experiment_data(const ExperimentConfig& cfg, const GridSpec& grid, int default_support) {
  const int support = std::clamp(cfg.data_support > 0 ? cfg.data_support : default_support, 0, grid.K);
  if (cfg.initial) return band_limit(onto(*cfg.initial, grid, "initial data"), support);
  Rng rng = make_rng(cfg.seed, 0);
  FourierField u = smooth_random_field(grid, rng, cfg.data_decay, support);
  if (cfg.data_power != 0.0) {
    Eigen::VectorXcd c = u.coeffs();
    for (int n = 1; n <= grid.K; ++n) {
      const double k = grid.frequency(n);
      c[n - 1] *= std::pow(1.0 + k * k, -0.5 * cfg.data_power);
    }
    u = FourierField(grid, std::move(c));
  }
  return scaled_to(u, cfg.data_s, cfg.data_norm);
}

SweepResult approx_truncated_sweep(const ExperimentConfig& cfg) {
  validate(cfg);
  const GridSpec ref = make_grid(cfg.j, cfg.K, cfg.mu, cfg.dealias);
  const int top = ref.index_cutoff(cfg.N_list.back());
  if (cfg.K < 4 * top) {
    throw std::invalid_argument("reference resolution K = " + std::to_string(cfg.K) +
                                " under-resolves N = " + describe(cfg.N_list.back()) +
                                " (needs K >= " + std::to_string(4 * top) + ")");
  }
  const int lowest = ref.index_cutoff(cfg.N_list.front());
  require(lowest >= 1, "smallest N keeps no modes");
  const FourierField u0 = experiment_data(cfg, ref, lowest);
  const int count = cfg.time_samples + 2;
  const std::vector<FourierField> full = sampled_solve(u0, flow_spec(cfg, ref, cfg.T), count);

  std::vector<std::vector<double>> rows(cfg.N_list.size());
  parallel_chunks(cfg.N_list.size(), cfg.N_list.size(), cfg.threads, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const double N = cfg.N_list[i];
      const GridSpec small = make_grid(cfg.j, ref.index_cutoff(N), cfg.mu, cfg.dealias);
      FlowSpec spec = flow_spec(cfg, small, cfg.T);
      spec.flavor = FlowFlavor::kTruncated;
      spec.N = small.K / small.mu;
      const std::vector<FourierField> trunc = sampled_solve(u0.with_grid(small), spec, count);
      const Band low = Band::low(std::sqrt(N));
      double sup = 0.0, last = 0.0;
      for (int k = 0; k < count; ++k) {
        last = homogeneous_sobolev_norm(project(full[k] - trunc[k].with_grid(ref), low), -0.5);
        sup = std::max(sup, last);
      }
      rows[i] = {N, sup, last};
    }
  });
  SweepResult r;
  r.name = to_string(ExperimentKind::kApproxTruncated);
  r.columns = {"N", "sup_error", "error_at_T"};
  r.rows = std::move(rows);
  r.diagnostics.push_back("reference K = " + std::to_string(cfg.K) + ", data support <= " +
                          std::to_string(u0.support()));
  return finish_sweep(std::move(r), cfg);
}

FourierField tail_perturbation(const GridSpec& grid, double N, double width, double norm, Rng& rng) {
  const int lo = grid.index_cutoff(2.0 * N) + 1;
  const int hi = std::min(grid.K, grid.index_cutoff(2.0 * N * width));
  if (lo > hi) {
    throw std::invalid_argument("no room for a tail above 2N = " + describe(2.0 * N) +
                                " below the grid cutoff");
  }
  const FourierField g = smooth_random_field(grid, rng, 0.0, hi);
  Eigen::VectorXcd c = g.coeffs();
  for (int n = 1; n <= grid.K; ++n) {
    c[n - 1] = n < lo ? Complex{} : c[n - 1] * std::sqrt(std::abs(grid.frequency(n)));
  }
  return scaled_to(FourierField(grid, std::move(c)), -0.5, norm);
}

void check_tail(const FourierField& tail, double N) {
  const int cut = tail.grid().index_cutoff(2.0 * N);
  for (int n = 1; n <= std::min(cut, tail.K()); ++n) {
    if (tail.coeff(n) != Complex{}) {
      throw std::invalid_argument("tail perturbation has mode n = " + std::to_string(n) +
                                  " inside |k| <= 2N = " + describe(2.0 * N));
    }
  }
}

SweepResult high_freq_insensitivity(const ExperimentConfig& cfg) {
  validate(cfg);
  const GridSpec grid = make_grid(cfg.j, cfg.K, cfg.mu, cfg.dealias);
  const FourierField u0 = experiment_data(cfg, grid, grid.K);
  const int count = cfg.time_samples + 2;
  const FlowSpec spec = flow_spec(cfg, grid, cfg.T);

  std::vector<FourierField> tails;
  for (std::size_t i = 0; i < cfg.N_list.size(); ++i) {
    if (cfg.tail) {
      const FourierField t = onto(*cfg.tail, grid, "tail");
      check_tail(t, cfg.N_list[i]);
      tails.push_back(t);
    } else {
      Rng rng = make_rng(cfg.seed, 1000 + i);
      tails.push_back(tail_perturbation(grid, cfg.N_list[i], cfg.tail_width, cfg.tail_norm, rng));
    }
  }
  const std::vector<FourierField> base = sampled_solve(u0, spec, count);
  std::vector<std::vector<double>> rows(cfg.N_list.size());
  parallel_chunks(cfg.N_list.size(), cfg.N_list.size(), cfg.threads, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const double N = cfg.N_list[i];
      const std::vector<FourierField> pert = sampled_solve(u0 + tails[i], spec, count);
      double sup = 0.0;
      for (int k = 0; k < count; ++k) {
        sup = std::max(sup, homogeneous_sobolev_norm(project(base[k] - pert[k], Band::low(N)), -0.5));
      }
      rows[i] = {N, sup, homogeneous_sobolev_norm(tails[i], -0.5)};
    }
  });
  SweepResult r;
  r.name = to_string(ExperimentKind::kTailInsensitivity);
  r.columns = {"N", "sup_error", "tail_norm"};
  r.rows = std::move(rows);
  return finish_sweep(std::move(r), cfg);
}

SweepResult almost_conservation_sweep(const ExperimentConfig& cfg) {
  validate(cfg);
  const GridSpec grid = make_grid(cfg.j, cfg.K, cfg.mu, cfg.dealias);
  const FourierField u0 = experiment_data(cfg, grid, grid.K);
  const int q = cfg.quadrature_substeps;
  const Trajectory tr = integrate(u0, flow_spec(cfg, grid, cfg.T, q));
  const std::size_t nodes = static_cast<std::size_t>(cfg.time_samples + 1) * q + 1;
  if (tr.samples.size() != nodes) {
    throw std::logic_error("sampling produced " + std::to_string(tr.samples.size()) +
                           " instants, expected " + std::to_string(nodes));
  }

  std::vector<std::vector<double>> rows(cfg.N_list.size());
  parallel_chunks(cfg.N_list.size(), cfg.N_list.size(), cfg.threads, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const double N = cfg.N_list[i];
      const EnergyHierarchy h(grid, make_multiplier(cfg.s, N, cfg.shape), cfg.nonlinear ? grid.K : 0);
      double d[5] = {0, 0, 0, 0, 0};
      for (int order = 2; order <= 4; ++order) {
        const std::vector<double> drift = integrated_drift(tr, h, order);
        for (std::size_t k = 0; k < nodes; k += q) d[order] = std::max(d[order], std::abs(drift[k]));
      }
      const double e0 = h.energy(tr.samples.front().u, 4);
      double direct = 0.0;
      for (std::size_t k = 0; k < nodes; k += q) {
        direct = std::max(direct, std::abs(h.energy(tr.samples[k].u, 4) - e0));
      }
      rows[i] = {N, d[4], d[2], d[3], e0, direct};
    }
  });
  SweepResult r;
  r.name = to_string(ExperimentKind::kAlmostConservation);
  r.columns = {"N", "drift_E4", "drift_E2", "drift_E3", "E4_initial", "drift_E4_differenced"};
  r.rows = std::move(rows);
  const auto& last = r.rows.back();
  if (!(last[1] <= last[2])) {
    r.diagnostics.push_back("E4 drift " + describe(last[1]) + " exceeds E2 drift " + describe(last[2]) +
                            " at N = " + describe(last[0]));
  }
  return finish_sweep(std::move(r), cfg);
}

namespace {

// Phase-space description of the squeeze problem in Darboux coordinates
// w_n = (F_n - F_n(center)) / sqrt(k_n), where the H_0^{-1/2} ball is round.
struct SqueezeProblem {
  GridSpec grid;
  FlowSpec flow;
  int modes = 0;
  int n0 = 0;
  Complex z;
  Eigen::VectorXcd center;  // Darboux coordinates of the center
  Eigen::VectorXd root_k;

  SqueezeProblem(const ExperimentConfig& cfg) {
    const GridSpec base = make_grid(cfg.j, cfg.K, cfg.mu, cfg.dealias);
    modes = base.index_cutoff(cfg.squeeze_N);
    require(modes >= 1, "squeeze_N keeps no modes");
    grid = make_grid(cfg.j, modes, cfg.mu, cfg.dealias);
    n0 = std::abs(cfg.k0);
    if (n0 > modes) {
      throw std::invalid_argument("|k0| = " + std::to_string(n0) + " exceeds the truncation N = " +
                                  describe(cfg.squeeze_N));
    }
    z = cfg.k0 > 0 ? cfg.z : std::conj(cfg.z);
    flow = flow_spec(cfg, grid, cfg.T);
    flow.flavor = FlowFlavor::kTruncated;
    flow.N = modes / grid.mu;
    flow.sample_interval = 0.0;
    center = Eigen::VectorXcd::Zero(modes);
    if (cfg.center) {
      const FourierField c = onto(*cfg.center, grid, "ball center");
      for (int n = 1; n <= modes; ++n) center[n - 1] = symplectic_coordinate(c, n);
    }
    root_k.resize(modes);
    for (int n = 1; n <= modes; ++n) root_k[n - 1] = std::sqrt(grid.frequency(n));
  }

  FourierField field(const Eigen::VectorXd& w) const {
    Eigen::VectorXcd F = center;
    for (int n = 1; n <= modes; ++n) F[n - 1] += root_k[n - 1] * Complex(w[2 * n - 2], w[2 * n - 1]);
    return from_symplectic_coordinates(grid, F);
  }

  double coordinate_of(const FourierField& u0) const {
    const FourierField uT = flow.T == 0.0 ? u0 : evolve(u0, flow);
    return std::abs(symplectic_coordinate(uT, n0) - z) / root_k[n0 - 1];
  }

  double operator()(const Eigen::VectorXd& w) const { return coordinate_of(field(w)); }

  Eigen::VectorXd on_sphere(Eigen::VectorXd w, double R) const {
    const double n = w.norm();
    return n > 0.0 ? Eigen::VectorXd(w * (R / n)) : w;
  }
};

}  // namespace

double cylinder_coordinate(const FourierField& u0, const ExperimentConfig& cfg) {
  const SqueezeProblem p(cfg);
  return p.coordinate_of(band_limit(onto(u0, p.grid, "field"), p.modes));
}

Witness squeeze_witness(const ExperimentConfig& cfg) {
  validate(cfg);
  const SqueezeProblem p(cfg);
  const int dims = 2 * p.modes;
  Witness out(FourierField(p.grid));

  // Seeded samples on the sphere, each with its own stream.
  std::vector<Eigen::VectorXd> cand(cfg.samples + 1);
  for (int i = 0; i < cfg.samples; ++i) {
    Rng rng = make_rng(cfg.seed, static_cast<std::uint64_t>(i));
    cand[i] = cfg.R * sphere_point(dims, rng);
  }
  // Optimal direction for the linear flow: all radius in mode k0, phase aligned.
  {
    const Complex d = p.center[p.n0 - 1] - std::conj(linear_phase(p.grid, p.n0, cfg.T)) * p.z;
    const Complex dir = std::abs(d) > 0.0 ? d / std::abs(d) : Complex(1.0, 0.0);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(dims);
    w[2 * p.n0 - 2] = cfg.R * dir.real();
    w[2 * p.n0 - 1] = cfg.R * dir.imag();
    cand[cfg.samples] = w;
  }
  std::vector<double> val(cand.size());
  parallel_chunks(cand.size(), cand.size(), cfg.threads, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) val[i] = p(cand[i]);
  });
  out.evaluations = static_cast<long>(cand.size());
  std::size_t best_i = 0;
  for (std::size_t i = 1; i < cand.size(); ++i) {
    if (val[i] > val[best_i]) best_i = i;
  }
  Eigen::VectorXd w = cand[best_i];
  double best = val[best_i];
  out.trace.emplace_back(out.evaluations, best);

  double step = 0.5 * cfg.R;
  bool improved = false;
  for (int it = 0; it < cfg.ascent_steps; ++it) {
    const int q = it % dims;
    Eigen::VectorXd trial[2] = {w, w};
    trial[0][q] += step;
    trial[1][q] -= step;
    double tv[2];
    parallel_chunks(2, 2, cfg.threads, [&](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k) {
        trial[k] = p.on_sphere(trial[k], cfg.R);
        tv[k] = p(trial[k]);
      }
    });
    out.evaluations += 2;
    const int k = tv[1] > tv[0] ? 1 : 0;
    if (tv[k] > best) {
      best = tv[k];
      w = trial[k];
      improved = true;
      out.trace.emplace_back(out.evaluations, best);
    }
    if (q == dims - 1) {
      if (!improved) step *= 0.5;
      improved = false;
    }
  }

  out.u0 = p.field(w);
  out.search_value = best;
  out.value = p.coordinate_of(out.u0);
  ++out.evaluations;
  out.center_value = p(Eigen::VectorXd::Zero(dims));
  FourierField center(p.grid);
  if (cfg.center) center = onto(*cfg.center, p.grid, "ball center");
  out.radius = homogeneous_sobolev_norm(out.u0 - band_limit(center, p.modes), -0.5);
  return out;
}

ScalingResult scaling_check(const ExperimentConfig& cfg) {
  validate(cfg);
  const double mu = cfg.mu;
  const GridSpec base = make_grid(cfg.j, cfg.K, 1.0, cfg.dealias);
  const GridSpec scaled = make_grid(cfg.j, cfg.K, mu, cfg.dealias);
  ExperimentConfig on_base = cfg;
  on_base.mu = 1.0;
  if (cfg.initial) on_base.initial = onto(*cfg.initial, base, "initial data");
  const FourierField u0 = experiment_data(on_base, base, base.K);
  const double amp = std::pow(mu, -2.0 * cfg.j);
  const FourierField v0(scaled, amp * u0.coeffs());

  ScalingResult r;
  r.mu = mu;
  r.expected_ratio = std::pow(mu, -2.0 * cfg.j - cfg.s + 0.5);
  r.norm_ratio = homogeneous_sobolev_norm(v0, cfg.s) / homogeneous_sobolev_norm(u0, cfg.s);
  r.norm_rel_error = std::abs(r.norm_ratio - r.expected_ratio) / r.expected_ratio;

  const int count = cfg.time_samples + 2;
  const double Tmu = std::pow(mu, 2.0 * cfg.j + 1.0) * cfg.T;
  std::vector<FourierField> a, b;
  if (cfg.T > 0.0) {
    a = sampled_solve(u0, flow_spec(cfg, base, cfg.T), count);
    b = sampled_solve(v0, flow_spec(cfg, scaled, Tmu), count);
  } else {
    a.assign(count, u0);
    b.assign(count, v0);
  }
  r.times = sample_times(cfg);
  for (int k = 0; k < count; ++k) {
    const FourierField back(base, b[k].coeffs() / amp);
    const double m = sobolev_norm(a[k] - back, 0.0);
    const double ref = sobolev_norm(a[k], 0.0);
    r.mismatch.push_back(m);
    r.max_mismatch = std::max(r.max_mismatch, m);
    if (ref > 0.0) r.max_relative_mismatch = std::max(r.max_relative_mismatch, m / ref);
  }
  return r;
}

SweepResult to_sweep(const ScalingResult& result) {
  SweepResult r;
  r.name = to_string(ExperimentKind::kScaling);
  r.columns = {"t", "l2_mismatch"};
  for (std::size_t i = 0; i < result.times.size(); ++i) r.rows.push_back({result.times[i], result.mismatch[i]});
  r.diagnostics.push_back("norm ratio " + describe(result.norm_ratio) + " expected " +
                          describe(result.expected_ratio));
  return r;
}

SweepResult to_sweep(const Witness& witness) {
  SweepResult r;
  r.name = to_string(ExperimentKind::kSqueeze);
  r.columns = {"evaluations", "best_value"};
  for (const auto& [n, v] : witness.trace) r.rows.push_back({static_cast<double>(n), v});
  r.rows.push_back({static_cast<double>(witness.evaluations), witness.value});
  return r;
}

}  // namespace hokdv
