#include "hokdv/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "hokdv/experiments.hpp"
#include "hokdv/flow.hpp"
#include "hokdv/imethod.hpp"
#include "hokdv/io.hpp"
#include "hokdv/resonance.hpp"
#include "hokdv/spectral.hpp"

#ifndef HOKDV_VERSION
#define HOKDV_VERSION "0.0.0"
#endif

namespace hokdv::cli {

namespace fs = std::filesystem;

KeyValues parse_config_text(std::string_view text) {
  KeyValues kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
    if (!kv.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(number) + ": key '" + key + "' given twice");
    }
  }
  return kv;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string canonical_config(const KeyValues& kv) {
  std::string s;
  for (const auto& [k, v] : kv) s += k + " = " + v + "\n";
  return s;
}

std::uint64_t config_hash(const KeyValues& kv) { return fnv1a64(canonical_config(kv)); }

std::string to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  j["version"] = m.version;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["exit_code"] = m.exit_code;
  if (!m.error.empty()) j["error"] = m.error;
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.config) j["config"][k] = v;
  j["artifacts"] = m.artifacts;
  j["summary"] = m.summary;
  return j.dump(2) + "\n";
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"solve",       "energies",    "resonance-check",
                                                 "approx-sweep", "tail-sweep", "almost-cons",
                                                 "squeeze",     "scaling-check"};
  return names;
}

namespace {

struct KeyDef {
  std::string name;
  std::optional<std::string> fallback;  // nullopt: required
  std::string help;
};

std::vector<KeyDef> flow_keys() {
  return {{"j", "2", "dispersion order"},
          {"K", std::nullopt, "largest lattice index (required)"},
          {"mu", "1", "period parameter"},
          {"dealias", "padded", "padded | power_of_two"},
          {"scheme", "etdrk4", "etdrk4 | lawson_rk4 | filon"},
          {"dt", "0.001", "time step (shrunk to divide the sample spacing)"},
          {"T", "1", "horizon"},
          {"nonlinear", "true", "false runs the linear flow"},
          {"seed", "1", "RNG seed"},
          {"threads", "1", "worker cap"}};
}

std::vector<KeyDef> data_keys() {
  return {{"initial", "", "snapshot JSON for the initial data; empty draws random data"},
          {"data_norm", "1", "size of random data in homogeneous H^data_s"},
          {"data_s", "-0.5", "Sobolev index for data_norm"},
          {"data_decay", "1", "random spectrum exp(-data_decay |k|)"},
          {"data_power", "0", "extra factor <k>^-data_power"},
          {"data_support", "0", "band limit of the data; 0 = command default"}};
}

std::vector<KeyDef> sweep_keys() {
  return {{"N_list", std::nullopt, "strictly increasing cutoffs, comma separated (required)"},
          {"s", "-0.5", "Sobolev index of the I-method multiplier"},
          {"shape", "clipped_power", "clipped_power | smooth_log"},
          {"time_samples", "32", "interior instants of the sup over t"},
          {"fit_threshold", "0.25", "RMS log residual above which a fit is flagged"},
          {"assert_monotone", "true", "exit 1 unless column 2 strictly decreases in N"}};
}

std::vector<KeyDef> keys_for(const std::string& cmd) {
  std::vector<KeyDef> k;
  auto add = [&](std::vector<KeyDef> more) { k.insert(k.end(), more.begin(), more.end()); };
  auto set_default = [&](const std::string& name, std::string v) {
    for (auto& d : k) {
      if (d.name == name) d.fallback = std::move(v);
    }
  };
  if (cmd == "resonance-check") {
    return {{"j", "1", "dispersion order"},
            {"K", std::nullopt, "Gamma_3 entry bound (required)"},
            {"K4", "-1", "Gamma_4 entry bound; -1 = K"},
            {"threads", "1", "worker cap"}};
  }
  add(flow_keys());
  if (cmd == "solve") {
    add(data_keys());
    add({{"flavor", "full", "full | truncated"},
         {"N", "0", "frequency cutoff of the truncated flavor"},
         {"sample_interval", "0", "spacing of recorded samples; 0 = every step"}});
  } else if (cmd == "energies") {
    add(data_keys());
    add({{"s", "-0.5", "Sobolev index of the multiplier"},
         {"N", std::nullopt, "multiplier cutoff (required)"},
         {"shape", "clipped_power", "clipped_power | smooth_log"},
         {"time_samples", "8", "interior instants when T > 0"}});
    set_default("T", "0");
  } else if (cmd == "approx-sweep" || cmd == "tail-sweep" || cmd == "almost-cons") {
    add(data_keys());
    add(sweep_keys());
    if (cmd == "tail-sweep") {
      add({{"tail", "", "snapshot JSON for the tail; empty draws one per N"},
           {"tail_norm", "0.1", "homogeneous H^-1/2 size of random tails"},
           {"tail_width", "2", "random tail lives on 2N < |k| <= tail_width 2N"}});
    }
    if (cmd == "almost-cons") {
      add({{"quadrature_substeps", "8", "rate-identity quadrature intervals per sample interval"}});
      set_default("s", "-1.5");
      set_default("j", "3");
    }
  } else if (cmd == "squeeze") {
    add({{"squeeze_N", "8", "truncation of the flow"},
         {"center", "", "snapshot JSON of the ball center; empty = 0"},
         {"R", "1", "ball radius in homogeneous H^-1/2"},
         {"k0", "1", "cylinder mode"},
         {"z_re", "0", "cylinder center, real part"},
         {"z_im", "0", "cylinder center, imaginary part"},
         {"r", "0", "cylinder radius (reported against)"},
         {"samples", "64", "random sphere samples"},
         {"ascent_steps", "200", "coordinate ascent steps"},
         {"time_samples", "32", "sample grid used to fix the step"},
         {"target_fraction", "0.9", "exit 1 when the witness stays below this fraction of R"}});
    set_default("T", "0.1");
  } else if (cmd == "scaling-check") {
    add(data_keys());
    add({{"s", "-1.5", "Sobolev index of the norm identity"},
         {"time_samples", "32", "matched instants"},
         {"mismatch_tol", "1e-6", "exit 1 above this L2 mismatch"},
         {"norm_tol", "1e-12", "exit 1 above this relative norm-ratio error"}});
    set_default("mu", "2");
  }
  return k;
}

// Typed access to the resolved configuration; every error names its key.
class Resolved {
 public:
  explicit Resolved(KeyValues kv) : kv_(std::move(kv)) {}

  const KeyValues& values() const { return kv_; }

  const std::string& str(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
  }

  long integer(const std::string& key) const {
    const std::string& v = str(key);
    long out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
      throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    }
    return out;
  }

  double real(const std::string& key) const { return parse_real(key, str(key)); }

  bool flag(const std::string& key) const {
    const std::string& v = str(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
  }

  std::vector<double> list(const std::string& key) const {
    std::string v = str(key);
    for (char& c : v) {
      if (c == ',') c = ' ';
    }
    std::istringstream in(v);
    std::vector<double> out;
    std::string item;
    while (in >> item) out.push_back(parse_real(key, item));
    if (out.empty()) throw ConfigError("key '" + key + "': expected a list of numbers, got nothing");
    return out;
  }

  template <class F>
  auto parsed(const std::string& key, F&& parse) const {
    try {
      return parse(str(key));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("key '" + key + "': " + e.what());
    }
  }

 private:
  static double parse_real(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
      throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
    return out;
  }

  KeyValues kv_;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string hex16(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

struct Context {
  const Resolved& cfg;
  fs::path out_dir;
  std::ostream& out;
  RunManifest& manifest;

  void write(const std::string& name, const std::string& content) const {
    write_file_atomic(out_dir / name, content);
    manifest.artifacts.push_back(name);
  }
  void note(const std::string& line) const {
    out << line << "\n";
    manifest.summary.push_back(line);
  }
};

FourierField load_field(const std::string& path, const std::string& key) {
  try {
    return read_snapshot(path).field;
  } catch (const FormatError& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError("key '" + key + "': cannot read '" + path + "': " + e.what());
  }
}

ExperimentConfig experiment_config(const Resolved& r, ExperimentKind kind) {
  const KeyValues& kv = r.values();
  auto has = [&](const char* k) { return kv.count(k) > 0; };
  ExperimentConfig c;
  c.kind = kind;
  c.j = static_cast<int>(r.integer("j"));
  c.K = static_cast<int>(r.integer("K"));
  c.mu = r.real("mu");
  c.dealias = r.parsed("dealias", parse_dealias_rule);
  c.scheme = r.parsed("scheme", parse_scheme);
  c.dt = r.real("dt");
  c.T = r.real("T");
  c.nonlinear = r.flag("nonlinear");
  c.seed = static_cast<std::uint64_t>(r.integer("seed"));
  c.threads = static_cast<int>(r.integer("threads"));
  if (has("time_samples")) c.time_samples = static_cast<int>(r.integer("time_samples"));
  if (has("N_list")) c.N_list = r.list("N_list");
  if (has("s")) c.s = r.real("s");
  if (has("shape")) c.shape = r.parsed("shape", parse_multiplier_shape);
  if (has("fit_threshold")) c.fit_threshold = r.real("fit_threshold");
  if (has("data_norm")) {
    c.data_norm = r.real("data_norm");
    c.data_s = r.real("data_s");
    c.data_decay = r.real("data_decay");
    c.data_power = r.real("data_power");
    c.data_support = static_cast<int>(r.integer("data_support"));
    if (!r.str("initial").empty()) c.initial = load_field(r.str("initial"), "initial");
  }
  if (has("tail_norm")) {
    c.tail_norm = r.real("tail_norm");
    c.tail_width = r.real("tail_width");
    if (!r.str("tail").empty()) c.tail = load_field(r.str("tail"), "tail");
  }
  if (has("quadrature_substeps")) c.quadrature_substeps = static_cast<int>(r.integer("quadrature_substeps"));
  if (has("squeeze_N")) {
    c.squeeze_N = r.real("squeeze_N");
    c.R = r.real("R");
    c.k0 = static_cast<int>(r.integer("k0"));
    c.z = Complex(r.real("z_re"), r.real("z_im"));
    c.r = r.real("r");
    c.samples = static_cast<int>(r.integer("samples"));
    c.ascent_steps = static_cast<int>(r.integer("ascent_steps"));
    if (!r.str("center").empty()) c.center = load_field(r.str("center"), "center");
  }
  try {
    validate(c);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

GridSpec grid_of(const ExperimentConfig& c) {
  try {
    return make_grid(c.j, c.K, c.mu, c.dealias);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void assert_monotone(const Context& ctx, const SweepResult& r, const char* what) {
  if (!ctx.cfg.flag("assert_monotone")) return;
  if (const auto bad = r.first_non_decreasing()) {
    throw AssertionFailure(std::string(what) + " not strictly decreasing between N = " +
                           format_double(bad->first) + " and N = " + format_double(bad->second));
  }
}

void report_sweep(const Context& ctx, const SweepResult& r) {
  ctx.write(r.name + ".csv", to_csv(r));
  for (const auto& row : r.rows) {
    std::string line = r.name + ":";
    for (std::size_t c = 0; c < row.size(); ++c) line += " " + r.columns[c] + "=" + format_double(row[c]);
    ctx.note(line);
  }
  if (r.fit) {
    ctx.note("fit: exponent=" + format_double(r.fit->exponent) + " residual=" + format_double(r.fit->residual) +
             " points=" + std::to_string(r.fit->points) + (r.fit->flagged ? " FLAGGED " + r.fit->note : ""));
  }
  for (const auto& d : r.diagnostics) ctx.note("diagnostic: " + d);
}

void cmd_solve(const Context& ctx) {
  const ExperimentConfig c = experiment_config(ctx.cfg, ExperimentKind::kScaling);
  const GridSpec g = grid_of(c);
  FlowSpec spec;
  spec.grid = g;
  spec.scheme = c.scheme;
  spec.dt = c.dt;
  spec.T = c.T;
  spec.nonlinear = c.nonlinear;
  spec.sample_interval = ctx.cfg.real("sample_interval");
  const std::string flavor = ctx.cfg.str("flavor");
  if (flavor == "truncated") {
    spec.flavor = FlowFlavor::kTruncated;
    spec.N = ctx.cfg.real("N");
  } else if (flavor != "full") {
    throw ConfigError("key 'flavor': expected full or truncated, got '" + flavor + "'");
  }
  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const Trajectory tr = integrate(experiment_data(c, g, g.K), spec);
  const ConservationSummary cons = conservation_report(tr);
  std::ostringstream csv;
  csv << "t,mass,l2_energy,hamiltonian,h_minus_half_norm\n";
  for (std::size_t i = 0; i < tr.samples.size(); ++i) {
    const auto& rep = cons.reports[i];
    csv << format_double(tr.samples[i].t) << ',' << format_double(rep.mass) << ','
        << format_double(rep.l2_energy) << ',' << format_double(rep.hamiltonian) << ','
        << format_double(homogeneous_sobolev_norm(tr.samples[i].u, -0.5)) << '\n';
  }
  ctx.write("solve.csv", csv.str());
  ctx.write("final.json", format_snapshot(tr.final(), tr.samples.back().t));
  ctx.note("steps=" + std::to_string(tr.stats.steps) + " dt_used=" + format_double(tr.stats.dt_used));
  ctx.note("max_mass=" + format_double(cons.max_mass) + " max_energy_drift=" + format_double(cons.max_energy_drift) +
           " max_hamiltonian_drift=" + format_double(cons.max_hamiltonian_drift));
}

void cmd_energies(const Context& ctx) {
  ExperimentConfig c = experiment_config(ctx.cfg, ExperimentKind::kScaling);
  const GridSpec g = grid_of(c);
  const double N = ctx.cfg.real("N");
  if (!(N > 0.0)) throw ConfigError("key 'N': must be positive");
  const EnergyHierarchy h(g, make_multiplier(c.s, N, c.shape), c.nonlinear ? g.K : 0);
  const FourierField u0 = experiment_data(c, g, g.K);
  std::vector<Sample> samples{{0.0, u0}};
  if (c.T != 0.0) {
    FlowSpec spec;
    spec.grid = g;
    spec.scheme = c.scheme;
    spec.dt = c.dt;
    spec.T = c.T;
    spec.nonlinear = c.nonlinear;
    spec.sample_interval = std::abs(c.T) / (c.time_samples + 1);
    samples = integrate(u0, spec).samples;
  }
  std::ostringstream csv;
  csv << "t,E2,E3,E4,dE2_dt,dE3_dt,dE4_dt\n";
  for (const auto& s : samples) {
    csv << format_double(s.t);
    for (int order = 2; order <= 4; ++order) csv << ',' << format_double(h.energy(s.u, order, c.threads));
    for (int order = 2; order <= 4; ++order) {
      const double rate = c.nonlinear ? h.energy_rate(s.u, order, c.threads) : 0.0;
      csv << ',' << format_double(rate);
    }
    csv << '\n';
  }
  ctx.write("energies.csv", csv.str());
  ctx.note("E2=" + format_double(h.energy(u0, 2)) + " E3=" + format_double(h.energy(u0, 3)) +
           " E4=" + format_double(h.energy(u0, 4)) + " samples=" + std::to_string(samples.size()));
}

void cmd_resonance(const Context& ctx) {
  const int j = static_cast<int>(ctx.cfg.integer("j"));
  const int K = static_cast<int>(ctx.cfg.integer("K"));
  const int K4 = static_cast<int>(ctx.cfg.integer("K4"));
  const int threads = static_cast<int>(ctx.cfg.integer("threads"));
  if (j < 1) throw ConfigError("key 'j': must be >= 1");
  if (K < 1) throw ConfigError("key 'K': must be >= 1");
  if (K4 == 0 || K4 < -1) throw ConfigError("key 'K4': must be positive or -1");
  std::ostringstream tuples;
  const resonance::VerificationReport rep = resonance::verify_factorization(j, K, K4, threads, &tuples);
  ctx.write("resonance_tuples.csv", tuples.str());
  std::ostringstream csv;
  csv << "n,K,count,resonant,failures,min_ratio,max_ratio,cofactor\n";
  for (const auto* f : {&rep.gamma3, &rep.gamma4}) {
    csv << f->n << ',' << f->K << ',' << f->count << ',' << f->resonant << ',' << f->failure_count << ','
        << format_double(f->min_ratio.convert_to<double>()) << ','
        << format_double(f->max_ratio.convert_to<double>()) << ",\"" << f->cofactor.to_string() << "\"\n";
  }
  ctx.write("resonance.csv", csv.str());
  ctx.note(rep.summary());
  ctx.note("Q3 = " + rep.gamma3.cofactor.to_string());
  ctx.note("Q4 = " + rep.gamma4.cofactor.to_string());
  if (!rep.ok()) {
    std::string first = rep.gamma3.failures.empty()
                            ? (rep.gamma4.failures.empty() ? "" : rep.gamma4.failures.front())
                            : rep.gamma3.failures.front();
    throw AssertionFailure("factorization failed" + (first.empty() ? "" : " at " + first));
  }
}

void cmd_sweep(const Context& ctx, ExperimentKind kind) {
  const ExperimentConfig c = experiment_config(ctx.cfg, kind);
  SweepResult r;
  try {
    switch (kind) {
      case ExperimentKind::kApproxTruncated: r = approx_truncated_sweep(c); break;
      case ExperimentKind::kTailInsensitivity: r = high_freq_insensitivity(c); break;
      default: r = almost_conservation_sweep(c); break;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  report_sweep(ctx, r);
  assert_monotone(ctx, r, kind == ExperimentKind::kAlmostConservation ? "E4 drift" : "sup error");
}

void cmd_squeeze(const Context& ctx) {
  const ExperimentConfig c = experiment_config(ctx.cfg, ExperimentKind::kSqueeze);
  std::optional<Witness> w;
  try {
    w.emplace(squeeze_witness(c));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  ctx.write("squeeze.csv", to_csv(to_sweep(*w)));
  ctx.write("witness.json", format_snapshot(w->u0));
  ctx.note("witness value=" + format_double(w->value) + " R=" + format_double(c.R) + " r=" + format_double(c.r) +
           " radius=" + format_double(w->radius) + " center_value=" + format_double(w->center_value) +
           " evaluations=" + std::to_string(w->evaluations));
  if (w->value > c.r) ctx.note("image leaves the cylinder of radius r");
  const double target = ctx.cfg.real("target_fraction") * c.R;
  if (!(w->value >= target)) {
    throw AssertionFailure("witness value " + format_double(w->value) + " below target " + format_double(target));
  }
}

void cmd_scaling(const Context& ctx) {
  const ExperimentConfig c = experiment_config(ctx.cfg, ExperimentKind::kScaling);
  std::optional<ScalingResult> r;
  try {
    r.emplace(scaling_check(c));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  ctx.write("scaling.csv", to_csv(to_sweep(*r)));
  ctx.note("max_mismatch=" + format_double(r->max_mismatch) + " max_relative_mismatch=" +
           format_double(r->max_relative_mismatch));
  ctx.note("norm_ratio=" + format_double(r->norm_ratio) + " expected=" + format_double(r->expected_ratio) +
           " rel_error=" + format_double(r->norm_rel_error));
  if (!(r->max_mismatch <= ctx.cfg.real("mismatch_tol"))) {
    throw AssertionFailure("L2 mismatch " + format_double(r->max_mismatch) + " above mismatch_tol");
  }
  if (!(r->norm_rel_error <= ctx.cfg.real("norm_tol"))) {
    throw AssertionFailure("norm ratio error " + format_double(r->norm_rel_error) + " above norm_tol");
  }
}

void dispatch(const std::string& cmd, const Context& ctx) {
  if (cmd == "solve") return cmd_solve(ctx);
  if (cmd == "energies") return cmd_energies(ctx);
  if (cmd == "resonance-check") return cmd_resonance(ctx);
  if (cmd == "approx-sweep") return cmd_sweep(ctx, ExperimentKind::kApproxTruncated);
  if (cmd == "tail-sweep") return cmd_sweep(ctx, ExperimentKind::kTailInsensitivity);
  if (cmd == "almost-cons") return cmd_sweep(ctx, ExperimentKind::kAlmostConservation);
  if (cmd == "squeeze") return cmd_squeeze(ctx);
  if (cmd == "scaling-check") return cmd_scaling(ctx);
  throw ConfigError("unknown subcommand '" + cmd + "'");
}

struct Parsed {
  std::string command;
  std::string config_path;
  std::string out;
  std::map<std::string, std::string> flags;  // key -> flag value, only those given
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Higher-order KdV solver and experiment harness", "hokdv"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", HOKDV_VERSION);
  Parsed parsed;
  std::map<std::string, std::map<std::string, std::string>> storage;
  for (const auto& name : subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", parsed.config_path, "flat key = value file");
    sub->add_option("--out", parsed.out, std::string("output directory (default $") + kOutDirVariable + " or .)");
    for (const auto& key : keys_for(name)) {
      std::string help = key.help + (key.fallback ? " [" + *key.fallback + "]" : "");
      sub->add_option("--" + key.name, storage[name][key.name], help);
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kExitConfig;
  }
  const CLI::App* chosen = app.get_subcommands().front();
  parsed.command = chosen->get_name();
  for (const auto& key : keys_for(parsed.command)) {
    if (chosen->get_option("--" + key.name)->count() > 0) {
      parsed.flags[key.name] = storage[parsed.command][key.name];
    }
  }

  fs::path out_dir = ".";
  if (!parsed.out.empty()) {
    out_dir = parsed.out;
  } else if (const char* env = std::getenv(kOutDirVariable); env && *env) {
    out_dir = env;
  }

  RunManifest manifest;
  manifest.command = parsed.command;
  manifest.version = HOKDV_VERSION;
  manifest.started = utc_now();
  int code = kExitOk;
  try {
    const std::vector<KeyDef> defs = keys_for(parsed.command);
    KeyValues resolved;
    for (const auto& d : defs) {
      if (d.fallback) resolved[d.name] = *d.fallback;
    }
    if (!parsed.config_path.empty()) {
      KeyValues file;
      try {
        file = parse_config_text(read_file(parsed.config_path));
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& e) {
        throw ConfigError("cannot read config '" + parsed.config_path + "': " + e.what());
      }
      for (const auto& [k, v] : file) {
        const bool known = std::any_of(defs.begin(), defs.end(), [&](const KeyDef& d) { return d.name == k; });
        if (!known) throw ConfigError("unknown key '" + k + "' for " + parsed.command);
        resolved[k] = v;
      }
    }
    for (const auto& [k, v] : parsed.flags) resolved[k] = v;
    for (const auto& d : defs) {
      if (!resolved.count(d.name)) throw ConfigError("missing required key '" + d.name + "'");
    }
    manifest.config = resolved;
    manifest.config_hash = hex16(config_hash(resolved));
    const Resolved cfg(resolved);
    if (resolved.count("seed")) manifest.seed = static_cast<std::uint64_t>(cfg.integer("seed"));
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + out_dir.string() + "': " + ec.message());
    const Context ctx{cfg, out_dir, out, manifest};
    dispatch(parsed.command, ctx);
  } catch (const ConfigError& e) {
    code = kExitConfig;
    manifest.error = e.what();
    err << "configuration error: " << e.what() << "\n";
  } catch (const AssertionFailure& e) {
    code = kExitAssertion;
    manifest.error = e.what();
    err << "assertion failed: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    code = kExitConfig;
    manifest.error = e.what();
    err << "configuration error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    code = kExitAssertion;
    manifest.error = e.what();
    err << "run failed: " << e.what() << "\n";
  }
  manifest.exit_code = code;
  manifest.finished = utc_now();
  try {
    std::error_code ec;
    if (fs::is_directory(out_dir, ec)) write_file_atomic(out_dir / kManifestName, to_json(manifest));
  } catch (const std::exception& e) {
    err << "cannot write manifest: " << e.what() << "\n";
  }
  return code;
}

}  // namespace hokdv::cli
