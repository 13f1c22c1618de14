#include "hokdv/imethod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "hokdv/resonance.hpp"

namespace hokdv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kResonantTolerance = 1e-10;

constexpr int kPairs4[6][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2},
                               {1, 2, 0, 3}, {1, 3, 0, 2}, {2, 3, 0, 1}};
constexpr int kPairs5[10][5] = {{0, 1, 2, 3, 4}, {0, 2, 1, 3, 4}, {0, 3, 1, 2, 4},
                                {0, 4, 1, 2, 3}, {1, 2, 0, 3, 4}, {1, 3, 0, 2, 4},
                                {1, 4, 0, 2, 3}, {2, 3, 0, 1, 4}, {2, 4, 0, 1, 3},
                                {3, 4, 0, 1, 2}};

std::string tuple_text(std::span<const int> n) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < n.size(); ++i) os << (i ? ", " : "") << n[i];
  os << ")";
  return os.str();
}

}  // namespace

struct EnergyHierarchy::Impl {
  GridSpec grid;
  IMultiplier mult;
  int cutoff = 0;  // merge cutoff
  int R = 0;       // table half-width
  double mu_pow = 1.0;  // mu^{2j+1}
  std::vector<double> m;       // index n + 2R
  std::vector<double> sigma3;  // (a + R) * W + (b + R)
  mutable std::once_flag sigma4_once;
  mutable std::vector<double> sigma4;  // ((a + R) * W + (b + R)) * W + (c + R)
  mutable ResonantAudit audit;

  int width() const { return 2 * R + 1; }
  bool in_box(int v) const { return v >= -R && v <= R; }

  double m_at(int n) const {
    if (n < -2 * R || n > 2 * R) return mult(grid.frequency(n));
    return m[n + 2 * R];
  }

  // sum m^2(k) k over the three entries, in sorted order so the value is
  // bitwise symmetric and odd.
  double m_square_sum(int a, int b, int c) const {
    int v[3] = {a, b, c};
    std::sort(v, v + 3, [](int x, int y) { return std::abs(x) < std::abs(y) || (std::abs(x) == std::abs(y) && x < y); });
    double acc = 0.0;
    for (int n : v) acc += m_at(n) * m_at(n) * grid.frequency(n);
    return acc;
  }

  double sigma3_at(int a, int b, int c) const {
    if (a + b + c != 0 || a == 0 || b == 0 || c == 0 || !in_box(a) || !in_box(b) || !in_box(c)) {
      throw std::out_of_range("sigma3 evaluated off its table at " +
                              tuple_text(std::array<int, 3>{a, b, c}));
    }
    return sigma3[(a + R) * width() + (b + R)];
  }

  // M4 = -i (3/2) (1/6) sum over pairs of sigma3(rest, pair) * pair, returned as
  // the real factor of -i/4 together with the largest |term|.
  double m4_sum(std::span<const int> n, double* max_term) const {
    double acc = 0.0, big = 0.0;
    for (const auto& p : kPairs4) {
      const int ps = n[p[0]] + n[p[1]];
      if (ps == 0 || ps > cutoff || ps < -cutoff) continue;
      const double term = sigma3_at(n[p[2]], n[p[3]], ps) * grid.frequency(ps);
      acc += term;
      big = std::max(big, std::abs(term));
    }
    if (max_term) *max_term = big;
    return acc;
  }

  void build_sigma4() const {
    const int W = width();
    sigma4.assign(static_cast<std::size_t>(W) * W * W, kNaN);
    ResonantAudit a;
    for (int x = -R; x <= R; ++x) {
      if (x == 0) continue;
      for (int y = -R; y <= R; ++y) {
        if (y == 0) continue;
        for (int z = -R; z <= R; ++z) {
          const int w = -x - y - z;
          if (z == 0 || w == 0 || !in_box(w)) continue;
          const int n[4] = {x, y, z, w};
          double big = 0.0;
          const double acc = m4_sum(n, &big);
          const std::int64_t S = resonance::lattice_power_sum(n, grid.j);
          double value;
          if (S == 0) {
            const double m4 = std::abs(acc) / 4.0;
            const double rel = big > 0.0 ? (std::abs(acc) / big) : (acc == 0.0 ? 0.0 : 1.0);
            ++a.resonant_tuples;
            a.max_relative = std::max(a.max_relative, rel);
            a.max_abs = std::max(a.max_abs, m4);
            if (rel > kResonantTolerance) {
              std::ostringstream os;
              os << "M4 does not vanish on the resonant tuple " << tuple_text(n) << ": |M4| = " << m4
                 << ", largest term " << big;
              throw std::logic_error(os.str());
            }
            value = 0.0;
          } else {
            // sigma4 = -M4 / alpha4 with M4 = -i acc / 4 and alpha4 = i S / mu^{2j+1}.
            value = acc * mu_pow / (4.0 * static_cast<double>(S));
          }
          sigma4[(static_cast<std::size_t>(x + R) * W + (y + R)) * W + (z + R)] = value;
        }
      }
    }
    audit = a;
  }

  double sigma4_at(std::span<const int> n) const {
    std::call_once(sigma4_once, [this] { build_sigma4(); });
    if (n[0] + n[1] + n[2] + n[3] != 0 || !in_box(n[0]) || !in_box(n[1]) || !in_box(n[2]) ||
        !in_box(n[3])) {
      throw std::out_of_range("sigma4 evaluated off its table at " + tuple_text(n));
    }
    const int W = width();
    const double v =
        sigma4[(static_cast<std::size_t>(n[0] + R) * W + (n[1] + R)) * W + (n[2] + R)];
    if (std::isnan(v)) throw std::out_of_range("sigma4 needs nonzero entries, got " + tuple_text(n));
    return v;
  }
};

EnergyHierarchy::EnergyHierarchy(const GridSpec& grid, const IMultiplier& mult, int merge_cutoff) {
  auto impl = std::make_shared<Impl>();
  impl->grid = grid;
  impl->mult = mult;
  if (merge_cutoff < 0 || merge_cutoff > 2 * grid.K) {
    throw std::invalid_argument("merge cutoff must lie in [1, 2K]");
  }
  impl->cutoff = merge_cutoff == 0 ? grid.K : merge_cutoff;
  impl->R = std::max(grid.K, impl->cutoff);
  impl->mu_pow = std::pow(grid.mu, 2 * grid.j + 1);
  const int R = impl->R;
  impl->m.resize(4 * R + 1);
  for (int n = -2 * R; n <= 2 * R; ++n) impl->m[n + 2 * R] = mult(grid.frequency(n));

  const int W = impl->width();
  impl->sigma3.assign(static_cast<std::size_t>(W) * W, kNaN);
  for (int a = -R; a <= R; ++a) {
    for (int b = -R; b <= R; ++b) {
      const int c = -a - b;
      if (a == 0 || b == 0 || c == 0 || c < -R || c > R) continue;
      const int n[3] = {a, b, c};
      const std::int64_t S = resonance::lattice_power_sum(n, grid.j);
      if (S == 0) {
        throw std::logic_error("alpha3 vanishes on the nonzero tuple " + tuple_text(n));
      }
      const double msum = impl->m_square_sum(a, b, c);
      // sigma3 = -M3 / alpha3, M3 = (i/3) msum, alpha3 = i S / mu^{2j+1}.
      impl->sigma3[(a + R) * W + (b + R)] = -msum * impl->mu_pow / (3.0 * static_cast<double>(S));
    }
  }
  impl_ = std::move(impl);
}

const GridSpec& EnergyHierarchy::grid() const { return impl_->grid; }
const IMultiplier& EnergyHierarchy::multiplier() const { return impl_->mult; }
int EnergyHierarchy::merge_cutoff() const { return impl_->cutoff; }
double EnergyHierarchy::m(int n) const { return impl_->m_at(n); }

Complex EnergyHierarchy::big_m3(int a, int b, int c) const {
  const auto& I = *impl_;
  return Complex(0.0, I.m_square_sum(a, b, c) / 3.0);
}

double EnergyHierarchy::sigma3(int a, int b, int c) const { return impl_->sigma3_at(a, b, c); }

Complex EnergyHierarchy::big_m4(std::span<const int> n) const {
  if (n.size() != 4) throw std::invalid_argument("M4 takes four indices");
  return Complex(0.0, -impl_->m4_sum(n, nullptr) / 4.0);
}

double EnergyHierarchy::sigma4(std::span<const int> n) const {
  if (n.size() != 4) throw std::invalid_argument("sigma4 takes four indices");
  return impl_->sigma4_at(n);
}

Complex EnergyHierarchy::big_m5(std::span<const int> n) const {
  if (n.size() != 5) throw std::invalid_argument("M5 takes five indices");
  const auto& I = *impl_;
  double acc = 0.0;
  for (const auto& p : kPairs5) {
    const int ps = n[p[0]] + n[p[1]];
    if (ps == 0 || ps > I.cutoff || ps < -I.cutoff) continue;
    const int args[4] = {n[p[2]], n[p[3]], n[p[4]], ps};
    acc += I.sigma4_at(args) * I.grid.frequency(ps);
  }
  // -2i (1/10) sum over the ten pairs
  return Complex(0.0, -acc / 5.0);
}

Complex EnergyHierarchy::m3_generator(std::span<const int> n) const {
  const auto& I = *impl_;
  const int ps = n[1] + n[2];
  return Complex(0.0, -I.m_at(n[0]) * I.m_at(ps) * I.grid.frequency(ps));
}

Complex EnergyHierarchy::m4_generator(std::span<const int> n) const {
  const auto& I = *impl_;
  const int ps = n[2] + n[3];
  if (ps == 0 || ps > I.cutoff || ps < -I.cutoff) return {};
  return Complex(0.0, -1.5 * I.sigma3_at(n[0], n[1], ps) * I.grid.frequency(ps));
}

Complex EnergyHierarchy::m5_generator(std::span<const int> n) const {
  const auto& I = *impl_;
  const int ps = n[3] + n[4];
  if (ps == 0 || ps > I.cutoff || ps < -I.cutoff) return {};
  const int args[4] = {n[0], n[1], n[2], ps};
  return Complex(0.0, -2.0 * I.sigma4_at(args) * I.grid.frequency(ps));
}

MultilinearForm EnergyHierarchy::form(FormTag tag) const {
  const EnergyHierarchy self = *this;
  const double mu = impl_->grid.mu;
  switch (tag) {
    case FormTag::kM3:
      return MultilinearForm(
          3, tag, [self](std::span<const int> n) { return self.big_m3(n[0], n[1], n[2]); }, mu);
    case FormTag::kSigma3:
      return MultilinearForm(
          3, tag, [self](std::span<const int> n) { return Complex(self.sigma3(n[0], n[1], n[2])); },
          mu);
    case FormTag::kM4:
      return MultilinearForm(4, tag, [self](std::span<const int> n) { return self.big_m4(n); }, mu);
    case FormTag::kSigma4:
      return MultilinearForm(
          4, tag, [self](std::span<const int> n) { return Complex(self.sigma4(n)); }, mu);
    case FormTag::kM5:
      return MultilinearForm(5, tag, [self](std::span<const int> n) { return self.big_m5(n); }, mu);
    default:
      throw std::invalid_argument("hierarchy has no form tagged " + to_string(tag));
  }
}

double EnergyHierarchy::energy(const FourierField& u, int order, int threads) const {
  if (order < 2 || order > 4) throw std::invalid_argument("energy order must be 2, 3 or 4");
  if (!(u.grid() == impl_->grid)) throw std::invalid_argument("field grid differs from hierarchy grid");
  double e2 = 0.0;
  for (int n = 1; n <= u.K(); ++n) e2 += std::pow(impl_->m_at(n), 2) * std::norm(u.coeffs()[n - 1]);
  double e = 2.0 * u.grid().length() * e2;
  if (order >= 3) e += checked_real(lambda_n(form(FormTag::kSigma3), u, threads), "Lambda_3(sigma3)");
  if (order >= 4) e += checked_real(lambda_n(form(FormTag::kSigma4), u, threads), "Lambda_4(sigma4)");
  return e;
}

double EnergyHierarchy::energy_rate(const FourierField& u, int order, int threads) const {
  if (order < 2 || order > 4) throw std::invalid_argument("energy order must be 2, 3 or 4");
  static constexpr FormTag next[] = {FormTag::kM3, FormTag::kM4, FormTag::kM5};
  static constexpr const char* names[] = {"Lambda_3(M3)", "Lambda_4(M4)", "Lambda_5(M5)"};
  return checked_real(lambda_n(form(next[order - 2]), u, threads), names[order - 2]);
}

ResonantAudit EnergyHierarchy::resonant_audit() const {
  std::call_once(impl_->sigma4_once, [this] { impl_->build_sigma4(); });
  return impl_->audit;
}

MultilinearForm big_m3(const IMultiplier& mult, const GridSpec& grid, M3Route route) {
  const EnergyHierarchy h(grid, mult);
  if (route == M3Route::kClosedForm) return h.form(FormTag::kM3);
  return symmetrize(MultilinearForm(
      3, FormTag::kM3, [h](std::span<const int> n) { return h.m3_generator(n); }, grid.mu));
}

MultilinearForm sigma3(const IMultiplier& mult, const GridSpec& grid) {
  return EnergyHierarchy(grid, mult).form(FormTag::kSigma3);
}

MultilinearForm big_m4(const IMultiplier& mult, const GridSpec& grid) {
  return EnergyHierarchy(grid, mult).form(FormTag::kM4);
}

MultilinearForm sigma4(const IMultiplier& mult, const GridSpec& grid) {
  return EnergyHierarchy(grid, mult).form(FormTag::kSigma4);
}

MultilinearForm big_m5(const IMultiplier& mult, const GridSpec& grid) {
  return EnergyHierarchy(grid, mult).form(FormTag::kM5);
}

double modified_energy(const FourierField& u, const IMultiplier& mult, int order) {
  return EnergyHierarchy(u.grid(), mult).energy(u, order);
}

}  // namespace hokdv
