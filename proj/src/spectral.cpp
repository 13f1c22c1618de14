#include "hokdv/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace hokdv {

struct Transformer::Impl {
  Eigen::FFT<double> fft;
  std::vector<Complex> spectrum;
  std::vector<Complex> values;
};

Transformer::Transformer(int points) : points_(points), impl_(std::make_unique<Impl>()) {
  if (points < 1) throw std::invalid_argument("transform size must be positive");
  impl_->fft.SetFlag(Eigen::FFT<double>::Unscaled);
  impl_->spectrum.resize(points);
  impl_->values.resize(points);
}

Transformer::~Transformer() = default;
Transformer::Transformer(Transformer&&) noexcept = default;
Transformer& Transformer::operator=(Transformer&&) noexcept = default;

void Transformer::to_physical(const Eigen::Ref<const Eigen::VectorXcd>& coeffs,
                              Eigen::Ref<Eigen::VectorXd> samples) {
  const int K = static_cast<int>(coeffs.size());
  if (2 * K >= points_) {
    throw std::invalid_argument("transform size " + std::to_string(points_) +
                                " cannot represent K = " + std::to_string(K));
  }
  if (samples.size() != points_) throw std::invalid_argument("sample buffer length mismatch");
  auto& spec = impl_->spectrum;
  std::fill(spec.begin(), spec.end(), Complex{});
  for (int n = 1; n <= K; ++n) {
    spec[n] = coeffs[n - 1];
    spec[points_ - n] = std::conj(coeffs[n - 1]);
  }
  impl_->fft.inv(impl_->values, spec);
  for (int m = 0; m < points_; ++m) samples[m] = impl_->values[m].real();
}

void Transformer::from_physical(const Eigen::Ref<const Eigen::VectorXd>& samples,
                                Eigen::Ref<Eigen::VectorXcd> coeffs) {
  if (samples.size() != points_) throw std::invalid_argument("sample buffer length mismatch");
  const int K = static_cast<int>(coeffs.size());
  if (2 * K >= points_) {
    throw std::invalid_argument("transform size too small for requested modes");
  }
  auto& vals = impl_->values;
  for (int m = 0; m < points_; ++m) vals[m] = Complex(samples[m], 0.0);
  impl_->fft.fwd(impl_->spectrum, vals);
  const double scale = 1.0 / points_;
  for (int n = 1; n <= K; ++n) coeffs[n - 1] = impl_->spectrum[n] * scale;
}

Eigen::VectorXd transform(const FourierField& u) {
  return transform(u, u.grid().physical_points);
}

Eigen::VectorXd transform(const FourierField& u, int points) {
  Transformer t(points);
  Eigen::VectorXd samples(points);
  t.to_physical(u.coeffs(), samples);
  return samples;
}

FourierField inverse(const Eigen::Ref<const Eigen::VectorXd>& samples, const GridSpec& grid) {
  if (samples.size() != grid.physical_points) {
    throw std::invalid_argument("expected " + std::to_string(grid.physical_points) +
                                " samples, got " + std::to_string(samples.size()));
  }
  Transformer t(grid.physical_points);
  Eigen::VectorXcd coeffs(grid.K);
  t.from_physical(samples, coeffs);
  return FourierField(grid, std::move(coeffs));
}

bool Band::contains(double k) const {
  const double a = std::abs(k);
  switch (kind) {
    case Kind::kLow: return a <= N;
    case Kind::kHigh: return a >= N;
    case Kind::kDyadic: return a >= N && a < 2.0 * N;
  }
  return false;
}

FourierField project(const FourierField& u, const Band& band) {
  if (!(band.N > 0.0)) throw std::invalid_argument("projection band N must be positive");
  const GridSpec& g = u.grid();
  Eigen::VectorXcd c = u.coeffs();
  for (int n = 1; n <= g.K; ++n) {
    if (!band.contains(g.frequency(n))) c[n - 1] = Complex{};
  }
  return FourierField(g, std::move(c));
}

FourierField derivative(const FourierField& u, int m) {
  if (m < -1) throw std::invalid_argument("derivative order must be >= -1");
  const GridSpec& g = u.grid();
  Eigen::VectorXcd c = u.coeffs();
  for (int n = 1; n <= g.K; ++n) {
    const Complex ik(0.0, g.frequency(n));
    c[n - 1] *= std::pow(ik, m);
  }
  return FourierField(g, std::move(c));
}

namespace {

template <class Weight>
double weighted_norm(const FourierField& u, Weight&& weight) {
  const GridSpec& g = u.grid();
  double acc = 0.0;
  for (int n = 1; n <= g.K; ++n) acc += weight(g.frequency(n)) * std::norm(u.coeffs()[n - 1]);
  return std::sqrt(2.0 * g.length() * acc);
}

}  // namespace

double sobolev_norm(const FourierField& u, double s) {
  return weighted_norm(u, [s](double k) { return std::pow(1.0 + k * k, s); });
}

double homogeneous_sobolev_norm(const FourierField& u, double s) {
  return weighted_norm(u, [s](double k) { return std::pow(std::abs(k), 2.0 * s); });
}

double l2_inner(const FourierField& u, const FourierField& v) {
  require_same_grid(u, v);
  double acc = 0.0;
  for (int n = 1; n <= u.K(); ++n) {
    acc += (u.coeffs()[n - 1] * std::conj(v.coeffs()[n - 1])).real();
  }
  return 2.0 * u.grid().length() * acc;
}

double symplectic_form(const FourierField& u, const FourierField& v) {
  require_same_grid(u, v);
  const GridSpec& g = u.grid();
  // int u w, w = d^{-1} v, summed over +-n: 2 L sum Re(c_u conj(c_v / (ik)))
  double acc = 0.0;
  for (int n = 1; n <= g.K; ++n) {
    acc += (u.coeffs()[n - 1] * std::conj(v.coeffs()[n - 1])).imag() / g.frequency(n);
  }
  return -2.0 * g.length() * acc;
}

Complex symplectic_coordinate(const FourierField& u, int n) {
  return std::sqrt(2.0 * u.grid().length()) * u.coeff(n);
}

FourierField from_symplectic_coordinates(const GridSpec& grid,
                                         const Eigen::Ref<const Eigen::VectorXcd>& F) {
  if (F.size() > grid.K) throw std::invalid_argument("too many symplectic coordinates");
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(grid.K);
  c.head(F.size()) = F / std::sqrt(2.0 * grid.length());
  return FourierField(grid, std::move(c));
}

double cubic_integral(const FourierField& u) {
  const GridSpec& g = u.grid();
  const int points = transform_size(4 * g.K + 1, g.dealias);
  const Eigen::VectorXd x = transform(u, points);
  return g.length() * x.array().cube().sum() / points;
}

ConservedReport conserved_quantities(const FourierField& u, double timestamp) {
  const GridSpec& g = u.grid();
  ConservedReport r;
  r.timestamp = timestamp;
  r.mass = 0.0;  // no zero mode
  double energy = 0.0;
  double gradient = 0.0;
  for (int n = 1; n <= g.K; ++n) {
    const double a = std::norm(u.coeffs()[n - 1]);
    energy += a;
    gradient += std::pow(g.frequency(n), 2 * g.j) * a;
  }
  r.l2_energy = 2.0 * g.length() * energy;
  r.hamiltonian = 0.5 * 2.0 * g.length() * gradient - cubic_integral(u) / 6.0;
  return r;
}

}  // namespace hokdv
