#include "hokdv/symplectic.hpp"

#include <stdexcept>

#include "hokdv/parallel.hpp"

namespace hokdv {

Eigen::VectorXd to_real_coordinates(const FourierField& u, int modes) {
  if (modes < 1 || modes > u.K()) throw std::invalid_argument("coordinate modes outside [1, K]");
  Eigen::VectorXd x(2 * modes);
  for (int n = 1; n <= modes; ++n) {
    const Complex h = u.hat(n);
    x[2 * (n - 1)] = h.real();
    x[2 * (n - 1) + 1] = h.imag();
  }
  return x;
}

FourierField from_real_coordinates(const GridSpec& grid, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() % 2 != 0 || x.size() / 2 > grid.K) {
    throw std::invalid_argument("coordinate vector has the wrong length");
  }
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(grid.K);
  for (Eigen::Index n = 1; n <= x.size() / 2; ++n) {
    c[n - 1] = Complex(x[2 * (n - 1)], x[2 * (n - 1) + 1]) / grid.length();
  }
  return FourierField(grid, std::move(c));
}

Eigen::MatrixXd symplectic_matrix(const GridSpec& grid, int modes) {
  const int d = 2 * modes;
  std::vector<FourierField> basis;
  basis.reserve(d);
  for (int p = 0; p < d; ++p) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    e[p] = 1.0;
    basis.push_back(from_real_coordinates(grid, e));
  }
  Eigen::MatrixXd W(d, d);
  for (int p = 0; p < d; ++p) {
    for (int q = 0; q < d; ++q) W(p, q) = symplectic_form(basis[p], basis[q]);
  }
  return W;
}

Eigen::MatrixXd flow_jacobian(const FourierField& u0, const FlowSpec& spec, double h, int threads) {
  if (spec.flavor != FlowFlavor::kTruncated) {
    throw std::invalid_argument("flow_jacobian needs the truncated flavor");
  }
  validate(spec);
  const int modes = spec.active_cutoff();
  const int d = 2 * modes;
  if (d > 64) throw std::invalid_argument("Jacobian dimension " + std::to_string(d) + " exceeds 64");
  if (modes < 1) throw std::invalid_argument("truncation keeps no modes");
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  const Eigen::VectorXd x0 = to_real_coordinates(project(u0, Band::low(spec.N)), modes);
  Eigen::MatrixXd J(d, d);
  parallel_chunks(d, d, threads, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t q = b; q < e; ++q) {
      Eigen::VectorXd xp = x0, xm = x0;
      xp[q] += h;
      xm[q] -= h;
      const auto up = evolve(from_real_coordinates(spec.grid, xp), spec);
      const auto um = evolve(from_real_coordinates(spec.grid, xm), spec);
      J.col(q) = (to_real_coordinates(up, modes) - to_real_coordinates(um, modes)) / (2.0 * h);
    }
  });
  return J;
}

Eigen::MatrixXd linear_jacobian(const GridSpec& grid, int modes, double T) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
  for (int n = 1; n <= modes; ++n) {
    const Complex p = linear_phase(grid, n, T);
    const int i = 2 * (n - 1);
    J(i, i) = p.real();
    J(i, i + 1) = -p.imag();
    J(i + 1, i) = p.imag();
    J(i + 1, i + 1) = p.real();
  }
  return J;
}

double check_symplectic(const Eigen::Ref<const Eigen::MatrixXd>& J, const GridSpec& grid) {
  if (J.rows() != J.cols()) throw std::invalid_argument("Jacobian must be square");
  if (J.rows() % 2 != 0) throw std::invalid_argument("Jacobian must have even dimension");
  const Eigen::MatrixXd W = symplectic_matrix(grid, static_cast<int>(J.rows() / 2));
  return (J.transpose() * W * J - W).cwiseAbs().maxCoeff();
}

}  // namespace hokdv
