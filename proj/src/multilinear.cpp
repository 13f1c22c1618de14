#include "hokdv/multilinear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "hokdv/parallel.hpp"

namespace hokdv {

std::string to_string(FormTag tag) {
  switch (tag) {
    case FormTag::kConstant: return "constant";
    case FormTag::kM3: return "M3";
    case FormTag::kSigma3: return "sigma3";
    case FormTag::kM4: return "M4";
    case FormTag::kSigma4: return "sigma4";
    case FormTag::kM5: return "M5";
    case FormTag::kCustom: return "custom";
  }
  return "custom";
}

MultilinearForm::MultilinearForm(int arity, FormTag tag, Weight weight, double mu)
    : arity_(arity), tag_(tag), weight_(std::move(weight)), mu_(mu) {
  if (arity < 2) throw std::invalid_argument("multilinear forms need arity >= 2");
  if (!weight_) throw std::invalid_argument("multilinear form without a symbol");
}

MultilinearForm MultilinearForm::on_frequencies(
    int arity, double mu, std::function<Complex(std::span<const double>)> symbol, FormTag tag) {
  return MultilinearForm(
      arity, tag,
      [arity, mu, symbol = std::move(symbol)](std::span<const int> n) {
        double k[8];
        for (int i = 0; i < arity; ++i) k[i] = n[i] / mu;
        return symbol(std::span<const double>(k, arity));
      },
      mu);
}

MultilinearForm MultilinearForm::constant(int arity, Complex value, double mu) {
  return MultilinearForm(arity, FormTag::kConstant, [value](std::span<const int>) { return value; },
                         mu);
}

MultilinearForm symmetrize(const MultilinearForm& form) {
  const int n = form.arity();
  if (n > 8) throw std::invalid_argument("symmetrize supports arity <= 8");
  return MultilinearForm(
      n, form.tag(),
      [form, n](std::span<const int> idx) {
        int perm[8];
        std::iota(perm, perm + n, 0);
        int args[8];
        Complex acc{};
        long count = 0;
        do {
          for (int i = 0; i < n; ++i) args[i] = idx[perm[i]];
          acc += form(std::span<const int>(args, n));
          ++count;
        } while (std::next_permutation(perm, perm + n));
        return acc / static_cast<double>(count);
      },
      form.mu());
}

namespace {

struct Partial {
  Complex value{};
  double magnitude = 0.0;
  Partial operator+(const Partial& o) const { return {value + o.value, magnitude + o.magnitude}; }
};

// Walks the hyperplane for one fixed first index.
class HyperplaneWalker {
 public:
  HyperplaneWalker(const MultilinearForm& form, const std::vector<std::vector<Complex>>& table,
                   int K)
      : form_(form), table_(table), K_(K), n_(form.arity()), idx_(n_) {}

  Partial run(int first) {
    Partial p;
    idx_[0] = first;
    descend(1, first, table_[0][first + K_], p);
    return p;
  }

 private:
  void descend(int depth, int partial, Complex prod, Partial& out) {
    if (depth == n_ - 1) {
      const int last = -partial;
      if (last == 0 || last > K_ || last < -K_) return;
      idx_[depth] = last;
      const Complex c = table_[depth][last + K_];
      if (c == Complex{} || prod == Complex{}) return;
      const Complex term = form_(idx_) * prod * c;
      out.value += term;
      out.magnitude += std::abs(term);
      return;
    }
    const int remaining = n_ - 1 - depth;  // entries still free after this one
    for (int v = -K_; v <= K_; ++v) {
      if (v == 0) continue;
      const int s = partial + v;
      if (s > K_ * remaining || s < -K_ * remaining) continue;
      const Complex c = table_[depth][v + K_];
      if (c == Complex{}) continue;
      idx_[depth] = v;
      descend(depth + 1, s, prod * c, out);
    }
  }

  const MultilinearForm& form_;
  const std::vector<std::vector<Complex>>& table_;
  int K_;
  int n_;
  std::vector<int> idx_;
};

}  // namespace

LambdaValue lambda_n(const MultilinearForm& form, std::span<const FourierField* const> fields,
                     int threads) {
  const int n = form.arity();
  if (static_cast<int>(fields.size()) != n) {
    throw std::invalid_argument("form of arity " + std::to_string(n) + " applied to " +
                                std::to_string(fields.size()) + " fields");
  }
  for (const auto* f : fields) require_same_grid(*fields[0], *f);
  const GridSpec& g = fields[0]->grid();
  if (std::abs(form.mu() - g.mu) > 1e-14 * g.mu) {
    throw std::invalid_argument("form and fields use different period parameters");
  }
  const int K = g.K;
  std::vector<std::vector<Complex>> table(n, std::vector<Complex>(2 * K + 1));
  for (int i = 0; i < n; ++i) {
    for (int v = -K; v <= K; ++v) table[i][v + K] = fields[i]->coeff(v);
  }

  const std::size_t blocks = 2 * static_cast<std::size_t>(K);
  std::vector<Partial> parts(blocks);
  parallel_chunks(blocks, blocks, threads, [&](std::size_t, std::size_t b, std::size_t e) {
    HyperplaneWalker walker(form, table, K);
    for (std::size_t i = b; i < e; ++i) {
      const int v = static_cast<int>(i) - K;
      const int first = v >= 0 ? v + 1 : v;
      parts[i] = walker.run(first);
    }
  });
  const Partial total = tree_sum(std::move(parts));
  return {g.length() * total.value, g.length() * total.magnitude};
}

LambdaValue lambda_n(const MultilinearForm& form, const FourierField& u, int threads) {
  std::vector<const FourierField*> fields(form.arity(), &u);
  return lambda_n(form, fields, threads);
}

double checked_real(const LambdaValue& v, const char* what, double tol) {
  const double scale = std::max(v.magnitude, 1e-300);
  if (std::abs(v.value.imag()) > tol * scale) {
    std::ostringstream os;
    os << what << " should be real but has imaginary part " << v.value.imag()
       << " against magnitude " << v.magnitude;
    throw std::logic_error(os.str());
  }
  return v.value.real();
}

}  // namespace hokdv
