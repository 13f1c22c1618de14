#include "hokdv/resonance.hpp"

#include <limits>
#include <ostream>
#include <sstream>

#include "hokdv/parallel.hpp"

namespace hokdv::resonance {

namespace {

constexpr std::size_t kMaxStoredFailures = 16;

Rational abs_value(const Rational& q) { return q < 0 ? Rational(-q) : q; }

std::string tuple_string(std::span<const Integer> xs) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? ", " : "") << xs[i];
  os << ")";
  return os.str();
}

}  // namespace

FreqTuple::FreqTuple(std::vector<Rational> entries, int j, bool degenerate_probe)
    : entries_(std::move(entries)), j_(j), degenerate_(degenerate_probe) {
  if (entries_.size() < 3 || entries_.size() > 5) {
    throw std::invalid_argument("frequency tuples carry 3, 4 or 5 entries");
  }
  if (j < 1) throw std::invalid_argument("dispersion order j must be >= 1");
  Rational sum = 0;
  for (const auto& e : entries_) {
    sum += e;
    if (e == 0 && !degenerate_) {
      throw std::invalid_argument("zero frequency in a tuple not flagged as a degenerate probe");
    }
  }
  if (sum != 0) throw std::invalid_argument("tuple entries must sum to zero");
}

FreqTuple FreqTuple::lattice(std::initializer_list<long long> entries, int j,
                             bool degenerate_probe) {
  std::vector<Rational> v;
  for (long long e : entries) v.emplace_back(e);
  return FreqTuple(std::move(v), j, degenerate_probe);
}

Rational p_n(const FreqTuple& t) {
  if (t.size() != 3 && t.size() != 4) throw std::invalid_argument("p_n needs 3 or 4 entries");
  return power_sum<Rational>(t.entries(), t.j());
}

std::optional<Rational> q_n(const FreqTuple& t) {
  const Rational pre = prefactor<Rational>(t.entries());
  if (pre == 0) return std::nullopt;
  return p_n(t) / pre;
}

Imaginary<Rational> alpha_n(const FreqTuple& t) {
  return Imaginary<Rational>{power_sum<Rational>(t.entries(), t.j())};
}

Polynomial cofactor3(int j) {
  if (j < 1) throw std::invalid_argument("j must be >= 1");
  const int n = 2 * j + 1;
  const Polynomial x = Polynomial::variable(0);
  const Polynomial y = Polynomial::variable(1);
  // -P3 with z = -x-y, over x y (x+y) = -xyz.
  const Polynomial num = (x + y).pow(n) - x.pow(n) - y.pow(n);
  return num.divide_by_variable(0).divide_by_variable(1).divide_by_sum(0, 1);
}

Polynomial cofactor4(int j) {
  if (j < 1) throw std::invalid_argument("j must be >= 1");
  const int n = 2 * j + 1;
  const Polynomial x = Polynomial::variable(0);
  const Polynomial y = Polynomial::variable(1);
  const Polynomial z = Polynomial::variable(2);
  // -P4 with w = -x-y-z, over (x+y)(x+z)(y+z) = -(x+y)(x+z)(x+w).
  const Polynomial num = (x + y + z).pow(n) - x.pow(n) - y.pow(n) - z.pow(n);
  return num.divide_by_sum(0, 1).divide_by_sum(0, 2).divide_by_sum(1, 2);
}

namespace {

struct Partial {
  std::uint64_t count = 0;
  std::uint64_t resonant = 0;
  std::optional<Rational> min_ratio;
  std::optional<Rational> max_ratio;
  std::uint64_t failure_count = 0;
  std::vector<std::string> failures;
  std::string csv;
};

// Checks one tuple on either hyperplane and folds the outcome into `part`.
void check_tuple(std::span<const Integer> xs, int j, const Polynomial& cofactor, Partial& part,
                 bool want_csv) {
  const Integer p = power_sum<Integer>(xs, j);
  const Integer pre = prefactor<Integer>(xs);
  const Integer z = xs.size() == 4 ? xs[2] : Integer(0);
  const Integer q_poly = cofactor.evaluate<Integer>(xs[0], xs[1], z);

  auto fail = [&](const std::string& why) {
    ++part.failure_count;
    if (part.failures.size() < kMaxStoredFailures) part.failures.push_back(tuple_string(xs) + ": " + why);
  };

  if (pre == 0) {
    ++part.resonant;
    if (p != 0) fail("prefactor vanishes but P is nonzero");
    return;
  }
  ++part.count;
  if (p != pre * q_poly) fail("P != prefactor * Q");
  if (p % pre != 0) {
    fail("prefactor does not divide P");
  } else if (p / pre != q_poly) {
    fail("quotient disagrees with the closed cofactor");
  }

  Integer mx = 0;
  for (const auto& x : xs) mx = std::max(mx, Integer(abs(x)));
  const Rational r = abs_value(Rational(q_poly)) / Rational(ipow(mx, 2 * j - 2));
  if (!part.min_ratio || r < *part.min_ratio) part.min_ratio = r;
  if (!part.max_ratio || r > *part.max_ratio) part.max_ratio = r;
  if (want_csv) {
    std::ostringstream os;
    os << xs.size();
    for (std::size_t i = 0; i < 5; ++i) {
      os << ',';
      if (i < xs.size()) os << xs[i];
    }
    os << ',' << p << ',' << q_poly << ',' << r << '\n';
    part.csv += os.str();
  }
}

FactorizationReport merge(int n, int K, Polynomial cofactor, std::vector<Partial>& parts,
                          std::ostream* csv) {
  FactorizationReport rep;
  rep.n = n;
  rep.K = K;
  rep.cofactor = std::move(cofactor);
  std::optional<Rational> lo, hi;
  for (auto& p : parts) {
    rep.count += p.count;
    rep.resonant += p.resonant;
    rep.failure_count += p.failure_count;
    for (auto& f : p.failures) {
      if (rep.failures.size() < kMaxStoredFailures) rep.failures.push_back(std::move(f));
    }
    if (p.min_ratio && (!lo || *p.min_ratio < *lo)) lo = p.min_ratio;
    if (p.max_ratio && (!hi || *p.max_ratio > *hi)) hi = p.max_ratio;
    if (csv) *csv << p.csv;
  }
  rep.min_ratio = lo.value_or(Rational(0));
  rep.max_ratio = hi.value_or(Rational(0));
  return rep;
}

FactorizationReport verify_gamma3(int j, int K, int threads, std::ostream* csv) {
  const Polynomial cof = cofactor3(j);
  const std::size_t span = 2 * static_cast<std::size_t>(K);
  std::vector<Partial> parts(span);
  auto value = [K](std::size_t i) {
    const int v = static_cast<int>(i) - K;
    return v >= 0 ? v + 1 : v;  // skip 0
  };
  parallel_chunks(span, span, threads, [&](std::size_t c, std::size_t b, std::size_t e) {
    for (std::size_t ix = b; ix < e; ++ix) {
      const int x = value(ix);
      for (std::size_t iy = 0; iy < span; ++iy) {
        const int y = value(iy);
        const int z = -x - y;
        if (z == 0 || z < -K || z > K) continue;
        const Integer xs[3] = {x, y, z};
        check_tuple(xs, j, cof, parts[c], csv != nullptr);
      }
    }
  });
  return merge(3, K, cof, parts, csv);
}

FactorizationReport verify_gamma4(int j, int K, int threads, std::ostream* csv) {
  const Polynomial cof = cofactor4(j);
  const std::size_t span = 2 * static_cast<std::size_t>(K);
  std::vector<Partial> parts(span);
  auto value = [K](std::size_t i) {
    const int v = static_cast<int>(i) - K;
    return v >= 0 ? v + 1 : v;
  };
  parallel_chunks(span, span, threads, [&](std::size_t c, std::size_t b, std::size_t e) {
    for (std::size_t ix = b; ix < e; ++ix) {
      const int x = value(ix);
      for (std::size_t iy = 0; iy < span; ++iy) {
        const int y = value(iy);
        for (std::size_t iz = 0; iz < span; ++iz) {
          const int z = value(iz);
          const int w = -x - y - z;
          if (w == 0 || w < -K || w > K) continue;
          const Integer xs[4] = {x, y, z, w};
          check_tuple(xs, j, cof, parts[c], csv != nullptr);
        }
      }
    }
  });
  return merge(4, K, cof, parts, csv);
}

}  // namespace

VerificationReport verify_factorization(int j, int K, int K4, int threads, std::ostream* csv) {
  if (j < 1) throw std::invalid_argument("j must be >= 1");
  if (K < 2) throw std::invalid_argument("K must be >= 2");
  if (K4 < 0) K4 = K;
  if (K4 < 2) throw std::invalid_argument("K4 must be >= 2");
  if (csv) *csv << "n,k1,k2,k3,k4,k5,P,Q,ratio\n";
  VerificationReport rep;
  rep.j = j;
  rep.gamma3 = verify_gamma3(j, K, threads, csv);
  rep.gamma4 = verify_gamma4(j, K4, threads, csv);
  return rep;
}

std::string VerificationReport::summary() const {
  std::ostringstream os;
  auto line = [&](const FactorizationReport& r) {
    os << "gamma" << r.n << "(|k|<=" << r.K << "): count=" << r.count << " resonant=" << r.resonant
       << " failures=" << r.failure_count << " min_ratio=" << r.min_ratio
       << " (" << r.min_ratio.convert_to<double>() << ")"
       << " max_ratio=" << r.max_ratio << " (" << r.max_ratio.convert_to<double>() << ")";
  };
  os << "j=" << j << " ";
  line(gamma3);
  os << "; ";
  line(gamma4);
  os << (ok() ? " OK" : " FAILED");
  return os.str();
}

std::int64_t lattice_power_sum(std::span<const int> n, int j) {
  __int128 acc = 0;
  for (int v : n) {
    __int128 term = 1;
    for (int e = 0; e < 2 * j + 1; ++e) {
      if (__builtin_mul_overflow(term, static_cast<__int128>(v), &term)) {
        throw std::overflow_error("lattice power overflows");
      }
    }
    if (__builtin_add_overflow(acc, term, &acc)) throw std::overflow_error("lattice sum overflows");
  }
  if (acc > std::numeric_limits<std::int64_t>::max() ||
      acc < std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error("lattice power sum leaves the int64 range");
  }
  return static_cast<std::int64_t>(acc);
}

}  // namespace hokdv::resonance
