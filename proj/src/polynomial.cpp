#include "hokdv/polynomial.hpp"

#include <sstream>
#include <stdexcept>

namespace hokdv::resonance {

Polynomial Polynomial::constant(const Integer& c) {
  Polynomial p;
  p.add_term({0, 0, 0}, c);
  return p;
}

Polynomial Polynomial::variable(int var) {
  Polynomial p;
  Exponents e{0, 0, 0};
  e.at(var) = 1;
  p.add_term(e, 1);
  return p;
}

void Polynomial::add_term(const Exponents& e, const Integer& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2]);
  return d;
}

Polynomial Polynomial::pow(int k) const {
  Polynomial result = constant(1);
  for (int i = 0; i < k; ++i) result = result * *this;
  return result;
}

Polynomial Polynomial::divide_by_variable(int var) const {
  Polynomial q;
  for (const auto& [e, c] : terms_) {
    if (e.at(var) == 0) throw std::domain_error("monomial division leaves a remainder");
    Exponents lowered = e;
    --lowered[var];
    q.add_term(lowered, c);
  }
  return q;
}

Polynomial Polynomial::divide_by_sum(int a, int b) const {
  // Repeatedly cancel the term of highest degree in x_a:
  //   c x_a^d r = (x_a + x_b) c x_a^{d-1} r - c x_a^{d-1} x_b r.
  Polynomial rem = *this;
  Polynomial q;
  while (true) {
    const Exponents* lead = nullptr;
    for (const auto& [e, c] : rem.terms_) {
      if (e[a] > 0 && (lead == nullptr || e[a] > (*lead)[a])) lead = &e;
    }
    if (lead == nullptr) break;
    Exponents e = *lead;
    const Integer c = rem.terms_.at(e);
    Exponents shifted = e;
    --shifted[a];
    q.add_term(shifted, c);
    rem.add_term(e, -c);
    Exponents cross = shifted;
    ++cross[b];
    rem.add_term(cross, -c);
  }
  if (!rem.is_zero()) throw std::domain_error("division by a linear form leaves a remainder");
  return q;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  static const char* names[3] = {"x", "y", "z"};
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    const Integer mag = c < 0 ? Integer(-c) : c;
    const bool bare = e[0] + e[1] + e[2] == 0;
    if (mag != 1 || bare) os << mag;
    for (int v = 0; v < 3; ++v) {
      if (e[v] == 0) continue;
      os << names[v];
      if (e[v] > 1) os << "^" << e[v];
    }
  }
  return os.str();
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  Polynomial r = a;
  for (const auto& [e, c] : b.terms_) r.add_term(e, c);
  return r;
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  Polynomial r = a;
  for (const auto& [e, c] : b.terms_) r.add_term(e, -c);
  return r;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial r;
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      r.add_term({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, ca * cb);
    }
  }
  return r;
}

}  // namespace hokdv::resonance
