// SPDX-License-Identifier: Apache-2.0
//
// Arithmetic in the tower F_q ⊂ F_{q^m} for prime q. Elements are packed as
// the integer sum c_i q^i of their polynomial-basis coordinates, so the
// element with value v < q is the base-field constant v.

#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mrlrc/errors.hpp"

namespace mrlrc {

struct Gf {
  std::uint32_t v = 0;

  constexpr auto operator<=>(const Gf&) const = default;
  constexpr bool is_zero() const { return v == 0; }
};

namespace detail {

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

inline std::uint64_t ipow(std::uint64_t base, unsigned e) {
  std::uint64_t r = 1;
  while (e--) r *= base;
  return r;
}

// Remainder of `num` modulo the monic `den`, coefficients mod q. Both are
// low-degree-first.
inline std::vector<std::uint32_t> poly_rem(std::vector<std::uint32_t> num,
                                           const std::vector<std::uint32_t>& den,
                                           std::uint32_t q) {
  const std::size_t d = den.size() - 1;
  for (std::size_t i = num.size(); i-- > d;) {
    const std::uint32_t c = num[i];
    if (c == 0) continue;
    for (std::size_t j = 0; j <= d; ++j)
      num[i - d + j] = (num[i - d + j] + (q - c) * den[j]) % q;
  }
  num.resize(std::min(num.size(), d));
  return num;
}

// True iff the monic `poly` of degree m has no monic factor of degree
// 1..m/2. Exhaustive, so only for desk-scale q and m.
inline bool is_irreducible(const std::vector<std::uint32_t>& poly, std::uint32_t q) {
  const std::size_t m = poly.size() - 1;
  for (std::size_t d = 1; d <= m / 2; ++d) {
    const std::uint64_t count = ipow(q, static_cast<unsigned>(d));
    for (std::uint64_t t = 0; t < count; ++t) {
      std::vector<std::uint32_t> div(d + 1, 0);
      std::uint64_t x = t;
      for (std::size_t i = 0; i < d; ++i, x /= q) div[i] = static_cast<std::uint32_t>(x % q);
      div[d] = 1;
      const auto rem = poly_rem(poly, div, q);
      if (std::all_of(rem.begin(), rem.end(), [](std::uint32_t c) { return c == 0; }))
        return false;
    }
  }
  return true;
}

}  // namespace detail

/// Pinned irreducible moduli, lowest coefficient first, for the (q, m) pairs
/// used in tests and scenario defaults. The first irreducible monic
/// polynomial in base-q enumeration order, except F_4 and F_25 which use
/// z^2+z+1 and z^2+2.
inline const std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::uint32_t>>&
modulus_table() {
  static const std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::uint32_t>> t = {
      {{2, 1}, {0, 1}},          {{2, 2}, {1, 1, 1}},          {{2, 3}, {1, 1, 0, 1}},
      {{2, 4}, {1, 1, 0, 0, 1}}, {{3, 1}, {0, 1}},             {{3, 2}, {1, 0, 1}},
      {{3, 3}, {1, 2, 0, 1}},    {{3, 4}, {2, 1, 0, 0, 1}},    {{5, 1}, {0, 1}},
      {{5, 2}, {2, 0, 1}},       {{5, 3}, {1, 1, 0, 1}},       {{5, 4}, {2, 0, 0, 0, 1}},
      {{7, 1}, {0, 1}},          {{7, 2}, {1, 0, 1}},          {{7, 3}, {2, 0, 0, 1}},
      {{7, 4}, {1, 1, 0, 0, 1}}, {{11, 1}, {0, 1}},            {{11, 2}, {1, 0, 1}},
      {{11, 3}, {4, 1, 0, 1}},   {{13, 1}, {0, 1}},            {{13, 2}, {2, 0, 1}},
      {{13, 3}, {2, 0, 0, 1}},   {{17, 1}, {0, 1}},            {{17, 2}, {3, 0, 1}},
      {{17, 3}, {3, 1, 0, 1}},   {{17, 7}, {5, 1, 0, 0, 0, 0, 0, 1}},
  };
  return t;
}

/// The extension field F_{q^m} = F_q[z]/(modulus) with Frobenius σ(a) = a^q.
///
/// Immutable after construction. Fields up to 2^20 elements get exp/log
/// tables; larger ones fall back to polynomial multiplication.
class ExtField {
 public:
  static std::shared_ptr<const ExtField> create(std::uint32_t q, std::uint32_t m,
                                                std::vector<std::uint32_t> modulus = {}) {
    return std::shared_ptr<const ExtField>(new ExtField(q, m, std::move(modulus)));
  }

  std::uint32_t q() const { return q_; }
  std::uint32_t m() const { return m_; }
  std::uint32_t order() const { return order_; }
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }

  Gf zero() const { return Gf{0}; }
  Gf one() const { return Gf{1}; }
  /// Smallest element (in packed order) of multiplicative order q^m - 1.
  Gf gamma() const { return gamma_; }
  /// The polynomial-basis generator z (reduced, so z = -c_0 when m = 1).
  Gf theta() const { return theta_; }

  Gf element(std::uint32_t packed) const {
    if (packed >= order_) throw std::out_of_range("element value out of range");
    return Gf{packed};
  }

  Gf from_coords(std::span<const std::uint32_t> coords) const {
    if (coords.size() != m_) throw std::invalid_argument("coordinate vector must have length m");
    std::uint32_t v = 0;
    for (std::size_t i = m_; i-- > 0;) {
      if (coords[i] >= q_) throw std::invalid_argument("coordinate out of range [0, q-1]");
      v = v * q_ + coords[i];
    }
    return Gf{v};
  }

  std::vector<std::uint32_t> coords(Gf a) const {
    std::vector<std::uint32_t> c(m_);
    for (std::uint32_t i = 0; i < m_; ++i, a.v /= q_) c[i] = a.v % q_;
    return c;
  }

  bool in_base_field(Gf a) const { return a.v < q_; }

  Gf add(Gf a, Gf b) const {
    if (q_ == 2) return Gf{a.v ^ b.v};
    std::uint32_t r = 0, p = 1;
    for (std::uint32_t i = 0; i < m_; ++i, a.v /= q_, b.v /= q_, p *= q_)
      r += ((a.v % q_ + b.v % q_) % q_) * p;
    return Gf{r};
  }

  Gf neg(Gf a) const {
    if (q_ == 2) return a;
    std::uint32_t r = 0, p = 1;
    for (std::uint32_t i = 0; i < m_; ++i, a.v /= q_, p *= q_)
      r += ((q_ - a.v % q_) % q_) * p;
    return Gf{r};
  }

  Gf sub(Gf a, Gf b) const { return add(a, neg(b)); }

  Gf mul(Gf a, Gf b) const {
    if (a.v == 0 || b.v == 0) return zero();
    if (!exp_.empty()) return Gf{exp_[log_[a.v] + log_[b.v]]};
    return slow_mul(a, b);
  }

  Gf inv(Gf a) const {
    if (a.v == 0) throw std::domain_error("inverse of zero");
    if (!exp_.empty()) return Gf{exp_[(order_ - 1 - log_[a.v]) % (order_ - 1)]};
    return pow(a, order_ - 2);
  }

  Gf div(Gf a, Gf b) const { return mul(a, inv(b)); }

  Gf pow(Gf a, std::uint64_t e) const {
    if (e == 0) return one();
    if (a.v == 0) return zero();
    if (!exp_.empty()) {
      const std::uint64_t l = (static_cast<std::uint64_t>(log_[a.v]) * (e % (order_ - 1))) % (order_ - 1);
      return Gf{exp_[l]};
    }
    Gf r = one();
    while (e) {
      if (e & 1) r = slow_mul(r, a);
      a = slow_mul(a, a);
      e >>= 1;
    }
    return r;
  }

  /// σ^t(x) = x^(q^t).
  Gf frobenius(Gf x, std::uint64_t t = 1) const {
    t %= m_;
    for (std::uint64_t i = 0; i < t; ++i) x = pow(x, q_);
    return x;
  }

  /// N_i(x) = σ^{i-1}(x) ⋯ σ(x) x, via N_{i+1} = σ(N_i) x.
  Gf truncated_norm(Gf x, std::uint64_t i) const {
    Gf n = one();
    for (std::uint64_t t = 0; t < i; ++t) n = mul(frobenius(n), x);
    return n;
  }

  /// N_m(x) = x^((q^m - 1)/(q - 1)), an element of F_q.
  Gf norm(Gf x) const { return truncated_norm(x, m_); }

 private:
  ExtField(std::uint32_t q, std::uint32_t m, std::vector<std::uint32_t> modulus) : q_(q), m_(m) {
    if (!detail::is_prime(q)) throw ConfigError("field.q must be prime (got " + std::to_string(q) + ")");
    if (m < 1) throw ConfigError("field.m must be >= 1");
    const std::uint64_t order = detail::ipow(q, m);
    if (order > (std::uint64_t{1} << 31)) throw ConfigError("field.q^m too large");
    order_ = static_cast<std::uint32_t>(order);

    if (modulus.empty()) {
      auto it = modulus_table().find({q, m});
      if (it == modulus_table().end())
        throw ConfigError("no pinned modulus for q=" + std::to_string(q) + ", m=" + std::to_string(m) +
                          "; supply field.modulus");
      modulus = it->second;
    }
    if (modulus.size() != m + 1) throw ConfigError("field.modulus must have m+1 coefficients");
    if (modulus.back() != 1) throw ConfigError("field.modulus must be monic");
    for (auto c : modulus)
      if (c >= q) throw ConfigError("field.modulus coefficients must lie in [0, q-1]");
    if (!detail::is_irreducible(modulus, q)) throw ConfigError("field.modulus is reducible over F_q");
    modulus_ = std::move(modulus);

    {
      std::vector<std::uint32_t> z(std::max<std::uint32_t>(m, 2), 0);
      z[1] = 1;
      z = detail::poly_rem(z, modulus_, q_);
      z.resize(m_, 0);
      theta_ = from_coords(z);
    }
    find_gamma();
    if (order_ <= (1u << 20)) build_tables();
  }

  Gf slow_mul(Gf a, Gf b) const {
    const auto ca = coords(a), cb = coords(b);
    std::vector<std::uint32_t> prod(2 * m_ - 1, 0);
    for (std::uint32_t i = 0; i < m_; ++i) {
      if (ca[i] == 0) continue;
      for (std::uint32_t j = 0; j < m_; ++j)
        prod[i + j] = static_cast<std::uint32_t>((prod[i + j] + std::uint64_t{ca[i]} * cb[j]) % q_);
    }
    auto rem = detail::poly_rem(std::move(prod), modulus_, q_);
    rem.resize(m_, 0);
    return from_coords(rem);
  }

  Gf slow_pow(Gf a, std::uint64_t e) const {
    Gf r = one();
    while (e) {
      if (e & 1) r = slow_mul(r, a);
      a = slow_mul(a, a);
      e >>= 1;
    }
    return r;
  }

  void find_gamma() {
    const std::uint64_t n = order_ - 1;
    const auto primes = detail::prime_factors(n);
    for (std::uint32_t v = 1; v < order_; ++v) {
      const Gf c{v};
      bool primitive = slow_pow(c, n) == one();
      for (auto p : primes)
        if (primitive && slow_pow(c, n / p) == one()) primitive = false;
      if (primitive) {
        gamma_ = c;
        return;
      }
    }
    throw std::logic_error("no primitive element found");
  }

  void build_tables() {
    const std::uint32_t n = order_ - 1;
    exp_.assign(2 * std::size_t{n}, 0);
    log_.assign(order_, 0);
    Gf x = one();
    for (std::uint32_t i = 0; i < n; ++i) {
      exp_[i] = x.v;
      log_[x.v] = i;
      x = slow_mul(x, gamma_);
    }
    for (std::uint32_t i = n; i < 2 * n; ++i) exp_[i] = exp_[i - n];
  }

  std::uint32_t q_;
  std::uint32_t m_;
  std::uint32_t order_ = 0;
  std::vector<std::uint32_t> modulus_;
  Gf gamma_{};
  Gf theta_{};
  std::vector<std::uint32_t> exp_;
  std::vector<std::uint32_t> log_;
};

using FieldPtr = std::shared_ptr<const ExtField>;

/// (γ^0, …, γ^{g-1}): representatives of g distinct σ-conjugacy classes.
/// Two nonzero elements are conjugate iff their norms agree.
inline std::vector<Gf> conjugacy_representatives(const ExtField& field, std::uint32_t g) {
  if (g < 1 || g > field.q() - 1)
    throw ConfigError("conjugacy representatives need 1 <= g <= q-1 (g=" + std::to_string(g) +
                      ", q=" + std::to_string(field.q()) + ")");
  std::vector<Gf> reps;
  std::vector<Gf> norms;
  for (std::uint32_t i = 0; i < g; ++i) {
    const Gf a = field.pow(field.gamma(), i);
    const Gf n = field.norm(a);
    if (std::find(norms.begin(), norms.end(), n) != norms.end())
      throw std::logic_error("conjugacy representatives share a norm");
    norms.push_back(n);
    reps.push_back(a);
  }
  return reps;
}

inline std::string to_string(const ExtField& field, Gf a) {
  std::string s = "(";
  const auto c = field.coords(a);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(c[i]);
  }
  return s + ")";
}

}  // namespace mrlrc
