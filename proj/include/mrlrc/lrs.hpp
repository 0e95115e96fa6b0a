// SPDX-License-Identifier: Apache-2.0
//
// Linearized Reed–Solomon codes: c_μ = f(b_μ)·β_μ with locators
// b_μ = a_{i(μ)}·β_μ^{q-1}, one conjugacy class per group.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrlrc/errors.hpp"
#include "mrlrc/galois.hpp"
#include "mrlrc/matrix.hpp"
#include "mrlrc/skew.hpp"

namespace mrlrc {

struct LrsParams {
  FieldPtr field;
  std::uint32_t g = 0;
  std::uint32_t r = 0;
  std::uint32_t k = 0;
  std::uint32_t n = 0;
  std::vector<Gf> a;     // length g
  std::vector<Gf> beta;  // length n, g blocks of r
  std::vector<Gf> b;     // length n

  /// 1-based group of outer position mu.
  std::uint32_t group_of(std::uint32_t mu) const { return mu / r + 1; }
};

/// Locator a·β^{q-1}.
inline Gf lrs_locator(const ExtField& F, Gf a, Gf beta) { return F.mul(a, F.pow(beta, F.q() - 1)); }

/// True when the r entries of `block` are linearly independent over F_q
/// (rank of their m × r coordinate matrix).
inline bool fq_independent(const ExtField& F, std::span<const Gf> block) {
  const FieldPtr base = ExtField::create(F.q(), 1);
  Matrix coords(F.m(), block.size());
  for (std::size_t j = 0; j < block.size(); ++j) {
    const auto c = F.coords(block[j]);
    for (std::uint32_t i = 0; i < F.m(); ++i) coords(i, j) = Gf{c[i]};
  }
  return rank(*base, coords) == block.size();
}

inline void validate(const LrsParams& p) {
  const ExtField& F = *p.field;
  if (p.g < 1 || p.g > F.q() - 1) throw ConfigError("LRS code needs 1 <= g <= q-1");
  if (p.r < 1 || p.r > F.m()) throw ConfigError("LRS code needs 1 <= r <= m");
  if (p.k < 1 || p.k > p.n) throw ConfigError("LRS code needs 1 <= k <= n = r*g");
  if (p.a.size() != p.g || p.beta.size() != p.n || p.b.size() != p.n)
    throw ConfigError("LRS parameter vectors have inconsistent lengths");
  std::vector<Gf> norms;
  for (Gf ai : p.a) {
    const Gf nm = F.norm(ai);
    if (ai.is_zero() || std::find(norms.begin(), norms.end(), nm) != norms.end())
      throw ConfigError("LRS representatives a_i must lie in distinct conjugacy classes");
    norms.push_back(nm);
  }
  for (std::uint32_t i = 0; i < p.g; ++i) {
    if (!fq_independent(F, std::span<const Gf>(p.beta).subspan(i * p.r, p.r)))
      throw ConfigError("LRS multipliers of group " + std::to_string(i + 1) + " are not F_q-linearly independent");
  }
}

/// Deterministic setup: a_i = γ^{i-1}, every β block = (θ^0, …, θ^{r-1}).
/// `beta_override`, when given, replaces the per-group blocks (length n).
inline LrsParams lrs_setup(FieldPtr field, std::uint32_t g, std::uint32_t r, std::uint32_t k,
                           std::optional<std::vector<Gf>> beta_override = std::nullopt) {
  const ExtField& F = *field;
  if (g < 1 || g > F.q() - 1)
    throw ConfigError("code.g violates 1 <= g <= q-1 (g=" + std::to_string(g) + ", q=" + std::to_string(F.q()) + ")");
  if (r < 1 || r > F.m())
    throw ConfigError("code.r violates r <= m (r=" + std::to_string(r) + ", m=" + std::to_string(F.m()) + ")");
  if (k < 1 || k > r * g)
    throw ConfigError("code.k violates 1 <= k <= n = r*g (k=" + std::to_string(k) + ", n=" + std::to_string(r * g) + ")");

  LrsParams p;
  p.field = field;
  p.g = g;
  p.r = r;
  p.k = k;
  p.n = r * g;
  p.a = conjugacy_representatives(F, g);
  if (beta_override) {
    p.beta = *beta_override;
  } else {
    for (std::uint32_t i = 0; i < g; ++i)
      for (std::uint32_t j = 0; j < r; ++j) p.beta.push_back(F.pow(F.theta(), j));
  }
  if (p.beta.size() != p.n) throw ConfigError("beta override must have length n = r*g");
  for (std::uint32_t mu = 0; mu < p.n; ++mu) p.b.push_back(lrs_locator(F, p.a[mu / r], p.beta[mu]));
  validate(p);
  return p;
}

inline std::vector<Gf> lrs_encode(const LrsParams& p, const SkewPoly& f) {
  if (f.degree() && *f.degree() >= p.k)
    throw std::invalid_argument("encoding polynomial degree must be < k (deg=" + std::to_string(*f.degree()) + ")");
  const ExtField& F = *p.field;
  std::vector<Gf> c(p.n);
  for (std::uint32_t mu = 0; mu < p.n; ++mu) c[mu] = F.mul(skew_eval(f, p.b[mu]), p.beta[mu]);
  return c;
}

struct KnownSymbol {
  std::uint32_t position;
  Gf value;
};

namespace detail {

// Recovers f (deg < k) from symbols c_μ = f(loc_μ)·mult_μ. Takes the
// lexicographically smallest k positions with at most `cap` per group, then
// checks that f reproduces every known symbol.
template <class GroupOf>
SkewPoly decode_from_symbols(const FieldPtr& field, std::span<const Gf> locators, std::span<const Gf> multipliers,
                             std::vector<KnownSymbol> known, std::uint32_t k, std::uint32_t cap, GroupOf group_of) {
  const ExtField& F = *field;
  std::sort(known.begin(), known.end(), [](const auto& x, const auto& y) { return x.position < y.position; });
  std::map<std::uint32_t, std::uint32_t> per_group;
  std::vector<InterpolationPoint> pts;
  std::uint32_t last = UINT32_MAX;
  for (const auto& s : known) {
    if (s.position >= locators.size()) throw std::out_of_range("known symbol position out of range");
    if (s.position == last) continue;
    last = s.position;
    if (pts.size() == k) break;
    auto& cnt = per_group[group_of(s.position)];
    if (cnt == cap) continue;
    ++cnt;
    pts.push_back({locators[s.position], F.div(s.value, multipliers[s.position])});
  }
  if (pts.size() < k)
    throw Unrecoverable("only " + std::to_string(pts.size()) + " usable symbols, need k=" + std::to_string(k));
  SkewPoly f = newton_interpolate(field, pts);
  for (const auto& s : known)
    if (F.mul(skew_eval(f, locators[s.position]), multipliers[s.position]) != s.value)
      throw std::runtime_error("known symbols are inconsistent with a single codeword");
  return f;
}

}  // namespace detail

/// Erasure decoding from at least k known outer symbols, at most r used per
/// group.
inline SkewPoly lrs_erasure_decode(const LrsParams& p, std::vector<KnownSymbol> known) {
  return detail::decode_from_symbols(p.field, p.b, p.beta, std::move(known), p.k, p.r,
                                     [&](std::uint32_t mu) { return p.group_of(mu); });
}

}  // namespace mrlrc
