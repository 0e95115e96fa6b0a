// SPDX-License-Identifier: Apache-2.0
//
// Global MR-LRC: an outer LRS code whose g blocks of r symbols are each
// multiplied by a systematic local (r+δ-1, r) Reed–Solomon generator over
// F_q, plus secure encoding with low-order random padding.

#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mrlrc/errors.hpp"
#include "mrlrc/galois.hpp"
#include "mrlrc/lrs.hpp"
#include "mrlrc/matrix.hpp"
#include "mrlrc/skew.hpp"

namespace mrlrc {

/// Node address: 1-based group, 0-based index within the group.
struct NodeId {
  std::uint32_t group = 1;
  std::uint32_t index = 0;
  auto operator<=>(const NodeId&) const = default;
};

inline std::string to_string(NodeId id) {
  return "(" + std::to_string(id.group) + "," + std::to_string(id.index) + ")";
}

/// μ = j + (r+δ-2)(i-1), the flat index with stride r+δ-2. Bijective for
/// j in [0, r+δ-3]; j = r+δ-2 would collide with (i+1, 0) and is rejected.
inline std::uint32_t phi(std::uint32_t i, std::uint32_t j, std::uint32_t g, std::uint32_t r, std::uint32_t delta) {
  const std::uint32_t stride = r + delta - 2;
  if (stride == 0 || i < 1 || i > g || j >= stride)
    throw std::out_of_range("phi: (i=" + std::to_string(i) + ", j=" + std::to_string(j) + ") out of range");
  return j + stride * (i - 1);
}

inline NodeId phi_inverse(std::uint32_t mu, std::uint32_t g, std::uint32_t r, std::uint32_t delta) {
  const std::uint32_t stride = r + delta - 2;
  if (stride == 0 || mu >= stride * g) throw std::out_of_range("phi_inverse: index out of range");
  return {mu / stride + 1, mu % stride};
}

/// Systematic generator [I_r | P] of an (r+δ-1, r) Reed–Solomon code over
/// F_q, entries as packed base-field values.
inline Matrix local_generator(std::uint32_t q, std::uint32_t r, std::uint32_t delta) {
  if (delta < 1) throw ConfigError("code.delta must be >= 1");
  const std::uint32_t len = r + delta - 1;
  if (q <= r + delta - 2)
    throw ConfigError("local code needs q > r+delta-2 (q=" + std::to_string(q) + ", r+delta-2=" +
                      std::to_string(r + delta - 2) + ")");
  const FieldPtr base = ExtField::create(q, 1);
  const ExtField& F = *base;
  Matrix v(r, len);
  for (std::uint32_t j = 0; j < len; ++j)
    for (std::uint32_t i = 0; i < r; ++i) v(i, j) = F.pow(Gf{j}, i);
  std::vector<std::size_t> head(r);
  std::iota(head.begin(), head.end(), 0);
  const auto left_inv = inverse(F, v.select_columns(head));
  if (!left_inv) throw std::logic_error("local Vandermonde block is singular");
  return multiply(F, *left_inv, v);
}

/// Calls visit(subset) for every `size`-subset of [0, n) in lexicographic order.
/// Stops early when visit returns false.
inline bool for_each_subset(std::size_t n, std::size_t size, const std::function<bool(const std::vector<std::size_t>&)>& visit) {
  if (size > n) return true;
  std::vector<std::size_t> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    if (!visit(idx)) return false;
    std::size_t i = size;
    while (i > 0 && idx[i - 1] == n - size + i - 1) --i;
    if (i == 0) return true;
    ++idx[i - 1];
    for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// All r×r minors nonsingular.
inline bool is_mds_generator(std::uint32_t q, const Matrix& a) {
  const FieldPtr base = ExtField::create(q, 1);
  return for_each_subset(a.cols(), a.rows(), [&](const std::vector<std::size_t>& cols) {
    return rank(*base, a.select_columns(cols)) == a.rows();
  });
}

struct MrLrcParams {
  LrsParams lrs;
  std::uint32_t delta = 1;
  std::vector<Matrix> A;  // g local generators, r × (r+δ-1)
  std::uint32_t N = 0;
  std::uint32_t h = 0;
  std::vector<Gf> tilde_beta;  // length N
  std::vector<Gf> tilde_b;     // length N

  const ExtField& field() const { return *lrs.field; }
  std::uint32_t g() const { return lrs.g; }
  std::uint32_t r() const { return lrs.r; }
  std::uint32_t k() const { return lrs.k; }
  std::uint32_t n() const { return lrs.n; }
  std::uint32_t group_size() const { return lrs.r + delta - 1; }

  /// Flat index into the length-N global codeword (stride r+δ-1).
  std::uint32_t global_index(NodeId id) const {
    if (id.group < 1 || id.group > g() || id.index >= group_size())
      throw std::out_of_range("node " + to_string(id) + " out of range");
    return (id.group - 1) * group_size() + id.index;
  }
  NodeId node_at(std::uint32_t mu) const {
    if (mu >= N) throw std::out_of_range("global index out of range");
    return {mu / group_size() + 1, mu % group_size()};
  }
  /// Flat index into the length-n outer codeword (stride r).
  std::uint32_t outer_index(std::uint32_t group, std::uint32_t j) const {
    if (group < 1 || group > g() || j >= r()) throw std::out_of_range("outer index out of range");
    return (group - 1) * r() + j;
  }
};

/// Assembles β̃ = β·diag(A_1..A_g) and b̃ = a_i·β̃^{q-1}.
/// With `check_local_mds` false the local generators are taken as given,
/// which is how negative fixtures are built.
inline MrLrcParams mrlrc_from_parts(LrsParams lrs, std::uint32_t delta, std::vector<Matrix> A,
                                    bool check_local_mds = true) {
  const ExtField& F = *lrs.field;
  const std::uint32_t len = lrs.r + delta - 1;
  if (F.q() <= std::max(lrs.g, lrs.r + delta - 2))
    throw ConfigError("construction needs q > max(g, r+delta-2)");
  if (A.size() != lrs.g) throw ConfigError("need one local generator per group");
  MrLrcParams p;
  p.lrs = std::move(lrs);
  p.delta = delta;
  p.N = p.lrs.g * len;
  p.h = p.lrs.n - p.lrs.k;
  for (std::uint32_t i = 0; i < p.lrs.g; ++i) {
    const Matrix& Ai = A[i];
    if (Ai.rows() != p.lrs.r || Ai.cols() != len) throw ConfigError("local generator has wrong shape");
    for (std::size_t x = 0; x < Ai.rows(); ++x)
      for (std::size_t y = 0; y < Ai.cols(); ++y)
        if (!F.in_base_field(Ai(x, y))) throw ConfigError("local generator entries must lie in F_q");
    if (check_local_mds && !is_mds_generator(F.q(), Ai))
      throw ConfigError("local generator of group " + std::to_string(i + 1) + " is not MDS");
    for (std::uint32_t j = 0; j < len; ++j) {
      Gf t = F.zero();
      for (std::uint32_t x = 0; x < p.lrs.r; ++x)
        t = F.add(t, F.mul(p.lrs.beta[i * p.lrs.r + x], Ai(x, j)));
      if (t.is_zero()) throw ConfigError("extended multiplier is zero (local generator has a zero column)");
      p.tilde_beta.push_back(t);
      p.tilde_b.push_back(lrs_locator(F, p.lrs.a[i], t));
    }
  }
  p.A = std::move(A);
  return p;
}

inline MrLrcParams mrlrc_setup(FieldPtr field, std::uint32_t g, std::uint32_t r, std::uint32_t delta, std::uint32_t k) {
  const std::uint32_t q = field->q();
  if (delta < 1) throw ConfigError("code.delta must be >= 1");
  if (field->m() < r) throw ConfigError("construction needs m >= r");
  if (q <= std::max(g, r + delta - 2))
    throw ConfigError("construction needs q > max(g, r+delta-2) (q=" + std::to_string(q) + ")");
  LrsParams lrs = lrs_setup(std::move(field), g, r, k);
  std::vector<Matrix> A(g, local_generator(q, r, delta));
  return mrlrc_from_parts(std::move(lrs), delta, std::move(A));
}

/// Global codeword, flat (global index) with block accessors.
class GlobalCodeword {
 public:
  GlobalCodeword() = default;
  GlobalCodeword(const MrLrcParams& p, std::vector<Gf> symbols) : group_size_(p.group_size()), symbols_(std::move(symbols)) {}

  const std::vector<Gf>& flat() const { return symbols_; }
  Gf at(std::uint32_t mu) const { return symbols_.at(mu); }
  Gf at(NodeId id) const { return symbols_.at((id.group - 1) * group_size_ + id.index); }
  std::size_t size() const { return symbols_.size(); }
  bool operator==(const GlobalCodeword&) const = default;

 private:
  std::uint32_t group_size_ = 0;
  std::vector<Gf> symbols_;
};

/// Outer codeword times diag(A_1, …, A_g).
inline std::vector<Gf> apply_local_generators(const MrLrcParams& p, std::span<const Gf> outer) {
  const ExtField& F = p.field();
  std::vector<Gf> out;
  out.reserve(p.N);
  for (std::uint32_t i = 0; i < p.g(); ++i) {
    const auto block = multiply(F, outer.subspan(i * p.r(), p.r()), p.A[i]);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

/// c_glob,μ = f(b̃_μ)·β̃_μ.
inline std::vector<Gf> evaluate_extended(const MrLrcParams& p, const SkewPoly& f) {
  const ExtField& F = p.field();
  std::vector<Gf> out(p.N);
  for (std::uint32_t mu = 0; mu < p.N; ++mu) out[mu] = F.mul(skew_eval(f, p.tilde_b[mu]), p.tilde_beta[mu]);
  return out;
}

/// Encodes u (monomial coefficients of f, lowest degree first) by both the
/// matrix route and the extended-locator route, and checks they agree.
inline GlobalCodeword mrlrc_encode(const MrLrcParams& p, std::span<const Gf> u) {
  if (u.size() != p.k())
    throw std::invalid_argument("message length must equal k (got " + std::to_string(u.size()) + ")");
  const SkewPoly f(p.lrs.field, std::vector<Gf>(u.begin(), u.end()));
  auto via_matrix = apply_local_generators(p, lrs_encode(p.lrs, f));
  if (via_matrix != evaluate_extended(p, f))
    throw std::logic_error("matrix and extended-locator encodings disagree");
  return GlobalCodeword(p, std::move(via_matrix));
}

struct SecureMessage {
  std::vector<Gf> u_s;    // k_s secret symbols
  std::vector<Gf> r_pad;  // k_e uniform symbols
  std::vector<Gf> u;      // (r_pad, u_s)
  std::uint32_t k_s() const { return static_cast<std::uint32_t>(u_s.size()); }
  std::uint32_t k_e() const { return static_cast<std::uint32_t>(r_pad.size()); }
};

/// Pads u_s with k_e uniform symbols drawn from `rng`, randomness first.
template <class Rng>
std::pair<SecureMessage, GlobalCodeword> secure_encode(const MrLrcParams& p, std::vector<Gf> u_s, std::uint32_t k_e, Rng& rng) {
  if (k_e >= p.k()) throw ConfigError("code.k_e must be < k so that k_s > 0");
  if (u_s.size() != p.k() - k_e)
    throw ConfigError("secret length must equal k_s = k - k_e = " + std::to_string(p.k() - k_e));
  SecureMessage msg;
  std::uniform_int_distribution<std::uint32_t> pick(0, p.field().order() - 1);
  for (std::uint32_t i = 0; i < k_e; ++i) msg.r_pad.push_back(Gf{pick(rng)});
  msg.u_s = std::move(u_s);
  msg.u = msg.r_pad;
  msg.u.insert(msg.u.end(), msg.u_s.begin(), msg.u_s.end());
  auto c = mrlrc_encode(p, msg.u);
  return {std::move(msg), std::move(c)};
}

inline std::pair<SecureMessage, GlobalCodeword> secure_encode(const MrLrcParams& p, std::vector<Gf> u_s, std::uint32_t k_e,
                                                              std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  return secure_encode(p, std::move(u_s), k_e, rng);
}

/// k × N generator: outer σ-Vandermonde generator times diag(A_1..A_g).
inline Matrix global_generator(const MrLrcParams& p) {
  const ExtField& F = p.field();
  Matrix gout = sigma_vandermonde(F, p.lrs.b, p.k());
  for (std::size_t i = 0; i < gout.rows(); ++i)
    for (std::size_t j = 0; j < gout.cols(); ++j) gout(i, j) = F.mul(gout(i, j), p.lrs.beta[j]);
  Matrix out(p.k(), p.N);
  for (std::uint32_t i = 0; i < p.k(); ++i) {
    const auto row = apply_local_generators(p, gout.row(i));
    for (std::uint32_t j = 0; j < p.N; ++j) out(i, j) = row[j];
  }
  return out;
}

struct MrCheckReport {
  bool maximally_recoverable = true;
  std::size_t patterns = 0;
  std::size_t minors = 0;
  std::vector<std::uint32_t> failing_columns;  // first rank-deficient k-subset, global indices
};

/// Exhaustive check that puncturing δ-1 positions in every group leaves an
/// MDS code of length n: every k-subset of the remaining columns of the
/// global generator has rank k.
inline MrCheckReport check_maximally_recoverable(const MrLrcParams& p) {
  const ExtField& F = p.field();
  const Matrix G = global_generator(p);
  const std::uint32_t gs = p.group_size();

  std::vector<std::vector<std::size_t>> group_keep;
  for_each_subset(gs, p.r(), [&](const std::vector<std::size_t>& keep) {
    group_keep.push_back(keep);
    return true;
  });

  MrCheckReport rep;
  std::vector<std::size_t> choice(p.g(), 0);
  while (true) {
    std::vector<std::size_t> cols;
    for (std::uint32_t i = 0; i < p.g(); ++i)
      for (auto j : group_keep[choice[i]]) cols.push_back(i * gs + j);
    ++rep.patterns;
    const Matrix punctured = G.select_columns(cols);
    const bool ok = for_each_subset(cols.size(), p.k(), [&](const std::vector<std::size_t>& sub) {
      ++rep.minors;
      if (rank(F, punctured.select_columns(sub)) == p.k()) return true;
      for (auto s : sub) rep.failing_columns.push_back(static_cast<std::uint32_t>(cols[s]));
      return false;
    });
    if (!ok) {
      rep.maximally_recoverable = false;
      return rep;
    }
    std::size_t i = 0;
    while (i < p.g() && ++choice[i] == group_keep.size()) choice[i++] = 0;
    if (i == p.g()) break;
  }
  return rep;
}

inline bool is_maximally_recoverable(const MrLrcParams& p) { return check_maximally_recoverable(p).maximally_recoverable; }

/// Decodes f from at least k known global symbols, at most r per group.
inline SkewPoly decode_global(const MrLrcParams& p, std::vector<KnownSymbol> known) {
  return detail::decode_from_symbols(p.lrs.field, p.tilde_b, p.tilde_beta, std::move(known), p.k(), p.r(),
                                     [&](std::uint32_t mu) { return mu / p.group_size() + 1; });
}

}  // namespace mrlrc
