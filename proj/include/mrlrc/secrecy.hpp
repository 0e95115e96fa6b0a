// SPDX-License-Identifier: Apache-2.0
//
// What an (l1, l2)-eavesdropper learns. It reads the stored symbols of l1
// nodes and, for l2 whole groups, their storage plus all repair traffic
// they receive. Every observation is a linear function of the repair-set
// values c_Δ = (c/β̃)|_Δ, so observations are rows over that basis and the
// eavesdropped dimension is a rank.

#pragma once

#include <boost/rational.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mrlrc/dss.hpp"
#include "mrlrc/errors.hpp"
#include "mrlrc/galois.hpp"
#include "mrlrc/matrix.hpp"
#include "mrlrc/mrlrc.hpp"
#include "mrlrc/skew.hpp"

namespace mrlrc {

struct EavesdropperSpec {
  std::set<NodeId> l1_nodes;
  std::set<std::uint32_t> l2_groups;

  bool observes_group(std::uint32_t i) const { return l2_groups.count(i) > 0; }

  /// ℰ₁ ∪ ℰ₂^st, deduplicated.
  std::set<NodeId> observed_nodes(const MrLrcParams& p) const {
    std::set<NodeId> out = l1_nodes;
    for (auto i : l2_groups)
      for (std::uint32_t j = 0; j < p.group_size(); ++j) out.insert({i, j});
    return out;
  }

  void validate(const MrLrcParams& p) const {
    for (auto id : l1_nodes)
      if (id.group < 1 || id.group > p.g() || id.index >= p.group_size())
        throw ConfigError("eavesdropper.l1_nodes entry " + to_string(id) + " out of range");
    for (auto i : l2_groups)
      if (i < 1 || i > p.g()) throw ConfigError("eavesdropper.l2_groups entry " + std::to_string(i) + " out of range");
  }
};

/// e_i = min(r, distinct observed nodes in group i), index i-1.
inline std::vector<std::uint32_t> observed_per_group(const MrLrcParams& p, const EavesdropperSpec& spec) {
  std::vector<std::uint32_t> e(p.g(), 0);
  for (auto id : spec.observed_nodes(p)) ++e[id.group - 1];
  for (auto& x : e) x = std::min(x, p.r());
  return e;
}

/// ℓ_ν(b) for the skew Lagrange basis on the repair-set locators.
class LagrangeRows {
 public:
  LagrangeRows(const MrLrcParams& p, const RepairSet& delta) : p_(&p), delta_(delta) {
    std::vector<Gf> omega;
    for (auto id : delta_.positions) omega.push_back(p.tilde_b[p.global_index(id)]);
    basis_ = lagrange_basis(p.lrs.field, omega);
  }

  const RepairSet& delta() const { return delta_; }

  std::vector<Gf> at(Gf locator) const {
    std::vector<Gf> row;
    row.reserve(basis_.size());
    for (const auto& l : basis_) row.push_back(skew_eval(l, locator));
    return row;
  }
  std::vector<Gf> at(NodeId id) const { return at(p_->tilde_b[p_->global_index(id)]); }

  /// Row of L_group: entries outside the group's repair-set columns are zero.
  std::vector<Gf> group_row(std::uint32_t group, Gf locator) const {
    auto row = at(locator);
    for (std::size_t v = 0; v < row.size(); ++v)
      if (delta_.positions[v].group != group) row[v] = Gf{};
    return row;
  }

 private:
  const MrLrcParams* p_;
  RepairSet delta_;
  std::vector<SkewPoly> basis_;
};

struct ObservationMatrix {
  std::vector<NodeId> basis;  // column order
  Matrix m_st;
  Matrix m_dl;
  std::vector<std::string> st_labels;
  std::vector<std::string> dl_labels;
  std::size_t static_raw_rows = 0;  // l2·r + l1 before deduplication

  Matrix stacked() const { return m_st.stacked(m_dl); }
  std::size_t rows() const { return m_st.rows() + m_dl.rows(); }
};

namespace detail {

inline void add_row(Matrix& m, std::vector<std::string>& labels, std::span<const Gf> row, std::string label) {
  m.append_row(row);
  labels.push_back(std::move(label));
}


}  // namespace detail

/// One row per kept observed node. A group contributes at most r rows, which
/// already span its whole local code; repair-set members are kept first, then
/// positions repaired globally, then the rest. Rows of globally repaired
/// positions come first, the others in node order.
inline void static_view(const MrLrcParams& p, const EavesdropperSpec& spec, const LagrangeRows& lr,
                        std::span<const NodeId> repaired, ObservationMatrix& out) {
  const auto observed = spec.observed_nodes(p);
  out.static_raw_rows = spec.l2_groups.size() * p.r() + spec.l1_nodes.size();
  const std::set<NodeId> rep(repaired.begin(), repaired.end());
  std::vector<NodeId> kept;
  for (std::uint32_t i = 1; i <= p.g(); ++i) {
    std::vector<NodeId> in_group;
    for (auto id : observed)
      if (id.group == i) in_group.push_back(id);
    auto rank_of = [&](NodeId id) { return lr.delta().contains(id) ? 0 : rep.count(id) ? 1 : 2; };
    std::stable_sort(in_group.begin(), in_group.end(), [&](NodeId a, NodeId b) { return rank_of(a) < rank_of(b); });
    if (in_group.size() > p.r()) in_group.resize(p.r());
    kept.insert(kept.end(), in_group.begin(), in_group.end());
  }
  std::stable_sort(kept.begin(), kept.end(), [&](NodeId a, NodeId b) {
    const bool ra = rep.count(a) > 0, rb = rep.count(b) > 0;
    if (ra != rb) return ra;
    return a < b;
  });
  out.m_st = Matrix(0, p.k());
  for (auto id : kept) detail::add_row(out.m_st, out.st_labels, lr.at(id), "stored " + to_string(id));
}

/// Direct scheme: every message into an l2-observed group is seen, one row
/// per (failed position, sender) on the sender's columns. The repairing
/// group's own contribution is added when it is observed; it is computable
/// from its storage, so it never changes the rank.
inline void repair_view_direct(const DssState& s, const RepairRound& round, const EavesdropperSpec& spec,
                               const LagrangeRows& lr, ObservationMatrix& out) {
  const MrLrcParams& p = s.params();
  if (out.m_dl.cols() == 0) out.m_dl = Matrix(0, p.k());
  if (!spec.observes_group(round.target)) return;
  const auto groups = round.delta.groups();
  const bool own = std::binary_search(groups.begin(), groups.end(), round.target);
  for (auto id : round.repaired) {
    const std::int64_t mu = p.global_index(id);
    std::vector<std::uint32_t> senders;
    for (const auto& m : s.transcript())
      if (m.round == round.round && m.failed_locator_index == mu && spec.observes_group(m.to_cpu))
        senders.push_back(m.from_cpu);
    if (own) senders.push_back(round.target);
    std::sort(senders.begin(), senders.end());
    for (auto i : senders)
      detail::add_row(out.m_dl, out.dl_labels, lr.group_row(i, p.tilde_b[mu]),
                      "L" + std::to_string(i) + " at " + to_string(id));
  }
}

/// Forwarded scheme: each l2-observed group on ℱ sees the aggregate it
/// receives, the sum of all upstream contributions. A group first in ℱ
/// receives nothing and gets a zero row.
inline void repair_view_forwarded(const DssState& s, const RepairRound& round, const EavesdropperSpec& spec,
                                  const LagrangeRows& lr, ObservationMatrix& out) {
  const MrLrcParams& p = s.params();
  const ExtField& F = p.field();
  if (out.m_dl.cols() == 0) out.m_dl = Matrix(0, p.k());
  if (!round.flist) throw std::invalid_argument("forwarded round without forwarding list");
  const auto& flist = *round.flist;
  for (auto id : round.repaired) {
    const Gf loc = p.tilde_b[p.global_index(id)];
    for (auto v : flist.order) {
      if (!spec.observes_group(v)) continue;
      std::vector<Gf> row(p.k());
      for (auto u : flist.upstream(v)) {
        if (!round.local.count(u)) continue;
        const auto gr = lr.group_row(u, loc);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] = F.add(row[c], gr[c]);
      }
      detail::add_row(out.m_dl, out.dl_labels, row, "aggregate into " + std::to_string(v) + " at " + to_string(id));
    }
  }
}

/// The outgoing aggregate of each observed group, for checking that it adds
/// nothing to what the group already sees.
inline Matrix outgoing_aggregates(const DssState& s, const RepairRound& round, const EavesdropperSpec& spec,
                                  const LagrangeRows& lr) {
  const MrLrcParams& p = s.params();
  const ExtField& F = p.field();
  Matrix out(0, p.k());
  const auto& flist = *round.flist;
  for (auto id : round.repaired) {
    const Gf loc = p.tilde_b[p.global_index(id)];
    for (auto v : flist.order) {
      if (!spec.observes_group(v) || v == flist.target()) continue;
      std::vector<Gf> row(p.k());
      auto up = flist.upstream(v);
      up.push_back(v);
      for (auto u : up) {
        if (!round.local.count(u)) continue;
        const auto gr = lr.group_row(u, loc);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] = F.add(row[c], gr[c]);
      }
      out.append_row(row);
    }
  }
  return out;
}

/// Naive scheme: an observed repairing group sees every raw symbol it downloads.
inline void repair_view_naive(const DssState& s, const RepairRound& round, const EavesdropperSpec& spec,
                              const LagrangeRows& lr, ObservationMatrix& out) {
  if (out.m_dl.cols() == 0) out.m_dl = Matrix(0, s.params().k());
  if (!spec.observes_group(round.target)) return;
  for (auto id : round.downloaded) detail::add_row(out.m_dl, out.dl_labels, lr.at(id), "download " + to_string(id));
}

/// Observation matrix for the whole run. Columns follow the repair set of
/// the first global round, or the default repair set when there was none.
inline ObservationMatrix observe(const DssState& s, const EavesdropperSpec& spec) {
  const MrLrcParams& p = s.params();
  spec.validate(p);
  RepairSet delta;
  std::vector<NodeId> repaired;
  if (!s.rounds().empty() && s.rounds().front().scheme != Scheme::Naive) {
    delta = s.rounds().front().delta;
  } else {
    delta = choose_repair_set(s);
  }
  for (const auto& r : s.rounds()) repaired.insert(repaired.end(), r.repaired.begin(), r.repaired.end());
  const LagrangeRows lr(p, delta);
  ObservationMatrix out;
  out.basis = delta.positions;
  static_view(p, spec, lr, repaired, out);
  out.m_dl = Matrix(0, p.k());
  for (const auto& r : s.rounds()) {
    // Rounds on a different repair set are re-expressed in this basis.
    const LagrangeRows rlr(p, r.scheme == Scheme::Naive ? delta : r.delta);
    ObservationMatrix part;
    part.m_dl = Matrix(0, p.k());
    switch (r.scheme) {
      case Scheme::Direct: repair_view_direct(s, r, spec, rlr, part); break;
      case Scheme::Forwarded: repair_view_forwarded(s, r, spec, rlr, part); break;
      case Scheme::Naive: repair_view_naive(s, r, spec, rlr, part); break;
    }
    if (r.scheme != Scheme::Naive && !(r.delta.positions == delta.positions)) {
      // Change of basis: c_{Δ_r} = c_Δ · T with T(ν, ·) = ℓ^{Δ}(b̃_{Δ_r}).
      Matrix T(p.k(), p.k());
      for (std::size_t c = 0; c < r.delta.positions.size(); ++c) {
        const auto col = lr.at(r.delta.positions[c]);
        for (std::size_t v = 0; v < col.size(); ++v) T(v, c) = col[v];
      }
      part.m_dl = multiply(p.field(), part.m_dl, T.transposed());
    }
    for (std::size_t i = 0; i < part.m_dl.rows(); ++i)
      detail::add_row(out.m_dl, out.dl_labels, part.m_dl.row(i), part.dl_labels[i]);
  }
  return out;
}

inline std::size_t eavesdropped_dimension(const ExtField& F, const ObservationMatrix& m) { return rank(F, m.stacked()); }

// ---------------------------------------------------------------------------
// Closed-form secrecy dimensions.

struct SecrecyParams {
  std::int64_t g = 0, r = 0, h = 0, k = 0;

  static SecrecyParams of(const MrLrcParams& p) { return {p.g(), p.r(), p.h, p.k()}; }
};

struct FormulaResult {
  std::int64_t k_e = 0;
  std::int64_t k_s = 0;
  bool bypass = false;   // l2 = 0 (direct) or g <= 2 (forwarded)
  bool clamped = false;  // k - k_e was negative
  std::string warning;
};

namespace detail {

inline FormulaResult finish_formula(const SecrecyParams& sp, std::int64_t k_e, bool bypass) {
  FormulaResult res{k_e, sp.k - k_e, bypass, false, ""};
  if (res.k_s < 0) {
    res.warning = "secrecy dimension " + std::to_string(res.k_s) + " clamped to 0";
    res.k_s = 0;
    res.clamped = true;
  }
  return res;
}

inline void check_hypotheses(const SecrecyParams& sp, std::int64_t l1, std::int64_t l2) {
  if (sp.h > sp.r) throw HypothesisError("secrecy formula needs h <= r (h=" + std::to_string(sp.h) + ", r=" + std::to_string(sp.r) + ")");
  if (l1 + l2 * sp.r >= sp.k)
    throw HypothesisError("secrecy formula needs l1 + l2*r < k (" + std::to_string(l1 + l2 * sp.r) +
                          " >= " + std::to_string(sp.k) + ")");
}

}  // namespace detail

/// k_e = l2·r + l1 - h + Σ_i min(h, r - e_i).
inline FormulaResult secrecy_dim_direct(const SecrecyParams& sp, std::int64_t l1, std::int64_t l2,
                                        std::span<const std::uint32_t> e) {
  if (l2 == 0) {
    if (l1 >= sp.k) throw HypothesisError("secrecy formula needs l1 < k");
    return detail::finish_formula(sp, l1, true);
  }
  detail::check_hypotheses(sp, l1, l2);
  if (static_cast<std::int64_t>(e.size()) != sp.g) throw std::invalid_argument("e must have one entry per group");
  std::int64_t k_e = l2 * sp.r + l1 - sp.h;
  for (auto ei : e) k_e += std::min<std::int64_t>(sp.h, sp.r - ei);
  return detail::finish_formula(sp, k_e, false);
}

/// ℱ′_up,i: the groups upstream of i back to, but excluding, the nearest
/// upstream l2-observed group (or back to the head of ℱ).
inline std::vector<std::uint32_t> pruned_upstream(const ForwardingList& flist, const std::set<std::uint32_t>& observed,
                                                  std::uint32_t i) {
  if (!flist.contains(i)) return {};
  const auto up = flist.upstream(i);
  std::size_t start = 0;
  for (std::size_t t = up.size(); t-- > 0;)
    if (observed.count(up[t])) {
      start = t + 1;
      break;
    }
  return {up.begin() + static_cast<std::ptrdiff_t>(start), up.end()};
}

/// k_e = l2·r + l1 + Σ_{i∈𝒢_l2} min(h, Σ_{j∈ℱ′_up,i} (r - e_j)).
inline FormulaResult secrecy_dim_forwarded(const SecrecyParams& sp, std::int64_t l1, const ForwardingList& flist,
                                           const std::set<std::uint32_t>& l2_groups, std::span<const std::uint32_t> e) {
  const auto l2 = static_cast<std::int64_t>(l2_groups.size());
  if (l2 == 0) {
    if (l1 >= sp.k) throw HypothesisError("secrecy formula needs l1 < k");
    return detail::finish_formula(sp, l1, true);
  }
  detail::check_hypotheses(sp, l1, l2);
  if (sp.g <= 2) return detail::finish_formula(sp, l2 * sp.r + l1, true);
  if (static_cast<std::int64_t>(e.size()) != sp.g) throw std::invalid_argument("e must have one entry per group");
  std::int64_t k_e = l2 * sp.r + l1;
  for (auto i : l2_groups) {
    std::int64_t unseen = 0;
    for (auto j : pruned_upstream(flist, l2_groups, i)) unseen += sp.r - e[j - 1];
    k_e += std::min(sp.h, unseen);
  }
  return detail::finish_formula(sp, k_e, false);
}

/// e for a spec given only as per-group l1 counts.
inline std::vector<std::uint32_t> e_from_counts(const SecrecyParams& sp, const std::set<std::uint32_t>& l2_groups,
                                                std::span<const std::uint32_t> l1_per_group) {
  std::vector<std::uint32_t> e(sp.g, 0);
  for (std::int64_t i = 1; i <= sp.g; ++i)
    e[i - 1] = l2_groups.count(static_cast<std::uint32_t>(i)) ? static_cast<std::uint32_t>(sp.r)
                                                              : std::min<std::uint32_t>(sp.r, l1_per_group[i - 1]);
  return e;
}

inline FormulaResult formula_for(Scheme scheme, const SecrecyParams& sp, std::int64_t l1, const ForwardingList& flist,
                                 const std::set<std::uint32_t>& l2_groups, std::span<const std::uint32_t> e) {
  switch (scheme) {
    case Scheme::Direct: return secrecy_dim_direct(sp, l1, static_cast<std::int64_t>(l2_groups.size()), e);
    case Scheme::Forwarded: return secrecy_dim_forwarded(sp, l1, flist, l2_groups, e);
    case Scheme::Naive: break;
  }
  throw std::invalid_argument("no closed form for the naive scheme");
}

struct Placement {
  std::set<std::uint32_t> l2_groups;
  std::vector<std::uint32_t> l1_per_group;  // index i-1
  FormulaResult formula;
};

/// Eavesdropper placement maximizing the formula's k_e. l2 groups are
/// enumerated exhaustively for g <= 10 (evenly spaced along ℱ otherwise);
/// l1 nodes are then added one at a time to the group that raises k_e most.
inline Placement worst_case_placement(Scheme scheme, const SecrecyParams& sp, const ForwardingList& flist,
                                      std::uint32_t l1, std::uint32_t l2) {
  const auto g = static_cast<std::uint32_t>(sp.g);
  auto place_l1 = [&](const std::set<std::uint32_t>& groups) {
    Placement pl{groups, std::vector<std::uint32_t>(g, 0), {}};
    for (std::uint32_t t = 0; t < l1; ++t) {
      std::optional<std::pair<std::int64_t, std::uint32_t>> best;
      for (std::uint32_t i = 1; i <= g; ++i) {
        if (groups.count(i) || pl.l1_per_group[i - 1] >= sp.r) continue;
        ++pl.l1_per_group[i - 1];
        const auto e = e_from_counts(sp, groups, pl.l1_per_group);
        const auto f = formula_for(scheme, sp, t + 1, flist, groups, e);
        --pl.l1_per_group[i - 1];
        if (!best || f.k_e > best->first) best = std::pair{f.k_e, i};
      }
      if (!best) throw HypothesisError("no room for another l1 node");
      ++pl.l1_per_group[best->second - 1];
    }
    pl.formula = formula_for(scheme, sp, l1, flist, groups, e_from_counts(sp, groups, pl.l1_per_group));
    return pl;
  };

  if (l2 > g) throw HypothesisError("l2 exceeds the number of groups");
  // On ties, prefer leaving the repairing group unobserved.
  const std::uint32_t target = flist.target();
  auto better = [&](const Placement& a, const Placement& b) {
    if (a.formula.k_e != b.formula.k_e) return a.formula.k_e > b.formula.k_e;
    return !a.l2_groups.count(target) && b.l2_groups.count(target);
  };
  std::optional<Placement> best;
  if (g <= 10) {
    for_each_subset(g, l2, [&](const std::vector<std::size_t>& idx) {
      std::set<std::uint32_t> groups;
      for (auto i : idx) groups.insert(static_cast<std::uint32_t>(i + 1));
      auto pl = place_l1(groups);
      if (!best || better(pl, *best)) best = std::move(pl);
      return true;
    });
  } else {
    std::set<std::uint32_t> groups;
    const auto len = static_cast<std::uint32_t>(flist.order.size());
    if (l2 >= len) {
      groups.insert(flist.order.begin(), flist.order.end());
    } else {
      for (std::uint32_t j = 1; j <= l2; ++j) groups.insert(flist.order[(j * (len - 1) + l2 - 1) / l2 - 1]);
    }
    best = place_l1(groups);
  }
  return *best;
}

// ---------------------------------------------------------------------------
// Replaying the row reduction of an observation matrix.

struct ReductionReplay {
  Matrix m;    // stacked observation matrix
  Matrix m1;   // static rows spanned by the others removed
  Matrix m2;   // unit-row columns eliminated from every other row
  Matrix m3;   // non-unit rows restricted to their remaining support
  std::size_t unit_rows = 0;
  std::size_t rank_m = 0, rank_m1 = 0, rank_m2 = 0, rank_m3 = 0;

  bool rank_preserved() const { return rank_m == rank_m1 && rank_m1 == rank_m2 && rank_m2 == unit_rows + rank_m3; }
};

namespace detail {

inline std::optional<std::size_t> unit_column(std::span<const Gf> row) {
  std::optional<std::size_t> col;
  for (std::size_t c = 0; c < row.size(); ++c) {
    if (row[c].is_zero()) continue;
    if (col || row[c] != Gf{1}) return std::nullopt;
    col = c;
  }
  return col;
}

}  // namespace detail

inline ReductionReplay replay_reduction(const ExtField& F, const ObservationMatrix& obs) {
  ReductionReplay rep;
  rep.m = obs.stacked();
  rep.rank_m = rank(F, rep.m);

  // Drop non-unit static rows that are combinations of the remaining rows.
  std::vector<bool> keep(rep.m.rows(), true);
  for (std::size_t i = 0; i < obs.m_st.rows(); ++i) {
    if (detail::unit_column(rep.m.row(i))) continue;
    std::vector<std::size_t> others;
    for (std::size_t t = 0; t < rep.m.rows(); ++t)
      if (t != i && keep[t]) others.push_back(t);
    const Matrix rest = rep.m.select_rows(others);
    if (rank(F, rest) == rep.rank_m) keep[i] = false;
  }
  std::vector<std::size_t> kept;
  for (std::size_t t = 0; t < keep.size(); ++t)
    if (keep[t]) kept.push_back(t);
  rep.m1 = rep.m.select_rows(kept);
  rep.rank_m1 = rank(F, rep.m1);

  rep.m2 = rep.m1;
  std::set<std::size_t> unit_cols;
  std::vector<bool> is_unit(rep.m2.rows(), false);
  for (std::size_t i = 0; i < rep.m2.rows(); ++i)
    if (auto c = detail::unit_column(rep.m2.row(i)); c && unit_cols.insert(*c).second) is_unit[i] = true;
  for (std::size_t i = 0; i < rep.m2.rows(); ++i) {
    if (is_unit[i]) continue;
    for (auto c : unit_cols) rep.m2(i, c) = Gf{};
  }
  rep.rank_m2 = rank(F, rep.m2);
  rep.unit_rows = unit_cols.size();

  std::vector<std::size_t> rows, cols;
  for (std::size_t i = 0; i < rep.m2.rows(); ++i) {
    if (is_unit[i]) continue;
    const auto row = rep.m2.row(i);
    if (std::any_of(row.begin(), row.end(), [](Gf x) { return !x.is_zero(); })) rows.push_back(i);
  }
  for (std::size_t c = 0; c < rep.m2.cols(); ++c) {
    if (unit_cols.count(c)) continue;
    if (std::any_of(rows.begin(), rows.end(), [&](std::size_t i) { return !rep.m2(i, c).is_zero(); })) cols.push_back(c);
  }
  rep.m3 = rep.m2.select_rows(rows).select_columns(cols);
  rep.rank_m3 = rank(F, rep.m3);
  return rep;
}

// ---------------------------------------------------------------------------
// Lagrange-evaluation matrices: direct evaluation against a σ-Vandermonde
// product.

struct VandermondeProductReport {
  Matrix by_evaluation;  // (j, i) = ℓ_i(a_d[j])
  Matrix by_product;     // (V_k(a_k)^{-1} V_k(a_d))^T
  std::size_t rank = 0;
  bool paths_agree = false;
  bool full_rank = false;
  bool blocks_full_rank = false;
};

/// `blocks` splits the k columns into consecutive groups; each block of
/// columns must have rank min(d, width).
inline VandermondeProductReport vandermonde_product_rank(const FieldPtr& field, std::span<const Gf> a_k,
                                                         std::span<const Gf> a_d, std::span<const std::size_t> blocks = {}) {
  const ExtField& F = *field;
  std::vector<Gf> all(a_k.begin(), a_k.end());
  for (auto x : a_d)
    if (std::find(a_k.begin(), a_k.end(), x) == a_k.end()) all.push_back(x);
  if (!is_p_independent(F, all)) throw PIndependenceError("evaluation points are not P-independent");

  VandermondeProductReport rep;
  const std::size_t k = a_k.size(), d = a_d.size();
  const auto basis = lagrange_basis(field, a_k);
  rep.by_evaluation = Matrix(d, k);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < k; ++i) rep.by_evaluation(j, i) = skew_eval(basis[i], a_d[j]);
  const auto vinv = inverse(F, sigma_vandermonde(F, a_k));
  rep.by_product = multiply(F, *vinv, sigma_vandermonde(F, a_d, k)).transposed();
  if (d == 0) rep.by_product = Matrix(0, k);
  rep.paths_agree = rep.by_evaluation == rep.by_product;
  rep.rank = rank(F, rep.by_evaluation);
  rep.full_rank = rep.rank == std::min(k, d);
  rep.blocks_full_rank = true;
  std::size_t start = 0;
  for (auto w : blocks) {
    std::vector<std::size_t> cols(w);
    std::iota(cols.begin(), cols.end(), start);
    start += w;
    if (rank(F, rep.by_evaluation.select_columns(cols)) != std::min(d, w)) rep.blocks_full_rank = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Exact entropies by exhaustive enumeration.

using Rational = boost::rational<std::int64_t>;

namespace detail {

// Entropy in units of log|F| of a distribution that must be uniform on a
// support of size p^x, where |F| = p^y. Returns x/y.
inline Rational uniform_entropy(const std::map<std::vector<std::uint32_t>, std::uint64_t>& counts, std::uint32_t p,
                                std::uint32_t y) {
  if (counts.empty()) return Rational(0);
  const std::uint64_t first = counts.begin()->second;
  for (const auto& [key, c] : counts)
    if (c != first) throw std::logic_error("observed distribution is not uniform on its support");
  std::uint64_t support = counts.size();
  std::int64_t x = 0;
  while (support % p == 0) {
    support /= p;
    ++x;
  }
  if (support != 1) throw std::logic_error("support size is not a power of the characteristic");
  return Rational(x, y);
}

}  // namespace detail

/// H(M·K) for uniform K, compared against rank(M).
struct EntropyRankReport {
  Rational entropy;
  std::size_t rank = 0;
  bool equal = false;
};

inline EntropyRankReport entropy_rank_check(const ExtField& F, const Matrix& M) {
  std::uint64_t total = 1;
  for (std::size_t c = 0; c < M.cols(); ++c) {
    total *= F.order();
    if (total > 1'000'000) throw std::invalid_argument("entropy check: too many inputs to enumerate");
  }
  std::map<std::vector<std::uint32_t>, std::uint64_t> counts;
  std::vector<Gf> key(M.cols());
  for (std::uint64_t t = 0; t < total; ++t) {
    std::uint64_t x = t;
    for (auto& v : key) {
      v = Gf{static_cast<std::uint32_t>(x % F.order())};
      x /= F.order();
    }
    const auto out = multiply(F, std::span<const Gf>(key), M.transposed());
    std::vector<std::uint32_t> packed;
    for (auto o : out) packed.push_back(o.v);
    ++counts[packed];
  }
  EntropyRankReport rep;
  rep.entropy = detail::uniform_entropy(counts, F.q(), F.m());
  rep.rank = rank(F, M);
  rep.equal = rep.entropy == Rational(static_cast<std::int64_t>(rep.rank));
  return rep;
}

struct MiReport {
  std::uint64_t messages = 0;
  std::uint32_t k_e = 0;
  Rational h_us, h_e, h_us_e;
  Rational mutual_information;    // I(U_s; E)
  Rational h_r_given_us_e;        // H(R | U_s, E)
  bool observations_within_padding = false;  // H(E) <= H(R) = k_e
  bool padding_determined = false;           // H(R | U_s, E) = 0
};

/// Exhaustive I(U_s; E). `observe(u)` runs the fixed scenario on message
/// u = (r_pad, u_s) and returns everything the eavesdropper sees.
inline MiReport mi_oracle(const MrLrcParams& p, std::uint32_t k_e,
                          const std::function<std::vector<Gf>(const std::vector<Gf>&)>& observe) {
  const ExtField& F = p.field();
  if (k_e > p.k()) throw ConfigError("padding k_e exceeds k");
  std::uint64_t total = 1;
  for (std::uint32_t i = 0; i < p.k(); ++i) {
    total *= F.order();
    if (total > 1'000'000) throw std::invalid_argument("mutual information oracle: instance too large to enumerate");
  }
  std::map<std::vector<std::uint32_t>, std::uint64_t> c_us, c_e, c_us_e;
  std::vector<Gf> u(p.k());
  for (std::uint64_t t = 0; t < total; ++t) {
    std::uint64_t x = t;
    for (auto& v : u) {
      v = Gf{static_cast<std::uint32_t>(x % F.order())};
      x /= F.order();
    }
    std::vector<std::uint32_t> us, e;
    for (std::uint32_t i = k_e; i < p.k(); ++i) us.push_back(u[i].v);
    for (auto o : observe(u)) e.push_back(o.v);
    std::vector<std::uint32_t> joint = us;
    joint.push_back(UINT32_MAX);
    joint.insert(joint.end(), e.begin(), e.end());
    ++c_us[us];
    ++c_e[e];
    ++c_us_e[joint];
  }
  MiReport rep;
  rep.messages = total;
  rep.k_e = k_e;
  rep.h_us = detail::uniform_entropy(c_us, F.q(), F.m());
  rep.h_e = detail::uniform_entropy(c_e, F.q(), F.m());
  rep.h_us_e = detail::uniform_entropy(c_us_e, F.q(), F.m());
  rep.mutual_information = rep.h_us + rep.h_e - rep.h_us_e;
  // E is a function of U = (R, U_s), so H(R | U_s, E) = k - H(U_s, E).
  rep.h_r_given_us_e = Rational(static_cast<std::int64_t>(p.k())) - rep.h_us_e;
  rep.observations_within_padding = rep.h_e <= Rational(static_cast<std::int64_t>(k_e));
  rep.padding_determined = rep.h_r_given_us_e == Rational(0);
  return rep;
}

/// Everything the eavesdropper sees after `s` has been repaired: stored
/// values of the observed nodes, then payloads received by observed groups.
inline std::vector<Gf> eavesdropper_view(const DssState& s, const EavesdropperSpec& spec) {
  std::vector<Gf> out;
  for (auto id : spec.observed_nodes(s.params())) out.push_back(s.read(id));
  for (const auto& m : s.transcript())
    if (spec.observes_group(m.to_cpu)) out.push_back(m.payload);
  return out;
}

}  // namespace mrlrc
