// SPDX-License-Identifier: Apache-2.0
//
// Distributed storage simulator. Each group of r+δ-1 nodes is served by one
// CPU; CPUs exchange field symbols to repair groups that lost more than δ-1
// nodes. Every inter-CPU symbol is appended to the transcript.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mrlrc/errors.hpp"
#include "mrlrc/galois.hpp"
#include "mrlrc/matrix.hpp"
#include "mrlrc/mrlrc.hpp"
#include "mrlrc/skew.hpp"

namespace mrlrc {

enum class Scheme { Naive, Direct, Forwarded };

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::Naive: return "naive";
    case Scheme::Direct: return "direct";
    case Scheme::Forwarded: return "forwarded";
  }
  return "?";
}

inline Scheme parse_scheme(const std::string& s) {
  if (s == "naive") return Scheme::Naive;
  if (s == "direct") return Scheme::Direct;
  if (s == "forwarded") return Scheme::Forwarded;
  throw ConfigError("scheme must be naive, direct or forwarded (got '" + s + "')");
}

struct Message {
  std::uint32_t round = 0;
  Scheme scheme = Scheme::Direct;
  std::uint32_t from_cpu = 0;
  std::uint32_t to_cpu = 0;
  // Global index of the failed node being repaired; -1 for raw downloads.
  std::int64_t failed_locator_index = -1;
  Gf payload;
};

/// k intact positions, at most r per group, sorted.
struct RepairSet {
  std::vector<NodeId> positions;

  std::vector<std::uint32_t> groups() const {
    std::vector<std::uint32_t> out;
    for (auto p : positions)
      if (out.empty() || out.back() != p.group) out.push_back(p.group);
    return out;
  }
  bool contains(NodeId id) const { return std::binary_search(positions.begin(), positions.end(), id); }
  std::size_t index_of(NodeId id) const {
    auto it = std::lower_bound(positions.begin(), positions.end(), id);
    if (it == positions.end() || *it != id) throw std::out_of_range("node not in repair set");
    return static_cast<std::size_t>(it - positions.begin());
  }
};

/// Order in which CPUs aggregate and forward; the repairing group is last.
struct ForwardingList {
  std::vector<std::uint32_t> order;

  std::uint32_t target() const { return order.back(); }
  std::size_t position(std::uint32_t group) const {
    auto it = std::find(order.begin(), order.end(), group);
    if (it == order.end()) throw std::out_of_range("group " + std::to_string(group) + " not in forwarding list");
    return static_cast<std::size_t>(it - order.begin());
  }
  bool contains(std::uint32_t group) const { return std::find(order.begin(), order.end(), group) != order.end(); }
  /// Groups strictly before `group`.
  std::vector<std::uint32_t> upstream(std::uint32_t group) const {
    return {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(position(group))};
  }

  void validate(std::uint32_t g, std::uint32_t target_group, std::span<const std::uint32_t> required) const {
    if (order.empty()) throw ConfigError("forwarding list is empty");
    std::set<std::uint32_t> seen;
    for (auto v : order) {
      if (v < 1 || v > g) throw ConfigError("forwarding list entry " + std::to_string(v) + " out of range");
      if (!seen.insert(v).second) throw ConfigError("forwarding list repeats group " + std::to_string(v));
    }
    if (order.back() != target_group)
      throw ConfigError("forwarding list must end at the repairing group " + std::to_string(target_group));
    for (auto v : required)
      if (!seen.count(v)) throw ConfigError("forwarding list misses contributing group " + std::to_string(v));
  }

  /// The other groups in ascending order, then the target.
  static ForwardingList ascending(std::uint32_t g, std::uint32_t target_group) {
    ForwardingList f;
    for (std::uint32_t i = 1; i <= g; ++i)
      if (i != target_group) f.order.push_back(i);
    f.order.push_back(target_group);
    return f;
  }
};

/// Everything a global repair round used, kept for later analysis.
struct RepairRound {
  std::uint32_t round = 0;
  Scheme scheme = Scheme::Direct;
  std::uint32_t target = 0;
  RepairSet delta;
  std::vector<NodeId> repaired;  // positions restored by the global step
  std::optional<ForwardingList> flist;
  std::map<std::uint32_t, SkewPoly> local;  // group -> L_i
  std::vector<NodeId> downloaded;           // naive only
};

class DssState {
 public:
  DssState(std::shared_ptr<const MrLrcParams> params, std::vector<Gf> u)
      : p_(std::move(params)), u_(std::move(u)), f_(p_->lrs.field, u_), truth_(mrlrc_encode(*p_, u_)) {
    stored_.assign(truth_.flat().begin(), truth_.flat().end());
  }

  const MrLrcParams& params() const { return *p_; }
  const std::shared_ptr<const MrLrcParams>& params_ptr() const { return p_; }
  const std::vector<Gf>& message() const { return u_; }
  const SkewPoly& f() const { return f_; }
  const GlobalCodeword& truth() const { return truth_; }

  bool is_failed(NodeId id) const { return !stored_[p_->global_index(id)].has_value(); }
  std::optional<Gf> stored(NodeId id) const { return stored_[p_->global_index(id)]; }
  Gf read(NodeId id) const {
    const auto v = stored(id);
    if (!v) throw std::logic_error("read from failed node " + to_string(id));
    return *v;
  }

  std::vector<std::uint32_t> failed_in_group(std::uint32_t group) const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t j = 0; j < p_->group_size(); ++j)
      if (is_failed({group, j})) out.push_back(j);
    return out;
  }
  std::vector<NodeId> failed_nodes() const {
    std::vector<NodeId> out;
    for (std::uint32_t mu = 0; mu < p_->N; ++mu)
      if (!stored_[mu]) out.push_back(p_->node_at(mu));
    return out;
  }
  bool needs_global(std::uint32_t group) const { return failed_in_group(group).size() > p_->delta - 1; }

  const std::vector<Message>& transcript() const { return transcript_; }
  const std::vector<RepairRound>& rounds() const { return rounds_; }

  void mark_failed(NodeId id) { stored_[p_->global_index(id)].reset(); }
  void restore(NodeId id, Gf v) {
    if (v != truth_.at(id))
      throw std::logic_error("repair of " + to_string(id) + " produced a value different from the stored codeword");
    stored_[p_->global_index(id)] = v;
  }
  void log(Message m) { transcript_.push_back(m); }
  std::uint32_t next_round() const { return static_cast<std::uint32_t>(rounds_.size()) + 1; }
  void record(RepairRound r) { rounds_.push_back(std::move(r)); }

 private:
  std::shared_ptr<const MrLrcParams> p_;
  std::vector<Gf> u_;
  SkewPoly f_;
  GlobalCodeword truth_;
  std::vector<std::optional<Gf>> stored_;
  std::vector<Message> transcript_;
  std::vector<RepairRound> rounds_;
};

inline void fail_nodes(DssState& s, std::span<const NodeId> positions) {
  for (auto id : positions) s.mark_failed(id);
}

enum class LocalOutcome { NoOp, Repaired, NeedsGlobal };

/// Restores up to δ-1 failures in `group` from its first r intact nodes.
inline LocalOutcome local_repair(DssState& s, std::uint32_t group) {
  const MrLrcParams& p = s.params();
  const ExtField& F = p.field();
  const auto failed = s.failed_in_group(group);
  if (failed.empty()) return LocalOutcome::NoOp;
  if (failed.size() > p.delta - 1) return LocalOutcome::NeedsGlobal;

  std::vector<std::size_t> cols;
  std::vector<Gf> known;
  for (std::uint32_t j = 0; j < p.group_size() && cols.size() < p.r(); ++j) {
    if (s.is_failed({group, j})) continue;
    cols.push_back(j);
    known.push_back(s.read({group, j}));
  }
  const Matrix& A = p.A[group - 1];
  const auto inv = inverse(F, A.select_columns(cols));
  if (!inv) throw std::logic_error("local generator submatrix is singular");
  const auto outer = multiply(F, std::span<const Gf>(known), *inv);
  const auto block = multiply(F, std::span<const Gf>(outer), A);
  for (auto j : failed) s.restore({group, j}, block[j]);
  return LocalOutcome::Repaired;
}

inline bool locators_p_independent(const MrLrcParams& p, std::span<const NodeId> positions) {
  std::vector<Gf> b;
  for (auto id : positions) b.push_back(p.tilde_b[p.global_index(id)]);
  return is_p_independent(p.field(), b);
}

/// Lexicographically smallest set of k intact positions with at most r per
/// group. Positions in `preferred` are taken first, which maximizes the
/// overlap with an eavesdropper's stored observations.
inline RepairSet choose_repair_set(const DssState& s, const std::set<NodeId>& preferred = {}) {
  const MrLrcParams& p = s.params();
  std::map<std::uint32_t, std::uint32_t> per_group;
  std::set<NodeId> chosen;
  auto take = [&](bool want_preferred) {
    for (std::uint32_t mu = 0; mu < p.N && chosen.size() < p.k(); ++mu) {
      const NodeId id = p.node_at(mu);
      if (s.is_failed(id) || chosen.count(id) || preferred.count(id) != (want_preferred ? 1u : 0u)) continue;
      auto& cnt = per_group[id.group];
      if (cnt == p.r()) continue;
      ++cnt;
      chosen.insert(id);
    }
  };
  take(true);
  take(false);
  if (chosen.size() < p.k())
    throw Unrecoverable("only " + std::to_string(chosen.size()) + " usable intact symbols, need k=" + std::to_string(p.k()));
  RepairSet rs{{chosen.begin(), chosen.end()}};
  if (!locators_p_independent(p, rs.positions)) throw std::logic_error("repair set locators are not P-independent");
  return rs;
}

/// L_i: deg < k, equal to c/β̃ on group i's repair-set points and 0 on the
/// other groups' points.
inline SkewPoly local_polynomial(const DssState& s, std::uint32_t group, const RepairSet& delta) {
  const MrLrcParams& p = s.params();
  const ExtField& F = p.field();
  const auto gs = delta.groups();
  if (!std::binary_search(gs.begin(), gs.end(), group))
    throw std::invalid_argument("group " + std::to_string(group) + " has no node in the repair set");
  std::vector<InterpolationPoint> pts;
  for (auto id : delta.positions) {
    const std::uint32_t mu = p.global_index(id);
    const Gf v = id.group == group ? F.div(s.read(id), p.tilde_beta[mu]) : F.zero();
    pts.push_back({p.tilde_b[mu], v});
  }
  return newton_interpolate(p.lrs.field, pts);
}

/// Failures each group cannot fix locally, summed over groups.
inline std::uint32_t global_failure_load(const DssState& s) {
  std::uint32_t load = 0;
  for (std::uint32_t i = 1; i <= s.params().g(); ++i) {
    const auto f = static_cast<std::uint32_t>(s.failed_in_group(i).size());
    if (f > s.params().delta - 1) load += f - (s.params().delta - 1);
  }
  return load;
}

struct GlobalRepairOptions {
  std::optional<RepairSet> delta;
  std::optional<ForwardingList> flist;
};

namespace detail {

// Positions of the target restored by the global step: the smallest failed
// indices, as many as exceed the local capability.
inline std::vector<NodeId> global_positions(const DssState& s, std::uint32_t target) {
  const auto failed = s.failed_in_group(target);
  const std::size_t count = failed.size() - (s.params().delta - 1);
  std::vector<NodeId> out;
  for (std::size_t t = 0; t < count; ++t) out.push_back({target, failed[t]});
  return out;
}

inline void check_global_preconditions(const DssState& s, std::uint32_t target) {
  if (target < 1 || target > s.params().g()) throw std::out_of_range("target group out of range");
  if (!s.needs_global(target))
    throw std::invalid_argument("group " + std::to_string(target) + " does not need global repair");
  const auto load = global_failure_load(s);
  if (load > s.params().h)
    throw Unrecoverable("failure pattern needs " + std::to_string(load) + " global repairs, code tolerates h=" +
                        std::to_string(s.params().h));
}

inline RepairSet resolve_delta(const DssState& s, const GlobalRepairOptions& opt) {
  const MrLrcParams& p = s.params();
  if (!opt.delta) return choose_repair_set(s);
  RepairSet rs = *opt.delta;
  std::sort(rs.positions.begin(), rs.positions.end());
  if (rs.positions.size() != p.k()) throw ConfigError("repair_set must have exactly k positions");
  std::map<std::uint32_t, std::uint32_t> per_group;
  for (std::size_t t = 0; t < rs.positions.size(); ++t) {
    const NodeId id = rs.positions[t];
    p.global_index(id);
    if (t && rs.positions[t - 1] == id) throw ConfigError("repair_set repeats " + to_string(id));
    if (s.is_failed(id)) throw ConfigError("repair_set uses failed node " + to_string(id));
    if (++per_group[id.group] > p.r()) throw ConfigError("repair_set uses more than r nodes of one group");
  }
  if (!locators_p_independent(p, rs.positions)) throw ConfigError("repair_set locators are not P-independent");
  return rs;
}

inline void finish_round(DssState& s, RepairRound round) {
  if (!round.local.empty()) {
    SkewPoly sum(s.params().lrs.field);
    for (const auto& [i, L] : round.local) sum = sum + L;
    if (!(sum == s.f())) throw std::logic_error("local polynomials do not sum to the encoding polynomial");
  }
  const std::uint32_t target = round.target;
  s.record(std::move(round));
  if (local_repair(s, target) == LocalOutcome::NeedsGlobal)
    throw std::logic_error("group still needs global repair after the global step");
}

}  // namespace detail

/// Every contributing CPU sends L_i(b̃') straight to the repairing CPU, one
/// message per failed position.
inline RepairRound direct_repair(DssState& s, std::uint32_t target, const GlobalRepairOptions& opt = {}) {
  detail::check_global_preconditions(s, target);
  const MrLrcParams& p = s.params();
  const ExtField& F = p.field();
  RepairRound round;
  round.round = s.next_round();
  round.scheme = Scheme::Direct;
  round.target = target;
  round.delta = detail::resolve_delta(s, opt);
  round.repaired = detail::global_positions(s, target);
  for (auto i : round.delta.groups()) round.local.emplace(i, local_polynomial(s, i, round.delta));

  for (auto id : round.repaired) {
    const std::uint32_t mu = p.global_index(id);
    Gf acc = F.zero();
    for (const auto& [i, L] : round.local) {
      const Gf v = skew_eval(L, p.tilde_b[mu]);
      acc = F.add(acc, v);
      if (i != target) s.log({round.round, Scheme::Direct, i, target, mu, v});
    }
    s.restore(id, F.mul(acc, p.tilde_beta[mu]));
  }
  detail::finish_round(s, round);
  return s.rounds().back();
}

/// CPUs along ℱ add their own contribution to the running sum and pass it on;
/// the repairing CPU receives one aggregate per failed position.
inline RepairRound forwarded_repair(DssState& s, std::uint32_t target, const GlobalRepairOptions& opt = {}) {
  detail::check_global_preconditions(s, target);
  const MrLrcParams& p = s.params();
  const ExtField& F = p.field();
  RepairRound round;
  round.round = s.next_round();
  round.scheme = Scheme::Forwarded;
  round.target = target;
  round.delta = detail::resolve_delta(s, opt);
  round.repaired = detail::global_positions(s, target);
  const auto groups = round.delta.groups();
  round.flist = opt.flist ? *opt.flist : ForwardingList::ascending(p.g(), target);
  round.flist->validate(p.g(), target, groups);
  for (auto i : groups) round.local.emplace(i, local_polynomial(s, i, round.delta));

  const auto& order = round.flist->order;
  for (auto id : round.repaired) {
    const std::uint32_t mu = p.global_index(id);
    Gf acc = F.zero();
    for (std::size_t t = 0; t < order.size(); ++t) {
      if (auto it = round.local.find(order[t]); it != round.local.end())
        acc = F.add(acc, skew_eval(it->second, p.tilde_b[mu]));
      if (t + 1 < order.size()) s.log({round.round, Scheme::Forwarded, order[t], order[t + 1], mu, acc});
    }
    s.restore(id, F.mul(acc, p.tilde_beta[mu]));
  }
  detail::finish_round(s, round);
  return s.rounds().back();
}

/// Baseline: the repairing CPU downloads k - ν raw symbols, decodes f and
/// rebuilds its group.
inline RepairRound naive_repair(DssState& s, std::uint32_t target, const GlobalRepairOptions& opt = {}) {
  detail::check_global_preconditions(s, target);
  const MrLrcParams& p = s.params();
  const ExtField& F = p.field();
  RepairRound round;
  round.round = s.next_round();
  round.scheme = Scheme::Naive;
  round.target = target;
  round.repaired = detail::global_positions(s, target);

  std::vector<KnownSymbol> known;
  for (std::uint32_t j = 0; j < p.group_size(); ++j)
    if (!s.is_failed({target, j})) known.push_back({p.global_index({target, j}), s.read({target, j})});
  std::map<std::uint32_t, std::uint32_t> per_group;
  std::vector<NodeId> candidates;
  if (opt.delta) {
    for (auto id : opt.delta->positions)
      if (id.group != target) candidates.push_back(id);
  } else {
    for (std::uint32_t mu = 0; mu < p.N; ++mu)
      if (p.node_at(mu).group != target) candidates.push_back(p.node_at(mu));
  }
  for (auto id : candidates) {
    if (known.size() >= p.k()) break;
    if (s.is_failed(id) || per_group[id.group] == p.r()) continue;
    ++per_group[id.group];
    const Gf v = s.read(id);
    known.push_back({p.global_index(id), v});
    round.downloaded.push_back(id);
    s.log({round.round, Scheme::Naive, id.group, target, -1, v});
  }
  const SkewPoly f = decode_global(p, known);
  for (auto id : round.repaired) {
    const std::uint32_t mu = p.global_index(id);
    s.restore(id, F.mul(skew_eval(f, p.tilde_b[mu]), p.tilde_beta[mu]));
  }
  detail::finish_round(s, round);
  return s.rounds().back();
}

inline RepairRound global_repair(DssState& s, Scheme scheme, std::uint32_t target, const GlobalRepairOptions& opt = {}) {
  switch (scheme) {
    case Scheme::Naive: return naive_repair(s, target, opt);
    case Scheme::Direct: return direct_repair(s, target, opt);
    case Scheme::Forwarded: return forwarded_repair(s, target, opt);
  }
  throw std::logic_error("unknown scheme");
}

/// Local repair everywhere first, then one global round per group that still
/// needs it, in ascending group order. `per_target` supplies optional repair
/// sets and forwarding lists.
inline void repair_all(DssState& s, Scheme scheme, const std::map<std::uint32_t, GlobalRepairOptions>& per_target = {}) {
  const std::uint32_t g = s.params().g();
  if (global_failure_load(s) > s.params().h)
    throw Unrecoverable("failure pattern needs " + std::to_string(global_failure_load(s)) +
                        " global repairs, code tolerates h=" + std::to_string(s.params().h));
  for (std::uint32_t i = 1; i <= g; ++i) local_repair(s, i);
  for (std::uint32_t i = 1; i <= g; ++i) {
    if (!s.needs_global(i)) continue;
    auto it = per_target.find(i);
    global_repair(s, scheme, i, it == per_target.end() ? GlobalRepairOptions{} : it->second);
  }
  if (!s.failed_nodes().empty()) throw std::logic_error("nodes left failed after repair");
}

inline void write_transcript_csv(std::ostream& os, const ExtField& field, std::span<const Message> transcript) {
  os << "round,scheme,from_cpu,to_cpu,failed_locator_index,payload\n";
  for (const auto& m : transcript)
    os << m.round << ',' << to_string(m.scheme) << ',' << m.from_cpu << ',' << m.to_cpu << ','
       << m.failed_locator_index << ',' << to_string(field, m.payload) << '\n';
}

}  // namespace mrlrc
