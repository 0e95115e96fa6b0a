// SPDX-License-Identifier: Apache-2.0
//
// JSON scenario files, the simulate/analyze driver, its text report, and the
// parameter sweep over the number of groups.

#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mrlrc/dss.hpp"
#include "mrlrc/errors.hpp"
#include "mrlrc/galois.hpp"
#include "mrlrc/mrlrc.hpp"
#include "mrlrc/secrecy.hpp"

namespace mrlrc {

using Json = nlohmann::json;

struct Scenario {
  std::uint32_t q = 0, m = 0;
  std::vector<std::uint32_t> modulus;
  std::uint32_t g = 0, r = 0, delta = 1, k = 0, k_e = 0;

  // Eavesdropper: explicit lists, or counts placed worst-case.
  bool worst_case = false;
  std::set<NodeId> l1_nodes;
  std::set<std::uint32_t> l2_groups;
  std::uint32_t l1 = 0, l2 = 0;

  std::vector<NodeId> failures;
  std::optional<std::uint32_t> random_failures;
  std::uint64_t failure_seed = 0;

  Scheme scheme = Scheme::Direct;
  std::optional<std::vector<std::uint32_t>> forwarding_list;
  std::string repair_set_policy = "default";  // default | adversarial | explicit
  std::vector<NodeId> repair_set;
  std::uint64_t seed = 0;
};

namespace detail {

inline const Json& require(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(path + key + " is required");
  return j.at(key);
}

inline std::uint64_t as_uint(const Json& j, const std::string& name) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) throw ConfigError(name + " must be a non-negative integer");
  return j.get<std::uint64_t>();
}

inline std::uint32_t get_u32(const Json& j, const std::string& key, const std::string& path) {
  const auto v = as_uint(require(j, key, path), path + key);
  if (v > UINT32_MAX) throw ConfigError(path + key + " is too large");
  return static_cast<std::uint32_t>(v);
}

inline NodeId as_node(const Json& j, const std::string& name) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(name + " entries must be [group, index] pairs");
  return {static_cast<std::uint32_t>(as_uint(j[0], name)), static_cast<std::uint32_t>(as_uint(j[1], name))};
}

inline std::vector<NodeId> as_nodes(const Json& j, const std::string& name) {
  if (!j.is_array()) throw ConfigError(name + " must be a list of [group, index] pairs");
  std::vector<NodeId> out;
  for (const auto& e : j) out.push_back(as_node(e, name));
  return out;
}

inline std::vector<std::uint32_t> as_u32_list(const Json& j, const std::string& name) {
  if (!j.is_array()) throw ConfigError(name + " must be a list of integers");
  std::vector<std::uint32_t> out;
  for (const auto& e : j) out.push_back(static_cast<std::uint32_t>(as_uint(e, name)));
  return out;
}

}  // namespace detail

inline Scenario parse_scenario(const Json& j) {
  using namespace detail;
  Scenario s;
  const Json& field = require(j, "field", "");
  s.q = get_u32(field, "q", "field.");
  s.m = field.contains("m") ? get_u32(field, "m", "field.") : 0;
  if (field.contains("modulus")) s.modulus = as_u32_list(field.at("modulus"), "field.modulus");

  const Json& code = require(j, "code", "");
  s.g = get_u32(code, "g", "code.");
  s.r = get_u32(code, "r", "code.");
  s.delta = get_u32(code, "delta", "code.");
  s.k = get_u32(code, "k", "code.");
  if (code.contains("k_e")) s.k_e = get_u32(code, "k_e", "code.");
  if (s.m == 0) s.m = s.r;

  if (j.contains("eavesdropper")) {
    const Json& ev = j.at("eavesdropper");
    const std::string placement = ev.value("placement", "explicit");
    if (placement == "worst-case") {
      s.worst_case = true;
      s.l1 = ev.contains("l1") ? get_u32(ev, "l1", "eavesdropper.") : 0;
      s.l2 = ev.contains("l2") ? get_u32(ev, "l2", "eavesdropper.") : 0;
    } else if (placement == "explicit") {
      if (ev.contains("l1_nodes")) {
        const auto nodes = as_nodes(ev.at("l1_nodes"), "eavesdropper.l1_nodes");
        s.l1_nodes.insert(nodes.begin(), nodes.end());
      }
      if (ev.contains("l2_groups")) {
        const auto groups = as_u32_list(ev.at("l2_groups"), "eavesdropper.l2_groups");
        s.l2_groups.insert(groups.begin(), groups.end());
      }
    } else {
      throw ConfigError("eavesdropper.placement must be explicit or worst-case");
    }
  }

  if (j.contains("failures")) {
    const Json& f = j.at("failures");
    if (f.contains("positions")) s.failures = as_nodes(f.at("positions"), "failures.positions");
    if (f.contains("random_count")) {
      s.random_failures = get_u32(f, "random_count", "failures.");
      s.failure_seed = f.contains("seed") ? as_uint(f.at("seed"), "failures.seed") : 0;
    }
  }

  if (j.contains("scheme")) {
    if (!j.at("scheme").is_string()) throw ConfigError("scheme must be a string");
    s.scheme = parse_scheme(j.at("scheme").get<std::string>());
  }
  if (j.contains("forwarding_list")) s.forwarding_list = as_u32_list(j.at("forwarding_list"), "forwarding_list");
  if (j.contains("repair_set")) {
    const Json& rs = j.at("repair_set");
    if (rs.is_string()) {
      s.repair_set_policy = rs.get<std::string>();
      if (s.repair_set_policy != "default" && s.repair_set_policy != "adversarial")
        throw ConfigError("repair_set must be default, adversarial or a list of nodes");
    } else {
      s.repair_set = as_nodes(rs, "repair_set");
      s.repair_set_policy = "explicit";
    }
  } else if (s.worst_case) {
    s.repair_set_policy = "adversarial";
  }
  if (j.contains("seed")) s.seed = as_uint(j.at("seed"), "seed");
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return parse_scenario(j);
}

struct SimulationResult {
  Scenario scenario;
  std::shared_ptr<const MrLrcParams> params;
  std::optional<DssState> state;
  std::vector<NodeId> failures;
  EavesdropperSpec spec;
  std::vector<std::uint32_t> e;
  ObservationMatrix obs;
  std::size_t oracle_k_e = 0;
  std::optional<FormulaResult> formula;
  std::string formula_note;
};

namespace detail {

inline std::vector<NodeId> draw_failures(const MrLrcParams& p, std::uint32_t count, std::uint64_t seed) {
  if (count > p.N) throw ConfigError("failures.random_count exceeds the number of nodes");
  std::vector<std::uint32_t> idx(p.N);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<NodeId> out;
  for (std::uint32_t t = 0; t < count; ++t) out.push_back(p.node_at(idx[t]));
  std::sort(out.begin(), out.end());
  return out;
}

// First group that still needs global repair once local repair is done.
inline std::optional<std::uint32_t> first_global_target(const MrLrcParams& p, std::span<const NodeId> failures) {
  std::vector<std::uint32_t> count(p.g() + 1, 0);
  for (auto id : failures) ++count[id.group];
  for (std::uint32_t i = 1; i <= p.g(); ++i)
    if (count[i] > p.delta - 1) return i;
  return std::nullopt;
}

}  // namespace detail

/// Encodes, injects failures, repairs (local first, then global per scheme)
/// and assembles the eavesdropper's observations.
inline SimulationResult simulate(const Scenario& sc) {
  SimulationResult res;
  res.scenario = sc;
  const FieldPtr field = ExtField::create(sc.q, sc.m, sc.modulus);
  res.params = std::make_shared<const MrLrcParams>(mrlrc_setup(field, sc.g, sc.r, sc.delta, sc.k));
  const MrLrcParams& p = *res.params;
  if (sc.k_e >= p.k()) throw ConfigError("code.k_e must be < k");

  for (auto id : sc.failures)
    if (id.group < 1 || id.group > p.g() || id.index >= p.group_size())
      throw ConfigError("failures.positions entry " + to_string(id) + " out of range");
  res.failures = sc.failures;
  if (sc.random_failures) {
    const auto extra = detail::draw_failures(p, *sc.random_failures, sc.failure_seed);
    res.failures.insert(res.failures.end(), extra.begin(), extra.end());
  }
  std::sort(res.failures.begin(), res.failures.end());
  res.failures.erase(std::unique(res.failures.begin(), res.failures.end()), res.failures.end());

  const auto target = detail::first_global_target(p, res.failures);
  ForwardingList flist = ForwardingList::ascending(p.g(), target.value_or(1));
  if (sc.forwarding_list) {
    flist.order = *sc.forwarding_list;
    if (target) flist.validate(p.g(), *target, {});
  }

  const SecrecyParams sp = SecrecyParams::of(p);
  if (sc.worst_case) {
    if (sc.scheme == Scheme::Naive) throw ConfigError("worst-case placement needs the direct or forwarded scheme");
    const auto pl = worst_case_placement(sc.scheme, sp, flist, sc.l1, sc.l2);
    res.spec.l2_groups = pl.l2_groups;
    for (std::uint32_t i = 1; i <= p.g(); ++i)
      for (std::uint32_t j = 0; j < pl.l1_per_group[i - 1]; ++j) res.spec.l1_nodes.insert({i, j});
  } else {
    res.spec.l1_nodes = sc.l1_nodes;
    res.spec.l2_groups = sc.l2_groups;
  }
  res.spec.validate(p);

  std::mt19937_64 rng(sc.seed);
  std::vector<Gf> u_s(p.k() - sc.k_e);
  std::uniform_int_distribution<std::uint32_t> pick(0, p.field().order() - 1);
  for (auto& x : u_s) x = Gf{pick(rng)};
  auto [msg, codeword] = secure_encode(p, u_s, sc.k_e, rng);
  res.state.emplace(res.params, msg.u);
  DssState& st = *res.state;
  fail_nodes(st, res.failures);

  std::map<std::uint32_t, GlobalRepairOptions> per_target;
  if (target) {
    GlobalRepairOptions opt;
    if (sc.repair_set_policy == "explicit") {
      opt.delta = RepairSet{sc.repair_set};
    } else if (sc.repair_set_policy == "adversarial") {
      // Chosen on the locally repaired state.
      DssState probe = st;
      for (std::uint32_t i = 1; i <= p.g(); ++i) local_repair(probe, i);
      opt.delta = choose_repair_set(probe, res.spec.observed_nodes(p));
    }
    if (sc.scheme == Scheme::Forwarded) opt.flist = flist;
    per_target.emplace(*target, opt);
  }
  repair_all(st, sc.scheme, per_target);

  res.e = observed_per_group(p, res.spec);
  res.obs = observe(st, res.spec);
  res.oracle_k_e = eavesdropped_dimension(p.field(), res.obs);
  if (sc.scheme == Scheme::Naive) {
    res.formula_note = "no closed form for naive repair";
  } else {
    try {
      const auto& used = st.rounds().empty() || !st.rounds().front().flist ? flist : *st.rounds().front().flist;
      res.formula = formula_for(sc.scheme, sp, static_cast<std::int64_t>(res.spec.l1_nodes.size()), used,
                                res.spec.l2_groups, res.e);
    } catch (const HypothesisError& e) {
      res.formula_note = e.what();
    }
  }
  return res;
}

inline void write_report(std::ostream& os, const SimulationResult& res) {
  const MrLrcParams& p = *res.params;
  const DssState& st = *res.state;
  auto nodes = [](auto&& list) {
    std::string s;
    for (auto id : list) s += (s.empty() ? "" : " ") + to_string(id);
    return s.empty() ? std::string("-") : s;
  };
  os << "code          q=" << p.field().q() << " m=" << p.field().m() << " g=" << p.g() << " r=" << p.r()
     << " delta=" << p.delta << " k=" << p.k() << " h=" << p.h << " N=" << p.N << '\n';
  os << "scheme        " << to_string(res.scenario.scheme) << '\n';
  os << "failures      " << nodes(res.failures) << '\n';
  for (const auto& r : st.rounds()) {
    os << "round " << r.round << "       target " << r.target << ", repaired " << nodes(r.repaired) << '\n';
    if (r.scheme != Scheme::Naive) os << "  repair set  " << nodes(r.delta.positions) << '\n';
    if (r.flist) {
      os << "  forwarding ";
      for (auto v : r.flist->order) os << ' ' << v;
      os << '\n';
    }
    if (r.scheme == Scheme::Naive) os << "  downloaded  " << nodes(r.downloaded) << '\n';
  }
  os << "messages      " << st.transcript().size() << '\n';
  os << "l1 nodes      " << nodes(res.spec.l1_nodes) << '\n';
  os << "l2 groups    ";
  if (res.spec.l2_groups.empty()) os << " -";
  for (auto i : res.spec.l2_groups) os << ' ' << i;
  os << '\n';
  os << "e            ";
  for (auto x : res.e) os << ' ' << x;
  os << '\n';
  os << "static rows   " << res.obs.m_st.rows() << " (raw " << res.obs.static_raw_rows << ")\n";
  os << "traffic rows  " << res.obs.m_dl.rows() << '\n';
  if (res.formula) {
    os << "k_e formula   " << res.formula->k_e << '\n';
    os << "k_s formula   " << res.formula->k_s << '\n';
    if (!res.formula->warning.empty()) os << "warning       " << res.formula->warning << '\n';
  } else {
    os << "k_e formula   n/a (" << res.formula_note << ")\n";
    os << "k_s formula   n/a\n";
  }
  const auto oracle_ks = static_cast<std::int64_t>(p.k()) - static_cast<std::int64_t>(res.oracle_k_e);
  os << "k_e oracle    " << res.oracle_k_e << '\n';
  os << "k_s oracle    " << oracle_ks << '\n';
  if (res.formula) {
    const auto oracle = static_cast<std::int64_t>(res.oracle_k_e);
    os << "agreement     "
       << (res.formula->k_e == oracle ? "yes" : res.formula->k_e > oracle ? "no (oracle below formula)" : "no (oracle above formula)")
       << '\n';
  }
  if (res.scenario.k_e > 0)
    os << "padding       k_e=" << res.scenario.k_e << (res.scenario.k_e >= res.oracle_k_e ? " covers" : " does not cover")
       << " the observed dimension\n";
}

// ---------------------------------------------------------------------------
// Sweep over g.

struct SweepConfig {
  std::uint32_t q = 17, m = 0, r = 0, delta = 2, h = 0;
  std::vector<std::uint32_t> modulus;
  std::uint32_t l1 = 0, l2 = 1;
};

inline SweepConfig parse_sweep_config(const Json& j) {
  using namespace detail;
  SweepConfig c;
  const Json& field = require(j, "field", "");
  c.q = get_u32(field, "q", "field.");
  if (field.contains("modulus")) c.modulus = as_u32_list(field.at("modulus"), "field.modulus");
  const Json& code = require(j, "code", "");
  c.r = get_u32(code, "r", "code.");
  c.h = get_u32(code, "h", "code.");
  if (code.contains("delta")) c.delta = get_u32(code, "delta", "code.");
  c.m = field.contains("m") ? get_u32(field, "m", "field.") : c.r;
  if (j.contains("eavesdropper")) {
    const Json& ev = j.at("eavesdropper");
    if (ev.contains("l1")) c.l1 = get_u32(ev, "l1", "eavesdropper.");
    if (ev.contains("l2")) c.l2 = get_u32(ev, "l2", "eavesdropper.");
  }
  return c;
}

inline SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    return parse_sweep_config(Json::parse(in));
  } catch (const Json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
}

struct SweepRow {
  std::uint32_t g = 0;
  std::int64_t k = 0, ks_direct = 0, ks_forwarded = 0, ks_lrc_no_global = 0;
};

/// Formula values at worst-case placement, repairing group 1 with
/// ℱ = (2, …, g, 1). Rows where the formula's hypotheses fail report 0.
/// Each g is also checked against the construction's field constraints.
inline std::vector<SweepRow> sweep(const SweepConfig& c, std::uint32_t g_min, std::uint32_t g_max) {
  if (g_min < 1 || g_min > g_max) throw ConfigError("sweep needs 1 <= g-min <= g-max");
  if (g_max > c.q - 1) throw ConfigError("sweep g-max exceeds q-1 (q=" + std::to_string(c.q) + ")");
  if (c.q <= c.r + c.delta - 2) throw ConfigError("sweep needs q > r+delta-2");
  const FieldPtr field = ExtField::create(c.q, c.m, c.modulus);
  std::vector<SweepRow> rows;
  for (std::uint32_t g = g_min; g <= g_max; ++g) {
    SweepRow row;
    row.g = g;
    row.k = static_cast<std::int64_t>(c.r) * g - c.h;
    if (row.k < 1) throw ConfigError("sweep: k = r*g - h is not positive at g=" + std::to_string(g));
    mrlrc_setup(field, g, c.r, c.delta, static_cast<std::uint32_t>(row.k));
    const SecrecyParams sp{g, c.r, c.h, row.k};
    const auto flist = ForwardingList::ascending(g, 1);
    auto ks = [&](Scheme scheme) -> std::int64_t {
      try {
        return worst_case_placement(scheme, sp, flist, c.l1, c.l2).formula.k_s;
      } catch (const HypothesisError&) {
        return 0;
      }
    };
    row.ks_direct = ks(Scheme::Direct);
    row.ks_forwarded = ks(Scheme::Forwarded);
    row.ks_lrc_no_global = std::max<std::int64_t>(0, static_cast<std::int64_t>(c.r) * g - (c.l2 * c.r + c.l1));
    rows.push_back(row);
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
  os << "g,k,ks_direct,ks_forwarded,ks_lrc_no_global\n";
  for (const auto& r : rows)
    os << r.g << ',' << r.k << ',' << r.ks_direct << ',' << r.ks_forwarded << ',' << r.ks_lrc_no_global << '\n';
}

}  // namespace mrlrc
