// SPDX-License-Identifier: Apache-2.0
//
// Scenario generators and the acceptance checks run by `mrlrc selftest` and
// the acceptance test binary.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mrlrc/dss.hpp"
#include "mrlrc/galois.hpp"
#include "mrlrc/mrlrc.hpp"
#include "mrlrc/scenario.hpp"
#include "mrlrc/secrecy.hpp"

namespace mrlrc {

// ---------------------------------------------------------------------------
// Single-target repair scenarios.

struct RepairScenario {
  std::shared_ptr<const MrLrcParams> params;
  Scheme scheme = Scheme::Direct;
  std::uint32_t target = 1;
  std::vector<NodeId> failures;
  EavesdropperSpec spec;
  ForwardingList flist;
  bool adversarial_delta = false;
};

struct ScenarioOutcome {
  std::int64_t formula_k_e = 0;
  std::size_t oracle_k_e = 0;
  RepairSet delta;
};

namespace detail {

inline std::shared_ptr<const MrLrcParams> code(std::uint32_t q, std::uint32_t m, std::uint32_t g, std::uint32_t r,
                                               std::uint32_t delta, std::uint32_t k) {
  return std::make_shared<const MrLrcParams>(mrlrc_setup(ExtField::create(q, m), g, r, delta, k));
}

// Small codes with h >= 1, used by the random scenario generators.
inline const std::vector<std::shared_ptr<const MrLrcParams>>& scenario_codes() {
  static const std::vector<std::shared_ptr<const MrLrcParams>> codes{
      code(5, 3, 3, 3, 3, 7), code(5, 2, 3, 2, 2, 5), code(7, 3, 4, 3, 2, 10),
      code(5, 3, 4, 3, 2, 9), code(7, 2, 5, 2, 2, 8),
  };
  return codes;
}

template <class Rng>
std::vector<std::uint32_t> sample(std::uint32_t n, std::uint32_t count, Rng& rng) {
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

template <class Rng>
std::uint32_t uniform(std::uint32_t lo, std::uint32_t hi, Rng& rng) {
  return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng);
}

// h+δ-1 failures in the target, optionally a few locally repairable ones elsewhere.
template <class Rng>
std::vector<NodeId> target_failures(const MrLrcParams& p, std::uint32_t target, std::uint32_t globals, bool extra,
                                    Rng& rng) {
  std::vector<NodeId> out;
  for (auto j : sample(p.group_size(), p.delta - 1 + globals, rng)) out.push_back({target, j});
  if (extra)
    for (std::uint32_t i = 1; i <= p.g(); ++i)
      if (i != target)
        for (auto j : sample(p.group_size(), uniform(0, p.delta - 1, rng), rng)) out.push_back({i, j});
  std::sort(out.begin(), out.end());
  return out;
}

// Places l1 nodes in the allowed groups, at most `cap(i)` per group.
template <class Rng>
std::set<NodeId> place_l1(const MrLrcParams& p, std::uint32_t l1, const std::vector<std::uint32_t>& groups,
                          const std::function<std::uint32_t(std::uint32_t)>& cap, Rng& rng) {
  std::vector<NodeId> pool;
  for (auto i : groups)
    for (std::uint32_t j = 0; j < p.group_size(); ++j) pool.push_back({i, j});
  std::shuffle(pool.begin(), pool.end(), rng);
  std::map<std::uint32_t, std::uint32_t> used;
  std::set<NodeId> out;
  for (auto id : pool) {
    if (out.size() == l1) break;
    if (used[id.group] >= cap(id.group)) continue;
    ++used[id.group];
    out.insert(id);
  }
  return out;
}

}  // namespace detail

/// Any admissible single-target scenario: random code, scheme, failures,
/// eavesdropper and forwarding order, with l1 + l2·r < k.
template <class Rng>
RepairScenario random_scenario(Rng& rng) {
  const auto& codes = detail::scenario_codes();
  RepairScenario sc;
  sc.params = codes[detail::uniform(0, static_cast<std::uint32_t>(codes.size()) - 1, rng)];
  const MrLrcParams& p = *sc.params;
  sc.scheme = detail::uniform(0, 1, rng) ? Scheme::Forwarded : Scheme::Direct;
  sc.target = detail::uniform(1, p.g(), rng);
  sc.failures = detail::target_failures(p, sc.target, detail::uniform(1, p.h, rng), true, rng);

  const std::uint32_t l2 = detail::uniform(0, std::min(p.g() - 1, (p.k() - 1) / p.r()), rng);
  for (auto i : detail::sample(p.g(), l2, rng)) sc.spec.l2_groups.insert(i + 1);
  std::vector<std::uint32_t> free_groups;
  for (std::uint32_t i = 1; i <= p.g(); ++i)
    if (!sc.spec.observes_group(i)) free_groups.push_back(i);
  const std::uint32_t l1 = detail::uniform(0, p.k() - 1 - l2 * p.r(), rng);
  sc.spec.l1_nodes = detail::place_l1(p, l1, free_groups, [&](std::uint32_t) { return p.group_size(); }, rng);

  std::vector<std::uint32_t> others;
  for (std::uint32_t i = 1; i <= p.g(); ++i)
    if (i != sc.target) others.push_back(i);
  std::shuffle(others.begin(), others.end(), rng);
  sc.flist.order = others;
  sc.flist.order.push_back(sc.target);
  sc.adversarial_delta = detail::uniform(0, 1, rng) == 1;
  return sc;
}

/// A scenario built so that the closed form is attained.
///
/// Direct: the target is l2-observed and loses h+δ-1 nodes; l1 nodes sit in
/// unobserved groups, at most r per group. Forwarded: the target is not
/// observed; l1 nodes sit in unobserved groups, at most r per group and at
/// most r-h in the target. In both, the repair set prefers observed nodes.
template <class Rng>
RepairScenario adversarial_scenario(Rng& rng) {
  const auto& codes = detail::scenario_codes();
  RepairScenario sc;
  sc.params = codes[detail::uniform(0, static_cast<std::uint32_t>(codes.size()) - 1, rng)];
  const MrLrcParams& p = *sc.params;
  sc.scheme = detail::uniform(0, 1, rng) ? Scheme::Forwarded : Scheme::Direct;
  sc.target = detail::uniform(1, p.g(), rng);
  sc.failures = detail::target_failures(p, sc.target, p.h, false, rng);
  sc.adversarial_delta = true;

  std::vector<std::uint32_t> others;
  for (std::uint32_t i = 1; i <= p.g(); ++i)
    if (i != sc.target) others.push_back(i);
  std::shuffle(others.begin(), others.end(), rng);
  sc.flist.order = others;
  sc.flist.order.push_back(sc.target);

  const std::uint32_t max_l2 = std::min(p.g() - 1, (p.k() - 1) / p.r());
  std::uint32_t l2 = 0;
  if (sc.scheme == Scheme::Direct) {
    l2 = detail::uniform(1, std::max(1u, max_l2), rng);
    sc.spec.l2_groups.insert(sc.target);
    std::vector<std::uint32_t> pick = others;
    std::shuffle(pick.begin(), pick.end(), rng);
    for (std::uint32_t t = 0; t + 1 < l2; ++t) sc.spec.l2_groups.insert(pick[t]);
  } else {
    l2 = detail::uniform(0, max_l2, rng);
    for (auto t : detail::sample(static_cast<std::uint32_t>(others.size()), l2, rng)) sc.spec.l2_groups.insert(others[t]);
  }
  std::vector<std::uint32_t> free_groups;
  for (std::uint32_t i = 1; i <= p.g(); ++i)
    if (!sc.spec.observes_group(i)) free_groups.push_back(i);
  const std::uint32_t l1 = detail::uniform(0, p.k() - 1 - l2 * p.r(), rng);
  const std::uint32_t target = sc.target;
  sc.spec.l1_nodes = detail::place_l1(p, l1, free_groups, [&](std::uint32_t i) {
    return i == target ? p.r() - p.h : p.r();
  }, rng);
  return sc;
}

/// Runs the scenario on a random message and returns formula and rank oracle.
template <class Rng>
ScenarioOutcome evaluate(const RepairScenario& sc, Rng& rng) {
  const MrLrcParams& p = *sc.params;
  std::uniform_int_distribution<std::uint32_t> pick(0, p.field().order() - 1);
  std::vector<Gf> u(p.k());
  for (auto& x : u) x = Gf{pick(rng)};
  DssState st(sc.params, u);
  fail_nodes(st, sc.failures);
  GlobalRepairOptions opt;
  if (sc.scheme == Scheme::Forwarded) opt.flist = sc.flist;
  if (sc.adversarial_delta) {
    DssState probe = st;
    for (std::uint32_t i = 1; i <= p.g(); ++i) local_repair(probe, i);
    opt.delta = choose_repair_set(probe, sc.spec.observed_nodes(p));
  }
  repair_all(st, sc.scheme, {{sc.target, opt}});
  ScenarioOutcome out;
  out.delta = st.rounds().front().delta;
  out.oracle_k_e = eavesdropped_dimension(p.field(), observe(st, sc.spec));
  out.formula_k_e = formula_for(sc.scheme, SecrecyParams::of(p), static_cast<std::int64_t>(sc.spec.l1_nodes.size()),
                                sc.flist, sc.spec.l2_groups, observed_per_group(p, sc.spec))
                        .k_e;
  return out;
}

inline std::string describe(const RepairScenario& sc) {
  const MrLrcParams& p = *sc.params;
  std::ostringstream os;
  os << "q=" << p.field().q() << " m=" << p.field().m() << " g=" << p.g() << " r=" << p.r() << " delta=" << p.delta
     << " k=" << p.k() << " " << to_string(sc.scheme) << " target=" << sc.target << " l2={";
  for (auto i : sc.spec.l2_groups) os << i << ' ';
  os << "} l1={";
  for (auto id : sc.spec.l1_nodes) os << to_string(id) << ' ';
  os << "} flist=";
  for (auto v : sc.flist.order) os << v << ' ';
  return os.str();
}

// ---------------------------------------------------------------------------
// Acceptance checks.

struct CheckResult {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::string tolerance;
  double limit_seconds = 0;
  std::function<CheckResult()> run;
};

struct SelftestOptions {
  bool corrupt_generator = false;
  std::uint64_t seed = 20240601;
};

namespace detail {

inline std::vector<NodeId> nodes(std::initializer_list<std::pair<std::uint32_t, std::uint32_t>> list) {
  std::vector<NodeId> out;
  for (auto [i, j] : list) out.push_back({i, j});
  return out;
}

inline CheckResult three_group_example() {
  const auto p = code(5, 3, 3, 3, 3, 7);
  const SecrecyParams sp = SecrecyParams::of(*p);
  const auto failures = nodes({{1, 0}, {1, 2}, {1, 3}, {1, 4}, {2, 1}, {2, 2}, {3, 0}, {3, 4}});
  const RepairSet delta{nodes({{1, 1}, {2, 0}, {2, 3}, {2, 4}, {3, 1}, {3, 2}, {3, 3}})};
  std::ostringstream os;
  bool ok = true;

  auto run = [&](Scheme scheme, const EavesdropperSpec& spec, const ForwardingList& flist) {
    DssState st(p, std::vector<Gf>{Gf{1}, Gf{7}, Gf{0}, Gf{42}, Gf{99}, Gf{3}, Gf{124}});
    fail_nodes(st, failures);
    GlobalRepairOptions opt{delta, std::nullopt};
    if (scheme == Scheme::Forwarded) opt.flist = flist;
    repair_all(st, scheme, {{1, opt}});
    const auto oracle = eavesdropped_dimension(p->field(), observe(st, spec));
    const auto f = formula_for(scheme, sp, static_cast<std::int64_t>(spec.l1_nodes.size()), flist, spec.l2_groups,
                               observed_per_group(*p, spec));
    os << to_string(scheme) << ": k_s formula " << f.k_s << ", k_e oracle " << oracle << "; ";
    ok = ok && f.k_s == 1 && oracle == 6;
  };
  run(Scheme::Direct, EavesdropperSpec{{{2, 0}}, {1}}, ForwardingList::ascending(3, 1));
  run(Scheme::Forwarded, EavesdropperSpec{{{2, 0}}, {3}}, ForwardingList{{2, 3, 1}});
  return {ok, os.str()};
}

inline CheckResult sweep_r7_h3() {
  SweepConfig c;
  c.q = 17;
  c.r = c.m = 7;
  c.h = 3;
  c.delta = 2;
  c.l1 = 0;
  c.l2 = 1;
  const auto rows = sweep(c, 1, 15);
  const std::vector<std::int64_t> forwarded{0, 4, 8, 15, 22, 29, 36, 43, 50, 57, 64, 71, 78, 85, 92};
  std::size_t matches = 0;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const std::int64_t g = static_cast<std::int64_t>(rows[t].g);
    matches += rows[t].ks_direct == 4 * (g - 1);
    matches += rows[t].ks_forwarded == forwarded[t];
    matches += rows[t].ks_lrc_no_global == 7 * (g - 1);
  }
  return {matches == 45, std::to_string(matches) + "/45 values match"};
}

inline CheckResult nine_node_observation() {
  const auto p = code(5, 2, 3, 2, 2, 5);
  DssState st(p, {Gf{3}, Gf{1}, Gf{4}, Gf{0}, Gf{2}});
  fail_nodes(st, nodes({{1, 0}, {1, 2}}));
  repair_all(st, Scheme::Direct);
  const EavesdropperSpec spec{{{2, 0}}, {1}};
  const auto obs = observe(st, spec);
  const auto rep = replay_reduction(p->field(), obs);
  const bool delta_ok = st.rounds().front().delta.positions == nodes({{1, 1}, {2, 0}, {2, 1}, {3, 0}, {3, 1}});
  std::ostringstream os;
  os << obs.rows() << "x" << obs.basis.size() << " rank " << rep.rank_m << ", reduced " << rep.unit_rows << " + "
     << rep.rank_m3;
  const bool ok = delta_ok && obs.rows() == 6 && obs.basis.size() == 5 && rep.rank_m == 4 && rep.rank_preserved() &&
                  rep.unit_rows == 2 && rep.rank_m3 == 2;
  return {ok, os.str()};
}

inline CheckResult local_polynomial_sum(std::uint64_t seed) {
  const auto p = code(5, 3, 3, 3, 3, 7);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> pick(0, p->field().order() - 1);
  int good = 0;
  for (int t = 0; t < 200; ++t) {
    std::vector<Gf> u(p->k());
    for (auto& x : u) x = Gf{pick(rng)};
    DssState st(p, u);
    // Random repair set: k nodes, at most r per group.
    std::vector<NodeId> all;
    for (std::uint32_t mu = 0; mu < p->N; ++mu) all.push_back(p->node_at(mu));
    std::shuffle(all.begin(), all.end(), rng);
    std::map<std::uint32_t, std::uint32_t> per;
    RepairSet delta;
    for (auto id : all)
      if (delta.positions.size() < p->k() && per[id.group]++ < p->r()) delta.positions.push_back(id);
    std::sort(delta.positions.begin(), delta.positions.end());
    SkewPoly sum(p->lrs.field, {});
    for (auto i : delta.groups()) sum = sum + local_polynomial(st, i, delta);
    good += sum == st.f();
  }
  return {good == 200, std::to_string(good) + "/200 sums equal f"};
}

inline CheckResult maximal_recoverability(bool corrupt) {
  const auto a = code(5, 2, 2, 2, 2, 3);
  auto b = code(7, 3, 3, 3, 2, 7);
  if (corrupt) {
    Matrix bad = local_generator(7, 3, 2);
    for (std::uint32_t i = 0; i < 3; ++i) bad(i, 3) = bad(i, 0);
    std::vector<Matrix> A(3, local_generator(7, 3, 2));
    A[1] = bad;
    b = std::make_shared<const MrLrcParams>(mrlrc_from_parts(b->lrs, 2, A, false));
  }
  const auto ra = check_maximally_recoverable(*a), rb = check_maximally_recoverable(*b);

  // Negative fixture: a parity column equal to a systematic one.
  const auto F = ExtField::create(5, 2);
  Matrix bad = local_generator(5, 2, 2);
  bad(0, 2) = Gf{1};
  bad(1, 2) = Gf{0};
  const auto neg = mrlrc_from_parts(lrs_setup(F, 2, 2, 3), 2, {local_generator(5, 2, 2), bad}, false);
  const auto rn = check_maximally_recoverable(neg);

  std::ostringstream os;
  os << "small " << (ra.maximally_recoverable ? "MR" : "not MR") << " (" << ra.minors << " minors), medium "
     << (rb.maximally_recoverable ? "MR" : "not MR") << " (" << rb.minors << " minors), negative fixture "
     << (rn.maximally_recoverable ? "MR" : "not MR");
  return {ra.maximally_recoverable && rb.maximally_recoverable && !rn.maximally_recoverable, os.str()};
}

inline CheckResult mutual_information() {
  const auto p = code(3, 2, 2, 2, 2, 3);
  const EavesdropperSpec spec{{}, {1}};
  const auto failures = nodes({{1, 0}, {1, 1}});
  auto observe_fn = [&](const std::vector<Gf>& u) {
    DssState st(p, u);
    fail_nodes(st, failures);
    repair_all(st, Scheme::Direct);
    return eavesdropper_view(st, spec);
  };
  const auto f = secrecy_dim_direct(SecrecyParams::of(*p), 0, 1, observed_per_group(*p, spec));
  const auto padded = mi_oracle(*p, static_cast<std::uint32_t>(f.k_e), observe_fn);
  const auto bare = mi_oracle(*p, 0, observe_fn);
  std::ostringstream os;
  os << "k_e=" << f.k_e << ": I=" << padded.mutual_information << ", H(E)=" << padded.h_e
     << "; no padding: I=" << bare.mutual_information;
  const bool ok = f.k_e == 2 && padded.mutual_information == Rational(0) && padded.observations_within_padding &&
                  padded.padding_determined && bare.mutual_information > Rational(0);
  return {ok, os.str()};
}

inline CheckResult entropy_equals_rank(std::uint64_t seed) {
  const auto F = ExtField::create(3, 1);
  std::mt19937_64 rng(seed);
  int good = 0;
  for (int t = 0; t < 50; ++t) {
    const std::uint32_t rows = uniform(1, 5, rng), cols = uniform(1, 4, rng);
    Matrix M(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) M(i, j) = Gf{uniform(0, 2, rng)};
    good += entropy_rank_check(*F, M.transposed()).equal;
  }
  return {good == 50, std::to_string(good) + "/50 entropies equal rank"};
}

inline CheckResult formula_vs_oracle(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int bounded = 0, equal = 0;
  std::string first_bad;
  for (int t = 0; t < 100; ++t) {
    const auto sc = random_scenario(rng);
    const auto out = evaluate(sc, rng);
    if (static_cast<std::int64_t>(out.oracle_k_e) <= out.formula_k_e)
      ++bounded;
    else if (first_bad.empty())
      first_bad = "; bound violated: " + describe(sc);
  }
  for (int t = 0; t < 50; ++t) {
    const auto sc = adversarial_scenario(rng);
    const auto out = evaluate(sc, rng);
    if (static_cast<std::int64_t>(out.oracle_k_e) == out.formula_k_e)
      ++equal;
    else if (first_bad.empty())
      first_bad = "; not attained: " + describe(sc) + " formula " + std::to_string(out.formula_k_e) + " oracle " +
                  std::to_string(out.oracle_k_e);
  }
  return {bounded == 100 && equal == 50,
          std::to_string(bounded) + "/100 bounded, " + std::to_string(equal) + "/50 attained" + first_bad};
}

inline CheckResult repair_equivalence(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int good = 0;
  const auto& codes = scenario_codes();
  for (int t = 0; t < 200; ++t) {
    const auto& p = codes[uniform(0, static_cast<std::uint32_t>(codes.size()) - 1, rng)];
    std::uniform_int_distribution<std::uint32_t> pick(0, p->field().order() - 1);
    std::vector<Gf> u(p->k());
    for (auto& x : u) x = Gf{pick(rng)};
    // Up to h global repairs spread over random groups.
    std::vector<NodeId> failures;
    std::uint32_t budget = uniform(0, p->h, rng);
    for (std::uint32_t i = 1; i <= p->g(); ++i) {
      const std::uint32_t globals = i == p->g() ? budget : uniform(0, budget, rng);
      budget -= globals;
      for (auto j : sample(p->group_size(), std::min(p->group_size(), uniform(0, p->delta - 1, rng) + globals), rng))
        failures.push_back({i, j});
    }
    std::vector<std::vector<Gf>> results;
    for (Scheme s : {Scheme::Naive, Scheme::Direct, Scheme::Forwarded}) {
      DssState st(p, u);
      fail_nodes(st, failures);
      repair_all(st, s);
      std::vector<Gf> values;
      for (std::uint32_t mu = 0; mu < p->N; ++mu) values.push_back(st.read(p->node_at(mu)));
      results.push_back(values);
    }
    const auto truth = mrlrc_encode(*p, u).flat();
    good += results[0] == results[1] && results[1] == results[2] &&
            std::equal(results[0].begin(), results[0].end(), truth.begin(), truth.end());
  }
  return {good == 200, std::to_string(good) + "/200 scenarios restored identically"};
}

}  // namespace detail

inline std::vector<Criterion> acceptance_criteria(const SelftestOptions& opt = {}) {
  const auto seed = opt.seed;
  return {
      {"three-group repair example", "exact", 5, [] { return detail::three_group_example(); }},
      {"sweep over g, r=7 h=3", "exact, 45 values", 10, [] { return detail::sweep_r7_h3(); }},
      {"nine-node observation matrix", "exact", 5, [] { return detail::nine_node_observation(); }},
      {"local polynomial sum", "exact, 200 instances", 30, [seed] { return detail::local_polynomial_sum(seed); }},
      {"maximal recoverability", "exhaustive", 60, [opt] { return detail::maximal_recoverability(opt.corrupt_generator); }},
      {"mutual information oracle", "exact rational", 60, [] { return detail::mutual_information(); }},
      {"entropy equals rank", "exhaustive, 50 matrices", 30, [seed] { return detail::entropy_equals_rank(seed + 1); }},
      {"formula vs oracle", "exact, 100 random + 50 adversarial", 120, [seed] { return detail::formula_vs_oracle(seed + 2); }},
      {"repair equivalence", "exact, 200 scenarios", 60, [seed] { return detail::repair_equivalence(seed + 3); }},
  };
}

/// Runs every criterion, one line each. Returns true when all pass.
inline bool run_acceptance(std::ostream& os, const SelftestOptions& opt = {}) {
  bool all = true;
  for (const auto& c : acceptance_criteria(opt)) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult res;
    try {
      res = c.run();
    } catch (const std::exception& e) {
      res = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = res.pass && secs <= c.limit_seconds;
    all = all && pass;
    os << (pass ? "PASS " : "FAIL ") << c.name << " [" << c.tolerance << "; " << std::fixed << std::setprecision(2)
       << secs << " s of " << std::setprecision(0) << c.limit_seconds << " s] " << res.detail << '\n';
  }
  return all;
}

}  // namespace mrlrc
