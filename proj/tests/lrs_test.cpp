// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "mrlrc/lrs.hpp"
#include "support.hpp"

using namespace mrlrc;

namespace {

TEST(LrsSetup, ConstraintViolationsNamed) {
  const auto F = ExtField::create(5, 3);
  try {
    lrs_setup(F, 5, 3, 7);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("code.g"), std::string::npos);
  }
  try {
    lrs_setup(F, 3, 4, 7);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("code.r"), std::string::npos);
  }
  EXPECT_THROW(lrs_setup(F, 3, 3, 10), ConfigError);
  EXPECT_THROW(lrs_setup(F, 3, 3, 0), ConfigError);
}

TEST(LrsSetup, DependentMultipliersRejected) {
  const auto F = ExtField::create(5, 3);
  std::vector<Gf> beta(9, F->one());
  EXPECT_THROW(lrs_setup(F, 3, 3, 7, beta), ConfigError);
}

TEST(LrsSetup, LocatorsAreClassStructured) {
  const auto F = ExtField::create(5, 3);
  const auto p = lrs_setup(F, 3, 3, 7);
  EXPECT_EQ(p.n, 9u);
  for (std::uint32_t mu = 0; mu < p.n; ++mu)
    EXPECT_EQ(F->norm(p.b[mu]), F->norm(p.a[p.group_of(mu) - 1]));
  EXPECT_TRUE(is_p_independent(*F, p.b));
}

TEST(LrsCode, EncodingIsLinear) {
  const auto F = ExtField::create(5, 3);
  const auto p = lrs_setup(F, 3, 3, 7);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const SkewPoly f(F, test::random_vector(*F, 7, rng)), h(F, test::random_vector(*F, 7, rng));
    const Gf c = test::random_element(*F, rng);
    const auto cf = lrs_encode(p, f), ch = lrs_encode(p, h), cs = lrs_encode(p, f.scaled(c) + h);
    for (std::uint32_t i = 0; i < p.n; ++i) ASSERT_EQ(cs[i], F->add(F->mul(c, cf[i]), ch[i]));
  }
}

TEST(LrsCode, RejectsHighDegree) {
  const auto F = ExtField::create(5, 3);
  const auto p = lrs_setup(F, 3, 3, 7);
  EXPECT_THROW(lrs_encode(p, SkewPoly::monomial(F, F->one(), 7)), std::invalid_argument);
}

TEST(LrsCode, ErasureDecodeRoundTrip) {
  const auto F = ExtField::create(5, 3);
  const auto p = lrs_setup(F, 3, 3, 7);
  std::mt19937_64 rng(99);
  for (int t = 0; t < 500; ++t) {
    const SkewPoly f(F, test::random_vector(*F, p.k, rng));
    const auto c = lrs_encode(p, f);
    std::vector<std::uint32_t> idx(p.n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(p.k + rng() % (p.n - p.k + 1));
    std::vector<KnownSymbol> known;
    for (auto i : idx) known.push_back({i, c[i]});
    ASSERT_EQ(lrs_erasure_decode(p, known), f);
  }
}

TEST(LrsCode, MdsEveryKSubsetIsInformationSet) {
  const auto F = ExtField::create(5, 3);
  const auto p = lrs_setup(F, 3, 3, 7);
  Matrix G = sigma_vandermonde(*F, p.b, p.k);
  for (std::size_t j = 0; j < p.n; ++j)
    for (std::size_t i = 0; i < p.k; ++i) G(i, j) = F->mul(G(i, j), p.beta[j]);
  std::size_t subsets = 0;
  for_each_subset(p.n, p.k, [&](const std::vector<std::size_t>& cols) {
    ++subsets;
    EXPECT_EQ(rank(*F, G.select_columns(cols)), p.k);
    return true;
  });
  EXPECT_EQ(subsets, 36u);
}

TEST(LrsCode, TooFewSymbolsIsUnrecoverable) {
  const auto F = ExtField::create(5, 3);
  const auto p = lrs_setup(F, 3, 3, 7);
  const auto c = lrs_encode(p, SkewPoly(F, {Gf{1}}));
  std::vector<KnownSymbol> known;
  for (std::uint32_t i = 0; i < 6; ++i) known.push_back({i, c[i]});
  EXPECT_THROW(lrs_erasure_decode(p, known), Unrecoverable);
}

}  // namespace
