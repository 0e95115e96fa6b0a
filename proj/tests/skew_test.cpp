// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "mrlrc/lrs.hpp"
#include "mrlrc/skew.hpp"
#include "support.hpp"

using namespace mrlrc;

namespace {

SkewPoly random_poly(const FieldPtr& F, std::size_t len, std::mt19937_64& rng) {
  return SkewPoly(F, test::random_vector(*F, len, rng));
}

TEST(SkewPoly, ZeroHasNoDegreeAndTrims) {
  const auto F = ExtField::create(5, 2);
  SkewPoly z(F, {Gf{0}, Gf{0}});
  EXPECT_TRUE(z.is_zero());
  EXPECT_FALSE(z.degree().has_value());
  EXPECT_EQ(SkewPoly(F, {Gf{3}, Gf{0}}).degree(), 0u);
  EXPECT_EQ(skew_eval(z, Gf{7}), F->zero());
}

TEST(SkewPoly, CommutationRule) {
  const auto F = ExtField::create(3, 2);
  const SkewPoly x = SkewPoly::monomial(F, F->one(), 1);
  for (std::uint32_t a = 0; a < F->order(); ++a) {
    const SkewPoly ca = SkewPoly::constant(F, Gf{a});
    EXPECT_EQ(x * ca, SkewPoly::monomial(F, F->frobenius(Gf{a}), 1));
    EXPECT_EQ(ca * x, SkewPoly::monomial(F, Gf{a}, 1));
  }
}

class RingAxioms : public ::testing::TestWithParam<std::pair<std::uint32_t, std::uint32_t>> {};

TEST_P(RingAxioms, AssociativeDistributiveWithUnit) {
  const auto F = ExtField::create(GetParam().first, GetParam().second);
  std::mt19937_64 rng(11);
  const SkewPoly one = SkewPoly::constant(F, F->one());
  for (int t = 0; t < 500; ++t) {
    const auto a = random_poly(F, 1 + rng() % 4, rng);
    const auto b = random_poly(F, 1 + rng() % 4, rng);
    const auto c = random_poly(F, 1 + rng() % 4, rng);
    ASSERT_EQ((a * b) * c, a * (b * c));
    ASSERT_EQ(a * (b + c), a * b + a * c);
    ASSERT_EQ((a + b) * c, a * c + b * c);
    ASSERT_EQ(a * one, a);
    ASSERT_EQ(one * a, a);
    ASSERT_TRUE((a - a).is_zero());
  }
}

INSTANTIATE_TEST_SUITE_P(Fields, RingAxioms, ::testing::Values(std::pair{2u, 2u}, std::pair{3u, 2u}, std::pair{5u, 3u}));

// Product rule for remainder evaluation: (f·h)(b) = f(σ(s) b s^{-1}) s with
// s = h(b) ≠ 0, and 0 when s = 0.
TEST(SkewEval, ProductRule) {
  const auto F = ExtField::create(5, 2);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 300; ++t) {
    const auto f = random_poly(F, 1 + rng() % 5, rng);
    const auto h = random_poly(F, 1 + rng() % 5, rng);
    const Gf b = test::random_element(*F, rng);
    const Gf s = skew_eval(h, b);
    const Gf expect = s.is_zero() ? F->zero() : F->mul(skew_eval(f, F->div(F->mul(F->frobenius(s), b), s)), s);
    ASSERT_EQ(skew_eval(f * h, b), expect);
  }
}

TEST(SkewEval, MatchesVandermonde) {
  const auto F = ExtField::create(5, 3);
  std::mt19937_64 rng(5);
  const auto pts = test::random_vector(*F, 6, rng);
  const auto f = random_poly(F, 6, rng);
  const auto evals = to_evaluations(f, pts);
  for (std::size_t j = 0; j < pts.size(); ++j) EXPECT_EQ(evals[j], skew_eval(f, pts[j]));
}

TEST(Interpolation, NewtonMatchesLinearSolve) {
  const auto F = ExtField::create(5, 3);
  const auto lrs = lrs_setup(F, 3, 3, 7);
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    // Any subset of the LRS locators is P-independent.
    std::vector<std::uint32_t> idx(lrs.n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::size_t k = 1 + rng() % lrs.n;
    idx.resize(k);
    std::vector<Gf> loc;
    std::vector<InterpolationPoint> pts;
    for (auto i : idx) loc.push_back(lrs.b[i]);
    const auto vals = test::random_vector(*F, k, rng);
    for (std::size_t i = 0; i < k; ++i) pts.push_back({loc[i], vals[i]});
    const auto f = newton_interpolate(F, pts);
    ASSERT_TRUE(!f.degree() || *f.degree() < k);
    const auto oracle = test::solve_left(*F, sigma_vandermonde(*F, loc), vals);
    ASSERT_EQ(f.padded(k), oracle);
    for (std::size_t i = 0; i < k; ++i) ASSERT_EQ(skew_eval(f, loc[i]), vals[i]);
    ++checked;
  }
  EXPECT_EQ(checked, 200);
}

TEST(Interpolation, DependentLocatorsRejected) {
  const auto F = ExtField::create(5, 2);
  // Three elements of one conjugacy class in F_25 are P-dependent (rank ≤ m = 2).
  const Gf a = F->gamma();
  const Gf b1 = a;
  const Gf b2 = lrs_locator(*F, a, F->theta());
  const Gf b3 = lrs_locator(*F, a, F->add(F->theta(), F->one()));
  std::vector<InterpolationPoint> pts{{b1, F->one()}, {b2, F->zero()}, {b3, F->zero()}};
  EXPECT_THROW(newton_interpolate(F, pts), PIndependenceError);
  std::vector<Gf> loc{b1, b2, b3};
  EXPECT_FALSE(is_p_independent(*F, loc));
  std::vector<InterpolationPoint> dup{{b1, F->one()}, {b1, F->zero()}};
  EXPECT_THROW(newton_interpolate(F, dup), PIndependenceError);
}

TEST(Interpolation, LagrangeBasisInvertsVandermonde) {
  const auto F = ExtField::create(5, 3);
  const auto lrs = lrs_setup(F, 3, 3, 7);
  std::vector<Gf> omega(lrs.b.begin(), lrs.b.begin() + 7);
  const auto basis = lagrange_basis(F, omega);
  const Matrix L = coefficient_matrix(basis, omega.size());
  const Matrix V = sigma_vandermonde(*F, omega);
  EXPECT_EQ(multiply(*F, L, V), Matrix::identity(omega.size()));
  EXPECT_EQ(L, *inverse(*F, V));
  for (std::size_t i = 0; i < omega.size(); ++i)
    for (std::size_t j = 0; j < omega.size(); ++j)
      EXPECT_EQ(skew_eval(basis[i], omega[j]), i == j ? F->one() : F->zero());
}

TEST(Interpolation, EvaluationRoundTrip) {
  const auto F = ExtField::create(7, 3);
  const auto lrs = lrs_setup(F, 3, 3, 7);
  std::mt19937_64 rng(23);
  for (int t = 0; t < 50; ++t) {
    const auto f = random_poly(F, lrs.n, rng);
    const auto p = to_evaluations(f, lrs.b);
    EXPECT_EQ(from_evaluations(F, p, lrs.b), f);
  }
}

}  // namespace
