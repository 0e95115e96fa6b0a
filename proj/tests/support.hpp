// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures and small independent oracles for the unit tests.

#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "mrlrc/galois.hpp"
#include "mrlrc/matrix.hpp"
#include "mrlrc/mrlrc.hpp"

namespace mrlrc::test {

inline Gf random_element(const ExtField& F, std::mt19937_64& rng) {
  return Gf{std::uniform_int_distribution<std::uint32_t>(0, F.order() - 1)(rng)};
}

inline Gf random_nonzero(const ExtField& F, std::mt19937_64& rng) {
  return Gf{std::uniform_int_distribution<std::uint32_t>(1, F.order() - 1)(rng)};
}

inline std::vector<Gf> random_vector(const ExtField& F, std::size_t n, std::mt19937_64& rng) {
  std::vector<Gf> v(n);
  for (auto& x : v) x = random_element(F, rng);
  return v;
}

// Schoolbook product in F_q[z]/(modulus), written independently of ExtField.
inline Gf reference_mul(const ExtField& F, Gf a, Gf b) {
  const std::uint32_t q = F.q(), m = F.m();
  std::vector<std::uint64_t> x(m), y(m), prod(2 * m, 0);
  for (std::uint32_t i = 0; i < m; ++i, a.v /= q, b.v /= q) {
    x[i] = a.v % q;
    y[i] = b.v % q;
  }
  for (std::uint32_t i = 0; i < m; ++i)
    for (std::uint32_t j = 0; j < m; ++j) prod[i + j] = (prod[i + j] + x[i] * y[j]) % q;
  const auto& mod = F.modulus();
  for (std::uint32_t d = 2 * m - 1; d-- > m;) {
    const std::uint64_t c = prod[d];
    for (std::uint32_t j = 0; j <= m; ++j) prod[d - m + j] = (prod[d - m + j] + (q - c) * mod[j]) % q;
  }
  std::uint32_t v = 0;
  for (std::uint32_t i = m; i-- > 0;) v = v * q + static_cast<std::uint32_t>(prod[i]);
  return Gf{v};
}

// Solves x·A = b for square invertible A by eliminating [A^T | b^T].
inline std::vector<Gf> solve_left(const ExtField& F, const Matrix& A, std::vector<Gf> b) {
  const std::size_t n = A.rows();
  Matrix aug(n, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = A(j, i);
    aug(i, n) = b[i];
  }
  rref(F, aug);
  std::vector<Gf> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = aug(i, n);
  return x;
}

inline std::shared_ptr<const MrLrcParams> make_code(std::uint32_t q, std::uint32_t m, std::uint32_t g, std::uint32_t r,
                                                    std::uint32_t delta, std::uint32_t k) {
  return std::make_shared<const MrLrcParams>(mrlrc_setup(ExtField::create(q, m), g, r, delta, k));
}

// The seven-data-symbol system of the running example: q=5, m=3, three groups
// of five nodes, two global parities.
inline std::shared_ptr<const MrLrcParams> example_system() { return make_code(5, 3, 3, 3, 3, 7); }

// The nine-node system of the worked observation-matrix example.
inline std::shared_ptr<const MrLrcParams> nine_node_system() { return make_code(5, 2, 3, 2, 2, 5); }

}  // namespace mrlrc::test
