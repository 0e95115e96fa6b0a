// SPDX-License-Identifier: Apache-2.0
//
// The skew polynomial ring F_{q^m}[x; σ] with σ the Frobenius, evaluated in
// remainder style: f(b) = Σ_i f_i N_i(b).

#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "mrlrc/errors.hpp"
#include "mrlrc/galois.hpp"
#include "mrlrc/matrix.hpp"

namespace mrlrc {

/// Element of F_{q^m}[x; σ]; coefficient i multiplies x^i. Trailing zeros are
/// trimmed, so the zero polynomial has no coefficients and no degree.
class SkewPoly {
 public:
  explicit SkewPoly(FieldPtr field) : field_(std::move(field)) {}
  SkewPoly(FieldPtr field, std::vector<Gf> coeffs) : field_(std::move(field)), coeffs_(std::move(coeffs)) {
    trim();
  }

  static SkewPoly constant(FieldPtr field, Gf c) { return SkewPoly(std::move(field), {c}); }
  /// c·x^i
  static SkewPoly monomial(FieldPtr field, Gf c, std::size_t i) {
    std::vector<Gf> v(i + 1);
    v[i] = c;
    return SkewPoly(std::move(field), std::move(v));
  }

  const FieldPtr& field() const { return field_; }
  const std::vector<Gf>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  /// nullopt stands for deg(0) = -∞.
  std::optional<std::size_t> degree() const {
    if (coeffs_.empty()) return std::nullopt;
    return coeffs_.size() - 1;
  }
  Gf coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : Gf{}; }

  /// Coefficients padded with zeros to `len`.
  std::vector<Gf> padded(std::size_t len) const {
    std::vector<Gf> v = coeffs_;
    if (v.size() > len) throw std::invalid_argument("polynomial degree exceeds padding length");
    v.resize(len);
    return v;
  }

  bool operator==(const SkewPoly& o) const { return coeffs_ == o.coeffs_; }

  SkewPoly operator+(const SkewPoly& o) const {
    const ExtField& f = *field_;
    std::vector<Gf> v(std::max(coeffs_.size(), o.coeffs_.size()));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f.add(coeff(i), o.coeff(i));
    return SkewPoly(field_, std::move(v));
  }

  SkewPoly operator-(const SkewPoly& o) const {
    const ExtField& f = *field_;
    std::vector<Gf> v(std::max(coeffs_.size(), o.coeffs_.size()));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f.sub(coeff(i), o.coeff(i));
    return SkewPoly(field_, std::move(v));
  }

  /// Left scalar multiple c·f.
  SkewPoly scaled(Gf c) const {
    std::vector<Gf> v(coeffs_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = field_->mul(c, coeffs_[i]);
    return SkewPoly(field_, std::move(v));
  }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
  }

  FieldPtr field_;
  std::vector<Gf> coeffs_;
};

/// Product under the commutation rule x·a = σ(a)·x:
/// (Σ f_i x^i)(Σ h_j x^j) = Σ f_i σ^i(h_j) x^{i+j}.
inline SkewPoly skew_mul(const SkewPoly& f, const SkewPoly& h) {
  if (f.is_zero() || h.is_zero()) return SkewPoly(f.field());
  const ExtField& F = *f.field();
  const auto& a = f.coeffs();
  const auto& b = h.coeffs();
  std::vector<Gf> out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      out[i + j] = F.add(out[i + j], F.mul(a[i], F.frobenius(b[j], i)));
  }
  return SkewPoly(f.field(), std::move(out));
}

inline SkewPoly operator*(const SkewPoly& f, const SkewPoly& h) { return skew_mul(f, h); }

/// f(b) = Σ_i f_i N_i(b).
inline Gf skew_eval(const SkewPoly& f, Gf b) {
  const ExtField& F = *f.field();
  Gf acc = F.zero();
  Gf n = F.one();
  for (std::size_t i = 0; i < f.coeffs().size(); ++i) {
    acc = F.add(acc, F.mul(f.coeffs()[i], n));
    n = F.mul(F.frobenius(n), b);
  }
  return acc;
}

/// rows × |b| matrix with entry (i, j) = N_i(b_j). Square by default.
inline Matrix sigma_vandermonde(const ExtField& F, std::span<const Gf> b,
                                std::optional<std::size_t> rows = std::nullopt) {
  const std::size_t nr = rows.value_or(b.size());
  Matrix v(nr, b.size());
  for (std::size_t j = 0; j < b.size(); ++j) {
    Gf n = F.one();
    for (std::size_t i = 0; i < nr; ++i) {
      v(i, j) = n;
      n = F.mul(F.frobenius(n), b[j]);
    }
  }
  return v;
}

inline bool is_p_independent(const ExtField& F, std::span<const Gf> b) {
  if (b.empty()) return true;
  return rank(F, sigma_vandermonde(F, b)) == b.size();
}

struct InterpolationPoint {
  Gf locator;
  Gf value;
};

/// Newton interpolation: the unique f with deg f < |points| and
/// f(locator_i) = value_i. Builds the annihilator P of the points seen so far
/// incrementally, using the product rule
/// ((x - d)·P)(b) = (σ(s) b s^{-1} - d)·s with s = P(b).
inline SkewPoly newton_interpolate(const FieldPtr& field, std::span<const InterpolationPoint> points) {
  const ExtField& F = *field;
  SkewPoly f(field);
  SkewPoly annihilator = SkewPoly::constant(field, F.one());
  for (std::size_t t = 0; t < points.size(); ++t) {
    const auto [b, v] = points[t];
    const Gf s = skew_eval(annihilator, b);
    if (s.is_zero())
      throw PIndependenceError("interpolation locators are not P-independent (point " + std::to_string(t) + ")");
    const Gf c = F.div(F.sub(v, skew_eval(f, b)), s);
    f = f + annihilator.scaled(c);
    if (t + 1 == points.size()) break;
    const Gf d = F.div(F.mul(F.frobenius(s), b), s);
    // (x - d)·P = x·P - d·P, with x·P = Σ σ(p_i) x^{i+1}.
    const auto& p = annihilator.coeffs();
    std::vector<Gf> next(p.size() + 1);
    for (std::size_t i = 0; i < p.size(); ++i) {
      next[i + 1] = F.add(next[i + 1], F.frobenius(p[i]));
      next[i] = F.sub(next[i], F.mul(d, p[i]));
    }
    annihilator = SkewPoly(field, std::move(next));
  }
  return f;
}

/// Skew Lagrange basis ℓ_0..ℓ_{k-1} on omega: ℓ_i(ω_j) = [i == j].
inline std::vector<SkewPoly> lagrange_basis(const FieldPtr& field, std::span<const Gf> omega) {
  const ExtField& F = *field;
  std::vector<SkewPoly> basis;
  basis.reserve(omega.size());
  std::vector<InterpolationPoint> pts(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) {
    for (std::size_t j = 0; j < omega.size(); ++j) pts[j] = {omega[j], i == j ? F.one() : F.zero()};
    basis.push_back(newton_interpolate(field, pts));
  }
  return basis;
}

/// Row i holds the monomial coefficients of basis[i], padded to `len`.
inline Matrix coefficient_matrix(std::span<const SkewPoly> basis, std::size_t len) {
  Matrix m(basis.size(), len);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto c = basis[i].padded(len);
    for (std::size_t j = 0; j < len; ++j) m(i, j) = c[j];
  }
  return m;
}

/// Monomial coefficients → evaluations on omega: p = f·V(omega).
inline std::vector<Gf> to_evaluations(const SkewPoly& f, std::span<const Gf> omega) {
  const ExtField& F = *f.field();
  const auto coeffs = f.padded(omega.size());
  return multiply(F, std::span<const Gf>(coeffs), sigma_vandermonde(F, omega));
}

/// Evaluations on omega → monomial coefficients: f = p·V(omega)^{-1}.
inline SkewPoly from_evaluations(const FieldPtr& field, std::span<const Gf> p, std::span<const Gf> omega) {
  if (p.size() != omega.size()) throw std::invalid_argument("evaluation vector length must equal |omega|");
  const auto vinv = inverse(*field, sigma_vandermonde(*field, omega));
  if (!vinv) throw PIndependenceError("σ-Vandermonde matrix is singular");
  return SkewPoly(field, multiply(*field, p, *vinv));
}

inline void dump(std::ostream& os, const SkewPoly& f) {
  for (std::size_t i = 0; i < f.coeffs().size(); ++i)
    os << (i ? " " : "") << to_string(*f.field(), f.coeffs()[i]);
  os << '\n';
}

}  // namespace mrlrc
