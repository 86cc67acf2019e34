#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tuniv/common.hpp"
#include "tuniv/enumeration.hpp"

namespace tuniv {

enum class PolyAuthority { Monomial, Recurrence };

/// Complex polynomial with two representations. Exact or low-degree
/// polynomials live in the monomial basis. Fitted polynomials are carried by
/// the recurrence of a basis orthonormalized against a discrete sample inner
/// product, with the monomial expansion kept only as a mirror; the authority
/// flag records which representation evaluation must use. Above a
/// conditioning threshold the mirror is flagged unreliable.
class Polynomial {
 public:
  Polynomial() = default;  // zero polynomial, monomial authority

  static Polynomial from_coeffs(std::vector<cplx> coeffs) {
    Polynomial p;
    p.monomial_ = std::move(coeffs);
    while (!p.monomial_.empty() && p.monomial_.back() == cplx(0.0, 0.0))
      p.monomial_.pop_back();
    return p;
  }

  static Polynomial from_gauss(const GaussPoly& g) { return from_coeffs(g.to_complex()); }

  static Polynomial constant(cplx c) { return from_coeffs({c}); }

  /// Recurrence-authority polynomial produced by the fitting engine.
  /// rec[k] holds the k-th orthonormalization column: projections
  /// h_{0,k}..h_{k,k} followed by the normalization h_{k+1,k}; norm0 is the
  /// normalization of the constant basis vector.
  static Polynomial from_recurrence(double norm0, std::vector<std::vector<cplx>> rec,
                                    std::vector<cplx> coef, std::vector<cplx> mirror,
                                    bool mirror_reliable) {
    if (coef.empty()) throw std::invalid_argument("Polynomial: empty coefficient list");
    if (rec.size() + 1 != coef.size())
      throw std::invalid_argument("Polynomial: recurrence/coefficient size mismatch");
    Polynomial p;
    p.authority_ = PolyAuthority::Recurrence;
    p.norm0_ = norm0;
    p.rec_ = std::move(rec);
    p.coef_ = std::move(coef);
    p.monomial_ = std::move(mirror);
    p.mirror_reliable_ = mirror_reliable;
    return p;
  }

  PolyAuthority authority() const { return authority_; }
  bool is_zero() const { return authority_ == PolyAuthority::Monomial && monomial_.empty(); }

  int degree() const {
    if (authority_ == PolyAuthority::Recurrence) return int(coef_.size()) - 1;
    return monomial_.empty() ? 0 : int(monomial_.size()) - 1;
  }

  const std::vector<cplx>& monomial_coeffs() const { return monomial_; }
  bool monomial_reliable() const {
    return authority_ == PolyAuthority::Monomial || mirror_reliable_;
  }
  double recurrence_norm0() const { return norm0_; }
  const std::vector<std::vector<cplx>>& recurrence() const { return rec_; }
  const std::vector<cplx>& recurrence_coeffs() const { return coef_; }

  cplx eval(cplx z) const {
    if (authority_ == PolyAuthority::Monomial) return eval_monomial(z);
    // Replay the orthonormalization recurrence at z.
    cplx acc = coef_[0] / norm0_;
    if (rec_.empty()) return acc;
    std::vector<cplx> q(coef_.size());
    q[0] = cplx(1.0 / norm0_, 0.0);
    for (std::size_t k = 0; k < rec_.size(); ++k) {
      cplx v = z * q[k];
      for (std::size_t i = 0; i <= k; ++i) v -= rec_[k][i] * q[i];
      q[k + 1] = v / rec_[k][k + 1];
      acc += coef_[k + 1] * q[k + 1];
    }
    return acc;
  }

  /// Analytic derivative, through whichever representation is authoritative.
  cplx deriv(cplx z) const {
    if (authority_ == PolyAuthority::Monomial) {
      if (monomial_.size() < 2) return cplx(0.0, 0.0);
      cplx acc(0.0, 0.0);
      for (std::size_t i = monomial_.size() - 1; i >= 1; --i)
        acc = acc * z + double(i) * monomial_[i];
      return acc;
    }
    cplx acc(0.0, 0.0);
    if (rec_.empty()) return acc;
    std::vector<cplx> q(coef_.size()), dq(coef_.size());
    q[0] = cplx(1.0 / norm0_, 0.0);
    dq[0] = cplx(0.0, 0.0);
    for (std::size_t k = 0; k < rec_.size(); ++k) {
      cplx v = z * q[k];
      cplx dv = q[k] + z * dq[k];
      for (std::size_t i = 0; i <= k; ++i) {
        v -= rec_[k][i] * q[i];
        dv -= rec_[k][i] * dq[i];
      }
      q[k + 1] = v / rec_[k][k + 1];
      dq[k + 1] = dv / rec_[k][k + 1];
      acc += coef_[k + 1] * dq[k + 1];
    }
    return acc;
  }

  Polynomial negated() const {
    Polynomial p = *this;
    for (auto& c : p.monomial_) c = -c;
    for (auto& c : p.coef_) c = -c;
    return p;
  }

 private:
  cplx eval_monomial(cplx z) const {
    if (monomial_.empty()) return cplx(0.0, 0.0);
    cplx acc = monomial_.back();
    for (std::size_t i = monomial_.size() - 1; i-- > 0;) acc = acc * z + monomial_[i];
    return acc;
  }

  PolyAuthority authority_ = PolyAuthority::Monomial;
  std::vector<cplx> monomial_;
  // recurrence representation (authority == Recurrence)
  double norm0_ = 1.0;
  std::vector<std::vector<cplx>> rec_;
  std::vector<cplx> coef_;
  bool mirror_reliable_ = true;
};

}  // namespace tuniv
