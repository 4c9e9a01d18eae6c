#pragma once

#include <map>
#include <string>
#include <vector>

#include "dmf/localfield.hpp"

namespace dmf {

// Truncated Tate-algebra element: sum of c[i] * t^i for 0 <= i <= deg().
// Each coefficient carries its own precision; the Gauss norm is the max
// coefficient absolute value.
class TSeries {
public:
    TSeries() = default;
    TSeries(const Field& F, long T) : F_(F), c_(std::size_t(T + 1), LFElem::zero_exact(F)) {}
    static TSeries constant(const LFElem& a, long T);

    long deg() const { return long(c_.size()) - 1; }
    const Field& field() const { return F_; }
    const LFElem& operator[](long i) const { return c_[std::size_t(i)]; }
    LFElem& operator[](long i) { return c_[std::size_t(i)]; }

    Rat gauss_norm() const;  // log_q of the norm; throws if all coefficients are zero
    bool is_zero() const;
    // least u-digit agreement across coefficients (absPrec for zero coefficients)
    long long min_coeff_prec() const;

    std::string str() const;

    friend TSeries operator+(const TSeries& a, const TSeries& b);
    friend TSeries operator-(const TSeries& a, const TSeries& b);
    friend TSeries operator*(const TSeries& a, const TSeries& b);
    TSeries operator-() const;

private:
    Field F_;
    std::vector<LFElem> c_;
};

TSeries ts_twist(const TSeries& a, long i);      // coefficient-wise q^i power
TSeries ts_scale(const TSeries& a, const LFElem& s);
TSeries ts_inv(const TSeries& a);                // unit constant coefficient required
// entrywise u-digit agreement of two series up to min common t-degree
long long ts_agree_digits(const TSeries& a, const TSeries& b);

// Finite sum of simple poles res_j / (theta^{q^j} - t) plus a polynomial part.
// Twisting, residues and evaluation at t = theta are exact here; products with
// coinciding pole sets must go through ts expansion instead.
class PoleSum {
public:
    PoleSum() = default;
    explicit PoleSum(const Field& F) : F_(F) {}

    const Field& field() const { return F_; }
    const std::map<long, LFElem>& poles() const { return poles_; }
    const std::vector<LFElem>& poly_part() const { return poly_; }

    void add_pole(long j, const LFElem& res);
    void add_poly(long tdeg, const LFElem& coef);

    std::string str() const;

    friend PoleSum operator+(const PoleSum& a, const PoleSum& b);
    friend PoleSum operator-(const PoleSum& a, const PoleSum& b);
    PoleSum operator-() const;

private:
    Field F_;
    std::vector<LFElem> poly_;        // coefficient of t^i
    std::map<long, LFElem> poles_;    // j -> res_j
};

PoleSum ps_scale(const PoleSum& a, const LFElem& s);
// product via partial fractions; refuses coinciding pole sets (expand instead)
PoleSum ps_mul(const PoleSum& a, const PoleSum& b);
// twist by q^k: res_j -> res_j^{q^k} at pole index j+k, polynomial part twisted
PoleSum ps_twist(const PoleSum& a, long k);
// multiply by the linear polynomial (c - t), c = theta^{q^i}; stays a PoleSum
PoleSum ps_mul_linear(const PoleSum& a, long i);
LFElem ps_eval_theta(const PoleSum& a);        // t = theta; index-0 pole forbidden
LFElem ps_residue_theta(const PoleSum& a);     // Res_{t=theta} = -res_0
TSeries ps_expand(const PoleSum& a, long T);
// max u-valuation floor across residues/poly of a PoleSum that should be zero
long long ps_zero_digits(const PoleSum& a);

// Anderson-Thakur element, kept factored so its residue at theta is exact:
// omega(t) = (-theta)^{1/(q-1)} * prod_{i>=0} (1 - t/theta^{q^i})^{-1}.
struct Omega {
    explicit Omega(const Field& F);
    TSeries expand(long T) const;
    LFElem residue_theta() const;  // equals -carlitz period
    LFElem eval_factor_tail_at_theta() const;  // prod_{i>=1} (1 - theta^{1-q^i})^{-1}

    Field F;
    LFElem prefactor;   // (-theta)^{1/(q-1)}
    long factors;       // poles theta^{q^i}, 0 <= i < factors
};

}  // namespace dmf
