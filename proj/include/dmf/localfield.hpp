#pragma once

#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "dmf/errors.hpp"
#include "dmf/fq.hpp"

namespace dmf {

// exact rational, used for log-absolute values
struct Rat {
    long long num = 0;
    long long den = 1;
    Rat() = default;
    Rat(long long n, long long d) : num(n), den(d) { reduce(); }
    void reduce() {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        if (num == 0) den = 1;
    }
    bool operator==(const Rat& o) const { return num == o.num && den == o.den; }
    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }
};

// Working field F_{q^m}((theta^{-1/e})), normalized so v(theta) = -1 and the
// uniformizer is u = theta^{-1/e} with v(u) = 1/e. Valuations and precisions
// are tracked as integers in units of 1/e ("u-digits"). relCap bounds the
// number of significant digits any element stores; operations truncate to it
// honestly (absPrec is lowered accordingly, never silently).
struct FieldDesc {
    FieldDesc(long p, long s, long m, long e, long relCap);

    ResidueField k;
    long e;
    long relCap;

    long p() const { return k.p(); }
    long q() const { return k.q(); }
    long m() const { return k.m(); }
    bool admits_neg_theta_root() const;  // (q-1) | e and x^{q-1} = -1 solvable
};

using Field = std::shared_ptr<const FieldDesc>;

Field make_field(long p, long s, long m, long e, long relCap);

// Truncated Puiseux series: sum of coeffs_[i] * u^(n0_+i), known modulo
// O(u^absPrec_). A zero-to-precision element has empty coeffs_ (n0_ is then
// meaningless and held equal to absPrec_). Immutable in practice: every
// operation returns a fresh value.
class LFElem {
public:
    using elt = ResidueField::elt;

    LFElem() : F_(nullptr), n0_(0), absPrec_(0) {}

    // precision ceiling for exact values (clamped, not a true infinity)
    static constexpr long long kPrecInf = 1LL << 56;

    // zero to precision N (u-digits)
    static LFElem zero(const Field& F, long long N);
    // the exact zero: O(u^kPrecInf)
    static LFElem zero_exact(const Field& F) { return zero(F, kPrecInf); }
    // c * theta^(tnum/tden); exact up to the field cap
    static LFElem monomial(const Field& F, elt c, long long tnum, long long tden);
    static LFElem constant(const Field& F, elt c) { return monomial(F, c, 0, 1); }
    static LFElem one(const Field& F) { return constant(F, 1); }
    static LFElem theta(const Field& F) { return monomial(F, 1, 1, 1); }
    static LFElem from_int(const Field& F, long c);
    // raw construction from u-valuation and digit vector
    static LFElem make(const Field& F, long long n0, std::vector<elt> cs, long long N);

    bool is_zero() const { return coeffs_.empty(); }
    const Field& field() const { return F_; }
    long long val() const;            // u-valuation n0; throws on zero-to-precision
    long long abs_prec() const { return absPrec_; }
    long long rel_prec() const { return coeffs_.empty() ? 0 : absPrec_ - n0_; }
    Rat log_abs() const;              // -v(x) as exact rational; throws on zero
    elt coeff(long long uexp) const;  // digit at u^uexp (0 if outside the stored window)
    elt leading() const { return coeffs_.empty() ? elt(0) : coeffs_[0]; }

    std::string str() const;  // literal grammar, leading term first

    friend LFElem operator+(const LFElem& a, const LFElem& b);
    friend LFElem operator-(const LFElem& a, const LFElem& b);
    friend LFElem operator*(const LFElem& a, const LFElem& b);
    friend LFElem operator/(const LFElem& a, const LFElem& b);
    LFElem operator-() const;

    friend LFElem lf_inv(const LFElem& a);
    friend LFElem lf_frob(const LFElem& a, long i);
    friend LFElem lf_root(const LFElem& a, long n);
    friend LFElem lf_pow(const LFElem& a, long long n);
    friend LFElem lf_scale(const LFElem& a, elt c);
    friend LFElem lf_shift(const LFElem& a, long long k);  // * u^k, exact
    friend LFElem lf_truncate(const LFElem& a, long long N);
    friend long long agree_digits(const LFElem& a, const LFElem& b);

private:
    void normalize();
    Field F_;
    long long n0_;
    long long absPrec_;
    std::vector<elt> coeffs_;
};

LFElem lf_inv(const LFElem& a);
LFElem lf_frob(const LFElem& a, long i);
// n-th root with the deterministic sign rule (least residue root in the
// g-power enumeration). Throws FieldUpgradeError when (e, m) cannot host it.
LFElem lf_root(const LFElem& a, long n);
LFElem lf_pow(const LFElem& a, long long n);
LFElem lf_scale(const LFElem& a, ResidueField::elt c);
LFElem lf_shift(const LFElem& a, long long k);
LFElem lf_truncate(const LFElem& a, long long N);

// u-digit order of agreement: valuation of a-b, or its absPrec when the
// difference is zero to precision
long long agree_digits(const LFElem& a, const LFElem& b);

Rat lf_abs(const LFElem& a);

// fixed (q-1)-st root of -theta
LFElem lf_neg_theta_root(const Field& F);
// Carlitz period to the field cap
LFElem lf_carlitz_period(const Field& F);

LFElem lf_parse(const Field& F, const std::string& text);

}  // namespace dmf
