#include "dmf/tate.hpp"

#include <algorithm>
#include <limits>

namespace dmf {

namespace {
long long ipow(long b, long e) {
    long long r = 1;
    for (long i = 0; i < e; ++i) r *= b;
    return r;
}
}  // namespace

TSeries TSeries::constant(const LFElem& a, long T) {
    TSeries s(a.field(), T);
    s[0] = a;
    return s;
}

bool TSeries::is_zero() const {
    for (const auto& x : c_)
        if (!x.is_zero()) return false;
    return true;
}

Rat TSeries::gauss_norm() const {
    bool have = false;
    Rat best(0, 1);
    for (const auto& x : c_) {
        if (x.is_zero()) continue;
        Rat r = x.log_abs();
        if (!have || r.num * best.den > best.num * r.den) {
            best = r;
            have = true;
        }
    }
    if (!have) throw PrecisionError("gauss norm of zero-to-precision series");
    return best;
}

long long TSeries::min_coeff_prec() const {
    long long m = std::numeric_limits<long long>::max();
    for (const auto& x : c_) m = std::min(m, x.abs_prec());
    return m;
}

TSeries operator+(const TSeries& a, const TSeries& b) {
    long T = std::min(a.deg(), b.deg());
    TSeries r(a.F_, T);
    for (long i = 0; i <= T; ++i) r[i] = a[i] + b[i];
    return r;
}

TSeries TSeries::operator-() const {
    TSeries r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
}

TSeries operator-(const TSeries& a, const TSeries& b) { return a + (-b); }

TSeries operator*(const TSeries& a, const TSeries& b) {
    long T = std::min(a.deg(), b.deg());
    TSeries r(a.F_, T);
    for (long i = 0; i <= T; ++i) {
        LFElem acc = a[0] * b[i];
        for (long j = 1; j <= i; ++j) acc = acc + a[j] * b[i - j];
        r[i] = acc;
    }
    return r;
}

TSeries ts_twist(const TSeries& a, long i) {
    TSeries r = a;
    for (long k = 0; k <= a.deg(); ++k) r[k] = lf_frob(a[k], i);
    return r;
}

TSeries ts_scale(const TSeries& a, const LFElem& s) {
    TSeries r = a;
    for (long k = 0; k <= a.deg(); ++k) r[k] = a[k] * s;
    return r;
}

TSeries ts_inv(const TSeries& a) {
    TSeries r(a.field(), a.deg());
    LFElem c0inv = lf_inv(a[0]);
    r[0] = c0inv;
    for (long i = 1; i <= a.deg(); ++i) {
        LFElem acc = a[1] * r[i - 1];
        for (long j = 2; j <= i; ++j) acc = acc + a[j] * r[i - j];
        r[i] = -(c0inv * acc);
    }
    return r;
}

long long ts_agree_digits(const TSeries& a, const TSeries& b) {
    long T = std::min(a.deg(), b.deg());
    long long m = std::numeric_limits<long long>::max();
    for (long i = 0; i <= T; ++i) m = std::min(m, agree_digits(a[i], b[i]));
    return m;
}

std::string TSeries::str() const {
    std::string out;
    for (long i = 0; i <= deg(); ++i) {
        if (!out.empty()) out += " + ";
        out += "(" + c_[std::size_t(i)].str() + ")";
        if (i > 0) out += "*t^" + std::to_string(i);
    }
    return out;
}

// ---------------------------------------------------------------------------

void PoleSum::add_pole(long j, const LFElem& res) {
    if (j < 0) throw ConfigError("pole index must be >= 0");
    auto it = poles_.find(j);
    if (it == poles_.end())
        poles_.emplace(j, res);
    else
        it->second = it->second + res;
}

void PoleSum::add_poly(long tdeg, const LFElem& coef) {
    if ((long)poly_.size() <= tdeg) poly_.resize(std::size_t(tdeg + 1), LFElem::zero_exact(F_));
    poly_[std::size_t(tdeg)] = poly_[std::size_t(tdeg)] + coef;
}

PoleSum operator+(const PoleSum& a, const PoleSum& b) {
    PoleSum r = a;
    for (const auto& [j, res] : b.poles_) r.add_pole(j, res);
    for (std::size_t i = 0; i < b.poly_.size(); ++i) r.add_poly(long(i), b.poly_[i]);
    return r;
}

PoleSum PoleSum::operator-() const {
    PoleSum r = *this;
    for (auto& [j, res] : r.poles_) res = -res;
    for (auto& c : r.poly_) c = -c;
    return r;
}

PoleSum operator-(const PoleSum& a, const PoleSum& b) { return a + (-b); }

PoleSum ps_scale(const PoleSum& a, const LFElem& s) {
    PoleSum r(a.field());
    for (const auto& [j, res] : a.poles()) r.add_pole(j, res * s);
    const auto& pp = a.poly_part();
    for (std::size_t i = 0; i < pp.size(); ++i) r.add_poly(long(i), pp[i] * s);
    return r;
}

PoleSum ps_twist(const PoleSum& a, long k) {
    if (k < 0) throw ConfigError("twist power must be >= 0");
    PoleSum r(a.field());
    for (const auto& [j, res] : a.poles()) r.add_pole(j + k, lf_frob(res, k));
    const auto& pp = a.poly_part();
    for (std::size_t i = 0; i < pp.size(); ++i) r.add_poly(long(i), lf_frob(pp[i], k));
    return r;
}

PoleSum ps_mul_linear(const PoleSum& a, long i) {
    // (theta^{q^i} - t) * [res/(theta^{q^j} - t)] =
    //     res + (theta^{q^i} - theta^{q^j}) * res/(theta^{q^j} - t)
    const Field& F = a.field();
    LFElem ci = lf_frob(LFElem::theta(F), i);
    PoleSum r(F);
    for (const auto& [j, res] : a.poles()) {
        LFElem cj = lf_frob(LFElem::theta(F), j);
        r.add_poly(0, res);
        LFElem d = ci - cj;
        if (!d.is_zero()) r.add_pole(j, d * res);
    }
    const auto& pp = a.poly_part();
    for (std::size_t k = 0; k < pp.size(); ++k) {
        r.add_poly(long(k), ci * pp[k]);
        r.add_poly(long(k) + 1, -pp[k]);
    }
    return r;
}

PoleSum ps_mul(const PoleSum& a, const PoleSum& b) {
    const Field& F = a.field();
    for (const auto& [j, res] : a.poles())
        if (b.poles().count(j))
            throw ConfigError("PoleSum product with coinciding pole sets; expand to TSeries");
    LFElem th = LFElem::theta(F);
    PoleSum r(F);
    // pole x pole via partial fractions: 1/((A-t)(B-t)) = (1/(A-t) - 1/(B-t))/(B-A)
    for (const auto& [ja, ra] : a.poles())
        for (const auto& [jb, rb] : b.poles()) {
            LFElem A = lf_frob(th, ja), B = lf_frob(th, jb);
            LFElem w = (ra * rb) / (B - A);
            r.add_pole(ja, w);
            r.add_pole(jb, -w);
        }
    // poly x pole: P(t)/(C-t) = P(C)/(C-t) - S(t) with P(t) = P(C) + (t-C) S(t)
    auto poly_times_pole = [&](const std::vector<LFElem>& P, long j, const LFElem& res) {
        if (P.empty()) return;
        LFElem C = lf_frob(th, j);
        // synthetic division of P by (t - C): S has degree deg(P)-1
        std::vector<LFElem> S(P.size() > 1 ? P.size() - 1 : 0, LFElem::zero_exact(F));
        LFElem rem = P.back();
        for (std::size_t i = P.size(); i-- > 1;) {
            S[i - 1] = rem;
            rem = P[i - 1] + C * rem;
        }
        r.add_pole(j, res * rem);
        for (std::size_t i = 0; i < S.size(); ++i) r.add_poly(long(i), -(res * S[i]));
    };
    for (const auto& [jb, rb] : b.poles()) poly_times_pole(a.poly_part(), jb, rb);
    for (const auto& [ja, ra] : a.poles()) poly_times_pole(b.poly_part(), ja, ra);
    const auto& pa = a.poly_part();
    const auto& pb = b.poly_part();
    for (std::size_t i = 0; i < pa.size(); ++i)
        for (std::size_t j = 0; j < pb.size(); ++j) r.add_poly(long(i + j), pa[i] * pb[j]);
    return r;
}

LFElem ps_eval_theta(const PoleSum& a) {
    const Field& F = a.field();
    LFElem th = LFElem::theta(F);
    LFElem acc = LFElem::zero_exact(F);
    for (const auto& [j, res] : a.poles()) {
        if (j == 0)
            throw PrecisionError("PoleSum has a pole at t = theta; evaluation undefined");
        acc = acc + res / (lf_frob(th, j) - th);
    }
    const auto& pp = a.poly_part();
    LFElem tp = LFElem::one(F);
    for (std::size_t k = 0; k < pp.size(); ++k) {
        acc = acc + pp[k] * tp;
        tp = tp * th;
    }
    return acc;
}

LFElem ps_residue_theta(const PoleSum& a) {
    auto it = a.poles().find(0);
    if (it == a.poles().end()) return LFElem::zero_exact(a.field());
    return -it->second;
}

TSeries ps_expand(const PoleSum& a, long T) {
    const Field& F = a.field();
    TSeries r(F, T);
    const auto& pp = a.poly_part();
    for (std::size_t k = 0; k < pp.size() && (long)k <= T; ++k) r[long(k)] = pp[k];
    LFElem th = LFElem::theta(F);
    for (const auto& [j, res] : a.poles()) {
        // 1/(theta^{q^j} - t) = sum_k theta^{-q^j (k+1)} t^k, |theta^{q^j}| > 1
        LFElem cinv = lf_inv(lf_frob(th, j));
        LFElem pw = cinv;
        for (long k = 0; k <= T; ++k) {
            r[k] = r[k] + res * pw;
            pw = pw * cinv;
        }
    }
    return r;
}

long long ps_zero_digits(const PoleSum& a) {
    long long m = std::numeric_limits<long long>::max();
    for (const auto& [j, res] : a.poles())
        m = std::min(m, res.is_zero() ? res.abs_prec() : res.val());
    for (const auto& c : a.poly_part())
        m = std::min(m, c.is_zero() ? c.abs_prec() : c.val());
    return m;
}

std::string PoleSum::str() const {
    std::string out;
    for (std::size_t i = 0; i < poly_.size(); ++i) {
        if (!out.empty()) out += " + ";
        out += "(" + poly_[i].str() + ")";
        if (i > 0) out += "*t^" + std::to_string(i);
    }
    if (out.empty()) out = "0";
    out += " |";
    for (const auto& [j, res] : poles_) out += " " + std::to_string(j) + ":" + res.str();
    return out;
}

// ---------------------------------------------------------------------------

Omega::Omega(const Field& F_) : F(F_), prefactor(lf_neg_theta_root(F_)) {
    // skip factors whose t-coefficients fall below the cap: factor i deviates
    // from 1 at valuation q^i * e
    long q = F->q();
    long long qi = 1;
    factors = 0;
    while (qi * F->e < F->relCap + 1) {
        ++factors;
        qi *= q;
    }
}

TSeries Omega::expand(long T) const {
    TSeries acc = TSeries::constant(prefactor, T);
    LFElem th = LFElem::theta(F);
    for (long i = 0; i < factors; ++i) {
        // (1 - t/theta^{q^i})^{-1} = sum_k theta^{-q^i k} t^k
        TSeries f(F, T);
        LFElem cinv = lf_inv(lf_frob(th, i));
        LFElem pw = LFElem::one(F);
        for (long k = 0; k <= T; ++k) {
            f[k] = pw;
            pw = pw * cinv;
        }
        acc = acc * f;
    }
    return acc;
}

LFElem Omega::eval_factor_tail_at_theta() const {
    LFElem one = LFElem::one(F);
    LFElem acc = one;
    for (long i = 1; i < factors; ++i)
        acc = acc * lf_inv(one - LFElem::monomial(F, 1, 1 - ipow(F->q(), i), 1));
    return acc;
}

LFElem Omega::residue_theta() const {
    // res at theta of (1 - t/theta)^{-1} factor: -theta; remaining factors at t=theta
    return -(LFElem::theta(F) * prefactor * eval_factor_tail_at_theta());
}

}  // namespace dmf
