#include "dmf/localfield.hpp"
#include <limits>

#include <algorithm>
#include <cctype>

namespace dmf {

FieldDesc::FieldDesc(long p, long s, long m, long e_, long relCap_)
    : k(p, s, m), e(e_), relCap(relCap_) {
    if (e < 1) throw ConfigError("ramification index e must be >= 1");
    if (relCap < 8) throw ConfigError("relative precision cap too small");
}

bool FieldDesc::admits_neg_theta_root() const {
    if (e % (q() - 1) != 0 && q() > 2) return false;
    ResidueField::elt minus1 = k.neg(1);
    return !k.nth_roots(minus1, q() - 1).empty();
}

Field make_field(long p, long s, long m, long e, long relCap) {
    return std::make_shared<const FieldDesc>(p, s, m, e, relCap);
}

namespace {

void check_parent(const LFElem& a, const LFElem& b, const Field& fa, const Field& fb) {
    (void)a;
    (void)b;
    if (!fa || !fb) throw ConfigError("uninitialized element");
    if (fa.get() != fb.get() &&
        !(fa->k == fb->k && fa->e == fb->e))
        throw ConfigError("parent field mismatch");
}

}  // namespace

void LFElem::normalize() {
    if (absPrec_ > kPrecInf) absPrec_ = kPrecInf;
    std::size_t lead = 0;
    while (lead < coeffs_.size() && coeffs_[lead] == 0) ++lead;
    if (lead > 0) {
        coeffs_.erase(coeffs_.begin(), coeffs_.begin() + long(lead));
        n0_ += (long long)lead;
    }
    // cap stored digits at the field's relative precision budget
    if (!coeffs_.empty()) {
        long long cap = n0_ + F_->relCap;
        if (absPrec_ > cap) absPrec_ = cap;
    }
    if ((long long)coeffs_.size() > absPrec_ - n0_)
        coeffs_.resize(std::size_t(std::max<long long>(0, absPrec_ - n0_)));
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
    if (coeffs_.empty()) n0_ = absPrec_;
}

LFElem LFElem::zero(const Field& F, long long N) {
    if (N > kPrecInf) N = kPrecInf;
    LFElem x;
    x.F_ = F;
    x.n0_ = N;
    x.absPrec_ = N;
    return x;
}

LFElem LFElem::make(const Field& F, long long n0, std::vector<elt> cs, long long N) {
    LFElem x;
    x.F_ = F;
    x.n0_ = n0;
    x.absPrec_ = N;
    x.coeffs_ = std::move(cs);
    x.normalize();
    return x;
}

LFElem LFElem::monomial(const Field& F, elt c, long long tnum, long long tden) {
    if (tden == 0) throw ConfigError("zero exponent denominator");
    if (tden < 0) {
        tden = -tden;
        tnum = -tnum;
    }
    if ((F->e * tnum) % tden != 0)
        throw ParseError("exponent " + std::to_string(tnum) + "/" + std::to_string(tden) +
                         " not in (1/e)Z for e = " + std::to_string(F->e));
    long long n0 = -(F->e * tnum) / tden;  // v(theta^x) = -x
    if (c == 0) return zero_exact(F);
    return make(F, n0, {c}, kPrecInf);
}

LFElem LFElem::from_int(const Field& F, long c) { return constant(F, F->k.from_int(c)); }

long long LFElem::val() const {
    if (coeffs_.empty())
        throw PrecisionError("valuation of element that is zero to precision O(u^" +
                             std::to_string(absPrec_) + ")");
    return n0_;
}

Rat LFElem::log_abs() const { return Rat(-val(), F_->e); }

Rat lf_abs(const LFElem& a) { return a.log_abs(); }

LFElem::elt LFElem::coeff(long long uexp) const {
    if (coeffs_.empty() || uexp < n0_ || uexp >= n0_ + (long long)coeffs_.size()) return 0;
    return coeffs_[std::size_t(uexp - n0_)];
}

LFElem operator+(const LFElem& a, const LFElem& b) {
    check_parent(a, b, a.F_, b.F_);
    long long N = std::min(a.absPrec_, b.absPrec_);
    if (a.coeffs_.empty() && b.coeffs_.empty()) return LFElem::zero(a.F_, N);
    long long lo = std::min(a.coeffs_.empty() ? b.n0_ : a.n0_,
                            b.coeffs_.empty() ? a.n0_ : b.n0_);
    long long hi = std::min<long long>(
        N, std::max(a.n0_ + (long long)a.coeffs_.size(), b.n0_ + (long long)b.coeffs_.size()));
    if (hi < lo) hi = lo;
    std::vector<LFElem::elt> cs(std::size_t(hi - lo), 0);
    const ResidueField& k = a.F_->k;
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
        long long idx = a.n0_ + (long long)i - lo;
        if (idx >= 0 && idx < hi - lo) cs[std::size_t(idx)] = a.coeffs_[i];
    }
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i) {
        long long idx = b.n0_ + (long long)i - lo;
        if (idx >= 0 && idx < hi - lo)
            cs[std::size_t(idx)] = k.add(cs[std::size_t(idx)], b.coeffs_[i]);
    }
    return LFElem::make(a.F_, lo, std::move(cs), N);
}

LFElem LFElem::operator-() const {
    LFElem x = *this;
    for (auto& c : x.coeffs_) c = F_->k.neg(c);
    return x;
}

LFElem operator-(const LFElem& a, const LFElem& b) { return a + (-b); }

LFElem operator*(const LFElem& a, const LFElem& b) {
    check_parent(a, b, a.F_, b.F_);
    // v(zero-to-prec) >= absPrec, so the min rule handles all cases with n0 = N
    long long N = std::min(a.n0_ + b.absPrec_, b.n0_ + a.absPrec_);
    if (a.coeffs_.empty() || b.coeffs_.empty()) return LFElem::zero(a.F_, N);
    long long n0 = a.n0_ + b.n0_;
    long long len = std::min<long long>(N - n0, a.F_->relCap);
    if (len <= 0) return LFElem::zero(a.F_, N);
    const ResidueField& k = a.F_->k;
    std::vector<LFElem::elt> cs(std::size_t(len), 0);
    const std::size_t la = a.coeffs_.size(), lb = b.coeffs_.size();
    const long long pc = k.p() - 1;
    if (k.size() == k.p() && pc * pc * (long long)std::min<std::size_t>(la, lb) < (1LL << 32)) {
        // prime residue field: delayed-reduction integer convolution
        std::vector<std::uint32_t> acc(std::size_t(len), 0);
        const std::uint32_t pp = std::uint32_t(k.p());
        for (std::size_t i = 0; i < la; ++i) {
            if (!a.coeffs_[i] || (long long)i >= len) continue;
            const std::uint32_t ai = a.coeffs_[i];
            const std::size_t jmax = std::min<std::size_t>(lb, std::size_t(len - (long long)i));
            for (std::size_t j = 0; j < jmax; ++j) acc[i + j] += ai * b.coeffs_[j];
        }
        for (std::size_t t = 0; t < cs.size(); ++t) cs[t] = LFElem::elt(acc[t] % pp);
    } else {
        for (std::size_t i = 0; i < la; ++i) {
            if (!a.coeffs_[i] || (long long)i >= len) continue;
            const std::size_t jmax = std::min<std::size_t>(lb, std::size_t(len - (long long)i));
            for (std::size_t j = 0; j < jmax; ++j) {
                if (!b.coeffs_[j]) continue;
                cs[i + j] = k.add(cs[i + j], k.mul(a.coeffs_[i], b.coeffs_[j]));
            }
        }
    }
    return LFElem::make(a.F_, n0, std::move(cs), N);
}

LFElem lf_inv(const LFElem& a) {
    if (a.coeffs_.empty())
        throw PrecisionError("inverting an element that is zero to precision O(u^" +
                             std::to_string(a.absPrec_) + ")");
    const ResidueField& k = a.F_->k;
    long long R = a.rel_prec();
    std::vector<LFElem::elt> r(std::size_t(R), 0);
    LFElem::elt c0inv = k.inv(a.coeffs_[0]);
    r[0] = c0inv;
    for (long long t = 1; t < R; ++t) {
        LFElem::elt s = 0;
        std::size_t jmax = std::min<std::size_t>(a.coeffs_.size() - 1, std::size_t(t));
        for (std::size_t j = 1; j <= jmax; ++j)
            s = k.add(s, k.mul(a.coeffs_[j], r[std::size_t(t - (long long)j)]));
        r[std::size_t(t)] = k.neg(k.mul(c0inv, s));
    }
    return LFElem::make(a.F_, -a.n0_, std::move(r), -a.n0_ + R);
}

LFElem operator/(const LFElem& a, const LFElem& b) { return a * lf_inv(b); }

LFElem lf_frob(const LFElem& a, long i) {
    if (i < 0) throw ConfigError("negative Frobenius power");
    if (i == 0) return a;
    const ResidueField& k = a.F_->k;
    long long qi = 1;
    for (long t = 0; t < i; ++t) {
        qi *= k.q();
        if (qi > (1LL << 40)) throw ConfigError("Frobenius power too large");
    }
    auto scale_prec = [qi](long long N) {
        if (N >= 0 && N > LFElem::kPrecInf / qi) return LFElem::kPrecInf;
        return N * qi;
    };
    if (a.coeffs_.empty()) return LFElem::zero(a.F_, scale_prec(a.absPrec_));
    long long n0 = a.n0_ * qi;
    long long N = std::min(scale_prec(a.absPrec_), n0 + a.F_->relCap);
    long long len = N - n0;
    std::vector<LFElem::elt> cs(std::size_t(std::max<long long>(len, 0)), 0);
    for (std::size_t t = 0; t < a.coeffs_.size(); ++t) {
        long long idx = (long long)t * qi;
        if (idx >= len) break;
        cs[std::size_t(idx)] = k.frobq(a.coeffs_[t], i);
    }
    return LFElem::make(a.F_, n0, std::move(cs), N);
}

LFElem lf_pow(const LFElem& a, long long n) {
    if (n == 0) return LFElem::one(a.field());
    if (n < 0) return lf_pow(lf_inv(a), -n);
    LFElem r = LFElem::one(a.field());
    LFElem base = a;
    long long e = n;
    while (e > 0) {
        if (e & 1) r = r * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return r;
}

LFElem lf_scale(const LFElem& a, ResidueField::elt c) {
    if (c == 0) return LFElem::zero(a.F_, a.absPrec_);
    LFElem x = a;
    for (auto& v : x.coeffs_) v = a.F_->k.mul(v, c);
    return x;
}

LFElem lf_shift(const LFElem& a, long long kk) {
    LFElem x = a;
    x.n0_ += kk;
    x.absPrec_ += kk;
    return x;
}

LFElem lf_truncate(const LFElem& a, long long N) {
    if (N >= a.absPrec_) return a;
    LFElem x = a;
    x.absPrec_ = N;
    x.normalize();
    return x;
}

long long agree_digits(const LFElem& a, const LFElem& b) {
    LFElem d = a - b;
    return d.is_zero() ? d.abs_prec() : d.val();
}

LFElem lf_root(const LFElem& a, long n) {
    if (n < 1) throw ConfigError("root order must be >= 1");
    if (n == 1) return a;
    if (a.is_zero())
        throw PrecisionError("root of an element that is zero to precision");
    const Field& F = a.field();
    const ResidueField& k = F->k;
    const long p = k.p();

    long pt = 1, t = 0, nn = n;
    while (nn % p == 0) {
        nn /= p;
        pt *= p;
        ++t;
    }
    // p-part: inverse Frobenius on digits, exponents divided by p^t
    LFElem base = a;
    if (t > 0) {
        long long g = base.n0_ % pt;
        if (g < 0) g += pt;
        std::vector<LFElem::elt> cs;
        long long lead = base.n0_;
        if (g != 0)
            throw FieldUpgradeError("p-part of root needs ramification upgrade", F->e * pt,
                                    k.m());
        long long len = (long long)base.coeffs_.size();
        for (long long i = 0; i < len; ++i) {
            if (base.coeffs_[std::size_t(i)] == 0) continue;
            if ((lead + i) % pt != 0)
                throw FieldUpgradeError("p-part of root needs ramification upgrade",
                                        F->e * pt, k.m());
        }
        long long n0r = lead / pt;
        long long lenr = (len + pt - 1) / pt;
        cs.assign(std::size_t(lenr), 0);
        for (long long i = 0; i < len; i += 1) {
            if (base.coeffs_[std::size_t(i)] == 0) continue;
            long long x = lead + i;
            cs[std::size_t(x / pt - n0r)] = k.inv_frobp(base.coeffs_[std::size_t(i)], t);
        }
        long long N = base.abs_prec();
        long long Nr = N >= 0 ? (N + pt - 1) / pt : -((-N) / pt);  // ceil(N / p^t)
        base = LFElem::make(F, n0r, std::move(cs), Nr);
    }
    if (nn == 1) return base;

    // n'-part by Hensel lifting from the residue root
    long long v = base.val();
    if (v % nn != 0) {
        long long g = std::gcd((long long)nn, v < 0 ? -v : v);
        throw FieldUpgradeError("root valuation needs ramification upgrade",
                                F->e * (nn / g), k.m());
    }
    auto roots = k.nth_roots(base.leading(), nn);
    if (roots.empty()) {
        long mreq = k.root_field_degree(base.leading(), nn);
        throw FieldUpgradeError("leading coefficient has no residue root", F->e,
                                mreq > 0 ? mreq : k.m() * 2);
    }
    LFElem y = LFElem::monomial(F, roots[0], -(v / nn), F->e);
    // Newton: y <- y - (y^n' - base)/(n' y^(n'-1)); digits double per step
    LFElem nconst = LFElem::from_int(F, nn % p);
    long long last_agree = std::numeric_limits<long long>::min();
    for (int it = 0; it < 64; ++it) {
        LFElem err = lf_pow(y, nn) - base;
        if (err.is_zero()) break;
        if (err.val() <= last_agree) break;  // stalled at the precision floor
        last_agree = err.val();
        y = y - err / (nconst * lf_pow(y, nn - 1));
    }
    return y;
}

LFElem lf_neg_theta_root(const Field& F) {
    if (!F->admits_neg_theta_root())
        throw ConfigError("field does not admit (-theta)^{1/(q-1)}: need (q-1) | e and a "
                          "residue root of -1");
    LFElem mt = -LFElem::theta(F);
    return lf_root(mt, F->q() - 1);
}

LFElem lf_carlitz_period(const Field& F) {
    const long q = F->q();
    LFElem prod = LFElem::one(F);
    LFElem one = LFElem::one(F);
    long long qi = q;
    // factor (1 - theta^(1-q^i))^{-1} differs from 1 below the cap once
    // (q^i - 1) * e >= relCap
    while ((qi - 1) * F->e < F->relCap + 1) {
        LFElem term = one - LFElem::monomial(F, 1, 1 - qi, 1);
        prod = prod * lf_inv(term);
        qi *= q;
    }
    return LFElem::theta(F) * lf_neg_theta_root(F) * prod;
}

// ---------------------------------------------------------------------------
// literal grammar

namespace {

struct Lexer {
    const std::string& s;
    std::size_t i = 0;
    explicit Lexer(const std::string& str) : s(str) {}
    void skip() {
        while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
    }
    bool eat(char c) {
        skip();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    bool peek(char c) {
        skip();
        return i < s.size() && s[i] == c;
    }
    long long integer() {
        skip();
        std::size_t j = i;
        if (j < s.size() && (s[j] == '-' || s[j] == '+')) ++j;
        std::size_t k = j;
        while (k < s.size() && std::isdigit((unsigned char)s[k])) ++k;
        if (k == j) throw ParseError("expected integer at '" + s.substr(i) + "'");
        long long v = std::stoll(s.substr(i, k - i));
        i = k;
        return v;
    }
    bool done() {
        skip();
        return i >= s.size();
    }
};

LFElem parse_term(const Field& F, Lexer& lx) {
    const ResidueField& k = F->k;
    ResidueField::elt c = 1;
    bool have_coef = false;

    lx.skip();
    if (lx.peek('g')) {
        ++lx.i;
        long long kk = 1;
        if (lx.eat('^')) kk = lx.integer();
        kk %= (k.size() - 1);
        if (kk < 0) kk += k.size() - 1;
        c = k.powi(k.gen(), kk);
        have_coef = true;
    } else if (lx.peek('0') || lx.peek('1')) {
        char ch = lx.s[lx.i];
        std::size_t save = lx.i;
        ++lx.i;
        // only a coefficient if followed by '*' or end-of-term
        lx.skip();
        if (lx.i >= lx.s.size() || lx.s[lx.i] == '*' || lx.s[lx.i] == '+') {
            c = ch == '0' ? 0 : 1;
            have_coef = true;
        } else {
            lx.i = save;
        }
    }

    if (have_coef) {
        if (!lx.eat('*')) return LFElem::constant(F, c);  // bare coefficient term
    }

    lx.skip();
    if (lx.i < lx.s.size() && lx.s[lx.i] == 'T') {
        ++lx.i;
        long long num = 1, den = 1;
        if (lx.eat('^')) {
            if (lx.eat('(')) {
                num = lx.integer();
                if (lx.eat('/')) den = lx.integer();
                if (!lx.eat(')')) throw ParseError("expected ')' in exponent");
            } else {
                num = lx.integer();
            }
        }
        return lf_scale(LFElem::monomial(F, 1, num, den), c);
    }
    if (lx.s.compare(lx.i, 6, "rootT(") == 0) {
        lx.i += 6;
        long long num = lx.integer();
        if (!lx.eat(',')) throw ParseError("rootT needs two arguments");
        long long den = lx.integer();
        if (!lx.eat(')')) throw ParseError("expected ')' after rootT");
        return lf_scale(LFElem::monomial(F, 1, num, den), c);
    }
    if (lx.s.compare(lx.i, 9, "negTroot(") == 0) {
        lx.i += 9;
        long long den = lx.integer();
        if (!lx.eat(')')) throw ParseError("expected ')' after negTroot");
        return lf_scale(lf_root(-LFElem::theta(F), long(den)), c);
    }
    throw ParseError("unexpected input at '" + lx.s.substr(lx.i) + "'");
}

}  // namespace

LFElem lf_parse(const Field& F, const std::string& text) {
    Lexer lx(text);
    LFElem acc = parse_term(F, lx);
    while (!lx.done()) {
        if (!lx.eat('+')) throw ParseError("expected '+' at '" + text.substr(lx.i) + "'");
        acc = acc + parse_term(F, lx);
    }
    return acc;
}

std::string LFElem::str() const {
    if (coeffs_.empty()) return "0";
    const ResidueField& k = F_->k;
    std::string out;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (!coeffs_[i]) continue;
        long long uexp = n0_ + (long long)i;
        long long num = -uexp, den = F_->e;  // theta-exponent
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        if (!out.empty()) out += " + ";
        bool unit_coef = coeffs_[i] == 1;
        if (num == 0) {
            out += k.to_string(coeffs_[i]);
            continue;
        }
        if (!unit_coef) out += k.to_string(coeffs_[i]) + "*";
        if (den == 1)
            out += "T^" + std::to_string(num);
        else
            out += "T^(" + std::to_string(num) + "/" + std::to_string(den) + ")";
    }
    return out.empty() ? "0" : out;
}

}  // namespace dmf
