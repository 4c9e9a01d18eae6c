#include "dmf/fq.hpp"

#include <algorithm>
#include <numeric>

namespace dmf {

namespace {

constexpr long kAddTableLimit = 1024;
constexpr long kRootDegreeSearchCap = 64;

bool is_prime(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::vector<long> prime_factors(long long n) {
    std::vector<long> fs;
    for (long long d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            fs.push_back(long(d));
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) fs.push_back(long(n));
    return fs;
}

using Fp = std::uint16_t;
using FpPoly = std::vector<Fp>;  // little-endian coefficients

void fpp_trim(FpPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

FpPoly fpp_mulmod(const FpPoly& a, const FpPoly& b, const FpPoly& f, long p) {
    std::vector<long> acc(a.size() + b.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (std::size_t j = 0; j < b.size(); ++j) acc[i + j] += long(a[i]) * b[j];
    }
    for (auto& c : acc) c %= p;
    // reduce mod monic f
    const std::size_t d = f.size() - 1;
    for (std::size_t i = acc.size(); i-- > d;) {
        long c = acc[i] % p;
        if (!c) continue;
        for (std::size_t j = 0; j < d; ++j)
            acc[i - d + j] = (acc[i - d + j] + long(p - f[j]) * c) % p;
        acc[i] = 0;
    }
    FpPoly r(d, 0);
    for (std::size_t i = 0; i < d && i < acc.size(); ++i) r[i] = Fp(acc[i] % p);
    fpp_trim(r);
    return r;
}

FpPoly fpp_powmod(FpPoly base, long long n, const FpPoly& f, long p) {
    FpPoly r{1};
    while (n > 0) {
        if (n & 1) r = fpp_mulmod(r, base, f, p);
        base = fpp_mulmod(base, base, f, p);
        n >>= 1;
    }
    return r;
}

// x^(p^k) mod f by repeated p-th powering
FpPoly fpp_xq_power(long k, const FpPoly& f, long p) {
    FpPoly r{0, 1};
    for (long i = 0; i < k; ++i) r = fpp_powmod(r, p, f, p);
    return r;
}

bool fpp_is_irreducible(const FpPoly& f, long p) {
    const long d = long(f.size()) - 1;
    if (d < 1) return false;
    FpPoly xqd = fpp_xq_power(d, f, p);
    FpPoly x{0, 1};
    if (xqd != x) return false;
    for (long ell : prime_factors(d)) {
        FpPoly t = fpp_xq_power(d / ell, f, p);
        // gcd(t - x, f) must be 1; since f is checked irreducible candidate,
        // equivalent test: t != x
        if (t == x) return false;
    }
    return true;
}

}  // namespace

ResidueField::ResidueField(long p, long s, long m) : p_(p), s_(s), m_(m), d_(s * m) {
    if (!is_prime(p)) throw ConfigError("p must be prime, got " + std::to_string(p));
    if (s < 1 || m < 1) throw ConfigError("s and m must be >= 1");
    long long Q = 1;
    for (long i = 0; i < d_; ++i) {
        Q *= p;
        if (Q > 65536) throw ConfigError("residue field too large (q^m > 2^16)");
    }
    Q_ = long(Q);
    long long q = 1;
    for (long i = 0; i < s; ++i) q *= p;
    q_ = long(q);

    if (d_ == 1) {
        mod_ = {0, 1};  // plain F_p
    } else {
        // first monic irreducible of degree d in index order
        long long span = 1;
        for (long i = 0; i < d_; ++i) span *= p;
        bool found = false;
        for (long long idx = 0; idx < span && !found; ++idx) {
            FpPoly f(d_ + 1, 0);
            long long v = idx;
            for (long i = 0; i < d_; ++i) {
                f[i] = Fp(v % p);
                v /= p;
            }
            f[d_] = 1;
            if (fpp_is_irreducible(f, p)) {
                mod_.assign(f.begin(), f.end());
                found = true;
            }
        }
        if (!found) throw ConfigError("no irreducible modulus found");  // unreachable
    }
    build_tables();
}

void ResidueField::build_tables() {
    auto enc = [&](const FpPoly& a) {
        long idx = 0;
        for (std::size_t i = a.size(); i-- > 0;) idx = idx * p_ + a[i];
        return elt(idx);
    };
    auto dec = [&](elt a) {
        FpPoly v(d_, 0);
        long x = a;
        for (long i = 0; i < d_; ++i) {
            v[i] = Fp(x % p_);
            x /= p_;
        }
        fpp_trim(v);
        return v;
    };

    negT_.resize(Q_);
    for (long a = 0; a < Q_; ++a) {
        FpPoly v = dec(elt(a));
        for (auto& c : v) c = Fp((p_ - c) % p_);
        negT_[a] = enc(v);
    }
    if (Q_ <= kAddTableLimit) {
        addT_.resize(std::size_t(Q_) * Q_);
        for (long a = 0; a < Q_; ++a)
            for (long b = 0; b < Q_; ++b) {
                FpPoly va = dec(elt(a)), vb = dec(elt(b));
                va.resize(d_, 0);
                vb.resize(d_, 0);
                for (long i = 0; i < d_; ++i) va[i] = Fp((va[i] + vb[i]) % p_);
                fpp_trim(va);
                addT_[std::size_t(a) * Q_ + b] = enc(va);
            }
    }

    FpPoly fmod(mod_.begin(), mod_.end());
    const long long order = Q_ - 1;
    auto factors = prime_factors(order);
    // first primitive element in index order
    for (long c = 1; c < Q_ && gen_ == 0; ++c) {
        if (d_ == 1 && c == 1) continue;  // 1 is never primitive unless Q=2
        FpPoly cand = dec(elt(c));
        bool prim = true;
        for (long ell : factors) {
            if (fpp_powmod(cand, order / ell, fmod, p_) == FpPoly{1}) {
                prim = false;
                break;
            }
        }
        if (prim) gen_ = elt(c);
    }
    if (gen_ == 0) {
        if (Q_ == 2) gen_ = 1;
        else throw ConfigError("no primitive element found");  // unreachable
    }

    expT_.resize(2 * (Q_ - 1));
    logT_.assign(Q_, -1);
    FpPoly acc{1};
    for (long i = 0; i < Q_ - 1; ++i) {
        elt v = enc(acc);
        expT_[i] = v;
        expT_[i + (Q_ - 1)] = v;
        logT_[v] = i;
        acc = fpp_mulmod(acc, dec(gen_), fmod, p_);
    }
    subgen_ = q_ == 2 ? elt(1) : expT_[(Q_ - 1) / (q_ - 1)];

    // F_q-coordinates of every element in the basis {gen^0, ..., gen^{m-1}}
    coordT_.assign(std::size_t(Q_) * m_, 0);
    const std::size_t mm_sz = std::size_t(m_);
    std::vector<elt> gpow(mm_sz);
    for (long j = 0; j < m_; ++j) gpow[std::size_t(j)] = j == 0 ? elt(1) : mul(gpow[std::size_t(j - 1)], gen_);
    std::vector<elt> subf{0};
    {
        elt x = 1;
        for (long i = 0; i < q_ - 1; ++i) {
            subf.push_back(x);
            x = mul(x, subgen_);
        }
    }
    std::vector<long> odo(std::size_t(m_), 0);
    std::vector<bool> seen(std::size_t(Q_), false);
    for (;;) {
        elt v = 0;
        for (long j = 0; j < m_; ++j)
            v = add(v, mul(subf[std::size_t(odo[std::size_t(j)])], gpow[std::size_t(j)]));
        if (seen[v]) throw ConfigError("subfield coordinate basis degenerate");
        seen[v] = true;
        for (long j = 0; j < m_; ++j)
            coordT_[std::size_t(v) * m_ + std::size_t(j)] = subf[std::size_t(odo[std::size_t(j)])];
        long pos = 0;
        while (pos < m_) {
            if (++odo[std::size_t(pos)] <= q_ - 1) break;
            odo[std::size_t(pos)] = 0;
            ++pos;
        }
        if (pos == m_) break;
    }
}

ResidueField::elt ResidueField::add_slow(elt a, elt b) const {
    long r = 0, mul = 1, x = a, y = b;
    for (long i = 0; i < d_; ++i) {
        r += ((x % p_) + (y % p_)) % p_ * mul;
        x /= p_;
        y /= p_;
        mul *= p_;
    }
    return elt(r);
}

ResidueField::elt ResidueField::inv(elt a) const {
    if (a == 0) throw PrecisionError("residue field division by zero");
    return expT_[(Q_ - 1 - logT_[a]) % (Q_ - 1)];
}

ResidueField::elt ResidueField::powi(elt a, long long n) const {
    if (a == 0) {
        if (n <= 0) throw PrecisionError("0 raised to non-positive power");
        return 0;
    }
    long long e = (long long)(logT_[a]) * (n % (Q_ - 1));
    e %= (Q_ - 1);
    if (e < 0) e += Q_ - 1;
    return expT_[e];
}

ResidueField::elt ResidueField::frobq(elt a, long i) const {
    if (a == 0) return 0;
    long long e = logT_[a];
    for (long k = 0; k < i * s_; ++k) e = (e * p_) % (Q_ - 1);
    return expT_[e];
}

ResidueField::elt ResidueField::inv_frobq(elt a, long i) const {
    return inv_frobp(a, i * s_);
}

ResidueField::elt ResidueField::inv_frobp(elt a, long t) const {
    long steps = ((d_ - t % d_) % d_);
    if (a == 0) return 0;
    long long e = logT_[a];
    for (long k = 0; k < steps; ++k) e = (e * p_) % (Q_ - 1);
    return expT_[e];
}

long ResidueField::dlog(elt a) const {
    if (a == 0) throw PrecisionError("dlog of zero");
    return logT_[a];
}

ResidueField::elt ResidueField::from_int(long c) const {
    c %= p_;
    if (c < 0) c += p_;
    return elt(c);
}

bool ResidueField::in_subfield(elt a) const {
    if (a == 0) return true;
    return logT_[a] % ((Q_ - 1) / (q_ - 1)) == 0;
}

std::vector<ResidueField::elt> ResidueField::subfield_units() const {
    std::vector<elt> out;
    elt x = 1;
    for (long i = 0; i < q_ - 1; ++i) {
        out.push_back(x);
        x = mul(x, subgen_);
    }
    return out;
}

std::vector<ResidueField::elt> ResidueField::nth_roots(elt a, long n) const {
    std::vector<elt> out;
    if (a == 0) return out;
    const long long M = Q_ - 1;
    long long g = std::gcd((long long)n, M);
    long L = logT_[a];
    if (L % g != 0) return out;
    // solve n*x = L (mod M): x0 = (L/g) * inv(n/g mod M/g)
    long long Mg = M / g;
    long long t = 1;
    if (Mg > 1) {  // extended Euclid, n/g and M/g coprime
        long long r0 = Mg, r1 = ((long long)n / g) % Mg, s0 = 0, s1 = 1;
        while (r1 != 0) {
            long long qq = r0 / r1;
            long long r2 = r0 - qq * r1, s2 = s0 - qq * s1;
            r0 = r1;
            r1 = r2;
            s0 = s1;
            s1 = s2;
        }
        t = ((s0 % Mg) + Mg) % Mg;
    } else {
        t = 0;
    }
    long long x0 = ((L / g) % std::max(Mg, 1LL)) * t % std::max(Mg, 1LL);
    for (long long j = 0; j < g; ++j) out.push_back(expT_[(x0 + j * Mg) % M]);
    std::sort(out.begin(), out.end(), [&](elt u, elt v) { return logT_[u] < logT_[v]; });
    return out;
}

long ResidueField::root_field_degree(elt a, long n) const {
    if (a == 0) return m_;
    const long long M = Q_ - 1;
    long long o = logT_[a] == 0 ? 1 : M / std::gcd((long long)logT_[a], M);
    for (long mm = m_; mm <= m_ * kRootDegreeSearchCap; mm += m_) {
        // M' = q^mm - 1; a has an n-th root over F_{q^mm} iff o | M'/gcd(n, M'),
        // i.e. gcd(n, M')*o divides M'. Work modulo small numbers.
        unsigned long long Mp_mod_n = 1;
        for (long i = 0; i < mm * s_; ++i) Mp_mod_n = (Mp_mod_n * (unsigned long long)p_) % (unsigned long long)n;
        Mp_mod_n = (Mp_mod_n + (unsigned long long)n - 1) % (unsigned long long)n;
        long long gg = std::gcd((long long)n, (long long)Mp_mod_n);
        // check (M'/gg) % o == 0  <=>  M' % (gg*o) == 0
        unsigned long long mod2 = (unsigned long long)gg * (unsigned long long)o;
        unsigned long long Mp2 = 1;
        for (long i = 0; i < mm * s_; ++i) Mp2 = (Mp2 * (unsigned long long)p_) % mod2;
        Mp2 = (Mp2 + mod2 - 1) % mod2;
        if (Mp2 == 0) return mm;
    }
    return 0;
}

std::string ResidueField::to_string(elt a) const {
    if (a == 0) return "0";
    long L = logT_[a];
    if (L == 0) return "1";
    if (L == 1) return "g";
    return "g^" + std::to_string(L);
}

ResidueField::elt ResidueField::parse(const std::string& text) const {
    if (text == "0") return 0;
    if (text == "1") return 1;
    if (text == "g") return gen_;
    if (text.rfind("g^", 0) == 0) {
        long k = std::stol(text.substr(2));
        k %= (Q_ - 1);
        if (k < 0) k += Q_ - 1;
        return expT_[k];
    }
    throw ParseError("bad residue literal: " + text);
}

std::string ResidueField::modulus_string() const {
    std::string s;
    for (std::size_t i = 0; i < mod_.size(); ++i) {
        if (!mod_[i]) continue;
        if (!s.empty()) s += " + ";
        if (mod_[i] != 1 || i == 0) s += std::to_string(mod_[i]);
        if (i > 0) {
            if (mod_[i] != 1) s += "*";
            s += "x";
            if (i > 1) s += "^" + std::to_string(i);
        }
    }
    return s;
}

}  // namespace dmf
