#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dmf/errors.hpp"

namespace dmf {

// Arithmetic context for the residue field F_{q^m}, q = p^s, realized as
// F_p[x]/(f) with f the first irreducible monic polynomial of degree s*m in
// the deterministic index order (so runs are reproducible; f is echoed into
// reports). Elements are indices 0..Q-1 encoding base-p digit vectors.
//
// Multiplication runs through discrete log/exp tables on the fixed generator
// gen(); addition through a pair table when Q is small, digitwise otherwise.
class ResidueField {
public:
    using elt = std::uint16_t;

    ResidueField(long p, long s, long m);

    long p() const { return p_; }
    long s() const { return s_; }
    long m() const { return m_; }
    long q() const { return q_; }         // p^s
    long size() const { return Q_; }      // q^m
    long deg() const { return d_; }       // s*m
    const std::vector<elt>& modulus() const { return mod_; }
    std::string modulus_string() const;

    elt zero() const { return 0; }
    elt one() const { return 1; }
    elt gen() const { return gen_; }        // fixed generator of F_{q^m}^x
    elt subgen() const { return subgen_; }  // fixed generator of F_q^x

    elt add(elt a, elt b) const {
        if (addT_.empty()) return add_slow(a, b);
        return addT_[std::size_t(a) * Q_ + b];
    }
    elt neg(elt a) const { return negT_[a]; }
    elt sub(elt a, elt b) const { return add(a, neg(b)); }
    elt mul(elt a, elt b) const {
        if (a == 0 || b == 0) return 0;
        return expT_[std::size_t(logT_[a]) + logT_[b]];
    }
    elt inv(elt a) const;
    elt div(elt a, elt b) const { return mul(a, inv(b)); }
    elt powi(elt a, long long n) const;

    // a^(q^i); exact inverse available since Frobenius is bijective
    elt frobq(elt a, long i) const;
    elt inv_frobq(elt a, long i) const;
    elt inv_frobp(elt a, long t) const;  // unique y with y^(p^t) = a

    // discrete log w.r.t. gen(); a must be nonzero
    long dlog(elt a) const;

    // scalar embedding of 0..p-1
    elt from_int(long c) const;

    bool in_subfield(elt a) const;             // a in F_q
    std::vector<elt> subfield_units() const;   // F_q^x as powers of subgen()
    // coordinates over F_q in the basis {gen^0, ..., gen^{m-1}}
    const elt* subfield_coords(elt a) const { return &coordT_[std::size_t(a) * m_]; }

    // all n-th roots of a (empty if none); smallest dlog first
    std::vector<elt> nth_roots(elt a, long n) const;
    // smallest extension degree m' (multiple of m, bounded) over which an
    // n-th root of a would exist, or 0 if none found within the bound
    long root_field_degree(elt a, long n) const;

    // literal grammar: 0, 1, g, g^k
    std::string to_string(elt a) const;
    elt parse(const std::string& text) const;

    bool operator==(const ResidueField& o) const {
        return p_ == o.p_ && s_ == o.s_ && m_ == o.m_;
    }

private:
    elt add_slow(elt a, elt b) const;
    void build_tables();

    long p_, s_, m_, d_, q_;
    long Q_;
    std::vector<elt> mod_;     // monic modulus, length d+1, coefficients 0..p-1
    std::vector<elt> expT_;    // size 2(Q-1): expT_[i] = gen^i
    std::vector<long> logT_;   // size Q, logT_[0] unused
    std::vector<elt> negT_;
    std::vector<elt> addT_;    // Q*Q pair table when Q <= kAddTableLimit
    std::vector<elt> coordT_;  // Q*m F_q-coordinates w.r.t. powers of gen_
    elt gen_ = 0, subgen_ = 0;
};

}  // namespace dmf
