#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "dmf/tate.hpp"

namespace dmf {

// element of A = F_q[theta]: little-endian coefficients, entries in the F_q
// subfield of the residue field
using Poly = std::vector<ResidueField::elt>;

long poly_deg(const Poly& a);  // -1 for zero
Poly poly_add(const ResidueField& k, const Poly& a, const Poly& b);
Poly poly_neg(const ResidueField& k, const Poly& a);
Poly poly_mul(const ResidueField& k, const Poly& a, const Poly& b);
Poly poly_scale(const ResidueField& k, const Poly& a, ResidueField::elt c);
LFElem poly_eval_theta(const Field& F, const Poly& a);
std::string poly_str(const ResidueField& k, const Poly& a);

struct SumParams {
    long D = 8;       // lattice degree bound: deg a_i <= D
    long G = 40;      // guard: abort when |a.z| <= q^{-G} in the heuristic
    long Dcheck = 2;  // degree bound of the independence heuristic
    long T = 6;       // t-truncation order for Tate-valued sums
};

struct OmegaPoint {
    long r = 0;
    std::vector<LFElem> z;  // z[r-1] = 1 exactly
    Field F;
    std::optional<Rat> imEstimate;  // min |a.z| over the heuristic sample
};

// Validates z_r = 1 and runs the independence heuristic over deg a_i <= Dcheck.
OmegaPoint make_point(const Field& F, std::vector<LFElem> z, const SumParams& P);

// Streams every nonzero vector of A^r with deg a_i <= D exactly once, grouped
// into shells by max degree; fn(shell, vector).
void enum_vectors(const ResidueField& k, long r, long D,
                  const std::function<void(long, const std::vector<Poly>&)>& fn);

// Ultrametric echelon basis of an F_q-span: every stored vector has a pivot
// (u-exponent, F_q-coordinate slot) unique to it, so reduction modulo the
// span is a single forward pass and reduced vectors are orthogonal to it.
class UltraEchelon {
public:
    UltraEchelon() = default;
    explicit UltraEchelon(const Field& F) : F_(F) {}
    // canonical representative of g modulo the span (zero-to-precision result
    // means g is dependent at working precision)
    LFElem reduce(LFElem g) const;
    // reduce and insert; returns the stored representative
    LFElem insert(const LFElem& g);

private:
    struct Row {
        long pivot;  // F_q-coordinate slot of the leading coefficient
        std::vector<ResidueField::elt> coords;
        LFElem vec;
    };
    Field F_;
    std::map<long long, std::vector<Row>> rows_;  // leading u-exponent -> rows
};

// F_q-linear subspace polynomial P_W(X) = sum c_i X^{q^i} with kernel W,
// grown one basis vector at a time: P_{W+g} = P_W^q - P_W(g)^{q-1} P_W.
// Arguments of eval are first reduced modulo W (P is linear with kernel W),
// which keeps the evaluation free of deep ultrametric cancellation.
struct SubspacePoly {
    SubspacePoly() = default;
    explicit SubspacePoly(const Field& F);
    void extend(const LFElem& g);
    LFElem eval(const LFElem& w) const;
    long dim() const { return long(c.size()) - 1; }

    Field F;
    std::vector<LFElem> c;  // c[i] multiplies X^{q^i}
    UltraEchelon ech;
};

// power sums sum_{v in W} (w+v)^{-k} for k = 1..kmax (w not in W)
std::vector<LFElem> coset_power_sums(const SubspacePoly& P, const LFElem& w, long kmax);
// power sums over W \ {0}: S_k = sum_{0 != v in W} v^{-k}
std::vector<LFElem> space_power_sums(const SubspacePoly& P, long kmax);

// Exact evaluator for all truncated lattice sums at one point. Shell data, a
// per-exponent tail proxy (valuation of the outermost shell's sum) and the
// D-1 stage are kept so every returned value carries an honest absPrec.
class LatticeSums {
public:
    LatticeSums(const OmegaPoint& z, const SumParams& P, bool want_moments, long kmax_eis,
                long kmax_moment);

    const OmegaPoint& point() const { return z_; }
    const SumParams& params() const { return P_; }

    // Eis_k(z); Eis_0 = -1, zero (to tail precision) when (q-1) does not divide k
    LFElem eisenstein(long k) const;
    // E_mu(z) over a == theta^{-1} mu (mod A^r), deg bound D
    LFElem eisenstein_mu(const std::vector<ResidueField::elt>& mu) const;
    // script-E^{[j]}_{z,k}(t) to t-degree T (j in 1..r)
    TSeries eisenstein_tate(long j, long k) const;
    // d_j Eis_k (term-wise; char-p binomial factor included)
    LFElem eisenstein_partial_weight(long j, long k) const;
    // d_j Eis_{q^i-1} = sum_a a_j(theta) / (a.z)^{q^i}
    LFElem eisenstein_partial(long j, long i) const;
    // d_j E_mu = -sum a_j/(a.z)^2 over the congruence coset
    LFElem eisenstein_mu_partial(const std::vector<ResidueField::elt>& mu, long j) const;

    // per-shell sums of Eis_k for shells 0..D (shell s = max-degree-s slice)
    std::vector<LFElem> shell_sums(long k) const;
    // u-valuation tail proxy for exponent k (outermost shell's sum)
    long long tail_digits(long k) const;

    long kmax_eis() const { return kmax_eis_; }
    long kmax_moment() const { return kmax_moment_; }
    bool has_moments() const { return !moments_.empty(); }

private:
    LFElem basis_vec(long i, long l) const;  // z_i * theta^l
    void build_scalar();
    void build_moments();
    long long moment_tail(long k) const;

    OmegaPoint z_;
    SumParams P_;
    long kmax_eis_, kmax_moment_;
    long n_;  // r*(D+1)

    std::vector<std::vector<LFElem>> stageS_;  // stageS_[s][k-1]: S_k over W_s \ 0
    SubspacePoly towerD_, towerDm1_;           // full tower at D and D-1
    // per basis direction dir = l*r + (j-1): hyperplane towers at stage D and
    // D-1, and the weighted sums moments_[dir][k-1] = sum_a a_{(j,l)} (a.z)^{-k}
    std::vector<SubspacePoly> hyp_, hypDm1_;
    std::vector<std::vector<LFElem>> moments_, momentsDm1_;
};

// brute-force references (test oracles; feasible only for small D)
LFElem brute_eisenstein(const OmegaPoint& z, long k, long D);
LFElem brute_eisenstein_mu(const OmegaPoint& z, const std::vector<ResidueField::elt>& mu,
                           long D);
TSeries brute_eisenstein_tate(const OmegaPoint& z, long j, long k, long D, long T);
LFElem brute_eisenstein_partial(const OmegaPoint& z, long j, long i, long D);

}  // namespace dmf
