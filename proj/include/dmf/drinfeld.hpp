#pragma once

#include <memory>

#include "dmf/lattice.hpp"

namespace dmf {

using Mat = std::vector<std::vector<LFElem>>;

LFElem mat_det(const Mat& m);
// (i,j)-cofactor, 1-indexed
LFElem mat_cofactor(const Mat& m, long i, long j);

// Per-point Drinfeld module engine: coefficient forms by the Eisenstein
// recursion, exponential/logarithm coefficients, Anderson generating
// functions, quasi-periodic values and the period matrix with cofactors.
struct DrinfeldData {
    OmegaPoint z;
    SumParams P;
    std::shared_ptr<const LatticeSums> lat;

    LFElem carlitz;              // pi~
    std::vector<LFElem> g;       // g[1..r]; g[0] unused
    std::vector<LFElem> alpha;   // exp coefficients, 0..J
    std::vector<LFElem> beta;    // log coefficients via Eis, 0..max(J, r+1)
    long J = 0;                  // adaptive series cutoff
    std::vector<PoleSum> agf;    // s_1..s_r at index 0..r-1
    Mat periodMatrix;            // rows i: (-z_i, F_tau(z_i), ..., F_{tau^{r-1}}(z_i))
    Mat cofactors;               // all (i,j)-cofactors of the period matrix
    LFElem detP;

    const LFElem& gi(long i) const { return g[std::size_t(i)]; }
    LFElem eis(long k) const { return lat->eisenstein(k); }
    // cofactor L_{ij} of the period matrix (1-indexed)
    const LFElem& L(long i, long j) const {
        return cofactors[std::size_t(i - 1)][std::size_t(j - 1)];
    }
};

// want_moments enables the term-wise partial-derivative tables (needed by the
// forms layer at this point; finite-difference satellites can skip them)
DrinfeldData build_drinfeld(const OmegaPoint& z, const SumParams& P, bool want_moments);

// the g-recursion value (theta^{q^i} - theta) Eis_{q^i-1} + sum Eis_{q^k-1} g_{i-k}^{q^k};
// equals g_i for i <= r and must vanish for i > r
LFElem g_recursion_value(const DrinfeldData& d, long i);

// truncated exp_phi(w) = sum alpha_i w^{q^i}; errors when the tail at J has
// not decayed below the working precision
LFElem exp_eval(const DrinfeldData& d, const LFElem& w);

// Anderson generating function of an arbitrary argument w:
// sum_j alpha_j w^{q^j} / (theta^{q^j} - t)
PoleSum agf_of(const DrinfeldData& d, const LFElem& w);

// quasi-periodic value F_{tau^k}(w) = (twist^k AGF)(t = theta), k >= 1
LFElem quasi_periodic(const DrinfeldData& d, const LFElem& w, long k);

// Pellarin coefficient c_{q^i-1} as an exact PoleSum (Lemma-style expansion
// in alpha and beta over the poles theta^{q^k}, k = 0..i)
PoleSum pellarin_c(const DrinfeldData& d, long i);

// log coefficients by formal inversion of the alpha series (test oracle)
std::vector<LFElem> log_coeffs_by_inversion(const DrinfeldData& d, long J);

}  // namespace dmf
