#include "dmf/drinfeld.hpp"

#include <algorithm>

namespace dmf {

namespace {

constexpr long kJCap = 24;

long long ipow(long b, long e) {
    long long r = 1;
    for (long i = 0; i < e; ++i) r *= b;
    return r;
}

}  // namespace

LFElem mat_det(const Mat& m) {
    const std::size_t n = m.size();
    if (n == 1) return m[0][0];
    const Field& F = m[0][0].field();
    LFElem acc = LFElem::zero_exact(F);
    for (std::size_t j = 0; j < n; ++j) {
        if (m[0][j].is_zero() && m[0][j].abs_prec() >= F->relCap) continue;
        Mat minor;
        minor.reserve(n - 1);
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<LFElem> row;
            row.reserve(n - 1);
            for (std::size_t jj = 0; jj < n; ++jj)
                if (jj != j) row.push_back(m[i][jj]);
            minor.push_back(std::move(row));
        }
        LFElem term = m[0][j] * mat_det(minor);
        acc = (j % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

LFElem mat_cofactor(const Mat& m, long i, long j) {
    const std::size_t n = m.size();
    if (n == 1) return LFElem::one(m[0][0].field());
    Mat minor;
    for (std::size_t r = 0; r < n; ++r) {
        if (r == std::size_t(i - 1)) continue;
        std::vector<LFElem> row;
        for (std::size_t c = 0; c < n; ++c)
            if (c != std::size_t(j - 1)) row.push_back(m[r][c]);
        minor.push_back(std::move(row));
    }
    LFElem d = mat_det(minor);
    return ((i + j) % 2 == 0) ? d : -d;
}

LFElem g_recursion_value(const DrinfeldData& d, long i) {
    const Field& F = d.z.F;
    LFElem th = LFElem::theta(F);
    LFElem acc = (lf_frob(th, i) - th) * d.eis(long(ipow(F->q(), i)) - 1);
    for (long k = 1; k < i; ++k) {
        long ik = i - k;
        if (ik > d.z.r) continue;  // g vanishes above the rank
        acc = acc + d.eis(long(ipow(F->q(), k)) - 1) * lf_frob(d.gi(ik), k);
    }
    return acc;
}

LFElem exp_eval(const DrinfeldData& d, const LFElem& w) {
    const Field& F = d.z.F;
    if (w.is_zero()) return LFElem::zero(F, w.abs_prec());
    LFElem acc = w;
    long long prevv = w.val(), lastv = w.val();
    for (long i = 1; i <= d.J; ++i) {
        LFElem term = d.alpha[std::size_t(i)] * lf_frob(w, i);
        prevv = lastv;
        lastv = term.is_zero() ? term.abs_prec() : term.val();
        acc = acc + term;
    }
    if (lastv < prevv)
        throw PrecisionError("exp_phi tail has not decayed at the series cutoff");
    return lf_truncate(acc, lastv);
}

PoleSum agf_of(const DrinfeldData& d, const LFElem& w) {
    PoleSum s(d.z.F);
    for (long j = 0; j <= d.J; ++j)
        s.add_pole(j, d.alpha[std::size_t(j)] * lf_frob(w, j));
    return s;
}

LFElem quasi_periodic(const DrinfeldData& d, const LFElem& w, long k) {
    if (k < 1) throw ConfigError("quasi-periodic index must be >= 1");
    const Field& F = d.z.F;
    if (w.is_zero()) return LFElem::zero(F, w.abs_prec());
    // |w| <= 1: the twisted AGF series decays monotonically, evaluate directly
    if (w.val() >= 0) return ps_eval_theta(ps_twist(agf_of(d, w), k));
    // otherwise peel one power of theta via additivity and the functional
    // equation F(theta u) = theta F(u) + exp(u)^{q^k}; large arguments fed
    // straight into the series cancel beyond any working precision
    std::vector<LFElem::elt> tail_digits_v;
    long long hi = w.abs_prec();
    for (long long t = 0; t < hi; ++t) tail_digits_v.push_back(w.coeff(t));
    LFElem tail = LFElem::make(F, 0, std::move(tail_digits_v), hi);
    LFElem u = (w - tail) / LFElem::theta(F);
    LFElem acc = LFElem::theta(F) * quasi_periodic(d, u, k) + lf_frob(exp_eval(d, u), k);
    if (!tail.is_zero()) acc = acc + ps_eval_theta(ps_twist(agf_of(d, tail), k));
    return acc;
}

PoleSum pellarin_c(const DrinfeldData& d, long i) {
    PoleSum c(d.z.F);
    for (long k = 0; k <= i; ++k)
        c.add_pole(k, d.alpha[std::size_t(k)] * lf_frob(d.beta[std::size_t(i - k)], k));
    return c;
}

std::vector<LFElem> log_coeffs_by_inversion(const DrinfeldData& d, long J) {
    // (sum beta_i tau^i)(sum alpha_j tau^j) = 1: beta_n = -sum_{i<n} beta_i alpha_{n-i}^{q^i}
    const Field& F = d.z.F;
    std::vector<LFElem> b{LFElem::one(F)};
    for (long n = 1; n <= J; ++n) {
        LFElem acc = LFElem::zero_exact(F);
        for (long i = 0; i < n; ++i) {
            if (n - i > d.J) continue;
            acc = acc + b[std::size_t(i)] * lf_frob(d.alpha[std::size_t(n - i)], i);
        }
        b.push_back(-acc);
    }
    return b;
}

DrinfeldData build_drinfeld(const OmegaPoint& z, const SumParams& P, bool want_moments) {
    DrinfeldData d;
    d.z = z;
    d.P = P;
    const Field& F = z.F;
    const long q = F->q();
    long kmax_eis = long(ipow(q, z.r + 1)) + q;
    long kmax_mom = long(ipow(q, z.r)) + 6;
    d.lat = std::make_shared<const LatticeSums>(z, P, want_moments, kmax_eis, kmax_mom);
    d.carlitz = lf_carlitz_period(F);

    // coefficient forms by the Eisenstein recursion
    LFElem th = LFElem::theta(F);
    d.g.assign(std::size_t(z.r) + 1, LFElem::zero_exact(F));
    for (long i = 1; i <= z.r; ++i) {
        LFElem acc = (lf_frob(th, i) - th) * d.eis(long(ipow(q, i)) - 1);
        for (long k = 1; k < i; ++k)
            acc = acc + d.eis(long(ipow(q, k)) - 1) * lf_frob(d.g[std::size_t(i - k)], k);
        d.g[std::size_t(i)] = acc;
    }
    if (d.g[std::size_t(z.r)].is_zero())
        throw PrecisionError("g_r vanishes at working precision; invalid point");

    // exponential coefficients with adaptive cutoff:
    // alpha_i = (theta^{q^i}-theta)^{-1} (sum_{mu=1..min(i,r)} g_mu alpha_{i-mu}^{q^mu})
    d.alpha.assign(1, LFElem::one(F));
    long J = 1;
    for (;; ++J) {
        LFElem acc = LFElem::zero_exact(F);
        for (long mu = 1; mu <= std::min<long>(J, z.r); ++mu)
            acc = acc + d.g[std::size_t(mu)] * lf_frob(d.alpha[std::size_t(J - mu)], mu);
        d.alpha.push_back(acc * lf_inv(lf_frob(th, J) - th));
        // stop once every alpha_J (theta z_i)^{q^J} has dropped below the
        // tracked window (theta z_i covers the functional-equation arguments)
        bool done = J >= 2;
        for (long i = 1; i <= z.r && done; ++i) {
            LFElem t = d.alpha[std::size_t(J)] * lf_frob(th * z.z[std::size_t(i - 1)], J);
            long long v = t.is_zero() ? t.abs_prec() : t.val();
            if (v < F->relCap) done = false;
        }
        if (done) break;
        if (J >= kJCap)
            throw PrecisionError("AGF cutoff cap reached without tail decay");
    }
    d.J = J;

    // log coefficients from the Eisenstein relation beta_i = -Eis_{q^i-1}
    long betaMax = std::max<long>(J, z.r + 1);
    d.beta.assign(1, LFElem::one(F));
    for (long i = 1; i <= betaMax; ++i) {
        if (ipow(q, i) - 1 <= kmax_eis)
            d.beta.push_back(-d.eis(long(ipow(q, i)) - 1));
        else
            d.beta.push_back(-log_coeffs_by_inversion(d, i).back());
    }

    // AGFs and the period matrix (quasi-periodic values go through the
    // argument-peeling evaluator so large coordinates stay stable)
    for (long i = 1; i <= z.r; ++i) d.agf.push_back(agf_of(d, z.z[std::size_t(i - 1)]));
    d.periodMatrix.assign(std::size_t(z.r), std::vector<LFElem>());
    for (long i = 1; i <= z.r; ++i) {
        auto& row = d.periodMatrix[std::size_t(i - 1)];
        row.push_back(-z.z[std::size_t(i - 1)]);
        for (long j = 1; j <= z.r - 1; ++j)
            row.push_back(quasi_periodic(d, z.z[std::size_t(i - 1)], j));
    }
    d.detP = mat_det(d.periodMatrix);
    if (d.detP.is_zero())
        throw PrecisionError("period matrix singular at working precision");
    d.cofactors.assign(std::size_t(z.r), std::vector<LFElem>());
    for (long i = 1; i <= z.r; ++i)
        for (long j = 1; j <= z.r; ++j)
            d.cofactors[std::size_t(i - 1)].push_back(mat_cofactor(d.periodMatrix, i, j));
    return d;
}

}  // namespace dmf
