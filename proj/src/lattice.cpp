#include "dmf/lattice.hpp"

#include <algorithm>
#include <limits>

#include "dmf/parallel.hpp"

namespace dmf {

long poly_deg(const Poly& a) {
    long d = long(a.size()) - 1;
    while (d >= 0 && a[std::size_t(d)] == 0) --d;
    return d;
}

Poly poly_add(const ResidueField& k, const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        ResidueField::elt x = i < a.size() ? a[i] : ResidueField::elt(0);
        ResidueField::elt y = i < b.size() ? b[i] : ResidueField::elt(0);
        r[i] = k.add(x, y);
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

Poly poly_neg(const ResidueField& k, const Poly& a) {
    Poly r = a;
    for (auto& c : r) c = k.neg(c);
    return r;
}

Poly poly_mul(const ResidueField& k, const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = k.add(r[i + j], k.mul(a[i], b[j]));
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

Poly poly_scale(const ResidueField& k, const Poly& a, ResidueField::elt c) {
    Poly r = a;
    for (auto& x : r) x = k.mul(x, c);
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

LFElem poly_eval_theta(const Field& F, const Poly& a) {
    LFElem acc = LFElem::zero_exact(F);
    for (std::size_t i = a.size(); i-- > 0;)
        acc = acc * LFElem::theta(F) + LFElem::constant(F, a[i]);
    return acc;
}

std::string poly_str(const ResidueField& k, const Poly& a) {
    if (poly_deg(a) < 0) return "0";
    std::string out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        if (!out.empty()) out += " + ";
        if (i == 0 || a[i] != 1) out += k.to_string(a[i]);
        if (i > 0) {
            if (a[i] != 1) out += "*";
            out += i == 1 ? "T" : "T^" + std::to_string(i);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

OmegaPoint make_point(const Field& F, std::vector<LFElem> z, const SumParams& P) {
    if (z.size() < 2) throw ConfigError("rank must be >= 2");
    OmegaPoint pt;
    pt.r = long(z.size());
    pt.F = F;
    LFElem last = z.back() - LFElem::one(F);
    if (!last.is_zero()) throw ConfigError("last coordinate of the point must be 1");
    pt.z = std::move(z);

    // independence heuristic: every |a.z| with deg a_i <= Dcheck stays above q^-G
    long long worst = std::numeric_limits<long long>::min();
    enum_vectors(F->k, pt.r, P.Dcheck, [&](long, const std::vector<Poly>& a) {
        LFElem acc = LFElem::zero_exact(F);
        for (long i = 0; i < pt.r; ++i)
            acc = acc + poly_eval_theta(F, a[std::size_t(i)]) * pt.z[std::size_t(i)];
        if (acc.is_zero() || acc.val() >= P.G * F->e)
            throw PrecisionError(
                "independence heuristic failed: |a.z| <= q^-G for a lattice vector "
                "of degree <= " +
                std::to_string(P.Dcheck));
        worst = std::max(worst, acc.val());
    });
    pt.imEstimate = Rat(-worst, F->e);
    return pt;
}

void enum_vectors(const ResidueField& k, long r, long D,
                  const std::function<void(long, const std::vector<Poly>&)>& fn) {
    const long q = k.q();
    auto units = k.subfield_units();
    auto digit = [&](long d) { return d == 0 ? ResidueField::elt(0) : units[std::size_t(d - 1)]; };
    const std::size_t nr = std::size_t(r);
    for (long s = 0; s <= D; ++s) {
        const long width = s + 1;
        std::vector<long> odo(std::size_t(r * width), 0);
        std::vector<Poly> a(nr);
        for (;;) {
            bool top = false;
            for (long i = 0; i < r && !top; ++i)
                if (odo[std::size_t(i * width + s)] != 0) top = true;
            bool nonzero = false;
            for (auto d : odo)
                if (d) nonzero = true;
            if (top || (s == 0 && nonzero)) {
                for (long i = 0; i < r; ++i) {
                    Poly& ai = a[std::size_t(i)];
                    ai.assign(std::size_t(width), 0);
                    for (long l = 0; l < width; ++l) ai[std::size_t(l)] = digit(odo[std::size_t(i * width + l)]);
                    while (!ai.empty() && ai.back() == 0) ai.pop_back();
                }
                fn(s, a);
            }
            long pos = 0;
            while (pos < r * width) {
                if (++odo[std::size_t(pos)] < q) break;
                odo[std::size_t(pos)] = 0;
                ++pos;
            }
            if (pos == r * width) break;
        }
        if (s == 0) continue;
    }
}

// ---------------------------------------------------------------------------

LFElem UltraEchelon::reduce(LFElem g) const {
    const ResidueField& k = F_->k;
    const long m = k.m();
    while (!g.is_zero()) {
        auto it = rows_.find(g.val());
        if (it == rows_.end()) return g;
        const ResidueField::elt* cg = k.subfield_coords(g.leading());
        std::vector<ResidueField::elt> coords(cg, cg + m);
        bool touched = false;
        for (const Row& row : it->second) {
            ResidueField::elt lam = coords[std::size_t(row.pivot)];
            if (lam == 0) continue;
            g = g - lf_scale(row.vec, lam);
            touched = true;
            for (long j = 0; j < m; ++j)
                coords[std::size_t(j)] =
                    k.sub(coords[std::size_t(j)], k.mul(lam, row.coords[std::size_t(j)]));
        }
        if (!touched) return g;  // leading coefficient off the pivot span
        bool resid = false;
        for (long j = 0; j < m; ++j) resid = resid || coords[std::size_t(j)] != 0;
        if (resid) return g;  // partially reduced, remainder off the pivots
    }
    return g;
}

LFElem UltraEchelon::insert(const LFElem& g) {
    const ResidueField& k = F_->k;
    const long m = k.m();
    LFElem r = reduce(g);
    if (r.is_zero()) return r;
    const ResidueField::elt* cr = k.subfield_coords(r.leading());
    long piv = -1;
    for (long j = 0; j < m && piv < 0; ++j)
        if (cr[std::size_t(j)] != 0) piv = j;
    r = lf_scale(r, k.inv(cr[std::size_t(piv)]));
    Row row;
    row.pivot = piv;
    const ResidueField::elt* cn = k.subfield_coords(r.leading());
    row.coords.assign(cn, cn + m);
    row.vec = r;
    // keep rows at this exponent reduced against the new pivot
    auto& bucket = rows_[r.val()];
    for (Row& old : bucket) {
        ResidueField::elt lam = old.coords[std::size_t(piv)];
        if (lam == 0) continue;
        old.vec = old.vec - lf_scale(r, lam);
        for (long j = 0; j < m; ++j)
            old.coords[std::size_t(j)] =
                k.sub(old.coords[std::size_t(j)], k.mul(lam, row.coords[std::size_t(j)]));
    }
    bucket.push_back(std::move(row));
    return bucket.back().vec;
}

SubspacePoly::SubspacePoly(const Field& F_) : F(F_), ech(F_) { c.push_back(LFElem::one(F_)); }

LFElem SubspacePoly::eval(const LFElem& w) const {
    LFElem wr = ech.reduce(w);
    if (wr.is_zero()) return wr;  // in the span at precision: P(w) = 0
    LFElem acc = c[0] * wr;
    LFElem wq = wr;
    for (std::size_t i = 1; i < c.size(); ++i) {
        wq = lf_frob(wq, 1);
        acc = acc + c[i] * wq;
    }
    return acc;
}

void SubspacePoly::extend(const LFElem& g) {
    LFElem gr = ech.reduce(g);
    if (gr.is_zero())
        throw PrecisionError("subspace tower: basis vector dependent at working precision");
    LFElem beta = eval(gr);  // reduce is idempotent on gr
    if (beta.is_zero())
        throw PrecisionError("subspace tower: basis vector dependent at working precision");
    LFElem betaq1 = lf_pow(beta, F->q() - 1);
    std::vector<LFElem> nc(c.size() + 1, LFElem::zero_exact(F));
    for (std::size_t i = 0; i < c.size(); ++i) {
        nc[i] = nc[i] - betaq1 * c[i];
        nc[i + 1] = nc[i + 1] + lf_frob(c[i], 1);
    }
    c = std::move(nc);
    ech.insert(gr);
}

std::vector<LFElem> space_power_sums(const SubspacePoly& P, long kmax) {
    // S_k = [T^{k-1}] U/R with R(T) = sum_i c_i T^{q^i - 1},
    // U(T) = sum_{i>=1} c_i T^{q^i - 2}
    const Field& F = P.F;
    const long q = F->q();
    std::vector<LFElem> V(std::size_t(kmax), LFElem::zero_exact(F));
    LFElem c0inv = lf_inv(P.c[0]);
    std::vector<std::pair<long long, const LFElem*>> rterms;  // (q^i - 1, c_i), i >= 1
    long long qi = 1;
    for (std::size_t i = 1; i < P.c.size(); ++i) {
        qi *= q;
        if (qi - 1 > kmax) break;
        rterms.emplace_back(qi - 1, &P.c[i]);
    }
    for (long long n = 0; n < kmax; ++n) {
        LFElem acc = LFElem::zero_exact(F);
        for (auto& [off, ci] : rterms) {
            if (off - 1 == n) acc = acc + *ci;  // U_n
            if (off <= n) acc = acc - *ci * V[std::size_t(n - off)];
        }
        V[std::size_t(n)] = c0inv * acc;
    }
    return V;  // V[k-1] = S_k
}

std::vector<LFElem> coset_power_sums(const SubspacePoly& P, const LFElem& w, long kmax) {
    // sum_{v in W} (w+v)^{-k} = (-1)^{k-1} [T^{k-1}] c_0 / (P(w) + P(T))
    const Field& F = P.F;
    const long q = F->q();
    LFElem Pw = P.eval(w);
    if (Pw.is_zero())
        throw PrecisionError("coset power sum: shift lies in the lattice at precision");
    LFElem Pwinv = lf_inv(Pw);
    std::vector<std::pair<long long, const LFElem*>> dterms;  // (q^i, c_i)
    long long qi = 1;
    for (std::size_t i = 0; i < P.c.size(); ++i) {
        if (qi <= kmax - 1) dterms.emplace_back(qi, &P.c[i]);
        qi *= q;
        if (qi > kmax) break;
    }
    std::vector<LFElem> I(std::size_t(kmax), LFElem::zero_exact(F));
    I[0] = Pwinv;
    for (long long n = 1; n < kmax; ++n) {
        LFElem acc = LFElem::zero_exact(F);
        for (auto& [off, ci] : dterms)
            if (off <= n) acc = acc + *ci * I[std::size_t(n - off)];
        I[std::size_t(n)] = -(Pwinv * acc);
    }
    std::vector<LFElem> S(std::size_t(kmax), LFElem::zero_exact(F));
    const ResidueField& k = F->k;
    for (long kk = 1; kk <= kmax; ++kk) {
        LFElem v = P.c[0] * I[std::size_t(kk - 1)];
        S[std::size_t(kk - 1)] = (kk % 2 == 0) ? lf_scale(v, k.neg(1)) : v;
    }
    return S;  // S[k-1]
}

// ---------------------------------------------------------------------------

LatticeSums::LatticeSums(const OmegaPoint& z, const SumParams& P, bool want_moments,
                         long kmax_eis, long kmax_moment)
    : z_(z),
      P_(P),
      kmax_eis_(kmax_eis),
      kmax_moment_(kmax_moment),
      n_(z.r * (P.D + 1)),
      towerD_(z.F),
      towerDm1_(z.F) {
    if (P_.D < 1) throw ConfigError("lattice degree bound D must be >= 1");
    build_scalar();
    if (want_moments) build_moments();
}

LFElem LatticeSums::basis_vec(long i, long l) const {
    return z_.z[std::size_t(i - 1)] * LFElem::monomial(z_.F, 1, l, 1);
}

void LatticeSums::build_scalar() {
    SubspacePoly tower(z_.F);
    stageS_.reserve(std::size_t(P_.D + 1));
    for (long l = 0; l <= P_.D; ++l) {
        for (long i = 1; i <= z_.r; ++i) tower.extend(basis_vec(i, l));
        stageS_.push_back(space_power_sums(tower, kmax_eis_));
        if (l == P_.D - 1) towerDm1_ = tower;
    }
    towerD_ = tower;
}

void LatticeSums::build_moments() {
    // one hyperplane tower per basis direction; deterministic parallel fill
    auto units = z_.F->k.subfield_units();
    struct Row {
        SubspacePoly hyp, hypDm1;
        std::vector<LFElem> M, Mm1;
        Row() = default;
        explicit Row(const Field& F) : hyp(F), hypDm1(F) {}
    };
    auto rows = parallel_map<Row>(std::size_t(n_), [&](std::size_t dir) {
        long l0 = long(dir) / z_.r;
        long j0 = long(dir) % z_.r + 1;
        Row row(z_.F);
        for (long l = 0; l <= P_.D; ++l) {
            for (long i = 1; i <= z_.r; ++i) {
                if (i == j0 && l == l0) continue;
                row.hyp.extend(basis_vec(i, l));
            }
            if (l == P_.D - 1) row.hypDm1 = row.hyp;
        }
        LFElem b = basis_vec(j0, l0);
        row.M.assign(std::size_t(kmax_moment_), LFElem::zero_exact(z_.F));
        row.Mm1 = row.M;
        for (auto c : units) {
            LFElem w = lf_scale(b, c);
            auto S = coset_power_sums(row.hyp, w, kmax_moment_);
            for (long kk = 0; kk < kmax_moment_; ++kk)
                row.M[std::size_t(kk)] = row.M[std::size_t(kk)] + lf_scale(S[std::size_t(kk)], c);
            if (l0 <= P_.D - 1) {
                auto Sm = coset_power_sums(row.hypDm1, w, kmax_moment_);
                for (long kk = 0; kk < kmax_moment_; ++kk)
                    row.Mm1[std::size_t(kk)] =
                        row.Mm1[std::size_t(kk)] + lf_scale(Sm[std::size_t(kk)], c);
            }
        }
        return row;
    });
    moments_.resize(std::size_t(n_));
    momentsDm1_.resize(std::size_t(n_));
    hyp_.reserve(std::size_t(n_));
    hypDm1_.reserve(std::size_t(n_));
    for (std::size_t dir = 0; dir < rows.size(); ++dir) {
        moments_[dir] = std::move(rows[dir].M);
        momentsDm1_[dir] = std::move(rows[dir].Mm1);
        hyp_.push_back(std::move(rows[dir].hyp));
        hypDm1_.push_back(std::move(rows[dir].hypDm1));
    }
}

std::vector<LFElem> LatticeSums::shell_sums(long k) const {
    if (k < 1 || k > kmax_eis_) throw ConfigError("shell_sums: weight out of range");
    std::vector<LFElem> out;
    for (long s = 0; s <= P_.D; ++s) {
        const LFElem& cur = stageS_[std::size_t(s)][std::size_t(k - 1)];
        out.push_back(s == 0 ? cur : cur - stageS_[std::size_t(s - 1)][std::size_t(k - 1)]);
    }
    return out;
}

long long LatticeSums::tail_digits(long k) const {
    if (k < 1) return std::numeric_limits<long long>::max();
    long kk = std::min(k, kmax_eis_);
    LFElem last = stageS_[std::size_t(P_.D)][std::size_t(kk - 1)] -
                  stageS_[std::size_t(P_.D - 1)][std::size_t(kk - 1)];
    return last.is_zero() ? last.abs_prec() : last.val();
}

long long LatticeSums::moment_tail(long k) const {
    // nearest (q-1)-divisible weight at or below k; conservative for the
    // in-between classes whose scalar series vanish identically
    long q1 = z_.F->q() - 1;
    long kk = (k / q1) * q1;
    if (kk < q1) kk = q1;
    return tail_digits(kk);
}

LFElem LatticeSums::eisenstein(long k) const {
    if (k < 0) throw ConfigError("Eisenstein weight must be >= 0");
    if (k == 0) return -LFElem::one(z_.F);
    if (k > kmax_eis_) throw ConfigError("Eisenstein weight above configured cap");
    LFElem v = stageS_[std::size_t(P_.D)][std::size_t(k - 1)];
    return lf_truncate(v, tail_digits(k));
}

LFElem LatticeSums::eisenstein_mu(const std::vector<ResidueField::elt>& mu) const {
    if ((long)mu.size() != z_.r) throw ConfigError("mu has wrong length");
    bool nz = false;
    for (auto c : mu) nz = nz || c != 0;
    if (!nz) throw ConfigError("mu must be nonzero");
    const Field& F = z_.F;
    LFElem w = LFElem::zero_exact(F);
    for (long i = 0; i < z_.r; ++i)
        w = w + lf_scale(z_.z[std::size_t(i)], mu[std::size_t(i)]);
    w = w * lf_inv(LFElem::theta(F));
    LFElem vD = coset_power_sums(towerD_, w, 1)[0];
    LFElem vDm1 = coset_power_sums(towerDm1_, w, 1)[0];
    LFElem diff = vD - vDm1;
    long long tail = diff.is_zero() ? diff.abs_prec() : diff.val();
    return lf_truncate(vD, tail);
}

TSeries LatticeSums::eisenstein_tate(long j, long k) const {
    if (!has_moments()) throw ConfigError("Tate-valued sums need moment tables");
    if (j < 1 || j > z_.r) throw ConfigError("coordinate index out of range");
    if (k < 1 || k > kmax_moment_) throw ConfigError("weight above moment cap");
    TSeries s(z_.F, P_.T);
    for (long l = 0; l <= std::min(P_.T, P_.D); ++l) {
        long dir = l * z_.r + (j - 1);
        const LFElem& v = moments_[std::size_t(dir)][std::size_t(k - 1)];
        long long tail = moment_tail(k);
        if (l <= P_.D - 1) {  // honest last-increment proxy where a D-1 stage exists
            LFElem diff = v - momentsDm1_[std::size_t(dir)][std::size_t(k - 1)];
            tail = diff.is_zero() ? diff.abs_prec() : diff.val();
        }
        s[l] = lf_truncate(v, tail);
    }
    return s;
}

LFElem LatticeSums::eisenstein_partial_weight(long j, long k) const {
    if (!has_moments()) throw ConfigError("partial sums need moment tables");
    if (k + 1 > kmax_moment_)
        throw ConfigError("unsupported atom derivative: weight above moment cap");
    const Field& F = z_.F;
    // d/dz_j sum (a.z)^{-k} = (-k mod p) * sum a_j(theta) (a.z)^{-k-1}
    LFElem acc = LFElem::zero_exact(F);
    LFElem accm1 = acc;
    LFElem tp = LFElem::one(F);
    for (long l = 0; l <= P_.D; ++l) {
        long dir = l * z_.r + (j - 1);
        acc = acc + tp * moments_[std::size_t(dir)][std::size_t(k)];
        accm1 = accm1 + tp * momentsDm1_[std::size_t(dir)][std::size_t(k)];
        tp = tp * LFElem::theta(F);
    }
    LFElem diff = acc - accm1;  // the outermost degree block of the weighted sum
    long long tail = diff.is_zero() ? diff.abs_prec() : diff.val();
    long ck = (-(k % F->p()) + F->p()) % F->p();
    return lf_truncate(lf_scale(acc, F->k.from_int(ck)), tail);
}

LFElem LatticeSums::eisenstein_partial(long j, long i) const {
    long long qi = 1;
    for (long t = 0; t < i; ++t) qi *= z_.F->q();
    return eisenstein_partial_weight(j, long(qi - 1));
}

LFElem LatticeSums::eisenstein_mu_partial(const std::vector<ResidueField::elt>& mu,
                                          long j) const {
    if (!has_moments()) throw ConfigError("partial sums need moment tables");
    const Field& F = z_.F;
    const ResidueField& k = F->k;
    LFElem w = LFElem::zero_exact(F);
    for (long i = 0; i < z_.r; ++i)
        w = w + lf_scale(z_.z[std::size_t(i)], mu[std::size_t(i)]);
    w = w * lf_inv(LFElem::theta(F));

    // -(theta^{-1} mu_j) * sum_{b in W} (w+b)^{-2}
    LFElem acc = LFElem::zero_exact(F);
    if (mu[std::size_t(j - 1)] != 0) {
        LFElem s2 = coset_power_sums(towerD_, w, 2)[1];
        acc = acc + lf_scale(s2 * lf_inv(LFElem::theta(F)), mu[std::size_t(j - 1)]);
    }
    // -(sum_l theta^l * sum_{c != 0} c * sum_{v in V_jl} (w + c b_jl + v)^{-2})
    auto units = k.subfield_units();
    LFElem tp = LFElem::one(F);
    for (long l = 0; l <= P_.D; ++l) {
        LFElem b = basis_vec(j, l);
        const SubspacePoly& hyp = hyp_[std::size_t(l * z_.r + (j - 1))];
        LFElem m = LFElem::zero_exact(F);
        for (auto c : units) {
            LFElem s2 = coset_power_sums(hyp, w + lf_scale(b, c), 2)[1];
            m = m + lf_scale(s2, c);
        }
        acc = acc + tp * m;
        tp = tp * LFElem::theta(F);
    }
    return lf_truncate(-acc, moment_tail(2));
}

// ---------------------------------------------------------------------------

namespace {

LFElem brute_dot(const OmegaPoint& z, const std::vector<Poly>& a) {
    LFElem acc = LFElem::zero_exact(z.F);
    for (long i = 0; i < z.r; ++i)
        acc = acc + poly_eval_theta(z.F, a[std::size_t(i)]) * z.z[std::size_t(i)];
    return acc;
}

}  // namespace

LFElem brute_eisenstein(const OmegaPoint& z, long k, long D) {
    if (k == 0) return -LFElem::one(z.F);
    LFElem acc = LFElem::zero_exact(z.F);
    enum_vectors(z.F->k, z.r, D, [&](long, const std::vector<Poly>& a) {
        acc = acc + lf_pow(lf_inv(brute_dot(z, a)), k);
    });
    return acc;
}

LFElem brute_eisenstein_mu(const OmegaPoint& z, const std::vector<ResidueField::elt>& mu,
                           long D) {
    const Field& F = z.F;
    LFElem w = LFElem::zero_exact(F);
    for (long i = 0; i < z.r; ++i)
        w = w + lf_scale(z.z[std::size_t(i)], mu[std::size_t(i)]);
    w = w * lf_inv(LFElem::theta(F));
    LFElem acc = lf_inv(w);  // b = 0 term
    enum_vectors(F->k, z.r, D, [&](long, const std::vector<Poly>& a) {
        acc = acc + lf_inv(w + brute_dot(z, a));
    });
    return acc;
}

TSeries brute_eisenstein_tate(const OmegaPoint& z, long j, long k, long D, long T) {
    TSeries s(z.F, T);
    enum_vectors(z.F->k, z.r, D, [&](long, const std::vector<Poly>& a) {
        LFElem term = lf_pow(lf_inv(brute_dot(z, a)), k);
        const Poly& aj = a[std::size_t(j - 1)];
        for (long l = 0; l < long(aj.size()) && l <= T; ++l)
            if (aj[std::size_t(l)]) s[l] = s[l] + lf_scale(term, aj[std::size_t(l)]);
    });
    return s;
}

LFElem brute_eisenstein_partial(const OmegaPoint& z, long j, long i, long D) {
    long long qi = 1;
    for (long t = 0; t < i; ++t) qi *= z.F->q();
    LFElem acc = LFElem::zero_exact(z.F);
    enum_vectors(z.F->k, z.r, D, [&](long, const std::vector<Poly>& a) {
        LFElem term = lf_pow(lf_inv(brute_dot(z, a)), qi);
        acc = acc + term * poly_eval_theta(z.F, a[std::size_t(j - 1)]);
    });
    return acc;
}

}  // namespace dmf
