#include "doctest.h"

#include "dmf/lattice.hpp"

using namespace dmf;

namespace {

Field F32() { return make_field(3, 1, 2, 2, 240); }

OmegaPoint pt_rank2(const Field& F) {
    SumParams P;
    P.Dcheck = 2;
    return make_point(F, {lf_parse(F, "rootT(1,2)"), LFElem::one(F)}, P);
}

SumParams params(long D) {
    SumParams P;
    P.D = D;
    P.T = 4;
    return P;
}

}  // namespace

TEST_CASE("enum_vectors counts and shells") {
    Field F = F32();
    long q = F->q();
    for (long r : {1L, 2L}) {
        for (long D : {0L, 1L, 2L}) {
            long long count = 0;
            long long expect = 1;
            for (long i = 0; i < r * (D + 1); ++i) expect *= q;
            std::vector<long long> per_shell(std::size_t(D + 1), 0);
            long last_shell = 0;
            enum_vectors(F->k, r, D, [&](long s, const std::vector<Poly>& a) {
                ++count;
                ++per_shell[std::size_t(s)];
                CHECK(s >= last_shell);  // shells stream in order
                last_shell = s;
                long maxdeg = -1;
                for (const auto& ai : a) maxdeg = std::max(maxdeg, poly_deg(ai));
                CHECK(maxdeg == s);  // shells partition by max degree
            });
            CHECK(count == expect - 1);
        }
    }
    // r=1, D=0: exactly the q-1 nonzero constants
    long long c = 0;
    enum_vectors(F->k, 1, 0, [&](long, const std::vector<Poly>&) { ++c; });
    CHECK(c == F->q() - 1);
}

TEST_CASE("point validation") {
    Field F = F32();
    SumParams P;
    CHECK_THROWS_AS((void)make_point(F, {LFElem::theta(F), LFElem::theta(F)}, P),
                    ConfigError);  // last coordinate not 1
    // theta/1 coordinates are K_infty-dependent: heuristic must fire
    CHECK_THROWS_AS((void)make_point(F, {LFElem::theta(F), LFElem::one(F)}, P),
                    PrecisionError);
    OmegaPoint z = pt_rank2(F);
    CHECK(z.imEstimate.has_value());
}

TEST_CASE("closed-form sums equal brute enumeration exactly") {
    Field F = F32();
    OmegaPoint z = pt_rank2(F);
    SumParams P = params(2);  // 3^6 - 1 = 728 vectors: brute is exact too
    LatticeSums L(z, P, true, 30, 30);
    for (long k : {1L, 2L, 4L, 8L, 9L, 3L}) {
        LFElem fast = L.eisenstein(k);
        LFElem slow = brute_eisenstein(z, k, P.D);
        long long n = std::min(fast.abs_prec(), slow.abs_prec());
        CHECK(agree_digits(fast, slow) >= n - 2);
    }
    // congruence sums
    std::vector<ResidueField::elt> mu = {0, 1};
    LFElem fastmu = L.eisenstein_mu(mu);
    LFElem slowmu = brute_eisenstein_mu(z, mu, P.D);
    CHECK(agree_digits(fastmu, slowmu) >=
          std::min(fastmu.abs_prec(), slowmu.abs_prec()) - 2);
    // Tate-valued rows
    for (long j : {1L, 2L}) {
        TSeries fast = L.eisenstein_tate(j, 3);
        TSeries slow = brute_eisenstein_tate(z, j, 3, P.D, P.T);
        CHECK(ts_agree_digits(fast, slow) >=
              std::min(fast.min_coeff_prec(), slow.min_coeff_prec()) - 2);
    }
    // term-wise partials
    LFElem pf = L.eisenstein_partial(1, 1);
    LFElem ps = brute_eisenstein_partial(z, 1, 1, P.D);
    CHECK(agree_digits(pf, ps) >= std::min(pf.abs_prec(), ps.abs_prec()) - 2);
}

TEST_CASE("eisenstein structure") {
    Field F = F32();
    OmegaPoint z = pt_rank2(F);
    LatticeSums L(z, params(4), false, 30, 0);
    // Eis_0 = -1
    CHECK(agree_digits(L.eisenstein(0), -LFElem::one(F)) > 200);
    // vanishing off the (q-1) grid
    for (long k : {1L, 3L, 5L, 7L}) CHECK(L.eisenstein(k).is_zero());
    // nonzero on the grid
    CHECK_FALSE(L.eisenstein(2).is_zero());
    CHECK_FALSE(L.eisenstein(8).is_zero());
    // shell sums telescope back to the total
    auto shells = L.shell_sums(2);
    LFElem acc = LFElem::zero_exact(F);
    for (const auto& s : shells) acc = acc + s;
    CHECK(agree_digits(acc, L.eisenstein(2)) >= L.eisenstein(2).abs_prec() - 2);
    // tail monotonicity beyond shell 1: shell-sum magnitudes keep shrinking
    long long prev = std::numeric_limits<long long>::min();
    for (std::size_t si = 1; si < shells.size(); ++si) {
        long long v = shells[si].is_zero() ? shells[si].abs_prec() : shells[si].val();
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("stability in D: larger bound refines within reported tail") {
    Field F = F32();
    OmegaPoint z = pt_rank2(F);
    LatticeSums L4(z, params(4), true, 30, 12);
    LatticeSums L6(z, params(6), true, 30, 12);
    for (long k : {2L, 4L, 8L}) {
        LFElem a = L4.eisenstein(k), b = L6.eisenstein(k);
        // difference below the common reported precision
        CHECK(agree_digits(a, b) >= std::min(a.abs_prec(), b.abs_prec()));
    }
    std::vector<ResidueField::elt> mu = {1, 1};
    LFElem m4 = L4.eisenstein_mu(mu), m6 = L6.eisenstein_mu(mu);
    CHECK(agree_digits(m4, m6) >= std::min(m4.abs_prec(), m6.abs_prec()));
    LFElem p4 = L4.eisenstein_partial(1, 1), p6 = L6.eisenstein_partial(1, 1);
    CHECK(agree_digits(p4, p6) >= std::min(p4.abs_prec(), p6.abs_prec()));
    // tails never regress with D (they saturate the cap at rapid-decay points)
    CHECK(L6.tail_digits(2) >= L4.tail_digits(2));
}

TEST_CASE("finite differences validate the term-wise partial and its sign") {
    Field F = F32();
    OmegaPoint z = pt_rank2(F);
    SumParams P = params(5);
    LatticeSums L(z, P, true, 30, 12);
    LFElem d_closed = L.eisenstein_partial(1, 1);  // d_1 Eis_{q-1}

    for (long M : {20L, 24L}) {
        LFElem eps = LFElem::monomial(F, 1, -M, 1);
        OmegaPoint zs = z;
        zs.z[0] = zs.z[0] + eps;
        LatticeSums Ls(zs, P, false, 30, 0);
        LFElem fd = (Ls.eisenstein(2) - L.eisenstein(2)) / eps;
        CHECK(agree_digits(fd, d_closed) >= std::min<long long>(2 * M * F->e - 4,
                                                                d_closed.abs_prec() - 4));
    }
}

TEST_CASE("congruence sums scale as E_{c mu} = c^{-1} E_mu") {
    Field F = F32();
    OmegaPoint z = pt_rank2(F);
    LatticeSums L(z, params(3), false, 30, 0);
    std::vector<ResidueField::elt> mu = {1, F->k.subgen()};
    for (auto c : F->k.subfield_units()) {
        std::vector<ResidueField::elt> cmu = mu;
        for (auto& x : cmu) x = F->k.mul(x, c);
        LFElem lhs = L.eisenstein_mu(cmu);
        LFElem rhs = lf_scale(L.eisenstein_mu(mu), F->k.inv(c));
        CHECK(agree_digits(lhs, rhs) >= std::min(lhs.abs_prec(), rhs.abs_prec()) - 2);
    }
}

TEST_CASE("second term-wise derivative vanishes in characteristic p") {
    // d_i of the d_j-sum: finite difference of the closed-form partial is zero
    Field F = F32();
    OmegaPoint z = pt_rank2(F);
    SumParams P = params(4);
    LatticeSums L(z, P, true, 30, 12);
    long M = 20;
    LFElem eps = LFElem::monomial(F, 1, -M, 1);
    OmegaPoint zs = z;
    zs.z[0] = zs.z[0] + eps;
    LatticeSums Ls(zs, P, true, 30, 12);
    LFElem fd = (Ls.eisenstein_partial(1, 1) - L.eisenstein_partial(1, 1)) / eps;
    // any genuine second derivative would survive at ~|eps| scale
    CHECK((fd.is_zero() || fd.val() >= M * F->e - 8));
}
