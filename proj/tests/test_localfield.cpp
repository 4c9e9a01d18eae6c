#include "doctest.h"

#include <random>

#include "dmf/localfield.hpp"

using namespace dmf;

namespace {

Field F32() { return make_field(3, 1, 2, 2, 200); }  // q=3, m=2, e=2

LFElem random_unit(const Field& F, std::mt19937& rng, int span = 20) {
    std::vector<LFElem::elt> cs;
    long long n0 = (long long)(rng() % 21) - 10;
    int len = 3 + int(rng() % span);
    for (int i = 0; i < len; ++i) cs.push_back(LFElem::elt(rng() % F->k.size()));
    if (cs[0] == 0) cs[0] = 1;
    return LFElem::make(F, n0, std::move(cs), n0 + F->relCap);
}

}  // namespace

TEST_CASE("field construction pins modulus and generator") {
    Field F = F32();
    CHECK(F->q() == 3);
    CHECK(F->k.size() == 9);
    CHECK(F->k.modulus_string() != "");
    // generator has full order
    auto g = F->k.gen();
    LFElem::elt x = g;
    int ord = 1;
    while (x != 1) {
        x = F->k.mul(x, g);
        ++ord;
    }
    CHECK(ord == 8);
    CHECK(F->admits_neg_theta_root());
    // F_3 itself does not contain sqrt(-1)
    Field F31 = make_field(3, 1, 1, 2, 200);
    CHECK_FALSE(F31->admits_neg_theta_root());
}

TEST_CASE("additive identities") {
    Field F = F32();
    std::mt19937 rng(7);
    for (int it = 0; it < 25; ++it) {
        LFElem a = random_unit(F, rng);
        LFElem z = a + (-a);
        CHECK(z.is_zero());
        CHECK(z.abs_prec() == a.abs_prec());
        CHECK(agree_digits(a + LFElem::zero(F, a.abs_prec()), a) >= a.abs_prec());
    }
    // char p: p-fold sum vanishes
    LFElem um2 = lf_shift(LFElem::one(F), -2);
    LFElem s = um2 + um2 + um2;
    CHECK(s.is_zero());
}

TEST_CASE("ultrametric valuation laws") {
    Field F = F32();
    std::mt19937 rng(11);
    for (int it = 0; it < 50; ++it) {
        LFElem a = random_unit(F, rng), b = random_unit(F, rng);
        LFElem ab = a * b;
        CHECK(ab.val() == a.val() + b.val());
        LFElem s = a + b;
        if (!s.is_zero()) {
            CHECK(s.val() >= std::min(a.val(), b.val()));
            if (a.val() != b.val()) CHECK(s.val() == std::min(a.val(), b.val()));
        }
    }
}

TEST_CASE("multiplication basics") {
    Field F = F32();
    LFElem th = LFElem::theta(F);
    CHECK(agree_digits(th * lf_inv(th), LFElem::one(F)) >= F->relCap - 4);
    // (1+u)(1-u) = 1-u^2
    LFElem u = lf_shift(LFElem::one(F), 1);
    LFElem lhs = (LFElem::one(F) + u) * (LFElem::one(F) - u);
    LFElem rhs = LFElem::one(F) - u * u;
    CHECK(agree_digits(lhs, rhs) >= F->relCap - 4);
    CHECK(lf_abs(th) == Rat(1, 1));
    CHECK(lf_abs(u) == Rat(-1, 2));
    CHECK(lf_abs(LFElem::one(F) + u) == Rat(0, 1));
}

TEST_CASE("geometric series inverse") {
    Field F = F32();
    LFElem u = lf_shift(LFElem::one(F), 1);
    LFElem inv = lf_inv(LFElem::one(F) - u);
    // inv = 1 + u + u^2 + ...
    for (int k = 0; k < 10; ++k) CHECK(inv.coeff(k) == 1);
    LFElem a = inv;
    CHECK(agree_digits(lf_inv(lf_inv(a)), a) >= a.abs_prec() - 8);
}

TEST_CASE("frobenius is an exact ring morphism") {
    Field F = F32();
    std::mt19937 rng(23);
    for (int it = 0; it < 20; ++it) {
        LFElem a = random_unit(F, rng, 8), b = random_unit(F, rng, 8);
        for (long i = 1; i <= 2; ++i) {
            LFElem fa = lf_frob(a, i), fb = lf_frob(b, i);
            long long n = std::min(lf_frob(a + b, i).abs_prec(), (fa + fb).abs_prec());
            CHECK(agree_digits(lf_frob(a + b, i), fa + fb) >= n);
            LFElem pm = lf_frob(a * b, i), pf = fa * fb;
            CHECK(agree_digits(pm, pf) >= std::min(pm.abs_prec(), pf.abs_prec()));
        }
    }
    // constants and exponent scaling
    LFElem c = LFElem::constant(F, F->k.gen());
    CHECK(lf_frob(c, 1).leading() == F->k.powi(F->k.gen(), 3));
    LFElem half = LFElem::monomial(F, 1, 1, 2);  // theta^(1/2)
    CHECK(lf_frob(half, 1).log_abs() == Rat(3, 2));
}

TEST_CASE("frobenius composes with itself") {
    Field F = F32();
    std::mt19937 rng(29);
    LFElem a = random_unit(F, rng, 10);
    CHECK(agree_digits(lf_frob(lf_frob(a, 1), 1), lf_frob(a, 2)) >=
          lf_frob(a, 2).abs_prec() - 2);
}

TEST_CASE("roots: deterministic sign rule and round trips") {
    Field F = F32();
    LFElem th = LFElem::theta(F);
    // root(theta^2, 2) -> +theta under the dlog-least rule
    LFElem r = lf_root(th * th, 2);
    CHECK(agree_digits(r, th) >= r.abs_prec() - 2);
    // defining equation of the pinned (q-1)-st root of -theta
    LFElem rho = lf_neg_theta_root(F);
    CHECK(agree_digits(rho * rho, -th) >= rho.abs_prec() - 4);
    std::mt19937 rng(31);
    for (int it = 0; it < 10; ++it) {
        LFElem a = random_unit(F, rng, 6);
        for (long n : {2L, 3L, 4L, 6L}) {
            LFElem an = lf_pow(a, n);
            LFElem rt = lf_root(an, n);
            // n-th root of a^n equals a up to the sign rule; compare n-th powers
            // to the propagated precision (a p-part divides absolute precision by p)
            LFElem rtn = lf_pow(rt, n);
            long long want = std::min(an.abs_prec(), rtn.abs_prec());
            CHECK(agree_digits(rtn, an) >= want - 2);
        }
    }
}

TEST_CASE("root reports required field upgrade") {
    Field F31 = make_field(3, 1, 1, 1, 120);  // e = 1
    LFElem th = LFElem::theta(F31);
    CHECK_THROWS_AS((void)lf_root(th, 2), FieldUpgradeError);  // valuation 1 not even
    try {
        (void)lf_root(th, 2);
    } catch (const FieldUpgradeError& up) {
        CHECK(up.e_required == 2);
    }
    // -1 has no square root over F_3: m upgrade requested
    LFElem m1 = -LFElem::one(F31);
    try {
        (void)lf_root(m1, 2);
        CHECK(false);
    } catch (const FieldUpgradeError& up) {
        CHECK(up.m_required == 2);
    }
}

TEST_CASE("carlitz period leading data") {
    Field F = F32();
    LFElem pi = lf_carlitz_period(F);
    // v(pi~) = -1 - 1/(q-1) = -3/2, n0 = -3 at e = 2
    CHECK(pi.val() == -3);
    CHECK(lf_abs(pi) == Rat(3, 2));
    // pi^(q-1) / (theta^(q-1) * (-theta)) has prime-field coefficients
    LFElem ratio = lf_pow(pi, 2) / (lf_pow(LFElem::theta(F), 2) * -LFElem::theta(F));
    for (long long t = ratio.val(); t < ratio.abs_prec(); ++t)
        CHECK(F->k.in_subfield(ratio.coeff(t)));
    // multiply the truncated product back in
    LFElem prod = LFElem::one(F);
    long long qi = 3;
    while ((qi - 1) * F->e < F->relCap + 1) {
        prod = prod * (LFElem::one(F) - LFElem::monomial(F, 1, 1 - qi, 1));
        qi *= 3;
    }
    LFElem back = pi * prod / (LFElem::theta(F) * lf_neg_theta_root(F));
    CHECK(agree_digits(back, LFElem::one(F)) >= F->relCap - 8);
}

TEST_CASE("precision soundness: doubled cap agrees on the prefix") {
    Field Fa = make_field(3, 1, 2, 2, 120);
    Field Fb = make_field(3, 1, 2, 2, 240);
    LFElem pa = lf_carlitz_period(Fa), pb = lf_carlitz_period(Fb);
    long long n = std::min(pa.abs_prec(), pb.abs_prec());
    CHECK(agree_digits(pa, lf_truncate(pb, n)) >= n);
    LFElem ia = lf_inv(pa + LFElem::one(Fa)), ib = lf_inv(pb + LFElem::one(Fb));
    long long n2 = std::min(ia.abs_prec(), ib.abs_prec());
    CHECK(agree_digits(ia, lf_truncate(ib, n2)) >= n2);
}

TEST_CASE("parse and print round trip") {
    Field F = F32();
    LFElem a = lf_parse(F, "T^-1 + T^-2");
    CHECK(a.val() == 2);
    CHECK(a.str() == "T^-1 + T^-2");
    LFElem b = lf_parse(F, "rootT(1,2)");
    CHECK(lf_abs(b) == Rat(1, 2));
    CHECK(b.str() == "T^(1/2)");
    LFElem c = lf_parse(F, "g^2*T^3 + g*T + 1");
    CHECK(lf_parse(F, c.str()).str() == c.str());
    CHECK(lf_parse(F, "negTroot(2)").str() == lf_neg_theta_root(F).str());
    CHECK_THROWS_AS((void)lf_parse(F, "T^(1/3)"), ParseError);  // not in (1/e)Z
    CHECK_THROWS_AS((void)lf_parse(F, "h + 1"), ParseError);
    CHECK(lf_parse(F, "0").is_zero());
}

TEST_CASE("mixed precision propagation") {
    Field F = F32();
    LFElem a = LFElem::make(F, -4, {1, 2, 1}, 10);  // known to O(u^10)
    LFElem b = LFElem::make(F, 3, {2, 2}, 12);
    LFElem ab = a * b;
    CHECK(ab.abs_prec() == std::min(a.val() + b.abs_prec(), b.val() + a.abs_prec()));
    LFElem s = a + b;
    CHECK(s.abs_prec() == 10);
    LFElem ia = lf_inv(a);
    CHECK(ia.val() == 4);
    CHECK(ia.abs_prec() == a.abs_prec() - 2 * a.val());
}
