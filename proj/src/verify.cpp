#include "dmf/verify.hpp"

#include <chrono>
#include <numeric>

#include "dmf/parallel.hpp"
#include "json.hpp"

namespace dmf {

namespace {

long long ipow(long b, long e) {
    long long r = 1;
    for (long i = 0; i < e; ++i) r *= b;
    return r;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

}  // namespace

Field setup_field(const VerifySetup& s) {
    return make_field(s.p, s.s, s.m, s.e, s.N + s.slack);
}

OmegaPoint parse_point_spec(const Field& F, long r, const std::string& text,
                            const SumParams& P) {
    std::vector<LFElem> z(std::size_t(r), LFElem::one(F));
    std::vector<bool> seen(std::size_t(r), false);
    std::size_t i = 0;
    auto skip = [&] {
        while (i < text.size() && (std::isspace((unsigned char)text[i]) || text[i] == ';' ||
                                   text[i] == ','))
            ++i;
    };
    skip();
    while (i < text.size()) {
        if (text[i] != 'z') throw ParseError("expected z<k>= in point spec");
        ++i;
        std::size_t j = i;
        while (j < text.size() && std::isdigit((unsigned char)text[j])) ++j;
        if (j == i) throw ParseError("expected coordinate index in point spec");
        long idx = std::stol(text.substr(i, j - i));
        i = j;
        if (i >= text.size() || text[i] != '=') throw ParseError("expected '=' in point spec");
        ++i;
        // separators split coordinates only at parenthesis depth zero
        std::size_t end = i;
        long depth = 0;
        while (end < text.size()) {
            char ch = text[end];
            if (ch == '(') ++depth;
            if (ch == ')') --depth;
            if ((ch == ';' || ch == ',') && depth == 0) break;
            ++end;
        }
        std::string expr = text.substr(i, end - i);
        i = end;
        if (idx < 1 || idx > r) throw ConfigError("coordinate index out of range");
        if (idx == r) throw ConfigError("z_r is fixed to 1 and cannot be assigned");
        z[std::size_t(idx - 1)] = lf_parse(F, expr);
        seen[std::size_t(idx - 1)] = true;
        skip();
    }
    for (long k = 1; k <= r - 1; ++k)
        if (!seen[std::size_t(k - 1)])
            throw ConfigError("point spec missing coordinate z" + std::to_string(k));
    return make_point(F, std::move(z), P);
}

CheckReport make_check(const std::string& id, const std::string& point, const LFElem& lhs,
                       const LFElem& rhs, long long target) {
    CheckReport c;
    c.id = id;
    c.point = point;
    c.lhs = lhs.str();
    c.rhs = rhs.str();
    c.matchedDigits = agree_digits(lhs, rhs);
    c.targetDigits = target;
    c.pass = c.matchedDigits >= target;
    c.at_floor = (lhs - rhs).is_zero();
    return c;
}

CheckReport make_check_ts(const std::string& id, const std::string& point, const TSeries& lhs,
                          const TSeries& rhs, long long target) {
    CheckReport c;
    c.id = id;
    c.point = point;
    c.lhs = lhs.str();
    c.rhs = rhs.str();
    c.matchedDigits = ts_agree_digits(lhs, rhs);
    c.targetDigits = target;
    c.pass = c.matchedDigits >= target;
    c.at_floor = (lhs - rhs).is_zero();
    return c;
}

CheckReport make_check_zero_ps(const std::string& id, const std::string& point,
                               const PoleSum& residual, long long target) {
    CheckReport c;
    c.id = id;
    c.point = point;
    c.lhs = residual.str();
    c.rhs = "0";
    c.matchedDigits = ps_zero_digits(residual);
    c.targetDigits = target;
    bool allzero = true;
    for (const auto& [j, res] : residual.poles()) allzero = allzero && res.is_zero();
    for (const auto& p : residual.poly_part()) allzero = allzero && p.is_zero();
    c.pass = allzero && c.matchedDigits >= target;
    if (!allzero) c.note = "nonzero residue below tracked precision";
    return c;
}

// ---------------------------------------------------------------------------

std::vector<CheckReport> suite_gm2(const DrinfeldData& d, const VerifySetup& s) {
    const Field& F = d.z.F;
    const long r = d.z.r, q = F->q();
    const long long target = s.N - s.guard;
    const long long fd_target = s.N / 2;
    const std::string& pt = s.pointText;
    std::vector<CheckReport> out;

    Timer total;
    LFElem h = h_function(d);
    std::vector<LFElem> E;
    for (long j = 1; j <= r - 1; ++j) E.push_back(e_bracket(d, j));
    LFElem piq = lf_pow(d.carlitz, weight_qsum(q, r));

    // T:GM2(i): d_j h = -h E^[j], left side from the congruence-product route
    for (long j = 1; j <= r - 1; ++j) {
        Timer t;
        auto c = make_check("gm2.i.dh.j" + std::to_string(j), pt, partials_h(d, j),
                            -(h * E[std::size_t(j - 1)]), target);
        c.millis = t.ms();
        out.push_back(c);
    }
    // T:GM2(ii): d_j g_i = E^[j] g_i + pi~^{q+..+q^{r-1}} h L_{j,i+1}
    for (long i = 1; i <= r - 1; ++i)
        for (long j = 1; j <= r - 1; ++j) {
            Timer t;
            LFElem lhs = partials_g(d, i, j);
            LFElem rhs = E[std::size_t(j - 1)] * d.gi(i) + piq * h * d.L(j, i + 1);
            auto c = make_check(
                "gm2.ii.dg" + std::to_string(i) + ".j" + std::to_string(j), pt, lhs, rhs,
                target);
            c.millis = t.ms();
            out.push_back(c);
        }
    // definitional route for E^[j]: d_j(g_r)/g_r
    for (long j = 1; j <= r - 1; ++j) {
        Timer t;
        auto c = make_check("gm2.def.E" + std::to_string(j), pt,
                            partials_g(d, r, j) / d.gi(r), E[std::size_t(j - 1)], target);
        c.millis = t.ms();
        out.push_back(c);
    }
    // E:hfunc and the period determinant relation
    {
        Timer t;
        LFElem rhs = lf_pow(d.carlitz, ipow(q, r) - 1) * lf_pow(h, q - 1);
        if (r % 2 == 0) rhs = -rhs;  // (-1)^{r-1}
        auto c = make_check("gm2.hfunc", pt, d.gi(r), rhs, target);
        c.millis = t.ms();
        out.push_back(c);
        Timer t2;
        auto c2 = make_check("gm2.detP", pt, d.detP * piq * h, -LFElem::one(F), target);
        c2.millis = t2.ms();
        out.push_back(c2);
    }
    // E:DET: det of the (r-1)x(r-1) matrix (h L_{i,j+1}) against
    // pi~^{-(q+...+q^{r-1})(r-2)} h
    {
        Timer t;
        Mat hr_mat(std::size_t(r - 1), std::vector<LFElem>());
        for (long i = 1; i <= r - 1; ++i)
            for (long j = 1; j <= r - 1; ++j)
                hr_mat[std::size_t(i - 1)].push_back(h * d.L(i, j + 1));
        LFElem lhs = mat_det(hr_mat);
        LFElem rhs = lf_pow(d.carlitz, -weight_qsum(q, r) * (r - 2)) * h;
        auto c = make_check("gm2.edet", pt, lhs, rhs, target);
        c.millis = t.ms();
        out.push_back(c);
    }
    // rank consistency: the g-recursion vanishes at i = r+1; normalize by the
    // huge leading factor so the statement is checked at unit scale
    {
        Timer t;
        LFElem th = LFElem::theta(F);
        LFElem over = g_recursion_value(d, r + 1) / (lf_frob(th, r + 1) - th);
        CheckReport c;
        c.id = "gm2.rank";
        c.point = pt;
        c.lhs = over.str();
        c.rhs = "0";
        c.matchedDigits = over.is_zero() ? over.abs_prec() : over.val();
        c.targetDigits = target;
        c.pass = over.is_zero() && c.matchedDigits >= target;
        c.millis = t.ms();
        out.push_back(c);
    }

    // Finite-difference satellites in two tiers. The cross-check tier uses
    // steps sized for the N/2 target; the stability tier (L:GML2, L:D1 go
    // through h, whose congruence sums make the FD error first order in eps)
    // digs deep enough to certify the N - 2*guard scalar target.
    long M1 = (s.N + 2 * F->e - 1) / (2 * F->e) + 4;
    long Ms = (s.N + 4 * s.guard + F->e - 1) / F->e + 4;
    const long long stab_target = s.N - 2 * s.guard;
    struct Shift {
        long l, M;
        bool stab;
        DrinfeldData ds;
        LFElem eps;
    };
    std::vector<std::tuple<long, long, bool>> plan;
    for (long l = 1; l <= r - 1; ++l) {
        for (long Mv : {M1, M1 + 2}) plan.emplace_back(l, Mv, false);
        for (long Mv : {Ms, Ms + 2}) plan.emplace_back(l, Mv, true);
    }
    auto shifts = parallel_map<std::shared_ptr<Shift>>(plan.size(), [&](std::size_t idx) {
        auto [l, Mv, stab] = plan[idx];
        auto sh = std::make_shared<Shift>();
        sh->l = l;
        sh->M = Mv;
        sh->stab = stab;
        sh->eps = LFElem::monomial(F, 1, -Mv, 1);
        std::vector<LFElem> zz = d.z.z;
        zz[std::size_t(l - 1)] = zz[std::size_t(l - 1)] + sh->eps;
        OmegaPoint zs = make_point(F, std::move(zz), s.P);
        sh->ds = build_drinfeld(zs, s.P, false);
        return sh;
    });
    auto fd = [&](const Shift& sh, const std::function<LFElem(const DrinfeldData&)>& f,
                  const LFElem& base) { return (f(sh.ds) - base) / sh.eps; };

    for (const auto& shp : shifts) {
        const Shift& sh = *shp;
        std::string tag = ".l" + std::to_string(sh.l) + ".M" + std::to_string(sh.M);
        if (!sh.stab) {
            // d_l g_i cross-check (O(eps^2) error)
            for (long i = 1; i <= r - 1; ++i) {
                Timer t;
                LFElem v = fd(sh, [&](const DrinfeldData& dd) { return dd.gi(i); }, d.gi(i));
                auto c = make_check("gm2.fd.g" + std::to_string(i) + tag, pt, v,
                                    partials_g(d, i, sh.l), fd_target);
                c.millis = t.ms();
                out.push_back(c);
            }
            // d_l h cross-check (O(eps) error from the weight-1 congruence sums)
            Timer t;
            LFElem v = fd(sh, [&](const DrinfeldData& dd) { return h_function(dd); }, h);
            auto c = make_check("gm2.fd.h" + tag, pt, v, partials_h(d, sh.l), fd_target);
            c.millis = t.ms();
            out.push_back(c);
            continue;
        }
        // L:GML2  d_l E^[i] = -E^[l] E^[i]
        for (long i = 1; i <= r - 1; ++i) {
            Timer t;
            LFElem v = fd(sh, [&](const DrinfeldData& dd) { return e_bracket(dd, i); },
                          E[std::size_t(i - 1)]);
            LFElem rhs = -(E[std::size_t(sh.l - 1)] * E[std::size_t(i - 1)]);
            auto c = make_check(
                "gm2.gml2.i" + std::to_string(i) + tag, pt, v, rhs, stab_target);
            c.millis = t.ms();
            out.push_back(c);
        }
        // L:D1  d_l (h L_{j,i+1}) = -E^[j] h L_{l,i+1}
        for (long j = 1; j <= r - 1; ++j)
            for (long i = 1; i <= r - 1; ++i) {
                Timer t;
                LFElem base = h * d.L(j, i + 1);
                LFElem v = fd(sh,
                              [&](const DrinfeldData& dd) {
                                  return h_function(dd) * dd.L(j, i + 1);
                              },
                              base);
                LFElem rhs = -(E[std::size_t(j - 1)] * h * d.L(sh.l, i + 1));
                auto c = make_check("gm2.d1.j" + std::to_string(j) + ".i" +
                                        std::to_string(i) + tag,
                                    pt, v, rhs, stab_target);
                c.millis = t.ms();
                out.push_back(c);
            }
    }
    (void)total;
    return out;
}

// ---------------------------------------------------------------------------

std::vector<CheckReport> suite_pellarin(const DrinfeldData& d, const VerifySetup& s) {
    const Field& F = d.z.F;
    const long r = d.z.r, q = F->q();
    const long long target = s.N - s.guard;
    const long long ts_target = s.N - 3 * s.guard;
    const std::string& pt = s.pointText;
    const long T = s.P.T;
    std::vector<CheckReport> out;

    // P:2, exact in pole-sum space:
    // (theta^{q^i}-t) c_{q^i-1} + sum_k g_k^{q^{i-k}} c_{q^{i-k}-1} + g_i c_0 = 0
    for (long i = 1; i <= r; ++i) {
        Timer t;
        PoleSum acc = ps_mul_linear(pellarin_c(d, i), i);
        for (long k = 1; k <= i; ++k)
            acc = acc + ps_scale(pellarin_c(d, i - k), lf_frob(d.gi(k), i - k));
        auto c = make_check_zero_ps("pell.P2.i" + std::to_string(i), pt, acc, target);
        c.millis = t.ms();
        out.push_back(c);
    }
    // E:P: (theta-t) c_{q^i-1} + sum_k g_k c_{q^{i-k}-1}^{(k)} = 0
    for (long i = 1; i <= r; ++i) {
        Timer t;
        PoleSum acc = ps_mul_linear(pellarin_c(d, i), 0);
        for (long k = 1; k <= i; ++k)
            acc = acc + ps_scale(ps_twist(pellarin_c(d, i - k), k), d.gi(k));
        auto c = make_check_zero_ps("pell.EP.i" + std::to_string(i), pt, acc, target);
        c.millis = t.ms();
        out.push_back(c);
    }

    // series-space material
    std::vector<TSeries> sExp;  // s_i expanded
    for (long i = 1; i <= r; ++i)
        sExp.push_back(ps_expand(d.agf[std::size_t(i - 1)], T));
    std::vector<std::vector<TSeries>> Fm{std::size_t(r)};  // F(z,t)[i][j] = s_i^{(j-1)}
    for (long i = 1; i <= r; ++i)
        for (long j = 1; j <= r; ++j)
            Fm[std::size_t(i - 1)].push_back(
                ps_expand(ps_twist(d.agf[std::size_t(i - 1)], j - 1), T));
    std::vector<std::vector<TSeries>> Ets{std::size_t(r)};  // Ets[nu][j-1], k = q^nu
    for (long nu = 0; nu <= r - 1; ++nu)
        for (long j = 1; j <= r; ++j)
            Ets[std::size_t(nu)].push_back(d.lat->eisenstein_tate(j, long(ipow(q, nu))));

    // E:Comp1 rows: sum_j script-E^{[j]}_{z,q^nu} s_j = -c_{q^nu - 1}
    for (long nu = 0; nu <= r - 1; ++nu) {
        Timer t;
        TSeries acc = Ets[std::size_t(nu)][0] * sExp[0];
        for (long j = 2; j <= r; ++j)
            acc = acc + Ets[std::size_t(nu)][std::size_t(j - 1)] * sExp[std::size_t(j - 1)];
        TSeries rhs = -ps_expand(pellarin_c(d, nu), T);
        auto c = make_check_ts("pell.comp1.nu" + std::to_string(nu), pt, acc, rhs, ts_target);
        c.millis = t.ms();
        out.push_back(c);
    }
    // E:Comp2: the k=1 row against the full matrix F(z,t)
    for (long col = 1; col <= r; ++col) {
        Timer t;
        TSeries acc = Ets[0][0] * Fm[0][std::size_t(col - 1)];
        for (long j = 2; j <= r; ++j)
            acc = acc + Ets[0][std::size_t(j - 1)] * Fm[std::size_t(j - 1)][std::size_t(col - 1)];
        TSeries rhs = col == 1 ? -ps_expand(pellarin_c(d, 0), T)
                               : TSeries(F, T);  // zero series
        auto c = make_check_ts("pell.comp2.col" + std::to_string(col), pt, acc, rhs,
                               ts_target);
        c.millis = t.ms();
        out.push_back(c);
    }

    // E:mat, entrywise to t-order T
    {
        // cofactors of F(z,t) in series space
        auto ts_cofactor = [&](long i, long j) {
            std::vector<std::vector<TSeries>> minor;
            for (long a = 1; a <= r; ++a) {
                if (a == i) continue;
                std::vector<TSeries> row;
                for (long b = 1; b <= r; ++b) {
                    if (b == j) continue;
                    row.push_back(Fm[std::size_t(a - 1)][std::size_t(b - 1)]);
                }
                minor.push_back(std::move(row));
            }
            std::function<TSeries(const std::vector<std::vector<TSeries>>&)> det =
                [&](const std::vector<std::vector<TSeries>>& m) -> TSeries {
                if (m.size() == 1) return m[0][0];
                TSeries acc(F, T);
                for (std::size_t c0 = 0; c0 < m.size(); ++c0) {
                    std::vector<std::vector<TSeries>> sub;
                    for (std::size_t a = 1; a < m.size(); ++a) {
                        std::vector<TSeries> row;
                        for (std::size_t b = 0; b < m.size(); ++b)
                            if (b != c0) row.push_back(m[a][b]);
                        sub.push_back(std::move(row));
                    }
                    TSeries term = m[0][c0] * det(sub);
                    acc = (c0 % 2 == 0) ? acc + term : acc - term;
                }
                return acc;
            };
            TSeries mdet = det(minor);
            return ((i + j) % 2 == 0) ? mdet : -mdet;
        };
        Omega om(F);
        TSeries pref = ts_scale(
            ts_inv(om.expand(T)),
            -(lf_pow(d.carlitz, (ipow(q, r) - 1) / (q - 1)) * h_function(d)));
        for (long i = 0; i <= r - 1; ++i)
            for (long j = 1; j <= r; ++j) {
                Timer t;
                TSeries acc(F, T);
                for (long nu = 1; nu <= i + 1; ++nu) {
                    TSeries cterm = ps_expand(ps_twist(pellarin_c(d, i + 1 - nu), nu - 1), T);
                    acc = acc + cterm * ts_cofactor(j, nu);
                }
                TSeries rhs = pref * acc;
                auto c = make_check_ts(
                    "pell.mat.row" + std::to_string(i) + ".col" + std::to_string(j), pt,
                    Ets[std::size_t(i)][std::size_t(j - 1)], rhs, ts_target);
                c.millis = t.ms();
                out.push_back(c);
            }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<CheckReport> suite_serre(const DrinfeldData& d, const VerifySetup& s) {
    const Field& F = d.z.F;
    const long r = d.z.r, q = F->q();
    const long long target = s.N - s.guard;
    const std::string& pt = s.pointText;
    std::vector<CheckReport> out;

    // Cor. C:RS: D_{(q-1,...,q^{r-1}-1)}(g_1,...,g_{r-1}) = pi~^{q+...+q^{r-1}} h_r
    {
        Timer t;
        std::vector<FormExpr> gs;
        for (long i = 1; i <= r - 1; ++i) gs.push_back(FormExpr::g(i));
        FormValue lhs = serre_derivation(d, gs);
        LFElem rhs = lf_pow(d.carlitz, weight_qsum(q, r)) * h_function(d);
        auto c = make_check("serre.crs", pt, lhs.value, rhs, target);
        long long wexp = r;
        for (long i = 1; i <= r - 1; ++i) wexp += ipow(q, i) - 1;
        if (lhs.weight != wexp || lhs.type != 1 % (q - 1)) {
            c.pass = false;
            c.note = "grading mismatch";
        }
        c.millis = t.ms();
        out.push_back(c);
    }
    // T:RS(i): Leibniz and additivity on form pairs, slot 1
    std::vector<std::pair<FormExpr, FormExpr>> pairs = {
        {parse_form("g(1)"), parse_form("g(1)^2")},
        {parse_form("g(1)"), parse_form("Eis(4)")},
        {parse_form("g(1)^2"), parse_form("h^2")},
    };
    auto slots_with = [&](FormExpr f) {
        std::vector<FormExpr> fs{std::move(f)};
        for (long i = 2; i <= r - 1; ++i) fs.push_back(FormExpr::g(i));
        return fs;
    };
    int pidx = 0;
    for (const auto& [f1, f2] : pairs) {
        Timer t;
        LFElem v1 = form_eval(d, f1), v2 = form_eval(d, f2);
        LFElem lhs = serre_derivation(d, slots_with(FormExpr::mul(f1, f2))).value;
        LFElem rhs = v2 * serre_derivation(d, slots_with(f1)).value +
                     v1 * serre_derivation(d, slots_with(f2)).value;
        auto c = make_check("serre.leibniz." + std::to_string(pidx), pt, lhs, rhs, target);
        c.millis = t.ms();
        out.push_back(c);
        ++pidx;
    }
    {
        Timer t;
        FormExpr a = parse_form("g(1)^2"), b = parse_form("Eis(4)");
        LFElem lhs = serre_derivation(d, slots_with(FormExpr::sum(a, b))).value;
        LFElem rhs = serre_derivation(d, slots_with(a)).value +
                     serre_derivation(d, slots_with(b)).value;
        auto c = make_check("serre.additivity", pt, lhs, rhs, target);
        c.millis = t.ms();
        out.push_back(c);
    }
    // rank-2 reduction: the 1x1 determinant is D_{1,k} itself
    if (r == 2) {
        Timer t;
        FormExpr f = parse_form("g(1)");
        LFElem lhs = serre_derivation(d, {f}).value;
        LFElem rhs = op_D(d, 1, f).value;
        auto c = make_check("serre.rank2", pt, lhs, rhs, target);
        c.millis = t.ms();
        out.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

LFElem mat_entry_inverse(const Mat& m, long i, long j) {
    // (i,j) entry of m^{-1} via adjugate over determinant
    LFElem det = mat_det(m);
    return mat_cofactor(m, j, i) / det;
}

}  // namespace

std::vector<CheckReport> suite_action(const DrinfeldData& d, const VerifySetup& s) {
    const Field& F = d.z.F;
    const ResidueField& k = F->k;
    const long r = d.z.r, q = F->q();
    const long long target = s.N - s.guard;
    const std::string& pt = s.pointText;

    auto gammas = gamma_samples(k, r, s.seed);
    LFElem h = h_function(d);
    std::vector<LFElem> E;
    for (long j = 1; j <= r - 1; ++j) E.push_back(e_bracket(d, j));
    FormExpr f = parse_form("g(1)");
    const long long fweight = q - 1;
    std::vector<LFElem> fpartials;
    for (long l = 1; l <= r - 1; ++l) fpartials.push_back(form_partial(d, f, l));
    LFElem fval = form_eval(d, f);

    auto per_gamma = parallel_map<std::vector<CheckReport>>(
        gammas.size(), [&](std::size_t t) {
            const GammaMatrix& g = gammas[t];
            std::string tag = ".g" + std::to_string(t);
            Timer timer;
            LFElem jf = jfactor(g, d.z);
            auto detu = gamma_det_unit(k, g);
            Mat C = frak_c(g, d.z);

            auto compute = [&](const DrinfeldData& dimg,
                               const std::string& buildNote) {
            std::vector<CheckReport> out;
            GammaMatrix ginv = gamma_inverse(k, g);
            const OmegaPoint& img = dimg.z;
            LFElem himg = h_function(dimg);

            // inverse law for j
            {
                auto c = make_check("act.invj" + tag, pt, jfactor(ginv, img) * jf,
                                    LFElem::one(F), target);
                c.note = buildNote;
                out.push_back(c);
            }
            // P:1(i)
            {
                LFElem lhs = mat_det(C);
                LFElem rhs = lf_scale(jf, k.powi(detu, r - 2));
                out.push_back(make_check("act.P1i" + tag, pt, lhs, rhs, target));
            }
            // P:1(ii): entrywise
            {
                Mat Ci = frak_c(ginv, img);
                long long matched = std::numeric_limits<long long>::max();
                for (long a = 1; a <= r - 1; ++a)
                    for (long b = 1; b <= r - 1; ++b)
                        matched = std::min(
                            matched, agree_digits(mat_entry_inverse(Ci, a, b),
                                                  C[std::size_t(a - 1)][std::size_t(b - 1)]));
                CheckReport c;
                c.id = "act.P1ii" + tag;
                c.point = pt;
                c.lhs = "entries of frakC^{gamma^-1}(gamma z)^{-1}";
                c.rhs = "entries of frakC^{gamma}(z)";
                c.matchedDigits = matched;
                c.targetDigits = target;
                c.pass = matched >= target;
                out.push_back(c);
            }
            // L:Der
            for (long i = 1; i <= r - 1; ++i) {
                LFElem acc = LFElem::zero_exact(F);
                for (long l = 1; l <= r - 1; ++l)
                    acc = acc + C[std::size_t(i - 1)][std::size_t(l - 1)] *
                                    poly_eval_theta(F, gamma_cofactor(k, ginv, l, r));
                LFElem rhs = -lf_scale(jf * poly_eval_theta(F, gamma_cofactor(k, g, i, r)),
                                       k.inv(detu));
                out.push_back(
                    make_check("act.LDer" + tag + ".i" + std::to_string(i), pt, acc, rhs,
                               target));
            }
            // L:1(i), normalized to base scale
            for (long i = 1; i <= r - 1; ++i) {
                LFElem inner = poly_eval_theta(F, gamma_cofactor(k, g, i, r));
                for (long l = 1; l <= r - 1; ++l)
                    inner = inner + E[std::size_t(l - 1)] *
                                        C[std::size_t(i - 1)][std::size_t(l - 1)];
                LFElem lhs = lf_scale(e_bracket(dimg, i) / jf, detu);
                out.push_back(make_check("act.L1i" + tag + ".i" + std::to_string(i), pt,
                                         lhs, inner, target));
            }
            // L:1(ii) and (iii) for f = g_1 (weight q-1, type 0), base scale
            for (long i = 1; i <= r - 1; ++i) {
                LFElem jinv = lf_pow(jf, -(fweight + 1));
                LFElem inner = LFElem::zero_exact(F);
                for (long l = 1; l <= r - 1; ++l)
                    inner = inner + fpartials[std::size_t(l - 1)] *
                                        C[std::size_t(i - 1)][std::size_t(l - 1)];
                LFElem kscal = LFElem::from_int(F, long(fweight % F->p()));
                LFElem rhs2 =
                    inner - kscal * poly_eval_theta(F, gamma_cofactor(k, g, i, r)) * fval;
                LFElem lhs2 = lf_scale(form_partial(dimg, f, i) * jinv, detu);
                out.push_back(make_check("act.L1ii" + tag + ".i" + std::to_string(i), pt,
                                         lhs2, rhs2, target));
                LFElem lhs3 = lf_scale(op_D(dimg, i, f).value * jinv, detu);
                LFElem inner3 = LFElem::zero_exact(F);
                for (long l = 1; l <= r - 1; ++l)
                    inner3 = inner3 + op_D(d, l, f).value *
                                          C[std::size_t(i - 1)][std::size_t(l - 1)];
                out.push_back(make_check("act.L1iii" + tag + ".i" + std::to_string(i), pt,
                                         lhs3, inner3, target));
            }
            // L:1(iv), normalized to base scale
            for (long j = 1; j <= r - 1; ++j)
                for (long i = 1; i <= r - 1; ++i) {
                    LFElem lhs =
                        lf_scale(himg * dimg.L(j, i + 1) * lf_pow(jf, -ipow(q, i)), detu);
                    LFElem acc = LFElem::zero_exact(F);
                    for (long l = 1; l <= r - 1; ++l)
                        acc = acc + h * d.L(l, i + 1) *
                                        C[std::size_t(j - 1)][std::size_t(l - 1)];
                    out.push_back(make_check("act.L1iv" + tag + ".j" + std::to_string(j) +
                                                 ".i" + std::to_string(i),
                                             pt, lhs, acc, target));
                }
            // E:FEh, normalized to base scale
            {
                LFElem lhs =
                    lf_scale(himg * lf_pow(jf, -(ipow(q, r) - 1) / (q - 1)), detu);
                out.push_back(make_check("act.FEh" + tag, pt, lhs, h, target));
            }
            // Ex:1(i)/(ii) weight laws and J-invariance, base scale
            {
                out.push_back(make_check("act.eis" + tag, pt,
                                         dimg.eis(q - 1) * lf_pow(jf, 1 - q),
                                         d.eis(q - 1), target));
                for (long i = 1; i <= r; ++i)
                    out.push_back(make_check("act.g" + std::to_string(i) + tag, pt,
                                             dimg.gi(i) * lf_pow(jf, 1 - ipow(q, i)),
                                             d.gi(i), target));
                for (long i = 1; i <= r - 1; ++i)
                    out.push_back(make_check("act.J" + std::to_string(i) + tag, pt,
                                             j_invariant(dimg, i), j_invariant(d, i),
                                             target));
            }
            for (auto& c : out) {
                c.millis = timer.ms() / double(out.size());
                if (!buildNote.empty() && c.note.empty()) c.note = buildNote;
            }
            return out;
            };

            // image points near the boundary may not support the target at the
            // base (slack, D); escalate only while every failure sits at its
            // precision floor (retries cannot rescue a genuine mismatch)
            std::vector<CheckReport> best;
            struct Rung {
                long extraSlack, extraD;
            };
            // tower magnitudes grow like q^(r(D+1)); keep r(D+1) <= ~30 so the
            // valuation bookkeeping stays far inside 64-bit range
            long dcap = std::max<long>(0, 30 / r - 1 - s.P.D);
            for (Rung rung : {Rung{0, 0}, Rung{360, std::min(2L, dcap)},
                              Rung{720, std::min(3L, dcap)}}) {
                try {
                    VerifySetup s2 = s;
                    s2.slack = s.slack + rung.extraSlack;
                    SumParams P2 = s.P;
                    P2.D = s.P.D + rung.extraD;
                    Field F2 = rung.extraSlack == 0 ? F : setup_field(s2);
                    OmegaPoint base2 = rung.extraSlack == 0
                                           ? d.z
                                           : parse_point_spec(F2, r, s.pointText, P2);
                    OmegaPoint img = group_act(g, base2, P2);
                    DrinfeldData dimg = build_drinfeld(img, P2, true);
                    std::string note =
                        rung.extraSlack == 0
                            ? ""
                            : "image escalated: slack +" + std::to_string(rung.extraSlack) +
                                  ", D +" + std::to_string(rung.extraD);
                    best = compute(dimg, note);
                    bool any_fail = false;
                    for (const auto& c : best) any_fail = any_fail || !c.pass;
                    // a genuine identity violation persists at a fixed digit
                    // across rungs; truncation artifacts sink below target
                    if (!any_fail) break;
                } catch (const PrecisionError& e) {
                    if (best.empty()) {
                        CheckReport c;
                        c.id = "act.build" + tag;
                        c.point = pt;
                        c.pass = false;
                        c.precision_failure = true;
                        c.note = e.what();
                        best = {c};
                    }
                }
            }
            return best;
        });

    std::vector<CheckReport> out;
    // cocycle on one fixed pair
    {
        Timer t;
        const GammaMatrix& x = gammas[1];
        const GammaMatrix& y = gammas.back();
        OmegaPoint yimg = group_act(y, d.z, s.P);
        LFElem lhs = jfactor(gamma_mul(k, x, y), d.z);
        LFElem rhs = jfactor(x, yimg) * jfactor(y, d.z);
        auto c = make_check("act.cocycle", pt, lhs, rhs, target);
        c.millis = t.ms();
        out.push_back(c);
    }
    for (auto& v : per_gamma) out.insert(out.end(), v.begin(), v.end());
    return out;
}

// ---------------------------------------------------------------------------

std::string APoly::str(const ResidueField& k) const {
    std::string out;
    for (std::size_t i = coeff.size(); i-- > 0;) {
        if (poly_deg(coeff[i]) < 0) continue;
        if (!out.empty()) out += " + ";
        out += "(" + poly_str(k, coeff[i]) + ")";
        if (i > 0) out += "*Y";
        if (i > 1) out += "^" + std::to_string(i);
    }
    return out.empty() ? "0" : out;
}

std::optional<APoly> recognize_algebraic(
    const LFElem& x, long dBound, long HBound, long verifyGuard,
    const std::function<LFElem(void)>& recompute_double) {
    const Field& F = x.field();
    const ResidueField& k = F->k;
    const long p = k.p();
    const long dres = k.deg();
    // unknown F_q coefficients are expanded over F_p in the basis of
    // subfield-generator powers (trivial when q = p)
    const long sdim = k.s();

    if (x.is_zero()) return APoly{{Poly{}, Poly{1}}};  // Y annihilates zero

    // monomials h^sigma theta^j x^i
    struct Col {
        long i, j, sigma;
        LFElem val;
    };
    LFElem x2;
    bool have_x2 = false;
    bool precision_short = false;

    for (long dd = 1; dd <= dBound; ++dd) {
        for (long HH = 0; HH <= HBound; ++HH) {
            std::vector<Col> cols;
            LFElem xi = LFElem::one(F);
            for (long i = 0; i <= dd; ++i) {
                LFElem tj = xi;
                for (long j = 0; j <= HH; ++j) {
                    LFElem base = tj;
                    for (long sg = 0; sg < sdim; ++sg) {
                        LFElem v = sg == 0 ? base : lf_scale(base, k.powi(k.subgen(), sg));
                        cols.push_back({i, j, sg, v});
                    }
                    tj = tj * LFElem::theta(F);
                }
                xi = xi * x;
            }
            long long lo = std::numeric_limits<long long>::max();
            long long maxval = std::numeric_limits<long long>::min();
            long long hi = std::numeric_limits<long long>::max();
            for (const auto& c : cols) {
                if (!c.val.is_zero()) {
                    lo = std::min(lo, c.val.val());
                    maxval = std::max(maxval, c.val.val());
                }
                hi = std::min(hi, c.val.abs_prec());
            }
            if (lo == std::numeric_limits<long long>::max()) continue;
            long long rows_u = hi - lo;
            long ncols = long(cols.size());
            // every column must expose its leading digit inside the window,
            // else it is unconstrained and the nullspace is meaningless
            if (hi <= maxval || rows_u * dres < 2 * ncols + 8) {
                precision_short = true;
                continue;
            }
            // F_p Gaussian elimination; rows = (u-exponent, residue coordinate)
            std::size_t nrows = std::size_t(rows_u) * std::size_t(dres);
            std::vector<std::vector<std::uint8_t>> Mrows(
                nrows, std::vector<std::uint8_t>(std::size_t(ncols), 0));
            for (long c0 = 0; c0 < ncols; ++c0)
                for (long long t = lo; t < hi; ++t) {
                    auto cf = cols[std::size_t(c0)].val.coeff(t);
                    long idx = cf;
                    for (long rhoi = 0; rhoi < dres; ++rhoi) {
                        Mrows[std::size_t(t - lo) * std::size_t(dres) + std::size_t(rhoi)]
                             [std::size_t(c0)] = std::uint8_t(idx % p);
                        idx /= p;
                    }
                }
            // eliminate
            std::vector<long> pivot_of_col(std::size_t(ncols), -1);
            std::size_t rr = 0;
            for (long c0 = 0; c0 < ncols && rr < nrows; ++c0) {
                std::size_t piv = rr;
                while (piv < nrows && Mrows[piv][std::size_t(c0)] == 0) ++piv;
                if (piv == nrows) continue;
                std::swap(Mrows[rr], Mrows[piv]);
                long inv = 1;  // inverse of pivot mod p
                {
                    long a = Mrows[rr][std::size_t(c0)];
                    for (long t = 1; t < p; ++t)
                        if (a * t % p == 1) inv = t;
                }
                for (auto& v : Mrows[rr]) v = std::uint8_t(v * inv % p);
                for (std::size_t r2 = 0; r2 < nrows; ++r2) {
                    if (r2 == rr) continue;
                    long f = Mrows[r2][std::size_t(c0)];
                    if (!f) continue;
                    for (long cc = 0; cc < ncols; ++cc)
                        Mrows[r2][std::size_t(cc)] = std::uint8_t(
                            (Mrows[r2][std::size_t(cc)] + (p - f) * Mrows[rr][std::size_t(cc)]) %
                            p);
                }
                pivot_of_col[std::size_t(c0)] = long(rr);
                ++rr;
            }
            long freecol = -1;
            for (long c0 = ncols - 1; c0 >= 0 && freecol < 0; --c0)
                if (pivot_of_col[std::size_t(c0)] < 0) freecol = c0;
            if (freecol < 0) continue;  // full rank: no relation at these bounds
            // canonical nullvector: free column = 1
            std::vector<std::uint8_t> sol(std::size_t(ncols), 0);
            sol[std::size_t(freecol)] = 1;
            for (long c0 = 0; c0 < ncols; ++c0) {
                long pr = pivot_of_col[std::size_t(c0)];
                if (pr < 0) continue;
                long v = Mrows[std::size_t(pr)][std::size_t(freecol)];
                sol[std::size_t(c0)] = std::uint8_t((p - v) % p);
            }
            // must involve a positive power of x
            bool uses_x = false;
            for (long c0 = 0; c0 < ncols; ++c0)
                if (sol[std::size_t(c0)] && cols[std::size_t(c0)].i > 0) uses_x = true;
            if (!uses_x) continue;
            // assemble the polynomial over A
            APoly cand;
            cand.coeff.assign(std::size_t(dd + 1), Poly{});
            for (long c0 = 0; c0 < ncols; ++c0) {
                if (!sol[std::size_t(c0)]) continue;
                const Col& cc = cols[std::size_t(c0)];
                ResidueField::elt scal =
                    k.mul(k.from_int(sol[std::size_t(c0)]),
                          cc.sigma == 0 ? k.one() : k.powi(k.subgen(), cc.sigma));
                Poly& q = cand.coeff[std::size_t(cc.i)];
                if ((long)q.size() <= cc.j) q.resize(std::size_t(cc.j + 1), 0);
                q[std::size_t(cc.j)] = k.add(q[std::size_t(cc.j)], scal);
            }
            for (auto& q : cand.coeff)
                while (!q.empty() && q.back() == 0) q.pop_back();
            // re-verify at doubled precision
            if (!have_x2) {
                x2 = recompute_double();
                have_x2 = true;
            }
            const Field& F2 = x2.field();
            LFElem acc = LFElem::zero_exact(F2);
            LFElem xp = LFElem::one(F2);
            for (std::size_t i = 0; i < cand.coeff.size(); ++i) {
                if (poly_deg(cand.coeff[i]) >= 0)
                    acc = acc + poly_eval_theta(F2, cand.coeff[i]) * xp;
                xp = xp * x2;
            }
            // a candidate fitted on digits below hi must keep vanishing for a
            // further margin at the doubled precision
            long long want = hi + std::max<long long>(16, 2 * verifyGuard);
            if (acc.is_zero() && acc.abs_prec() >= want) {
                // normalize monic-in-Y
                Poly& leadq = cand.coeff.back();
                ResidueField::elt lead = leadq[std::size_t(poly_deg(leadq))];
                ResidueField::elt linv = k.inv(lead);
                for (auto& q : cand.coeff) q = poly_scale(k, q, linv);
                return cand;
            }
        }
    }
    if (precision_short)
        throw ConfigError(
            "recognize_algebraic: insufficient precision for the requested degree/height "
            "bounds");
    return std::nullopt;
}

CMData cm_w_phi(const VerifySetup& s) {
    VerifySetup cur = s;
    for (int attempt = 0; attempt < 4; ++attempt) {
        Field F = setup_field(cur);
        OmegaPoint z = parse_point_spec(F, cur.r, cur.pointText, cur.P);
        DrinfeldData d = build_drinfeld(z, cur.P, false);
        long n = long(ipow(F->q(), cur.r)) - 1;
        try {
            LFElem w = lf_root(d.gi(cur.r), n);
            return CMData{F, std::move(d), w, cur.e, cur.m};
        } catch (const FieldUpgradeError& up) {
            long e2 = std::lcm(cur.e, up.e_required);
            long m2 = std::lcm(cur.m, up.m_required);
            if (e2 == cur.e && m2 == cur.m)
                throw ConfigError("field upgrade loop did not make progress");
            if (e2 > 64 || m2 > 8)
                throw ConfigError("required field upgrade exceeds configured bounds (e=" +
                                  std::to_string(e2) + ", m=" + std::to_string(m2) + ")");
            cur.e = e2;
            cur.m = m2;
        }
    }
    throw ConfigError("w_phi field upgrades did not converge");
}

std::vector<CheckReport> suite_cm(const VerifySetup& s_in) {
    VerifySetup s = s_in;
    const long recD = s.recD > 0 ? s.recD : (s.r == 2 ? 8 : 6);
    const long recH = s.recH > 0 ? s.recH : (s.r == 2 ? 12 : 90);
    // higher ranks need room for tall annihilating polynomials: the equation
    // window must expose every monomial's leading digit
    if (s.r >= 3) s.slack = std::max(s.slack, 1800L);
    std::vector<CheckReport> out;
    const long long target = s.N - s.guard;
    Timer t0;
    CMData cm = cm_w_phi(s);
    const Field& F = cm.F;
    const ResidueField& k = F->k;
    const long q = F->q(), r = s.r;
    const std::string pt = s.pointText;

    CMPointSpec spec;
    spec.pointText = s.pointText;
    spec.description = "user-asserted CM point; endomorphism-ring certification not computed";
    spec.e_used = cm.e_used;
    spec.m_used = cm.m_used;

    // defining residual g_r w^{1-q^r} = 1
    {
        auto c = make_check("cm.wphi.defining", pt,
                            cm.d.gi(r) * lf_pow(cm.w_phi, 1 - ipow(q, r)), LFElem::one(F),
                            target);
        c.note = spec.description + "; field used: e=" + std::to_string(spec.e_used) +
                 ", m=" + std::to_string(spec.m_used);
        c.millis = t0.ms();
        out.push_back(c);
    }
    // valuation consistency |g_r| = |w|^{q^r - 1}
    {
        Rat lg = lf_abs(cm.d.gi(r));
        Rat lw = lf_abs(cm.w_phi);
        CheckReport c;
        c.id = "cm.wphi.valuation";
        c.point = pt;
        c.lhs = lg.str();
        c.rhs = lw.str() + " * (q^r-1)";
        bool ok = lg.num * lw.den == lw.num * (ipow(q, r) - 1) * lg.den;
        c.matchedDigits = ok ? target : 0;
        c.targetDigits = target;
        c.pass = ok;
        out.push_back(c);
    }

    // recompute-at-2N thunk shared by the recognitions
    VerifySetup s2 = s;
    s2.N = 2 * s.N;
    s2.slack = s.slack + 600;
    s2.e = cm.e_used;
    s2.m = cm.m_used;
    auto rebuild2 = [s2]() {
        Field F2 = setup_field(s2);
        OmegaPoint z2 = parse_point_spec(F2, s2.r, s2.pointText, s2.P);
        DrinfeldData d2 = build_drinfeld(z2, s2.P, false);
        LFElem w2 = lf_root(d2.gi(s2.r), long(ipow(F2->q(), s2.r)) - 1);
        return std::make_pair(std::move(d2), std::move(w2));
    };

    auto run_recognition = [&](const std::string& id, const LFElem& x,
                               const std::function<LFElem(void)>& re, bool expect) {
        Timer t;
        CheckReport c;
        c.id = id;
        c.point = pt;
        c.lhs = x.str();
        c.targetDigits = target;
        try {
            auto poly = recognize_algebraic(x, recD, recH, s.guard, re);
            if (poly.has_value()) {
                c.rhs = "annihilated by " + poly->str(k);
                c.matchedDigits = target;
                c.pass = expect;
                if (!expect) c.note = "unexpected relation found";
            } else {
                c.rhs = "none found";
                c.matchedDigits = expect ? 0 : target;
                c.pass = !expect;
                if (expect) c.note = "no annihilating polynomial within bounds";
            }
        } catch (const ConfigError& e) {
            c.pass = false;
            c.precision_failure = true;
            c.note = e.what();
        }
        c.millis = t.ms();
        out.push_back(c);
    };

    // g_1^new (pi/w)^{q-1} = g_1 w^{1-q}
    run_recognition("cm.rec.g1new", cm.d.gi(1) * lf_pow(cm.w_phi, 1 - q), [&]() {
        auto [d2, w2] = rebuild2();
        return d2.gi(1) * lf_pow(w2, 1 - q);
    }, true);
    // h_r (pi/w)^{(q^r-1)/(q-1)}
    {
        long long ell = (ipow(q, r) - 1) / (q - 1);
        LFElem hr = h_function(cm.d);
        run_recognition("cm.rec.hr",
                        hr * lf_pow(cm.d.carlitz / cm.w_phi, ell), [&, ell]() {
                            auto [d2, w2] = rebuild2();
                            return h_function(d2) * lf_pow(d2.carlitz / w2, ell);
                        }, true);
    }
    // J_1 is algebraic outright
    run_recognition("cm.rec.J1", j_invariant(cm.d, 1), [&]() {
        auto [d2, w2] = rebuild2();
        (void)w2;
        return j_invariant(d2, 1);
    }, true);
    // pi~ must yield none at the same bounds: consistency, not proof
    run_recognition("cm.rec.pi.none", cm.d.carlitz, [&]() {
        auto [d2, w2] = rebuild2();
        (void)w2;
        return d2.carlitz;
    }, false);
    out.back().note = "consistency, not proof";
    return out;
}

// ---------------------------------------------------------------------------

std::string report_json(const VerifySetup& s, const std::string& pointDesc,
                        const std::vector<CheckReport>& checks) {
    nlohmann::ordered_json j;
    Field F = setup_field(s);
    j["config"] = {{"p", s.p},       {"s", s.s},          {"m", s.m},
                   {"e", s.e},       {"q", F->q()},       {"N", s.N},
                   {"guard", s.guard}, {"relCap", F->relCap}, {"D", s.P.D},
                   {"T", s.P.T},     {"G", s.P.G},        {"r", s.r},
                   {"seed", s.seed}, {"modulus", F->k.modulus_string()},
                   {"generator", F->k.to_string(F->k.gen())}};
    j["point"] = pointDesc;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    long long passed = 0, prec_failures = 0;
    for (const auto& c : checks) {
        nlohmann::ordered_json cj;
        cj["id"] = c.id;
        cj["point"] = c.point;
        cj["matchedDigits"] = c.matchedDigits;
        cj["targetDigits"] = c.targetDigits;
        cj["pass"] = c.pass;
        if (!c.note.empty()) cj["note"] = c.note;
        cj["millis"] = c.millis;
        cj["lhs"] = c.lhs;
        cj["rhs"] = c.rhs;
        arr.push_back(cj);
        if (c.pass) ++passed;
        if (c.precision_failure) ++prec_failures;
    }
    j["checks"] = arr;
    j["summary"] = {{"total", checks.size()},
                    {"passed", passed},
                    {"failed", (long long)checks.size() - passed},
                    {"precisionFailures", prec_failures},
                    {"allPass", passed == (long long)checks.size()}};
    return j.dump(2);
}

}  // namespace dmf
