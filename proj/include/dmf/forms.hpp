#pragma once

#include "dmf/drinfeld.hpp"

namespace dmf {

// element of GL_r(A): polynomial entries, determinant constrained to F_q^x
struct GammaMatrix {
    long r = 0;
    std::vector<std::vector<Poly>> a;  // a[i][j], 0-indexed

    static GammaMatrix identity(const ResidueField& k, long r);
    // I + c * theta^d E_{ij}, i != j
    static GammaMatrix transvection(const ResidueField& k, long r, long i, long j,
                                    ResidueField::elt c, long d);
    static GammaMatrix swap12(const ResidueField& k, long r);  // det = -1
};

GammaMatrix gamma_mul(const ResidueField& k, const GammaMatrix& x, const GammaMatrix& y);
Poly gamma_det(const ResidueField& k, const GammaMatrix& g);
ResidueField::elt gamma_det_unit(const ResidueField& k, const GammaMatrix& g);
Poly gamma_cofactor(const ResidueField& k, const GammaMatrix& g, long i, long j);
GammaMatrix gamma_inverse(const ResidueField& k, const GammaMatrix& g);
// deterministic sample set: identity, all theta-transvections, a det(-1)
// permutation, and two seeded products with entries of degree <= 2
std::vector<GammaMatrix> gamma_samples(const ResidueField& k, long r, unsigned long seed);
std::string gamma_str(const ResidueField& k, const GammaMatrix& g);

LFElem jfactor(const GammaMatrix& g, const OmegaPoint& z);
OmegaPoint group_act(const GammaMatrix& g, const OmegaPoint& z, const SumParams& P);
// (r-1)x(r-1) matrix frak-c^gamma_{jl}(z) = c_jl - c_jr z_l (cofactors of gamma)
Mat frak_c(const GammaMatrix& g, const OmegaPoint& z);

// --- modular forms at a point --------------------------------------------

// sum q + q^2 + ... + q^{r-1}
long long weight_qsum(long q, long r);

// the (q^r-1)/(q-1) monic congruence classes entering the h-function product
std::vector<std::vector<ResidueField::elt>> monic_representatives(const ResidueField& k,
                                                                  long r);

// Gekeler h-function via the monic-mu congruence product
LFElem h_function(const DrinfeldData& d);
// E_r^{[j]} via the closed cofactor form pi~^{q+..+q^{r-1}-1} h_r L_{j1}
LFElem e_bracket(const DrinfeldData& d, long j);
// d_j g_i through the differentiated Eisenstein recursion (term-wise lattice
// sums; independent of the cofactor identities)
LFElem partials_g(const DrinfeldData& d, long i, long j);
// d_j h_r through the logarithmic derivative of the congruence product
LFElem partials_h(const DrinfeldData& d, long j);

std::vector<LFElem> new_generators_g(const DrinfeldData& d);  // [i-1] = g_i^new
Mat new_generators_E(const DrinfeldData& d);                  // [i-1][j-1] = E_ij
LFElem j_invariant(const DrinfeldData& d, long i);

// --- expression layer -----------------------------------------------------

// expression over the generators, carrying (weight, type) grading
struct FormExpr {
    enum class Kind { Eis, G, H, Mul, Pow, Sum };
    Kind kind = Kind::H;
    long arg = 0;  // k for Eis, i for G, exponent for Pow
    std::vector<FormExpr> kids;

    static FormExpr eis(long k);
    static FormExpr g(long i);
    static FormExpr h();
    static FormExpr mul(FormExpr a, FormExpr b);
    static FormExpr pow(FormExpr a, long n);
    static FormExpr sum(FormExpr a, FormExpr b);
};

// grammar: Eis(k), g(i), h, products '*', powers '^n', sums '+'
FormExpr parse_form(const std::string& text);
std::string form_str(const FormExpr& f);
// weight of the form at rank r (type is the second component, mod q-1)
std::pair<long long, long> form_grading(const FormExpr& f, long q, long r);

LFElem form_eval(const DrinfeldData& d, const FormExpr& f);
LFElem form_partial(const DrinfeldData& d, const FormExpr& f, long j);

struct FormValue {
    LFElem value;
    long long weight = 0;
    long type = 0;
};

// D_{j,k}(f) = d_j f + k E^{[j]} f; output weight k+1, type m+1
FormValue op_D(const DrinfeldData& d, long j, const FormExpr& f);
// with an explicit weight multiplier (for Leibniz checks on synthetic weights)
LFElem op_D_value(const DrinfeldData& d, long j, long long k, const LFElem& fval,
                  const LFElem& fpartial);

// Serre derivation: det of the (r-1)x(r-1) matrix (D_{l,k_i} f_i)
FormValue serre_derivation(const DrinfeldData& d, const std::vector<FormExpr>& fs);

}  // namespace dmf
