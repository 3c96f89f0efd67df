#pragma once

#include "volswap/model.hpp"
#include "volswap/specfun.hpp"

#include <string>
#include <vector>

namespace volswap {

// Laguerre expansion of the density of RV = sum_i alpha_i Y_i, Y_i ~ chi^2_1(delta_i),
// around a Gamma(nu/2, 2 beta) envelope whose Laguerre argument is scaled by nu/(2 mu0).
struct ExpansionConfig {
    double beta_bar = 0.0;
    double mu0_bar = 0.0;
    int k_max = 3;
};

// beta = max alpha_i, mu0 = nu/2.
ExpansionConfig default_expansion(const ReturnMoments& rm, int k_max = 3);

// mu0 = nu/2 and beta = max(max alpha_i, E[RV]/nu), so the Gamma envelope's mean is at
// least that of RV. With strong drift (large noncentralities) the default beta leaves
// the envelope far left of the mass and the coefficients alternate with magnitudes
// near exp(lambda/2); matching the mean keeps them O(1).
ExpansionConfig pricing_expansion(const ReturnMoments& rm, int k_max = 25);

// sum_i alpha_i (1 + delta_i)
double rv_mean(const ReturnMoments& rm);

// True when the coefficient and tail bounds apply (mu0 >= nu/4 and beta large enough
// that zeta < 1). On failure `why` names the violated condition.
bool bound_preconditions(const ReturnMoments& rm, const ExpansionConfig& cfg, std::string* why = nullptr);

struct ExpansionCoeffs {
    std::vector<double> c; // c_0 .. c_K
    std::vector<double> d; // d_1 .. d_K stored at index j-1
    double zeta = 0.0;
    double b0_bound = 0.0;
};

double contraction_factor(const ReturnMoments& rm, const ExpansionConfig& cfg);

ExpansionCoeffs coeffs(const ReturnMoments& rm, const ExpansionConfig& cfg);

// Truncated series density at y > 0. Small negative values in the far tails are
// returned as computed.
double pdf(const ReturnMoments& rm, const ExpansionConfig& cfg, const ExpansionCoeffs& co, double y);

// E[RV^ell] truncated after co.c.size() terms. Throws NoConvergence only when the last
// term is not small and the bound preconditions do not hold either.
SeriesResult raw_moment(const ReturnMoments& rm, const ExpansionConfig& cfg, const ExpansionCoeffs& co,
                        double ell, double rel_tol = 1e-8);

// The individual terms of raw_moment's series.
std::vector<double> moment_terms(const ReturnMoments& rm, const ExpansionConfig& cfg,
                                 const ExpansionCoeffs& co, double ell);

// Same series written with 2F1(-k, 1-k-nu/2; 1-k-nu/2-ell; 2 mu0/nu) and an alternating
// sign. Kept as an independent route. The lower parameter can be a nonpositive integer
// (nu = 1, ell = 1/2 gives -k), but the terminating sum stops before its zero.
double raw_moment_hypergeometric(const ReturnMoments& rm, const ExpansionConfig& cfg,
                                 const ExpansionCoeffs& co, double ell);

double coeff_bound(const ReturnMoments& rm, const ExpansionConfig& cfg, int k);

// Bound on |E[RV^ell] - partial sum through k = K| from the coefficient bound. The
// coefficient bound holds on typical inputs but is not a theorem: the generating function
// has an essential singularity at 1/zeta, so |c_k| / (b0 zeta^k) eventually grows.
double truncation_bound(const ReturnMoments& rm, const ExpansionConfig& cfg, double ell, int K);

// |sum_{k=K+1}^{k_ref} term_k|: the actual truncation error measured against a long
// reference expansion. Diagnostic only.
double moment_tail(const ReturnMoments& rm, const ExpansionConfig& cfg, double ell, int K, int k_ref = 200);

} // namespace volswap
