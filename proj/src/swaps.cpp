#include "volswap/swaps.hpp"

#include "volswap/errors.hpp"
#include "volswap/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace volswap {

namespace {

constexpr double kVol = 100.0;
constexpr double kVar = 1e4;

void check_positive(double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw InvalidParameter(std::string(name) + " must be positive and finite");
}

void check_ncchi(double eta, double lambda_bar, double sigma_N, double T) {
    check_positive(eta, "eta");
    check_positive(sigma_N, "sigma_N");
    check_positive(T, "T");
    if (!(lambda_bar >= 0.0) || !std::isfinite(lambda_bar))
        throw InvalidParameter("lambda must be nonnegative and finite");
}

void check_tv(const ReturnMoments& rm, const ExpansionConfig& cfg) {
    if (cfg.mu0_bar != rm.nu / 2.0)
        throw InvalidConfig("swap series requires mu0 = nu/2");
    const double amax = *std::max_element(rm.alpha_bar.begin(), rm.alpha_bar.end());
    if (!(cfg.beta_bar > 0.5 * amax))
        throw InvalidConfig("swap series requires beta > max(alpha_i)/2");
}

SwapQuote tv_quote(const ReturnMoments& rm, const ExpansionConfig& cfg, double ell) {
    check_tv(rm, cfg);
    const auto co = coeffs(rm, cfg);
    const auto m = raw_moment(rm, cfg, co, ell);
    SwapQuote q;
    q.strike = m.value;
    q.method = SwapMethod::laguerre_series;
    q.terms_used = m.terms_used;
    if (bound_preconditions(rm, cfg))
        q.error_bound = truncation_bound(rm, cfg, ell, cfg.k_max);
    return q;
}

double gamma_ratio(double a, double b) { return std::exp(log_gamma(a) - log_gamma(b)); }

} // namespace

std::string_view to_string(SwapMethod m) {
    switch (m) {
    case SwapMethod::laguerre_series: return "laguerre_series";
    case SwapMethod::constant_c: return "constant_c";
    case SwapMethod::ncchi_closed_form: return "ncchi_closed_form";
    case SwapMethod::central_closed_form: return "central_closed_form";
    }
    return "unknown";
}

SwapQuote vol_swap_tv(const ReturnMoments& rm, const ExpansionConfig& cfg) { return tv_quote(rm, cfg, 0.5); }

SwapQuote var_swap_tv(const ReturnMoments& rm, const ExpansionConfig& cfg) { return tv_quote(rm, cfg, 1.0); }

SwapQuote vol_swap_const_c(double c, double nu, double T) {
    check_positive(c, "c");
    check_positive(nu, "nu");
    check_positive(T, "T");
    return {std::sqrt(2.0 * c / T) * gamma_ratio((nu + 1.0) / 2.0, nu / 2.0) * kVol, SwapMethod::constant_c, 1, {}};
}

SwapQuote var_swap_const_c(double c, double nu, double T) {
    check_positive(c, "c");
    check_positive(nu, "nu");
    check_positive(T, "T");
    return {nu * c * c / T * kVar, SwapMethod::constant_c, 1, {}};
}

SwapQuote vol_swap_ncchi(double eta, double lambda_bar, double sigma_N, double T) {
    check_ncchi(eta, lambda_bar, sigma_N, T);
    const auto L = laguerre_frac(eta / 2.0 - 1.0, 0.5, -lambda_bar / 2.0);
    return {sigma_N * std::sqrt(std::numbers::pi / (2.0 * T)) * L.value * kVol, SwapMethod::ncchi_closed_form,
            L.terms_used, {}};
}

SwapQuote vol_swap_central(double eta, double sigma_N, double T) {
    check_ncchi(eta, 0.0, sigma_N, T);
    return {sigma_N * std::sqrt(2.0 / T) * gamma_ratio((eta + 1.0) / 2.0, eta / 2.0) * kVol,
            SwapMethod::central_closed_form, 1, {}};
}

SwapQuote var_swap_ncchi(double eta, double lambda_bar, double sigma_N, double T) {
    check_ncchi(eta, lambda_bar, sigma_N, T);
    return {sigma_N * sigma_N / T * (eta + lambda_bar) * kVar, SwapMethod::ncchi_closed_form, 1, {}};
}

SwapQuote var_swap_central(double eta, double sigma_N, double T) {
    check_ncchi(eta, 0.0, sigma_N, T);
    return {sigma_N * sigma_N / T * eta * kVar, SwapMethod::central_closed_form, 1, {}};
}

double vega_vol_swap(double eta, double lambda_bar, double sigma_N, double sigma, double T) {
    check_ncchi(eta, lambda_bar, sigma_N, T);
    check_positive(sigma, "sigma");
    if (lambda_bar == 0.0)
        return vol_swap_central(eta, sigma_N, T).strike / sigma;
    // dL_b^{(a)}/dx = -L_{b-1}^{(a+1)}, and x = -lambda/2 moves by lambda/sigma.
    const double k = vol_swap_ncchi(eta, lambda_bar, sigma_N, T).strike;
    const auto L = laguerre_frac(eta / 2.0, -0.5, -lambda_bar / 2.0);
    const double slope = lambda_bar * sigma_N * std::sqrt(std::numbers::pi / (2.0 * T)) * L.value * kVol;
    return (k - slope) / sigma;
}

double vega_var_swap(double eta, double lambda_bar, double sigma_N, double sigma, double T) {
    check_ncchi(eta, lambda_bar, sigma_N, T);
    check_positive(sigma, "sigma");
    return 2.0 * sigma_N * sigma_N / (sigma * T) * eta * kVar;
}

double vega_vol_swap(const ReturnMoments& rm, const SchwartzParams& params) {
    if (!rm.is_constant_regime())
        throw RegimeError("vega is only available when every interval shares one variance");
    return vega_vol_swap(rm.eta, rm.lambda_bar, rm.sigma_N, params.sigma(), rm.T);
}

double vega_var_swap(const ReturnMoments& rm, const SchwartzParams& params) {
    if (!rm.is_constant_regime())
        throw RegimeError("vega is only available when every interval shares one variance");
    return vega_var_swap(rm.eta, rm.lambda_bar, rm.sigma_N, params.sigma(), rm.T);
}

} // namespace volswap
