#pragma once

#include "volswap/model.hpp"
#include "volswap/rvdist.hpp"

#include <optional>
#include <string_view>

namespace volswap {

// Strikes are in volatility points (x100) or variance points (x100^2), annualized by 1/T.
enum class SwapMethod { laguerre_series, constant_c, ncchi_closed_form, central_closed_form };

std::string_view to_string(SwapMethod m);

struct SwapQuote {
    double strike = 0.0;
    SwapMethod method = SwapMethod::laguerre_series;
    int terms_used = 1;
    std::optional<double> error_bound; // only for laguerre_series when the bound is certified
};

// Time-varying regime through the Laguerre expansion. Requires mu0 = nu/2 and
// beta > max(alpha_i)/2.
SwapQuote vol_swap_tv(const ReturnMoments& rm, const ExpansionConfig& cfg);
SwapQuote var_swap_tv(const ReturnMoments& rm, const ExpansionConfig& cfg);

// Equal interval variances c (a variance, not a volatility), no drift.
SwapQuote vol_swap_const_c(double c, double nu, double T);
// Equal interval volatility c: nu c^2 / T x 100^2.
SwapQuote var_swap_const_c(double c, double nu, double T);

// Constant regime: RV = (sigma_N^2 / T) 100^2 W with W ~ chi^2_eta(lambda).
SwapQuote vol_swap_ncchi(double eta, double lambda_bar, double sigma_N, double T);
SwapQuote vol_swap_central(double eta, double sigma_N, double T);
SwapQuote var_swap_ncchi(double eta, double lambda_bar, double sigma_N, double T);
SwapQuote var_swap_central(double eta, double sigma_N, double T);

// d/dsigma with sigma_N proportional to sigma and the interval means held fixed,
// so lambda scales as 1/sigma^2.
double vega_vol_swap(double eta, double lambda_bar, double sigma_N, double sigma, double T);
double vega_var_swap(double eta, double lambda_bar, double sigma_N, double sigma, double T);

// Same, taking the statistics from rm. Throws RegimeError unless all interval
// variances coincide.
double vega_vol_swap(const ReturnMoments& rm, const SchwartzParams& params);
double vega_var_swap(const ReturnMoments& rm, const SchwartzParams& params);

} // namespace volswap
