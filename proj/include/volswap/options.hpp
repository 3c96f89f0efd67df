#pragma once

#include "volswap/model.hpp"
#include "volswap/rvdist.hpp"
#include "volswap/specfun.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <vector>

namespace volswap {

// Call on RV^rho, rho = 1/2 (volatility call) or 1 (variance call), priced by the
// Laguerre expansion of E[(X - K)^+] built from the moments E[X^tau], X = RV^rho.
//
// The expansion is applied to X/scale; since E[(X - K)^+] = scale E[(X/scale - K/scale)^+]
// the price does not depend on the scale in the limit, but the truncated series
// converges much faster when scale matches the spread of X. scale <= 0 picks one
// from the moments (see default_scale).
struct OptionSpec {
    double rho = 1.0;
    double strike = 0.0;
    double a = 0.0;
    double b = 0.0;
    double discount = 1.0;
    int k_terms = 40;
    double scale = 0.0;
};

void validate(const OptionSpec& spec);

// exp(-r T) and exp(-sum r_i (t_i - t_{i-1})) for a piecewise-constant rate that holds
// rates[i] on (knots[i-1], knots[i]], knots[-1] = 0, extended flat past the last knot.
double discount_flat(double rate, double T);
double discount_piecewise(const std::vector<double>& knots, const std::vector<double>& rates, double T);

// The expansion coefficients h_k are high-order finite differences of moments (sum of
// |terms| runs ~15 orders of magnitude above h_k at 40 terms), so providers deliver
// moments in 50-digit arithmetic. Inputs stay double: the moments are those of the
// distribution the double inputs define, computed consistently to ~50 digits.
using wide_float = boost::multiprecision::cpp_bin_float_50;

class MomentProvider {
public:
    virtual ~MomentProvider() = default;
    virtual wide_float moment_wide(double ell) const = 0;
    virtual bool has_derivative() const { return false; }
    virtual wide_float moment_dsigma_wide(double ell) const;
    // Largest chi-square weight; sets the exponential tail of RV.
    virtual double tail_scale() const = 0;

    double moment(double ell) const { return static_cast<double>(moment_wide(ell)); }
    double moment_dsigma(double ell) const { return static_cast<double>(moment_dsigma_wide(ell)); }
};

// Moments from the Laguerre density expansion (time-varying interval variances).
// Integer orders need at least order+1 expansion terms to be exact, so the expansion
// is lengthened to min_terms when cfg asks for fewer.
class SeriesMoments : public MomentProvider {
public:
    SeriesMoments(ReturnMoments rm, ExpansionConfig cfg, int min_terms = 64);
    wide_float moment_wide(double ell) const override;
    double tail_scale() const override;

private:
    ReturnMoments rm_;
    ExpansionConfig cfg_;
    std::vector<wide_float> c_;
};

// Closed-form noncentral chi-square moments (constant regime); sigma is the model
// volatility used for derivatives.
class NcchiMoments : public MomentProvider {
public:
    NcchiMoments(double eta, double lambda_bar, double sigma_N, double sigma, double T);
    wide_float moment_wide(double ell) const override;
    bool has_derivative() const override { return true; }
    wide_float moment_dsigma_wide(double ell) const override;
    double tail_scale() const override;

private:
    double eta_, lambda_, sigma_N_, sigma_, T_;
};

// E[RV^ell] with RV = (sigma_N^2/T) 100^2 W, W ~ chi^2_eta(lambda).
double ncchi_moment(double ell, double eta, double lambda_bar, double sigma_N, double T);
// d/dsigma with sigma_N proportional to sigma and lambda proportional to 1/sigma^2.
double ncchi_moment_dsigma(double ell, double eta, double lambda_bar, double sigma_N, double sigma, double T);

double default_scale(const OptionSpec& spec, const MomentProvider& mp);

// h_0 .. h_{n-1} for the scaled variable X/scale. Throws DegenerateExponent if some
// tau_j = a - b + j + 2 is 0 or 1.
std::vector<double> dufresne_coeffs(const OptionSpec& spec, const MomentProvider& mp, int n, double scale);
double dufresne_coeff(const OptionSpec& spec, const MomentProvider& mp, int k, double scale);

// Price with the stagnation test: converged when the last three terms are all below
// rel_tol times the partial sum. Not converging is reported, not thrown.
SeriesResult call_price(const OptionSpec& spec, const MomentProvider& mp, double rel_tol = 1e-10);

// d price / d sigma; the scale is held fixed at its value for the unperturbed moments.
double vega_call(const OptionSpec& spec, const MomentProvider& mp);

} // namespace volswap
