#include "volswap/rvdist.hpp"

#include "volswap/errors.hpp"
#include "expansion_impl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace volswap {

namespace {

void check_config(const ReturnMoments& rm, const ExpansionConfig& cfg) {
    if (rm.alpha_bar.empty())
        throw InvalidConfig("no intervals");
    if (!(cfg.beta_bar > 0.0) || !std::isfinite(cfg.beta_bar))
        throw InvalidConfig("beta must be positive");
    if (!(cfg.mu0_bar > 0.0) || !std::isfinite(cfg.mu0_bar))
        throw InvalidConfig("mu0 must be positive");
    if (cfg.k_max < 0)
        throw InvalidConfig("truncation order must be nonnegative");
    for (double a : rm.alpha_bar)
        if (!(a > 0.0))
            throw InvalidConfig("every weight alpha_i must be positive");
}

// A_i = 1 + (alpha_i/beta)(nu/(2 mu0) - 1)
double a_factor(double alpha, const ExpansionConfig& cfg, double nu) {
    return 1.0 + alpha / cfg.beta_bar * (nu / (2.0 * cfg.mu0_bar) - 1.0);
}

bool is_integer(double x) { return x == std::floor(x); }

} // namespace

ExpansionConfig default_expansion(const ReturnMoments& rm, int k_max) {
    if (rm.alpha_bar.empty())
        throw InvalidConfig("no intervals");
    ExpansionConfig cfg;
    cfg.beta_bar = *std::max_element(rm.alpha_bar.begin(), rm.alpha_bar.end());
    cfg.mu0_bar = rm.nu / 2.0;
    cfg.k_max = k_max;
    return cfg;
}

ExpansionConfig pricing_expansion(const ReturnMoments& rm, int k_max) {
    ExpansionConfig cfg = default_expansion(rm, k_max);
    cfg.beta_bar = std::max(cfg.beta_bar, rv_mean(rm) / rm.nu);
    return cfg;
}

double rv_mean(const ReturnMoments& rm) {
    CompensatedSum s;
    for (std::size_t i = 0; i < rm.alpha_bar.size(); ++i)
        s.add(rm.alpha_bar[i] * (1.0 + rm.delta_bar[i]));
    return s.value();
}

bool bound_preconditions(const ReturnMoments& rm, const ExpansionConfig& cfg, std::string* why) {
    auto fail = [&](const char* msg) {
        if (why)
            *why = msg;
        return false;
    };
    if (cfg.mu0_bar < rm.nu / 4.0)
        return fail("mu0 < nu/4");
    const double amax = *std::max_element(rm.alpha_bar.begin(), rm.alpha_bar.end());
    if (!(cfg.beta_bar > 0.5 * (2.0 - rm.nu / (2.0 * cfg.mu0_bar)) * amax))
        return fail("zeta >= 1: beta too small for the bound");
    if (!(contraction_factor(rm, cfg) < 1.0))
        return fail("zeta >= 1");
    return true;
}

double contraction_factor(const ReturnMoments& rm, const ExpansionConfig& cfg) {
    check_config(rm, cfg);
    double z = 0.0;
    for (double a : rm.alpha_bar)
        z = std::max(z, std::abs((1.0 - a / cfg.beta_bar) / a_factor(a, cfg, rm.nu)));
    return z;
}

ExpansionCoeffs coeffs(const ReturnMoments& rm, const ExpansionConfig& cfg) {
    check_config(rm, cfg);
    const double nu = rm.nu;
    const double zr = nu / (2.0 * cfg.mu0_bar);
    const std::size_t n = rm.alpha_bar.size();
    std::vector<double> A(n), r(n);
    for (std::size_t i = 0; i < n; ++i) {
        A[i] = a_factor(rm.alpha_bar[i], cfg, nu);
        r[i] = (1.0 - rm.alpha_bar[i] / cfg.beta_bar) / A[i];
    }

    ExpansionCoeffs out;
    detail::expansion_coeffs<double>(rm, cfg, out.c, out.d);

    out.zeta = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        out.zeta = std::max(out.zeta, std::abs(r[i]));

    // b0 of the coefficient bound. Its exponential takes the same denominator as c_0,
    // 2 beta mu0 + alpha_i (nu - 2 mu0); the two agree whenever mu0 = nu/2.
    double delta = 0.0, corr = 0.0, log_prod = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        delta += rm.delta_bar[i];
        const double a = rm.alpha_bar[i];
        corr += rm.delta_bar[i] * a * (nu - 2.0 * cfg.mu0_bar) /
                (2.0 * cfg.beta_bar * cfg.mu0_bar + a * (nu - 2.0 * cfg.mu0_bar));
        log_prod -= 0.5 * std::log(std::abs(A[i]));
    }
    double lead = 0.0;
    if (delta > 0.0)
        lead = out.zeta > 0.0 ? cfg.mu0_bar * delta / (nu * out.zeta) : std::numeric_limits<double>::infinity();
    out.b0_bound = std::exp(0.5 * nu * std::log(zr) + log_prod + lead - 0.25 * corr);
    return out;
}

double pdf(const ReturnMoments& rm, const ExpansionConfig& cfg, const ExpansionCoeffs& co, double y) {
    if (!(y > 0.0))
        throw DomainError("pdf: y must be positive");
    const double p = rm.nu / 2.0;
    const double two_beta = 2.0 * cfg.beta_bar;
    const int K = static_cast<int>(co.c.size()) - 1;
    const double x = rm.nu * y / (4.0 * cfg.beta_bar * cfg.mu0_bar);
    const auto L = laguerre_int_all(p - 1.0, K, x);
    const double log_w = -y / two_beta + (p - 1.0) * std::log(y) - p * std::log(two_beta);
    CompensatedSum s;
    for (int k = 0; k <= K; ++k) {
        if (co.c[k] == 0.0)
            continue;
        s.add(std::exp(log_w + log_gamma(k + 1.0) - log_gamma(p + k)) * co.c[k] * L[k]);
    }
    return s.value();
}

std::vector<double> moment_terms(const ReturnMoments& rm, const ExpansionConfig& cfg,
                                 const ExpansionCoeffs& co, double ell) {
    if (!(ell > 0.0))
        throw DomainError("moment order must be positive");
    const double p = rm.nu / 2.0;
    const int K = static_cast<int>(co.c.size()) - 1;
    const double z = rm.nu / (2.0 * cfg.mu0_bar);
    const auto F = detail::moment_polys<double>(p, ell, z, K);
    const double lead = std::exp(ell * std::log(2.0 * cfg.beta_bar) + log_gamma(p + ell) - log_gamma(p));
    std::vector<double> t(K + 1);
    for (int k = 0; k <= K; ++k)
        t[k] = lead * co.c[k] * F[k];
    return t;
}

SeriesResult raw_moment(const ReturnMoments& rm, const ExpansionConfig& cfg, const ExpansionCoeffs& co,
                        double ell, double rel_tol) {
    const auto t = moment_terms(rm, cfg, co, ell);
    CompensatedSum s;
    for (double v : t)
        s.add(v);
    SeriesResult r;
    r.value = s.value();
    r.terms_used = static_cast<int>(t.size());
    r.last_term = std::abs(t.back());
    r.converged = r.last_term <= rel_tol * std::abs(r.value);
    if (!r.converged) {
        std::string why;
        if (!bound_preconditions(rm, cfg, &why))
            throw NoConvergence("moment series not converged after " + std::to_string(t.size()) +
                                " terms and no tail bound applies (" + why + ")");
    }
    return r;
}

double raw_moment_hypergeometric(const ReturnMoments& rm, const ExpansionConfig& cfg,
                                 const ExpansionCoeffs& co, double ell) {
    const double p = rm.nu / 2.0;
    const double zr = rm.nu / (2.0 * cfg.mu0_bar);
    CompensatedSum s;
    for (int k = 0; k < static_cast<int>(co.c.size()); ++k) {
        const double h = gauss_2f1_terminating(k, 1.0 - k - p, 1.0 - k - p - ell, 1.0 / zr);
        const double g = std::exp(log_gamma(ell + k + p) - log_gamma(k + p) + k * std::log(zr));
        s.add((k % 2 ? -1.0 : 1.0) * g * h * co.c[k]);
    }
    return std::pow(2.0 * cfg.beta_bar, ell) * s.value();
}

double coeff_bound(const ReturnMoments& rm, const ExpansionConfig& cfg, int k) {
    if (k < 0)
        throw DomainError("coeff_bound: k must be nonnegative");
    std::string why;
    if (!bound_preconditions(rm, cfg, &why))
        throw PreconditionError("coefficient bound not certified: " + why);
    ExpansionConfig c0 = cfg;
    c0.k_max = 0;
    const auto co = coeffs(rm, c0);
    if (k == 0)
        return co.b0_bound;
    if (co.zeta == 0.0)
        return 0.0;
    const double nu = rm.nu;
    const double lg = k * std::log(co.zeta) + k * std::log1p(nu / (2.0 * k)) + 0.5 * nu * std::log1p(2.0 * k / nu);
    return co.b0_bound * std::exp(lg);
}

double truncation_bound(const ReturnMoments& rm, const ExpansionConfig& cfg, double ell, int K) {
    if (!(ell > 0.0))
        throw DomainError("moment order must be positive");
    if (K < 0)
        throw DomainError("truncation order must be nonnegative");
    std::string why;
    if (!bound_preconditions(rm, cfg, &why))
        throw PreconditionError("truncation bound not certified: " + why);
    ExpansionConfig c0 = cfg;
    c0.k_max = 0;
    const auto co = coeffs(rm, c0);
    if (co.zeta == 0.0)
        return 0.0;
    // Integer orders terminate: F_k vanishes for k > ell.
    if (is_integer(ell) && K >= ell)
        return 0.0;

    const double nu = rm.nu;
    const double p = nu / 2.0;
    const double z = nu / (2.0 * cfg.mu0_bar);
    const double b = p + ell;
    const double log_lead = ell * std::log(2.0 * cfg.beta_bar) + std::log(co.b0_bound) + log_gamma(p + ell) - log_gamma(p);
    const double log_zeta = std::log(co.zeta);

    // Walk F_k forward to K+1, then sum p_k in a log-shifted frame.
    constexpr int kCap = 100000;
    double fm1 = 1.0, f = 1.0;
    auto step = [&](int k) { // advances (fm1, f) from (F_{k-1}, F_k) to (F_k, F_{k+1})
        double next = (k == 0) ? 1.0 - b * z / p
                               : ((2.0 * k + p - (b + k) * z) * f + k * (z - 1.0) * fm1) / (p + k);
        fm1 = f;
        f = next;
    };
    for (int k = 0; k <= K; ++k)
        step(k);
    // now f == F_{K+1}
    auto log_pk = [&](int k, double fk) {
        if (fk == 0.0)
            return -std::numeric_limits<double>::infinity();
        return std::log(std::abs(fk)) + k * std::log1p(nu / (2.0 * k)) + p * std::log1p(2.0 * k / nu) + k * log_zeta;
    };
    double shift = log_pk(K + 1, f);
    if (!std::isfinite(shift))
        shift = 0.0;
    double acc = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = K + 1;; ++k) {
        if (k - K > kCap)
            throw NoConvergence("truncation bound tail exceeded " + std::to_string(kCap) + " terms");
        const double term = std::exp(log_pk(k, f) - shift);
        acc += term;
        if (term <= prev && term < 1e-16 * acc)
            break;
        if (acc == 0.0 && k > K + 1 && term == 0.0 && prev == 0.0)
            break;
        prev = term;
        step(k);
    }
    if (acc == 0.0)
        return 0.0;
    return std::exp(log_lead + shift + std::log(acc));
}

double moment_tail(const ReturnMoments& rm, const ExpansionConfig& cfg, double ell, int K, int k_ref) {
    if (k_ref <= K)
        throw DomainError("moment_tail: reference order must exceed K");
    ExpansionConfig big = cfg;
    big.k_max = k_ref;
    const auto co = coeffs(rm, big);
    const auto t = moment_terms(rm, big, co, ell);
    CompensatedSum s;
    for (int k = K + 1; k <= k_ref; ++k)
        s.add(t[k]);
    return std::abs(s.value());
}

} // namespace volswap
