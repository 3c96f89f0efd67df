#include "volswap/specfun.hpp"

#include "volswap/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace volswap {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// sum * exp(log_scale) with a sign carried in sum.
struct ScaledSum {
    double sum = 0.0;
    double log_scale = 0.0;
    int terms = 0;
    double last = 0.0; // relative to the final scale
    bool converged = false;

    double value() const { return sum * std::exp(log_scale); }
    double value_times_exp(double shift) const { return sum == 0.0 ? 0.0 : sum * std::exp(log_scale + shift); }
};

// Direct power series of 1F1(a; b; z). Terms and partial sum are renormalized
// whenever they grow past 1e250 so large z cannot overflow.
ScaledSum kummer_series(double a, double b, double z, int max_terms) {
    constexpr double kBig = 1e250;
    const double log_big = std::log(kBig);
    ScaledSum out;
    CompensatedSum acc;
    double term = 1.0;
    acc.add(term);
    double prev = std::numeric_limits<double>::infinity();
    for (int m = 0;; ++m) {
        if (m >= max_terms)
            throw NoConvergence("1F1 series exceeded " + std::to_string(max_terms) + " terms");
        const double num = a + m;
        if (num == 0.0) { // terminating polynomial
            out.converged = true;
            out.last = 0.0;
            out.terms = m + 1;
            break;
        }
        term *= num / (b + m) * z / (m + 1);
        acc.add(term);
        if (std::abs(acc.value()) > kBig || std::abs(term) > kBig) {
            const double s = acc.value() / kBig;
            acc = CompensatedSum{};
            acc.add(s);
            term /= kBig;
            prev /= kBig;
            out.log_scale += log_big;
        }
        const double at = std::abs(term);
        // Once past the largest term the tail is dominated by a geometric series,
        // so stopping at eps relative is safe.
        if (at <= prev && m + 1 > std::abs(a) && at <= 0.25 * kEps * std::abs(acc.value())) {
            out.terms = m + 2;
            out.last = at;
            out.converged = true;
            break;
        }
        if (term == 0.0) {
            out.terms = m + 2;
            out.last = 0.0;
            out.converged = true;
            break;
        }
        prev = at;
    }
    out.sum = acc.value();
    return out;
}

SeriesResult finish(const ScaledSum& s, double shift) {
    SeriesResult r;
    r.value = s.value_times_exp(shift);
    r.terms_used = s.terms;
    r.last_term = s.sum == 0.0 ? 0.0 : std::abs(s.last) * std::exp(s.log_scale + shift);
    r.converged = r.last_term <= 1e-12 * std::abs(r.value) + 1e-300;
    return r;
}

} // namespace

double log_gamma(double x) {
    if (!(x > 0.0))
        throw DomainError("log_gamma: argument must be positive, got " + std::to_string(x));
    int sign = 1;
    return log_abs_gamma(x, &sign);
}

double log_abs_gamma(double x, int* sign) {
    if (is_nonpositive_integer(x))
        throw DomainError("log_abs_gamma: pole at " + std::to_string(x));
    int s = 1;
#if defined(__GLIBC__)
    const double v = ::lgamma_r(x, &s);
#else
    const double v = std::lgamma(x);
    s = (x > 0.0 || static_cast<long long>(std::floor(x)) % 2 == 0) ? 1 : -1;
#endif
    if (sign)
        *sign = s;
    return v;
}

double pochhammer(double a, int k) {
    if (k < 0)
        throw DomainError("pochhammer: k must be nonnegative");
    double p = 1.0;
    for (int i = 0; i < k; ++i) {
        const double f = a + i;
        if (f == 0.0)
            return 0.0;
        p *= f;
    }
    return p;
}

double gauss_2f1_terminating(int k, double b, double c, double z) {
    if (k < 0)
        throw DomainError("gauss_2f1_terminating: k must be nonnegative");
    CompensatedSum acc;
    double term = 1.0;
    acc.add(term);
    for (int m = 0; m < k; ++m) {
        const double num = (m - k) * (b + m);
        const double den = c + m;
        if (den == 0.0) {
            if (num * term == 0.0)
                break;
            throw PoleError("2F1 lower parameter hits the pole (c)_" + std::to_string(m + 1) + " = 0");
        }
        term *= num / den * z / (m + 1);
        acc.add(term);
    }
    return acc.value();
}

SeriesResult kummer_1f1(double a, double b, double z, int max_terms) {
    if (is_nonpositive_integer(b))
        throw DomainError("1F1: b must not be a nonpositive integer");
    if (z == 0.0)
        return SeriesResult{1.0, 1, 0.0, true};
    if (z < 0.0) {
        // Kummer's transformation turns an alternating series into a positive one.
        const ScaledSum s = kummer_series(b - a, b, -z, max_terms);
        return finish(s, z);
    }
    return finish(kummer_series(a, b, z, max_terms), 0.0);
}

SeriesResult kummer_1f1_scaled(double a, double b, double z, int max_terms) {
    if (is_nonpositive_integer(b))
        throw DomainError("1F1: b must not be a nonpositive integer");
    if (z == 0.0)
        return SeriesResult{1.0, 1, 0.0, true};
    if (z < 0.0)
        return finish(kummer_series(b - a, b, -z, max_terms), 0.0);
    return finish(kummer_series(a, b, z, max_terms), -z);
}

double laguerre_int(double a, int n, double x) {
    if (n < 0)
        throw DomainError("laguerre_int: n must be nonnegative");
    double lm1 = 1.0;
    if (n == 0)
        return lm1;
    double l = 1.0 + a - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + a - x) * l - (k + a) * lm1) / (k + 1.0);
        lm1 = l;
        l = next;
    }
    return l;
}

std::vector<double> laguerre_int_all(double a, int n, double x) {
    if (n < 0)
        throw DomainError("laguerre_int_all: n must be nonnegative");
    std::vector<double> out(n + 1);
    out[0] = 1.0;
    if (n >= 1)
        out[1] = 1.0 + a - x;
    for (int k = 1; k < n; ++k)
        out[k + 1] = ((2.0 * k + 1.0 + a - x) * out[k] - (k + a) * out[k - 1]) / (k + 1.0);
    return out;
}

SeriesResult laguerre_frac(double a, double b, double x) {
    if (!(a > -1.0))
        throw DomainError("laguerre_frac: a must exceed -1");
    if (is_nonpositive_integer(b + 1.0))
        throw DomainError("laguerre_frac: b must not be a negative integer");
    if (is_nonpositive_integer(a + b + 1.0))
        throw DomainError("laguerre_frac: Gamma(a+b+1) has a pole");
    int s1 = 1, s2 = 1;
    const double lg = log_abs_gamma(a + b + 1.0, &s1) - log_abs_gamma(b + 1.0, &s2) - log_gamma(a + 1.0);
    // 1F1(-b; a+1; x): for x <= 0 route through the scaled form so exp(x) never underflows
    // against a huge companion series.
    SeriesResult f;
    if (x < 0.0) {
        f = kummer_1f1_scaled(a + 1.0 + b, a + 1.0, -x);
    } else {
        f = kummer_1f1(-b, a + 1.0, x);
    }
    const double scale = s1 * s2 * std::exp(lg);
    f.value *= scale;
    f.last_term *= std::abs(scale);
    return f;
}

} // namespace volswap
