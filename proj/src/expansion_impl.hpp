#pragma once

// Expansion recurrences shared by the double-precision density code and the
// extended-precision moments used for option pricing.

#include "volswap/errors.hpp"
#include "volswap/model.hpp"
#include "volswap/rvdist.hpp"

#include <cmath>
#include <vector>

namespace volswap::detail {

// c_0..c_K and d_1..d_K (d stored at j-1). Inputs are doubles; arithmetic is in R.
template <class R>
void expansion_coeffs(const ReturnMoments& rm, const ExpansionConfig& cfg, std::vector<R>& c, std::vector<R>& d) {
    using std::exp;
    using std::log;
    const R nu = rm.nu;
    const R beta = cfg.beta_bar;
    const R mu0 = cfg.mu0_bar;
    const R zr = nu / (2 * mu0);
    const std::size_t n = rm.alpha_bar.size();
    std::vector<R> A(n), r(n), w(n);
    R log_c0 = nu / 2 * log(zr);
    R expo = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const R a = rm.alpha_bar[i];
        A[i] = 1 + a / beta * (zr - 1);
        if (!(A[i] > 0))
            throw InvalidConfig("1 + (alpha_i/beta)(nu/(2 mu0) - 1) must be positive");
        r[i] = (1 - a / beta) / A[i];
        log_c0 -= log(A[i]) / 2;
        const R delta = rm.delta_bar[i];
        expo += delta * a * (nu - 2 * mu0) / (2 * beta * mu0 + a * (nu - 2 * mu0));
        // second sum of d_j: delta_i (alpha_i/beta) r_i^{j-1} / A_i^2
        w[i] = delta * (a / beta) / (A[i] * A[i]);
    }
    log_c0 -= expo / 2;

    const int K = cfg.k_max;
    d.assign(K, R(0));
    std::vector<R> rp(n, R(1)); // r_i^{j-1}
    for (int j = 1; j <= K; ++j) {
        R s1 = 0, s2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            s2 += w[i] * rp[i];
            rp[i] *= r[i];
            s1 += rp[i] / 2;
        }
        d[j - 1] = s1 - R(j) / 2 * zr * s2;
    }
    c.assign(K + 1, R(0));
    c[0] = exp(log_c0);
    for (int k = 1; k <= K; ++k) {
        R s = 0;
        for (int j = 0; j < k; ++j)
            s += c[j] * d[k - j - 1];
        c[k] = s / k;
    }
}

// F_k = 2F1(-k, p+ell; p; z), k = 0..K, by the three-term recurrence in k. At z = 1
// the recurrence collapses to F_{k+1} = (k - ell)/(p + k) F_k.
template <class R>
std::vector<R> moment_polys(const R& p, const R& ell, const R& z, int K) {
    std::vector<R> f(K + 1);
    f[0] = 1;
    if (K == 0)
        return f;
    const R b = p + ell;
    const R c = p;
    f[1] = 1 - b * z / c;
    for (int k = 1; k < K; ++k)
        f[k + 1] = ((2 * k + c - (b + k) * z) * f[k] + k * (z - 1) * f[k - 1]) / (c + k);
    return f;
}

} // namespace volswap::detail
