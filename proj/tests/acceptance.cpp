// Acceptance checks, one per criterion. `acceptance N` runs criterion N, no argument runs
// all. Each prints a single PASS/FAIL line; the exit status is nonzero if any failed.

#include "volswap/mc.hpp"
#include "volswap/model.hpp"
#include "volswap/options.hpp"
#include "volswap/rvdist.hpp"
#include "volswap/swaps.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace volswap;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

ReturnMoments example(double S0, double mu, double sigma, double kappa, int N) {
    return return_moments(SchwartzParams(S0, mu, sigma, kappa), Schedule(0.0, 1.0, N));
}

double rv_variance(const ReturnMoments& rm) {
    double v = 0.0;
    for (std::size_t i = 0; i < rm.intervals(); ++i)
        v += 2 * rm.alpha_bar[i] * rm.alpha_bar[i] * (1 + 2 * rm.delta_bar[i]);
    return v;
}

// ---- 1, 2: truncation table ----

const double kKappas[] = {0.5, 1.5, 3.0};
const double kSigmas[] = {0.05, 0.06, 0.07, 0.08, 0.09, 0.10};

// Reference values, [kappa][K][sigma].
const double kTable[3][4][6] = {
    {{5.0621e-03, 4.0908e-03, 3.3784e-03, 2.8286e-03, 2.3877e-03, 2.0238e-03},
     {2.4812e-06, 1.3472e-06, 7.8533e-07, 4.7996e-07, 3.0264e-07, 1.9458e-07},
     {2.3443e-09, 8.5308e-10, 3.4989e-10, 1.5546e-10, 7.2847e-11, 3.5296e-11},
     {2.6654e-12, 6.4748e-13, 1.8563e-13, 6.0396e-14, 1.9540e-14, 7.1054e-15}},
    {{2.2769e-02, 1.8416e-02, 1.5221e-02, 1.2749e-02, 1.0760e-02, 9.1092e-03},
     {5.0288e-05, 2.7367e-05, 1.5987e-05, 9.7862e-06, 6.1741e-06, 3.9644e-06},
     {2.1434e-07, 7.8326e-08, 3.2261e-08, 1.4386e-08, 6.7571e-09, 3.2735e-09},
     {1.1008e-09, 2.6957e-10, 7.8065e-11, 2.5270e-11, 8.7965e-12, 3.1957e-12}},
    {{4.8567e-02, 3.9763e-02, 3.3365e-02, 2.8470e-02, 2.4577e-02, 2.1387e-02},
     {2.2947e-04, 1.2806e-04, 7.7190e-05, 4.9107e-05, 3.2476e-05, 2.2088e-05},
     {2.0955e-06, 7.9627e-07, 3.4435e-07, 1.6308e-07, 8.2467e-08, 4.3744e-08},
     {2.3101e-08, 5.9702e-09, 1.8497e-09, 6.5101e-10, 2.5122e-10, 1.0367e-10}}};

struct Cell {
    double bound, tail;
};

Cell table_cell(int ik, int K, int is) {
    const auto rm = example(2.0, 0.6, kSigmas[is], kKappas[ik], 252);
    const auto cfg = default_expansion(rm, K);
    return {truncation_bound(rm, cfg, 0.5, K), moment_tail(rm, cfg, 0.5, K)};
}

Outcome criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    int matched = 0;
    double worst = 0.0, worst_tail = 0.0;
    for (int ik = 0; ik < 3; ++ik)
        for (int K = 0; K < 4; ++K)
            for (int is = 0; is < 6; ++is) {
                const auto c = table_cell(ik, K, is);
                const double d = rel(c.bound, kTable[ik][K][is]);
                matched += d <= 1e-3;
                worst = std::max(worst, d);
                worst_tail = std::max(worst_tail, rel(c.tail, kTable[ik][K][is]));
            }
    const double t = seconds_since(t0);
    const auto a1 = table_cell(0, 0, 0), a2 = table_cell(1, 2, 2), a3 = table_cell(2, 3, 5);
    return {matched == 72 && t < 10.0,
            fmt("%d/72 bound cells within 1e-3, worst rel %.3g; anchors %.5g %.5g %.5g; "
                "actual tails worst rel %.3g (anchors %.5g %.5g %.5g); %.2f s",
                matched, worst, a1.bound, a2.bound, a3.bound, worst_tail, a1.tail, a2.tail, a3.tail, t)};
}

Outcome criterion2() {
    const auto t0 = std::chrono::steady_clock::now();
    double max_bound = 0.0, max_tail = 0.0;
    for (int ik = 0; ik < 3; ++ik)
        for (int is = 0; is < 6; ++is) {
            const auto c = table_cell(ik, 3, is);
            max_bound = std::max(max_bound, c.bound);
            max_tail = std::max(max_tail, c.tail);
        }
    const double t = seconds_since(t0);
    return {max_bound < 2.3101e-8 && t < 5.0,
            fmt("max K=3 bound %.5g, max K=3 actual tail %.5g (threshold 2.3101e-08); %.2f s", max_bound, max_tail, t)};
}

// ---- 3: moments against closed forms ----

Outcome criterion3() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240501);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int good = 0;
    double worst_rel = 0.0;
    std::string first_bad;
    for (int it = 0; it < 50; ++it) {
        const int N = 2 + static_cast<int>(9 * U(rng));
        const double sigma = 0.01 + 0.19 * U(rng), kappa = 0.1 + 4.9 * U(rng);
        const double S0 = 0.5 + 4.5 * U(rng), mu = 1.5 * U(rng);
        const auto rm = example(S0, mu, sigma, kappa, N);
        const auto cfg = default_expansion(rm, 25);
        const auto co = coeffs(rm, cfg);
        const double m1 = rv_mean(rm);
        const double exact[2] = {m1, rv_variance(rm) + m1 * m1};
        bool ok = bound_preconditions(rm, cfg);
        for (int ell = 1; ell <= 2 && ok; ++ell) {
            const double got = raw_moment(rm, cfg, co, ell).value;
            const double err = std::abs(got - exact[ell - 1]);
            const double bound = truncation_bound(rm, cfg, ell, 25);
            worst_rel = std::max(worst_rel, err / exact[ell - 1]);
            // The bound is zero once K reaches an integer order; 1e-12 relative covers
            // the rounding of the finite sum.
            ok = err <= bound + 1e-12 * exact[ell - 1] && err <= 1e-8 * exact[ell - 1];
        }
        if (ok)
            ++good;
        else if (first_bad.empty())
            first_bad = fmt(" first failure N=%d sigma=%.4g kappa=%.4g", N, sigma, kappa);
    }
    const double t = seconds_since(t0);
    return {good == 50 && t < 30.0, fmt("%d/50 instances, worst rel %.3g;%s %.2f s", good, worst_rel, first_bad.c_str(), t)};
}

// ---- 4: density normalization and histogram ----

double bin_average(const std::function<double(double)>& f, double lo, double hi) {
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 0, 0) / (hi - lo);
}

Outcome criterion4() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (int N : {52, 252})
        for (double sigma : {0.08, 0.10}) {
            const SchwartzParams p(2.0, 0.6, sigma, 0.5);
            const Schedule s(0.0, 1.0, N);
            const auto rm = return_moments(p, s);
            const auto cfg = default_expansion(rm, 25);
            const auto co = coeffs(rm, cfg);
            auto f = [&](double y) { return y > 0.0 ? pdf(rm, cfg, co, y) : 0.0; };
            const double mean = rv_mean(rm), sd = std::sqrt(rv_variance(rm));
            const double area = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                f, 0.0, mean + 40 * sd, 20, 1e-13);

            McConfig mc;
            mc.n_paths = 100000;
            mc.seed = 1;
            const auto h = histogram(simulate_rv(p, s, mc), 100, std::max(0.0, mean - 5 * sd), mean + 6 * sd);
            int inside = 0;
            for (std::size_t b = 0; b < h.counts.size(); ++b) {
                const double w = h.edges[b + 1] - h.edges[b];
                const double q = std::clamp(bin_average(f, h.edges[b], h.edges[b + 1]) * w, 0.0, 1.0);
                const double se = std::sqrt(q * (1 - q) / h.n_total) / w;
                const double observed = static_cast<double>(h.counts[b]) / h.n_total / w;
                inside += std::abs(observed - q / w) < 3 * se;
            }
            ok = ok && std::abs(area - 1.0) <= 1e-6 && inside >= 95;
            detail += fmt("N=%d sigma=%.2f area-1 %.2g bins %d/100; ", N, sigma, area - 1.0, inside);
        }
    const double t = seconds_since(t0);
    return {ok && t < 120.0, detail + fmt("%.1f s", t)};
}

// ---- 5: swap prices against simulation ----

Outcome criterion5() {
    const auto t0 = std::chrono::steady_clock::now();
    int total = 0, within = 0;
    double worst_z = 0.0;
    std::string worst_at;
    bool monotone = true;
    auto cell = [&](double sigma, double kappa, int N) -> std::pair<double, double> {
        const SchwartzParams p(2.0, 1.0, sigma, kappa);
        const Schedule s(0.0, 1.0, N);
        const auto rm = return_moments(p, s);
        const auto cfg = pricing_expansion(rm, 25);
        const double vol = vol_swap_tv(rm, cfg).strike, var = var_swap_tv(rm, cfg).strike;
        McConfig mc;
        mc.n_paths = 100000;
        mc.seed = 1;
        const auto x = simulate_rv(p, s, mc);
        for (auto [analytic, est, name] : {std::tuple{vol, estimate_swap(x, 0.5), "vol"},
                                           std::tuple{var, estimate_swap(x, 1.0), "var"}}) {
            const double z = (analytic - est.mean) / est.std_error;
            ++total;
            within += std::abs(z) < 3.0;
            if (std::abs(z) > std::abs(worst_z)) {
                worst_z = z;
                worst_at = fmt("%s sigma=%.4g kappa=%.2g N=%d", name, sigma, kappa, N);
            }
        }
        return {vol, var};
    };
    for (double kappa : {0.5, 1.5, 3.0}) {
        std::pair<double, double> prev{-1.0, -1.0};
        for (int i = 0; i < 10; ++i) {
            const auto cur = cell(0.005 + 0.095 * i / 9, kappa, 52);
            monotone = monotone && cur.first > prev.first && cur.second > prev.second;
            prev = cur;
        }
    }
    for (double sigma : {0.05, 0.06, 0.07})
        for (int N : {2, 13, 52, 126, 252})
            cell(sigma, 0.5, N);
    const double t = seconds_since(t0);
    return {within == total && monotone && t < 600.0,
            fmt("%d/%d strikes within 3 SE, worst z %.2f (%s); monotone in sigma: %s; %.1f s", within, total, worst_z,
                worst_at.c_str(), monotone ? "yes" : "no", t)};
}

// ---- 6: specialization chain and Jensen ----

Outcome criterion6() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int n : {1, 4, 51, 251})
        for (double var : {1e-5, 4e-4})
            for (double T : {0.5, 1.0, 1.3}) {
                const auto rm = make_return_moments(std::vector<double>(n, 0.0), std::vector<double>(n, var), T);
                const auto cfg = default_expansion(rm, 5);
                const double sd = std::sqrt(var);
                const double vol[] = {vol_swap_tv(rm, cfg).strike, vol_swap_const_c(var, n, T).strike,
                                      vol_swap_ncchi(n, 0.0, sd, T).strike, vol_swap_central(n, sd, T).strike};
                const double vr[] = {var_swap_tv(rm, cfg).strike, var_swap_const_c(sd, n, T).strike,
                                     var_swap_ncchi(n, 0.0, sd, T).strike, var_swap_central(n, sd, T).strike};
                for (int i = 1; i < 4; ++i)
                    worst = std::max({worst, rel(vol[i], vol[i - 1]), rel(vr[i], vr[i - 1])});
            }
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int jensen = 0, tested = 0;
    for (int it = 0; it < 100; ++it) {
        const double sigma = 0.01 + 0.2 * U(rng), kappa = 0.1 + 5 * U(rng);
        const int N = 2 + static_cast<int>(250 * U(rng));
        const auto rm = example(2.0, 0.6, sigma, kappa, N);
        const auto cfg = pricing_expansion(rm, 25);
        tested += 2;
        jensen += vol_swap_tv(rm, cfg).strike <= std::sqrt(var_swap_tv(rm, cfg).strike);
        const double eta = N - 1, lam = 20 * U(rng), sN = 1e-3 + 0.02 * U(rng);
        jensen += vol_swap_ncchi(eta, lam, sN, 1.0).strike <= std::sqrt(var_swap_ncchi(eta, lam, sN, 1.0).strike);
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-10 && jensen == tested && t < 5.0,
            fmt("chain worst rel %.3g; Jensen %d/%d; %.2f s", worst, jensen, tested, t)};
}

// ---- 7: vegas against finite differences ----

Outcome criterion7() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_swap = 0.0, worst_option = 0.0;
    const double T = 1.0;
    for (double eta : {4.0, 51.0, 251.0})
        for (double lambda : {0.0, 1.0, 12.0})
            for (double sigma : {0.05, 0.08, 0.10}) {
                // sigma_N proportional to sigma, lambda to 1/sigma^2.
                const double sN = sigma * std::sqrt(T / (eta + 1));
                auto sN_at = [&](double s) { return sN * s / sigma; };
                auto lam_at = [&](double s) { return lambda * sigma * sigma / (s * s); };
                const double h = 1e-5 * sigma;
                auto fd = [&](const std::function<double(double)>& f) { return (f(sigma + h) - f(sigma - h)) / (2 * h); };

                const double fd_vol = fd([&](double s) { return vol_swap_ncchi(eta, lam_at(s), sN_at(s), T).strike; });
                const double fd_var = fd([&](double s) { return var_swap_ncchi(eta, lam_at(s), sN_at(s), T).strike; });
                worst_swap = std::max({worst_swap, rel(vega_vol_swap(eta, lambda, sN, sigma, T), fd_vol),
                                       rel(vega_var_swap(eta, lambda, sN, sigma, T), fd_var)});

                const NcchiMoments mp(eta, lambda, sN, sigma, T);
                for (double rho : {1.0, 0.5}) {
                    OptionSpec sp;
                    sp.rho = rho;
                    sp.strike = mp.moment(rho);
                    sp.scale = default_scale(sp, mp);
                    const double fd_opt = fd([&](double s) {
                        return call_price(sp, NcchiMoments(eta, lam_at(s), sN_at(s), s, T)).value;
                    });
                    worst_option = std::max(worst_option, rel(vega_call(sp, mp), fd_opt));
                }
            }
    const double t = seconds_since(t0);
    return {worst_swap <= 1e-4 && worst_option <= 1e-3 && t < 60.0,
            fmt("worst rel: swaps %.3g, options %.3g; %.2f s", worst_swap, worst_option, t)};
}

// ---- 8: option properties ----

Outcome criterion8() {
    const auto t0 = std::chrono::steady_clock::now();
    const SchwartzParams p(2.0, 1.0, 0.05, 0.5);
    const Schedule s(0.0, 1.0, 52);
    const auto rm = return_moments(p, s);
    const SeriesMoments mp(rm, pricing_expansion(rm, 25));
    const double D = 0.98;

    McConfig mc;
    mc.n_paths = 100000;
    mc.seed = 8;
    mc.law = McLaw::independent_returns;
    const auto x = simulate_rv(p, s, mc);

    std::string detail;
    bool all = true;
    for (double rho : {1.0, 0.5}) {
        const double E = mp.moment(rho);
        std::vector<double> K(10), P(10);
        for (int i = 0; i < 10; ++i) {
            OptionSpec sp;
            sp.rho = rho;
            sp.discount = D;
            sp.strike = K[i] = (0.25 + 1.75 * i / 9) * E;
            P[i] = call_price(sp, mp).value;
        }
        int shape = 0;
        double worst_convex = 0.0, worst_bound = 0.0;
        for (int i = 0; i < 10; ++i) {
            const double lo = std::max(D * (E - K[i]), 0.0), hi = D * E;
            // Numerical allowance on the bounds, the convexity tolerance scaled by E.
            const double miss = std::max(lo - P[i], P[i] - hi) / E;
            worst_bound = std::max(worst_bound, miss);
            bool ok = miss <= 1e-8;
            if (i > 0)
                ok = ok && P[i] < P[i - 1];
            if (i > 1) {
                const double second = P[i] - 2 * P[i - 1] + P[i - 2];
                worst_convex = std::min(worst_convex, second);
                ok = ok && second >= -1e-8;
            }
            shape += ok;
        }

        double worst_ab = 0.0;
        for (int i : {2, 4, 6})
            for (auto [a, b] : {std::pair{0.5, 0.25}, std::pair{1.0, 0.5}, std::pair{2.5, 0.5}, std::pair{1.0, 0.0}}) {
                OptionSpec sp;
                sp.rho = rho;
                sp.discount = D;
                sp.strike = K[i];
                sp.a = a;
                sp.b = b;
                worst_ab = std::max(worst_ab, rel(call_price(sp, mp).value, P[i]));
            }

        int mc_ok = 0;
        double worst_z = 0.0, worst_gap = 0.0;
        for (double mult : {0.5, 1.0, 1.5}) {
            OptionSpec sp;
            sp.rho = rho;
            sp.discount = D;
            sp.strike = mult * E;
            const auto est = estimate_call(x, rho, sp.strike, D);
            // No paying path gives a zero standard error; z is then infinite unless the gap is zero.
            const double gap = call_price(sp, mp).value - est.mean;
            const double z = gap == 0.0 ? 0.0 : gap / est.std_error;
            worst_gap = std::max(worst_gap, std::abs(gap) / E);
            mc_ok += std::abs(z) < 3.0;
            if (std::abs(z) > std::abs(worst_z))
                worst_z = z;
        }
        all = all && shape == 10 && worst_ab <= 1e-6 && mc_ok == 3;
        detail += fmt("rho=%.1f: shape %d/10 (bound miss %.2g E, min 2nd diff %.2g), (a,b) worst rel %.2g, "
                      "MC %d/3 worst z %.2f gap %.2g E; ",
                      rho, shape, worst_bound, worst_convex, worst_ab, mc_ok, worst_z, worst_gap);
    }
    const double t = seconds_since(t0);
    return {all && t < 300.0, detail + fmt("%.1f s", t)};
}

// ---- 9: timing ----

Outcome criterion9() {
    const SchwartzParams p(2.0, 0.6, 0.1, 3.0);
    const Schedule s(0.0, 1.0, 252);
    std::vector<double> times;
    double sink = 0.0;
    for (int rep = 0; rep < 51; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto rm = return_moments(p, s);
        sink += vol_swap_tv(rm, default_expansion(rm, 3)).strike;
        times.push_back(seconds_since(t0));
    }
    std::nth_element(times.begin(), times.begin() + 25, times.end());
    const double quote = times[25];
    const double worst_quote = *std::max_element(times.begin(), times.end());

    const auto t0 = std::chrono::steady_clock::now();
    McConfig mc;
    mc.n_paths = 100000;
    sink += estimate_swap(simulate_rv(p, s, mc), 0.5).mean;
    const double sim = seconds_since(t0);
    return {worst_quote < 0.010 && sim >= 100 * quote,
            fmt("quote median %.3g ms (max %.3g ms), MC %.3g ms, ratio %.0f%s", 1e3 * quote, 1e3 * worst_quote,
                1e3 * sim, sim / quote, std::isfinite(sink) ? "" : " (non-finite)")};
}

const std::pair<const char*, Outcome (*)()> kCriteria[] = {
    {"truncation bound table", criterion1},   {"K = 3 sufficiency", criterion2},
    {"moment identities", criterion3},           {"density normalization and histogram", criterion4},
    {"swap prices against simulation", criterion5}, {"specialization identities", criterion6},
    {"vega against finite differences", criterion7}, {"option properties", criterion8},
    {"performance", criterion9}};

} // namespace

int main(int argc, char** argv) {
    std::vector<int> chosen;
    for (int i = 1; i < argc; ++i)
        chosen.push_back(std::atoi(argv[i]));
    if (chosen.empty())
        for (int i = 1; i <= 9; ++i)
            chosen.push_back(i);
    int failed = 0;
    for (int n : chosen) {
        if (n < 1 || n > 9) {
            std::fprintf(stderr, "no criterion %d\n", n);
            return 2;
        }
        const auto& [name, fn] = kCriteria[n - 1];
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed ? 1 : 0;
}
