#include "volswap/mc.hpp"

#include "volswap/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>
#include <thread>

namespace volswap {

namespace {

constexpr double kVar = 1e4;

std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// (0, 1]
double unit(std::uint64_t bits) { return ((bits >> 11) + 1) * 0x1.0p-53; }

struct Transition {
    double decay, drift, sd;
};

Transition transition(const SchwartzParams& p, double dt) {
    const double e = std::exp(-p.kappa() * dt);
    const double var = -p.sigma() * p.sigma() / (2.0 * p.kappa()) * std::expm1(-2.0 * p.kappa() * dt);
    return {e, -std::expm1(-p.kappa() * dt) * p.alpha(), std::sqrt(var)};
}

// Normal draws for one path, consumed in order; equal to counter_normal(key, 0), (key, 1), ...
// but each Box-Muller pair is computed once.
class PathNormals {
public:
    explicit PathNormals(std::uint64_t key) : key_(key) {}
    double next() {
        if (n_ & 1) {
            ++n_;
            return spare_;
        }
        const std::uint64_t q = n_ >> 1;
        const double r = std::sqrt(-2.0 * std::log(unit(mix(key_ ^ mix(2 * q)))));
        const double th = 2.0 * std::numbers::pi * unit(mix(key_ ^ mix(2 * q + 1)));
        spare_ = r * std::sin(th);
        ++n_;
        return r * std::cos(th);
    }

private:
    std::uint64_t key_;
    std::uint64_t n_ = 0;
    double spare_ = 0.0;
};

void check(const McConfig& mc) {
    if (mc.n_paths < 1)
        throw InvalidParameter("n_paths must be at least 1");
    if (mc.n_streams < 1)
        throw InvalidParameter("n_streams must be at least 1");
    if (mc.substeps < 1)
        throw InvalidParameter("substeps must be at least 1");
}

// Runs body(lane, first_path, end_path) for every lane on the worker pool.
template <class Body>
void for_each_lane(const McConfig& mc, Body&& body) {
    const std::int64_t lanes = mc.n_streams;
    const int workers = static_cast<int>(std::min<std::int64_t>(worker_threads(), lanes));
    std::atomic<std::int64_t> next{0};
    auto run = [&] {
        for (std::int64_t s; (s = next.fetch_add(1)) < lanes;) {
            const std::int64_t lo = mc.n_paths * s / lanes;
            const std::int64_t hi = mc.n_paths * (s + 1) / lanes;
            body(static_cast<std::uint64_t>(s), lo, hi);
        }
    };
    if (workers <= 1) {
        run();
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int i = 1; i < workers; ++i)
        pool.emplace_back(run);
    run();
    for (auto& t : pool)
        t.join();
}

} // namespace

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t lane, std::uint64_t path) {
    return mix(mix(mix(seed) ^ lane) ^ path);
}

double counter_normal(std::uint64_t key, std::uint64_t counter) {
    // Box-Muller on the pair shared by counters 2q and 2q+1.
    const std::uint64_t q = counter >> 1;
    const double u1 = unit(mix(key ^ mix(2 * q)));
    const double u2 = unit(mix(key ^ mix(2 * q + 1)));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    return (counter & 1) ? r * std::sin(th) : r * std::cos(th);
}

int worker_threads() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1)
        n = 1;
    if (const char* env = std::getenv("VOLSWAP_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1)
            n = std::min<long>(n, cap);
    }
    return n;
}

std::vector<double> simulate_rv(const SchwartzParams& params, const Schedule& schedule, const McConfig& mc) {
    check(mc);
    if (mc.law == McLaw::independent_returns) {
        const ReturnMoments rm = return_moments(params, schedule);
        std::vector<double> sd(rm.var_bar.size());
        for (std::size_t i = 0; i < sd.size(); ++i)
            sd[i] = std::sqrt(rm.var_bar[i]);
        const double scale = kVar / schedule.T();
        std::vector<double> out(mc.n_paths);
        for_each_lane(mc, [&](std::uint64_t lane, std::int64_t lo, std::int64_t hi) {
            for (std::int64_t p = lo; p < hi; ++p) {
                PathNormals z(stream_key(mc.seed, lane, static_cast<std::uint64_t>(p - lo)));
                double acc = 0.0;
                for (std::size_t i = 0; i < sd.size(); ++i) {
                    const double r = rm.mu_bar[i] + sd[i] * z.next();
                    acc += r * r;
                }
                out[p] = scale * acc;
            }
        });
        return out;
    }
    const auto& t = schedule.times();
    const Transition lead = transition(params, t.front());
    std::vector<Transition> steps;
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        steps.push_back(transition(params, (t[i + 1] - t[i]) / mc.substeps));
    const double x0 = params.x0();
    const double scale = kVar / schedule.T();
    std::vector<double> out(mc.n_paths);
    for_each_lane(mc, [&](std::uint64_t lane, std::int64_t lo, std::int64_t hi) {
        for (std::int64_t p = lo; p < hi; ++p) {
            PathNormals z(stream_key(mc.seed, lane, static_cast<std::uint64_t>(p - lo)));
            double x = x0;
            if (t.front() > 0.0)
                x = x * lead.decay + lead.drift + lead.sd * z.next();
            double acc = 0.0;
            for (const auto& s : steps) {
                double y = x;
                for (int k = 0; k < mc.substeps; ++k)
                    y = y * s.decay + s.drift + s.sd * z.next();
                const double r = y - x;
                acc += r * r;
                x = y;
            }
            out[p] = scale * acc;
        }
    });
    return out;
}

std::vector<double> simulate_log_prices(const SchwartzParams& params, const std::vector<double>& times,
                                        const McConfig& mc) {
    check(mc);
    if (times.empty())
        throw InvalidParameter("need at least one time");
    std::vector<Transition> steps;
    double prev = 0.0;
    for (double ti : times) {
        if (!(ti >= prev))
            throw InvalidParameter("times must be nondecreasing and nonnegative");
        steps.push_back(transition(params, (ti - prev) / mc.substeps));
        prev = ti;
    }
    const std::size_t m = times.size();
    const double x0 = params.x0();
    std::vector<double> out(static_cast<std::size_t>(mc.n_paths) * m);
    for_each_lane(mc, [&](std::uint64_t lane, std::int64_t lo, std::int64_t hi) {
        for (std::int64_t p = lo; p < hi; ++p) {
            PathNormals z(stream_key(mc.seed, lane, static_cast<std::uint64_t>(p - lo)));
            double x = x0;
            for (std::size_t i = 0; i < m; ++i) {
                for (int k = 0; k < mc.substeps; ++k)
                    x = x * steps[i].decay + steps[i].drift + steps[i].sd * z.next();
                out[static_cast<std::size_t>(p) * m + i] = x;
            }
        }
    });
    return out;
}

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += x[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

namespace {

McEstimate summarize(const std::vector<double>& v) {
    McEstimate e;
    e.n = static_cast<std::int64_t>(v.size());
    if (v.empty())
        throw InvalidParameter("no samples");
    e.mean = pairwise_sum(v.data(), v.size()) / v.size();
    if (v.size() > 1) {
        std::vector<double> d(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            d[i] = (v[i] - e.mean) * (v[i] - e.mean);
        e.std_error = std::sqrt(pairwise_sum(d.data(), d.size()) / (v.size() - 1) / v.size());
    }
    return e;
}

double power(double x, double rho) { return rho == 1.0 ? x : (rho == 0.5 ? std::sqrt(x) : std::pow(x, rho)); }

} // namespace

McEstimate estimate_swap(const std::vector<double>& samples, double rho) {
    std::vector<double> v(samples.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = power(samples[i], rho);
    return summarize(v);
}

McEstimate estimate_call(const std::vector<double>& samples, double rho, double strike, double discount) {
    std::vector<double> v(samples.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = discount * std::max(power(samples[i], rho) - strike, 0.0);
    return summarize(v);
}

Histogram histogram(const std::vector<double>& samples, int n_bins, double lo, double hi) {
    if (n_bins < 1)
        throw InvalidParameter("need at least one bin");
    if (!(hi > lo))
        throw InvalidParameter("histogram range must be nonempty");
    Histogram h;
    h.n_total = static_cast<std::int64_t>(samples.size());
    h.edges.resize(n_bins + 1);
    const double w = (hi - lo) / n_bins;
    for (int i = 0; i <= n_bins; ++i)
        h.edges[i] = lo + i * w;
    h.edges.back() = hi;
    h.counts.assign(n_bins, 0);
    std::int64_t inside = 0;
    for (double x : samples) {
        if (x < lo || x > hi)
            continue;
        int b = static_cast<int>((x - lo) / w);
        b = std::clamp(b, 0, n_bins - 1);
        ++h.counts[b];
        ++inside;
    }
    h.density.assign(n_bins, 0.0);
    if (inside > 0)
        for (int i = 0; i < n_bins; ++i)
            h.density[i] = static_cast<double>(h.counts[i]) / (static_cast<double>(inside) * (h.edges[i + 1] - h.edges[i]));
    return h;
}

} // namespace volswap
