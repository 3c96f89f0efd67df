#pragma once

#include "volswap/model.hpp"

#include <cstdint>
#include <vector>

namespace volswap {

// Paths are split into n_streams contiguous lanes; each lane draws from its own
// counter-based sequence keyed by (seed, lane, path-in-lane, step), so results depend
// only on (model, schedule, n_paths, seed, n_streams) and never on thread count.
// Worker threads default to hardware concurrency, capped by VOLSWAP_THREADS.
// exact_path simulates X with exact OU transitions, so successive log-returns carry
// the process's serial correlation. independent_returns draws each return
// independently as N(mu_i, var_i): the law the chi-square decomposition of RV assumes.
enum class McLaw { exact_path, independent_returns };

struct McConfig {
    std::int64_t n_paths = 100000;
    std::uint64_t seed = 1;
    int n_streams = 1;
    int substeps = 1; // exact sub-steps per observation interval; does not change the law
    McLaw law = McLaw::exact_path;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t n = 0;
};

struct Histogram {
    std::vector<double> edges;   // n_bins + 1
    std::vector<double> density; // normalized over in-range samples (area 1)
    std::vector<std::int64_t> counts;
    std::int64_t n_total = 0;
};

// Standard normal draw number `counter` of the sequence identified by key.
double counter_normal(std::uint64_t key, std::uint64_t counter);
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t lane, std::uint64_t path);

int worker_threads();

std::vector<double> simulate_rv(const SchwartzParams& params, const Schedule& schedule, const McConfig& mc);

// Log prices X at the given increasing times (from X_0 = ln S0 at time 0), row-major
// n_paths x times.size().
std::vector<double> simulate_log_prices(const SchwartzParams& params, const std::vector<double>& times,
                                        const McConfig& mc);

McEstimate estimate_swap(const std::vector<double>& samples, double rho);
McEstimate estimate_call(const std::vector<double>& samples, double rho, double strike, double discount);
Histogram histogram(const std::vector<double>& samples, int n_bins, double lo, double hi);

// Order-fixed pairwise sum, identical for identical input.
double pairwise_sum(const double* x, std::size_t n);

} // namespace volswap
