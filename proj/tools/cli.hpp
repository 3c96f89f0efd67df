#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace volswap::cli {

inline constexpr const char* kVersion = "0.1.0";

// Every setting of one invocation. NaN (or 0 where noted) means "derive from the model".
struct RunConfig {
    std::string command;

    double s0 = 2.0;
    double mu = 0.6;
    double sigma = 0.1;
    double kappa = 0.5;
    double t1 = 0.0;
    double T = 1.0;
    int N = 0; // 0: 52, or 252 for bound-table

    std::string contract = "vol-swap";
    std::string method = "series";
    std::string expansion = "default"; // default | mean-matched
    int terms = 0;                     // 0: 3 for swap prices, 25 for densities
    double beta = std::numeric_limits<double>::quiet_NaN();
    double mu0 = std::numeric_limits<double>::quiet_NaN();
    bool certify = false;
    double c = std::numeric_limits<double>::quiet_NaN();
    double eta = std::numeric_limits<double>::quiet_NaN();
    double lambda = std::numeric_limits<double>::quiet_NaN();
    double sigma_n = std::numeric_limits<double>::quiet_NaN();
    double strike = std::numeric_limits<double>::quiet_NaN();
    double a = 0.0;
    double b = 0.0;
    double rate = 0.0;
    int option_terms = 40;
    double scale = 0.0;
    bool vega = false;

    std::int64_t validate_mc = 0;
    std::int64_t paths = 100000;
    std::uint64_t seed = 1;
    int streams = 1;
    std::string mc_law = "exact"; // exact | independent

    double y_min = std::numeric_limits<double>::quiet_NaN();
    double y_max = std::numeric_limits<double>::quiet_NaN();
    int points = 401;

    std::vector<double> kappas{0.5, 1.5, 3.0};
    std::vector<double> sigmas{0.05, 0.06, 0.07, 0.08, 0.09, 0.10};
    int k_max = 3;
    double ell = 0.5;

    std::string target = "all";
    std::string out_dir = "reproduce_out";
    double fig3_sigma = 0.05;

    std::string format = "csv";
    std::string output; // empty: stdout
};

// Canonical key=value listing (17 significant digits), the same keys --config accepts.
// The command itself and unset (NaN) values are left out.
std::vector<std::pair<std::string, std::string>> to_key_values(const RunConfig& cfg);
std::string serialize(const RunConfig& cfg);
// Parses key=value text as a --config file would be read.
RunConfig parse_config_text(const std::string& text);
// FNV-1a over "command=<command>\n" followed by serialize(cfg).
std::uint64_t config_hash(const RunConfig& cfg);

// Exit codes: 0 success, 2 invalid input, 3 convergence or precondition failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace volswap::cli
