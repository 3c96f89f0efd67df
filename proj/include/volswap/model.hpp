#pragma once

#include <cstddef>
#include <vector>

namespace volswap {

// Risk-neutral parameters of the one-factor mean-reverting log-price model
//   dX = kappa (alpha - X) dt + sigma dW,  X = ln S,  alpha = mu - sigma^2 / (2 kappa).
class SchwartzParams {
public:
    SchwartzParams(double s0, double mu, double sigma, double kappa);

    double s0() const { return s0_; }
    double mu() const { return mu_; }
    double sigma() const { return sigma_; }
    double kappa() const { return kappa_; }
    double alpha() const { return mu_ - sigma_ * sigma_ / (2.0 * kappa_); }
    double x0() const;

private:
    double s0_, mu_, sigma_, kappa_;
};

// Uniform observation grid t_i = t1 + (i-1) dt, i = 1..N, dt = T/(N-1).
class Schedule {
public:
    Schedule(double t1, double T, int n_obs);

    double t1() const { return t1_; }
    double T() const { return T_; }
    int n_obs() const { return n_obs_; }
    double dt() const { return dt_; }
    const std::vector<double>& times() const { return times_; }

private:
    double t1_, T_;
    int n_obs_;
    double dt_;
    std::vector<double> times_;
};

// Per-interval log-return statistics. Vectors are indexed by interval,
// element 0 being the return over [t_1, t_2].
struct ReturnMoments {
    std::vector<double> mu_bar;
    std::vector<double> var_bar;
    std::vector<double> delta_bar;
    std::vector<double> alpha_bar;
    double nu = 0.0;
    double eta = 0.0;
    double lambda_bar = 0.0;
    double sigma_N = 0.0;
    double T = 0.0;

    std::size_t intervals() const { return mu_bar.size(); }
    // True when every interval shares the variance of the last one to within rel_tol.
    bool is_constant_regime(double rel_tol = 1e-12) const;
};

double ou_mean(const SchwartzParams& p, double x0, double t);
double ou_variance(const SchwartzParams& p, double t);
double ou_covariance(const SchwartzParams& p, double t_prev, double t);

ReturnMoments return_moments(const SchwartzParams& p, const Schedule& s);

// Builds the statistics directly from per-interval means and variances; used for
// synthetic instances and by return_moments itself.
ReturnMoments make_return_moments(std::vector<double> mu_bar, std::vector<double> var_bar, double T);

// Constant-regime summary (eta, lambda, sigma_N) with every interval variance replaced by sigma_N^2.
ReturnMoments constant_regime(const ReturnMoments& rm);

} // namespace volswap
