#include "volswap/model.hpp"

#include "volswap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace volswap {

namespace {
constexpr double kVarianceUnits = 1e4; // 100^2
}

SchwartzParams::SchwartzParams(double s0, double mu, double sigma, double kappa)
    : s0_(s0), mu_(mu), sigma_(sigma), kappa_(kappa) {
    if (!(s0 > 0.0) || !std::isfinite(s0))
        throw InvalidParameter("S0 must be positive and finite");
    if (!std::isfinite(mu))
        throw InvalidParameter("mu must be finite");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw InvalidParameter("sigma must be positive and finite");
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw InvalidParameter("kappa must be positive: the kappa -> 0 Brownian limit is not supported");
}

double SchwartzParams::x0() const { return std::log(s0_); }

Schedule::Schedule(double t1, double T, int n_obs) : t1_(t1), T_(T), n_obs_(n_obs) {
    if (!(t1 >= 0.0) || !std::isfinite(t1))
        throw InvalidParameter("t1 must be nonnegative");
    if (!(T > 0.0) || !std::isfinite(T))
        throw InvalidParameter("T must be positive");
    if (n_obs < 2)
        throw InvalidParameter("N must be at least 2");
    dt_ = T / (n_obs - 1);
    times_.resize(n_obs);
    for (int i = 0; i < n_obs; ++i)
        times_[i] = t1 + i * dt_;
    times_.back() = t1 + T;
}

bool ReturnMoments::is_constant_regime(double rel_tol) const {
    const double ref = sigma_N * sigma_N;
    return std::all_of(var_bar.begin(), var_bar.end(),
                       [&](double v) { return std::abs(v - ref) <= rel_tol * ref; });
}

double ou_mean(const SchwartzParams& p, double x0, double t) {
    if (!(t >= 0.0))
        throw DomainError("ou_mean: t must be nonnegative");
    const double e = std::exp(-p.kappa() * t);
    return e * x0 - std::expm1(-p.kappa() * t) * p.alpha();
}

double ou_variance(const SchwartzParams& p, double t) {
    if (!(t >= 0.0))
        throw DomainError("ou_variance: t must be nonnegative");
    const double k = p.kappa();
    return -p.sigma() * p.sigma() / (2.0 * k) * std::expm1(-2.0 * k * t);
}

double ou_covariance(const SchwartzParams& p, double t_prev, double t) {
    if (!(t_prev >= 0.0) || !(t >= t_prev))
        throw DomainError("ou_covariance: need 0 <= t_prev <= t");
    return ou_variance(p, t_prev) * std::exp(-p.kappa() * (t - t_prev));
}

ReturnMoments return_moments(const SchwartzParams& p, const Schedule& s) {
    const auto& t = s.times();
    const double k = p.kappa();
    const double v = p.sigma() * p.sigma() / (2.0 * k);
    const double gap = p.alpha() - p.x0();
    const std::size_t n = t.size() - 1;
    std::vector<double> mu(n), var(n);
    for (std::size_t i = 0; i < n; ++i) {
        // With u = 1 - exp(-k dt) and e = exp(-k t_{i-1}):
        //   mean difference        = (alpha - x0) e u
        //   Var_i + Var_{i-1} - 2 Cov = v u (2 - e^2 u)
        // Both avoid differencing nearly equal quantities.
        const double u = -std::expm1(-k * (t[i + 1] - t[i]));
        const double e = std::exp(-k * t[i]);
        mu[i] = gap * e * u;
        var[i] = v * u * (2.0 - e * e * u);
    }
    return make_return_moments(std::move(mu), std::move(var), s.T());
}

ReturnMoments make_return_moments(std::vector<double> mu_bar, std::vector<double> var_bar, double T) {
    if (mu_bar.empty() || mu_bar.size() != var_bar.size())
        throw InvalidParameter("need matching, nonempty interval vectors");
    if (!(T > 0.0))
        throw InvalidParameter("T must be positive");
    ReturnMoments rm;
    const std::size_t n = mu_bar.size();
    rm.delta_bar.resize(n);
    rm.alpha_bar.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = var_bar[i];
        if (!(v >= 0.0) || !std::isfinite(v))
            throw InvalidParameter("interval variances must be finite and nonnegative");
        if (v == 0.0) {
            if (mu_bar[i] != 0.0)
                throw DegenerateInterval("interval " + std::to_string(i + 2) +
                                         " has zero variance but nonzero mean");
            rm.delta_bar[i] = 0.0;
        } else {
            rm.delta_bar[i] = mu_bar[i] * mu_bar[i] / v;
        }
        rm.alpha_bar[i] = kVarianceUnits / T * v;
    }
    rm.nu = static_cast<double>(n);
    rm.eta = rm.nu;
    rm.sigma_N = std::sqrt(var_bar.back());
    double s = 0.0;
    for (double m : mu_bar)
        s += m * m;
    if (s == 0.0)
        rm.lambda_bar = 0.0;
    else if (var_bar.back() == 0.0)
        throw DegenerateInterval("last interval has zero variance; lambda is undefined");
    else
        rm.lambda_bar = s / var_bar.back();
    rm.T = T;
    rm.mu_bar = std::move(mu_bar);
    rm.var_bar = std::move(var_bar);
    return rm;
}

ReturnMoments constant_regime(const ReturnMoments& rm) {
    std::vector<double> var(rm.var_bar.size(), rm.sigma_N * rm.sigma_N);
    return make_return_moments(rm.mu_bar, std::move(var), rm.T);
}

} // namespace volswap
