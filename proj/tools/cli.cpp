#include "cli.hpp"

#include "volswap/errors.hpp"
#include "volswap/mc.hpp"
#include "volswap/model.hpp"
#include "volswap/options.hpp"
#include "volswap/rvdist.hpp"
#include "volswap/swaps.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <variant>

namespace volswap::cli {

namespace {

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

using Meta = std::vector<std::pair<std::string, std::string>>;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + fmt17(v[i]);
    return s;
}

void check_finite(const Table& t) {
    for (const auto& row : t.rows)
        for (std::size_t j = 0; j < row.size(); ++j)
            if (const double* x = std::get_if<double>(&row[j]); x && !std::isfinite(*x))
                throw NoConvergence("non-finite value in column " + t.columns[j]);
}

void write_csv(std::ostream& os, const Table& t, const Meta& meta) {
    for (const auto& [k, v] : meta)
        os << "# " << k << '=' << v << '\n';
    for (std::size_t j = 0; j < t.columns.size(); ++j)
        os << (j ? "," : "") << t.columns[j];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j)
                os << ',';
            std::visit(
                [&](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, double>)
                        os << fmt17(v);
                    else if constexpr (std::is_same_v<V, std::int64_t> || std::is_same_v<V, std::string>)
                        os << v;
                },
                row[j]);
        }
        os << '\n';
    }
}

nlohmann::ordered_json row_json(const Table& t, const std::vector<Cell>& row) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (std::size_t j = 0; j < row.size(); ++j)
        std::visit(
            [&](const auto& v) {
                using V = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<V, std::monostate>)
                    o[t.columns[j]] = nullptr;
                else
                    o[t.columns[j]] = v;
            },
            row[j]);
    return o;
}

// A single-row table (a price quote) is written as one flat object.
void write_json(std::ostream& os, const Table& t, const Meta& meta, bool single) {
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta)
        m[k] = v;
    nlohmann::ordered_json doc;
    if (single && t.rows.size() == 1) {
        doc = row_json(t, t.rows[0]);
        doc["meta"] = m;
    } else {
        doc["meta"] = m;
        doc["columns"] = t.columns;
        doc["rows"] = nlohmann::ordered_json::array();
        for (const auto& row : t.rows)
            doc["rows"].push_back(row_json(t, row));
    }
    os << doc.dump(2) << '\n';
}

void write_table(std::ostream& os, const Table& t, const Meta& meta, const std::string& format, bool single) {
    check_finite(t);
    if (format == "json")
        write_json(os, t, meta, single);
    else
        write_csv(os, t, meta);
}

Meta make_meta(const RunConfig& c) {
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, config_hash(c));
    Meta m{{"tool", "volswap"}, {"version", kVersion}, {"command", c.command}, {"config_hash", hash}};
    for (auto& kv : to_key_values(c))
        m.push_back(std::move(kv));
    return m;
}

// ---- model plumbing ----

struct Market {
    SchwartzParams params;
    Schedule schedule;
    ReturnMoments rm;
};

Market market(double s0, double mu, double sigma, double kappa, double t1, double T, int N) {
    SchwartzParams p(s0, mu, sigma, kappa);
    Schedule s(t1, T, N);
    auto rm = return_moments(p, s);
    return {p, s, std::move(rm)};
}

Market market(const RunConfig& c, int default_N) {
    return market(c.s0, c.mu, c.sigma, c.kappa, c.t1, c.T, c.N > 0 ? c.N : default_N);
}

ExpansionConfig expansion(const RunConfig& c, const ReturnMoments& rm, int k) {
    auto cfg = c.expansion == "mean-matched" ? pricing_expansion(rm, k) : default_expansion(rm, k);
    if (!std::isnan(c.beta))
        cfg.beta_bar = c.beta;
    if (!std::isnan(c.mu0))
        cfg.mu0_bar = c.mu0;
    return cfg;
}

McConfig mc_config(const RunConfig& c, std::int64_t paths) {
    McConfig m;
    m.n_paths = paths;
    m.seed = c.seed;
    m.n_streams = c.streams;
    m.law = c.mc_law == "independent" ? McLaw::independent_returns : McLaw::exact_path;
    return m;
}

double rv_variance(const ReturnMoments& rm) {
    double v = 0.0;
    for (std::size_t i = 0; i < rm.intervals(); ++i)
        v += 2.0 * rm.alpha_bar[i] * rm.alpha_bar[i] * (1.0 + 2.0 * rm.delta_bar[i]);
    return v;
}

// ---- price ----

Table cmd_price(const RunConfig& c, std::ostream& err) {
    const bool call = c.contract == "vol-call" || c.contract == "var-call";
    const bool vol = c.contract == "vol-swap" || c.contract == "vol-call";
    const double rho = vol ? 0.5 : 1.0;

    std::optional<Market> mk;
    auto model = [&]() -> const Market& {
        if (!mk)
            mk = market(c, 52);
        return *mk;
    };
    auto eta = [&] { return std::isnan(c.eta) ? model().rm.eta : c.eta; };
    auto sigma_n = [&] { return std::isnan(c.sigma_n) ? model().rm.sigma_N : c.sigma_n; };
    auto lambda = [&] {
        if (c.method == "central")
            return 0.0;
        return std::isnan(c.lambda) ? model().rm.lambda_bar : c.lambda;
    };
    const double horizon = c.T;

    Table t;
    t.columns = {"contract", "method", "value", "terms", "bound"};
    std::vector<Cell> row{c.contract, c.method};
    std::optional<double> vega;
    double value = 0.0;
    double discount = 1.0;

    if (!call) {
        SwapQuote q;
        if (c.method == "series") {
            const auto& m = model();
            const auto cfg = expansion(c, m.rm, c.terms > 0 ? c.terms : 3);
            std::string why;
            if (c.certify && !bound_preconditions(m.rm, cfg, &why))
                throw PreconditionError("error bound not certified: " + why);
            q = vol ? vol_swap_tv(m.rm, cfg) : var_swap_tv(m.rm, cfg);
            if (c.vega)
                vega = vol ? vega_vol_swap(m.rm, m.params) : vega_var_swap(m.rm, m.params);
        } else if (c.method == "const-c") {
            const double n = eta();
            if (vol)
                q = vol_swap_const_c(std::isnan(c.c) ? sigma_n() * sigma_n() : c.c, n, horizon);
            else
                q = var_swap_const_c(std::isnan(c.c) ? sigma_n() : c.c, n, horizon);
            if (c.vega)
                throw RegimeError("vega is not offered for the const-c method");
        } else {
            const double e = eta(), l = lambda(), sn = sigma_n();
            if (c.method == "central")
                q = vol ? vol_swap_central(e, sn, horizon) : var_swap_central(e, sn, horizon);
            else
                q = vol ? vol_swap_ncchi(e, l, sn, horizon) : var_swap_ncchi(e, l, sn, horizon);
            if (c.vega)
                vega = vol ? vega_vol_swap(e, l, sn, c.sigma, horizon) : vega_var_swap(e, l, sn, c.sigma, horizon);
        }
        value = q.strike;
        row.push_back(q.strike);
        row.push_back(static_cast<std::int64_t>(q.terms_used));
        row.push_back(q.error_bound ? Cell{*q.error_bound} : Cell{});
    } else {
        if (std::isnan(c.strike))
            throw InvalidParameter(c.contract + " needs --strike");
        OptionSpec spec;
        spec.rho = rho;
        spec.strike = c.strike;
        spec.a = c.a;
        spec.b = c.b;
        spec.k_terms = c.option_terms;
        spec.scale = c.scale;
        spec.discount = discount = discount_flat(c.rate, c.t1 + c.T);
        std::unique_ptr<MomentProvider> mp;
        if (c.method == "series") {
            const auto& m = model();
            mp = std::make_unique<SeriesMoments>(m.rm, pricing_expansion(m.rm, c.terms > 0 ? c.terms : 25));
        } else if (c.method == "ncchi" || c.method == "central") {
            mp = std::make_unique<NcchiMoments>(eta(), lambda(), sigma_n(), c.sigma, horizon);
        } else {
            throw InvalidParameter("options are priced with --method series, ncchi or central");
        }
        const auto r = call_price(spec, *mp);
        if (!r.converged)
            err << "warning: option series not converged after " << r.terms_used << " terms (last term "
                << fmt17(r.last_term) << ")\n";
        if (c.vega)
            vega = vega_call(spec, *mp);
        value = r.value;
        row.push_back(r.value);
        row.push_back(static_cast<std::int64_t>(r.terms_used));
        row.push_back(Cell{});
    }

    if (vega) {
        t.columns.push_back("vega");
        row.push_back(*vega);
    }
    if (c.validate_mc > 0) {
        const auto& m = model();
        const auto samples = simulate_rv(m.params, m.schedule, mc_config(c, c.validate_mc));
        const auto est = call ? estimate_call(samples, rho, c.strike, discount) : estimate_swap(samples, rho);
        t.columns.insert(t.columns.end(), {"mc_paths", "mc_mean", "mc_se", "mc_z"});
        row.push_back(static_cast<std::int64_t>(est.n));
        row.push_back(est.mean);
        row.push_back(est.std_error);
        row.push_back(est.std_error > 0.0 ? (value - est.mean) / est.std_error : 0.0);
    }
    t.rows.push_back(std::move(row));
    return t;
}

// ---- pdf ----

Table pdf_table(const RunConfig& c, const Market& m, double y_min, double y_max, int points,
                std::optional<int> tag_N = {}) {
    if (!(points >= 2) || !(y_max > y_min) || !(y_min >= 0.0))
        throw InvalidParameter("empty density grid: need points >= 2 and 0 <= y-min < y-max");
    const auto cfg = expansion(c, m.rm, c.terms > 0 ? c.terms : 25);
    const auto co = coeffs(m.rm, cfg);
    Table t;
    if (tag_N)
        t.columns.push_back("N");
    t.columns.insert(t.columns.end(), {"y", "density"});
    for (int i = 0; i < points; ++i) {
        const double y = y_min + (y_max - y_min) * i / (points - 1);
        // Negative truncation ripples are clamped for display only.
        const double f = y > 0.0 ? std::max(0.0, pdf(m.rm, cfg, co, y)) : 0.0;
        std::vector<Cell> row;
        if (tag_N)
            row.push_back(static_cast<std::int64_t>(*tag_N));
        row.push_back(y);
        row.push_back(f);
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table cmd_pdf(const RunConfig& c) {
    const auto m = market(c, 52);
    const double mean = rv_mean(m.rm), sd = std::sqrt(rv_variance(m.rm));
    const double lo = std::isnan(c.y_min) ? std::max(mean - 8.0 * sd, 0.0) : c.y_min;
    const double hi = std::isnan(c.y_max) ? mean + 10.0 * sd : c.y_max;
    return pdf_table(c, m, lo, hi, c.points);
}

// ---- bound table ----

Table cmd_bound_table(const RunConfig& c) {
    if (c.k_max < 0)
        throw InvalidParameter("k-max must be nonnegative");
    Table t;
    t.columns = {"kappa", "K", "sigma", "bound", "true_tail"};
    for (double kappa : c.kappas)
        for (int K = 0; K <= c.k_max; ++K)
            for (double sigma : c.sigmas) {
                const auto m = market(c.s0, c.mu, sigma, kappa, c.t1, c.T, c.N > 0 ? c.N : 252);
                const auto cfg = default_expansion(m.rm, K);
                std::string why;
                if (!bound_preconditions(m.rm, cfg, &why))
                    throw PreconditionError("truncation bound not available: " + why);
                t.rows.push_back({kappa, static_cast<std::int64_t>(K), sigma, truncation_bound(m.rm, cfg, c.ell, K),
                                  moment_tail(m.rm, cfg, c.ell, K)});
            }
    return t;
}

// ---- reproduce ----

Table fig1(const RunConfig& c) {
    const int Ns[] = {2, 3, 4, 5, 7, 10, 15, 22};
    double hi = 0.0;
    for (int N : Ns) {
        const auto m = market(2.0, 0.6, 0.1, 0.5, 0.0, 1.0, N);
        hi = std::max(hi, rv_mean(m.rm) + 8.0 * std::sqrt(rv_variance(m.rm)));
    }
    Table all;
    for (int N : Ns) {
        const auto m = market(2.0, 0.6, 0.1, 0.5, 0.0, 1.0, N);
        auto t = pdf_table(c, m, hi / 400.0, hi, 400, N);
        all.columns = t.columns;
        for (auto& r : t.rows)
            all.rows.push_back(std::move(r));
    }
    return all;
}

// Bin average of the density by 5-point Gauss-Legendre.
double bin_average(const std::function<double(double)>& f, double lo, double hi) {
    static const double x[] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                               0.9061798459386640};
    static const double w[] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
    double s = 0.0;
    for (int i = 0; i < 5; ++i)
        s += w[i] * f(0.5 * (lo + hi) + 0.5 * (hi - lo) * x[i]);
    return 0.5 * s;
}

Table fig2(const RunConfig& c) {
    Table t;
    // mc_se is the binomial error of the observed count; binom_se is the one implied by
    // the analytic bin probability, the right yardstick for testing the density.
    t.columns = {"N", "sigma", "bin_lo", "bin_hi", "pdf_mid", "pdf_bin", "mc_density", "mc_se", "binom_se"};
    for (int N : {52, 252})
        for (double sigma : {0.08, 0.10}) {
            const auto m = market(2.0, 0.6, sigma, 0.5, 0.0, 1.0, N);
            const auto cfg = expansion(c, m.rm, c.terms > 0 ? c.terms : 25);
            const auto co = coeffs(m.rm, cfg);
            auto f = [&](double y) { return y > 0.0 ? pdf(m.rm, cfg, co, y) : 0.0; };
            const double mean = rv_mean(m.rm), sd = std::sqrt(rv_variance(m.rm));
            const double lo = std::max(0.0, mean - 5.0 * sd), hi = mean + 6.0 * sd;
            const auto samples = simulate_rv(m.params, m.schedule, mc_config(c, c.paths));
            const auto h = histogram(samples, 100, lo, hi);
            for (std::size_t b = 0; b < h.counts.size(); ++b) {
                const double w = h.edges[b + 1] - h.edges[b];
                const double p = static_cast<double>(h.counts[b]) / h.n_total;
                const double se = std::sqrt(p * (1.0 - p) / h.n_total) / w;
                const double avg = bin_average(f, h.edges[b], h.edges[b + 1]);
                const double q = std::clamp(avg * w, 0.0, 1.0);
                const double null_se = std::sqrt(q * (1.0 - q) / h.n_total) / w;
                t.rows.push_back({static_cast<std::int64_t>(N), sigma, h.edges[b], h.edges[b + 1],
                                  f(0.5 * (h.edges[b] + h.edges[b + 1])), avg, p / w, se, null_se});
            }
        }
    return t;
}

Table fig3(const RunConfig& c) {
    Table t;
    t.columns = {"kappa", "n_paths", "analytic", "mc_mean", "mc_var", "mc_se"};
    for (double kappa : {0.5, 1.5, 3.0}) {
        const auto m = market(2.0, 0.6, c.fig3_sigma, kappa, 0.0, 1.0, 252);
        const double analytic = vol_swap_tv(m.rm, default_expansion(m.rm, 3)).strike;
        // With one stream every path has its own key, so a prefix of the largest run
        // is exactly the smaller run.
        auto mc = mc_config(c, c.paths);
        mc.n_streams = 1;
        const auto samples = simulate_rv(m.params, m.schedule, mc);
        for (std::int64_t n : {1000, 2000, 5000, 10000, 20000, 50000, 100000}) {
            if (n > c.paths)
                break;
            const std::vector<double> prefix(samples.begin(), samples.begin() + n);
            const auto est = estimate_swap(prefix, 0.5);
            t.rows.push_back({kappa, n, analytic, est.mean, est.std_error * est.std_error, est.std_error});
        }
    }
    return t;
}

void swap_row(const RunConfig& c, const Market& m, std::vector<Cell>& row) {
    const auto cfg = pricing_expansion(m.rm, 25);
    const auto samples = simulate_rv(m.params, m.schedule, mc_config(c, c.paths));
    const auto v = estimate_swap(samples, 0.5);
    const auto w = estimate_swap(samples, 1.0);
    row.insert(row.end(), {vol_swap_tv(m.rm, cfg).strike, v.mean, v.std_error, var_swap_tv(m.rm, cfg).strike, w.mean,
                           w.std_error});
}

const std::vector<std::string> kSwapCols = {"vol_analytic", "vol_mc", "vol_se", "var_analytic", "var_mc", "var_se"};

Table fig4(const RunConfig& c) {
    Table t;
    t.columns = {"kappa", "sigma"};
    t.columns.insert(t.columns.end(), kSwapCols.begin(), kSwapCols.end());
    for (double kappa : {0.5, 1.5, 3.0})
        for (int i = 0; i < 10; ++i) {
            const double sigma = 0.005 + (0.1 - 0.005) * i / 9.0;
            std::vector<Cell> row{kappa, sigma};
            swap_row(c, market(2.0, 1.0, sigma, kappa, 0.0, 1.0, 52), row);
            t.rows.push_back(std::move(row));
        }
    return t;
}

Table fig5(const RunConfig& c) {
    Table t;
    t.columns = {"sigma", "N"};
    t.columns.insert(t.columns.end(), kSwapCols.begin(), kSwapCols.end());
    for (double sigma : {0.05, 0.06, 0.07})
        for (int N : {2, 5, 13, 26, 52, 126, 252}) {
            std::vector<Cell> row{sigma, static_cast<std::int64_t>(N)};
            swap_row(c, market(2.0, 1.0, sigma, 0.5, 0.0, 1.0, N), row);
            t.rows.push_back(std::move(row));
        }
    return t;
}

Table table1(const RunConfig& c) {
    RunConfig d;
    d.command = "bound-table";
    d.format = c.format;
    return cmd_bound_table(d);
}

int cmd_reproduce(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const std::vector<std::pair<std::string, std::function<Table(const RunConfig&)>>> targets = {
        {"fig1", fig1}, {"fig2", fig2}, {"fig3", fig3}, {"fig4", fig4}, {"fig5", fig5}, {"table1", table1}};
    std::vector<std::string> chosen;
    for (const auto& [name, fn] : targets)
        if (c.target == "all" || c.target == name)
            chosen.push_back(name);

    namespace fs = std::filesystem;
    const fs::path dir(c.out_dir);
    std::vector<fs::path> written;
    const std::string ext = c.format == "json" ? ".json" : ".csv";
    try {
        fs::create_directories(dir);
        const auto meta = make_meta(c);
        for (const auto& name : chosen) {
            const auto& fn = std::find_if(targets.begin(), targets.end(), [&](auto& p) { return p.first == name; })->second;
            const Table t = fn(c);
            const fs::path file = dir / (name + ext);
            std::ofstream os(file, std::ios::binary);
            if (!os)
                throw std::runtime_error("cannot open " + file.string());
            written.push_back(file);
            auto m = meta;
            m.emplace_back("target", name);
            write_table(os, t, m, c.format, false);
            if (!os)
                throw std::runtime_error("cannot write " + file.string());
            out << file.string() << '\n';
        }
        nlohmann::ordered_json manifest;
        for (const auto& [k, v] : meta)
            manifest[k] = v;
        manifest["files"] = nlohmann::ordered_json::array();
        for (const auto& f : written)
            manifest["files"].push_back(f.filename().string());
        const fs::path mf = dir / "manifest.json";
        std::ofstream os(mf, std::ios::binary);
        if (!os)
            throw std::runtime_error("cannot open " + mf.string());
        written.push_back(mf);
        os << manifest.dump(2) << '\n';
        if (!os)
            throw std::runtime_error("cannot write " + mf.string());
        out << mf.string() << '\n';
    } catch (const std::exception& e) {
        std::error_code ec;
        for (const auto& f : written)
            fs::remove(f, ec);
        err << "error: reproduce " << c.target << " failed: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

// ---- option parsing ----

void add_options(CLI::App& app, RunConfig& c) {
    const char* model = "Model";
    app.add_option("--S0", c.s0, "initial spot price")->group(model);
    app.add_option("--mu", c.mu, "risk-neutral drift parameter")->group(model);
    app.add_option("--sigma", c.sigma, "price volatility")->group(model);
    app.add_option("--kappa", c.kappa, "mean-reversion speed")->group(model);
    app.add_option("--t1", c.t1, "first observation time")->group(model);
    app.add_option("--T", c.T, "observation horizon in years")->group(model);
    app.add_option("--N", c.N, "number of observations (default 52; 252 for bound-table)")->group(model);

    const char* contract = "Contract";
    app.add_option("--contract", c.contract, "vol-swap, var-swap, vol-call or var-call")
        ->check(CLI::IsMember({"vol-swap", "var-swap", "vol-call", "var-call"}))
        ->group(contract);
    app.add_option("--method", c.method, "series, const-c, ncchi or central")
        ->check(CLI::IsMember({"series", "const-c", "ncchi", "central"}))
        ->group(contract);
    app.add_option("--expansion", c.expansion,
                   "Laguerre scale: default (beta = max alpha) or mean-matched (beta >= E[RV]/nu)")
        ->check(CLI::IsMember({"default", "mean-matched"}))
        ->group(contract);
    app.add_option("--terms", c.terms, "expansion truncation K (default 3 for swaps, 25 for densities)")
        ->group(contract);
    app.add_option("--beta", c.beta, "override the expansion scale beta")->group(contract);
    app.add_option("--mu0", c.mu0, "override the expansion center mu0")->group(contract);
    app.add_flag("--certify", c.certify, "fail unless the truncation error bound applies")->group(contract);
    app.add_option("--c", c.c, "const-c: common interval variance (vol-swap) or volatility (var-swap)")
        ->group(contract);
    app.add_option("--eta", c.eta, "degrees of freedom for closed forms (default N-1)")->group(contract);
    app.add_option("--lambda", c.lambda, "noncentrality for closed forms (default from the model)")
        ->group(contract);
    app.add_option("--sigma-n", c.sigma_n, "representative interval volatility (default from the model)")
        ->group(contract);
    app.add_option("--strike", c.strike, "option strike in volatility or variance points")->group(contract);
    app.add_option("--a", c.a, "option expansion parameter a")->group(contract);
    app.add_option("--b", c.b, "option expansion parameter b")->group(contract);
    app.add_option("--rate", c.rate, "flat continuously compounded rate for discounting")->group(contract);
    app.add_option("--option-terms", c.option_terms, "option series length")->group(contract);
    app.add_option("--scale", c.scale, "option expansion scale (0 picks one)")->group(contract);
    app.add_flag("--vega", c.vega, "report d value / d sigma")->group(contract);

    const char* mc = "Monte Carlo";
    app.add_option("--validate-mc", c.validate_mc, "price: append an MC estimate with this many paths")->group(mc);
    app.add_option("--paths", c.paths, "reproduce: MC paths")->group(mc);
    app.add_option("--seed", c.seed, "MC seed")->group(mc);
    app.add_option("--streams", c.streams, "MC lanes")->check(CLI::PositiveNumber)->group(mc);
    app.add_option("--mc-law", c.mc_law, "exact (OU paths) or independent (independent interval returns)")
        ->check(CLI::IsMember({"exact", "independent"}))
        ->group(mc);

    const char* grid = "Density grid";
    app.add_option("--y-min", c.y_min, "lowest RV grid point")->group(grid);
    app.add_option("--y-max", c.y_max, "highest RV grid point")->group(grid);
    app.add_option("--points", c.points, "grid points")->group(grid);

    const char* table = "Bound table";
    app.add_option("--kappas", c.kappas, "comma-separated kappa values")->delimiter(',')->group(table);
    app.add_option("--sigmas", c.sigmas, "comma-separated sigma values")->delimiter(',')->group(table);
    app.add_option("--k-max", c.k_max, "largest truncation order")->group(table);
    app.add_option("--ell", c.ell, "moment order")->group(table);

    const char* rep = "Reproduce";
    app.add_option("--target", c.target, "fig1..fig5, table1 or all")
        ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4", "fig5", "table1", "all"}))
        ->group(rep);
    app.add_option("--out-dir", c.out_dir, "output directory")->group(rep);
    app.add_option("--fig3-sigma", c.fig3_sigma, "volatility for the MC convergence study")->group(rep);

    const char* output = "Output";
    app.add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->group(output);
    app.add_option("--output,-o", c.output, "output file (default stdout)")->group(output);
}

} // namespace

std::vector<std::pair<std::string, std::string>> to_key_values(const RunConfig& c) {
    std::vector<std::pair<std::string, std::string>> kv;
    auto num = [&](const char* k, double v) {
        if (!std::isnan(v))
            kv.emplace_back(k, fmt17(v));
    };
    auto integer = [&](const char* k, auto v) { kv.emplace_back(k, std::to_string(v)); };
    auto str = [&](const char* k, const std::string& v) {
        if (!v.empty())
            kv.emplace_back(k, v);
    };
    auto flag = [&](const char* k, bool v) { kv.emplace_back(k, v ? "true" : "false"); };
    num("S0", c.s0);
    num("mu", c.mu);
    num("sigma", c.sigma);
    num("kappa", c.kappa);
    num("t1", c.t1);
    num("T", c.T);
    integer("N", c.N);
    str("contract", c.contract);
    str("method", c.method);
    str("expansion", c.expansion);
    integer("terms", c.terms);
    num("beta", c.beta);
    num("mu0", c.mu0);
    flag("certify", c.certify);
    num("c", c.c);
    num("eta", c.eta);
    num("lambda", c.lambda);
    num("sigma-n", c.sigma_n);
    num("strike", c.strike);
    num("a", c.a);
    num("b", c.b);
    num("rate", c.rate);
    integer("option-terms", c.option_terms);
    num("scale", c.scale);
    flag("vega", c.vega);
    integer("validate-mc", c.validate_mc);
    integer("paths", c.paths);
    integer("seed", c.seed);
    integer("streams", c.streams);
    str("mc-law", c.mc_law);
    num("y-min", c.y_min);
    num("y-max", c.y_max);
    integer("points", c.points);
    kv.emplace_back("kappas", join(c.kappas));
    kv.emplace_back("sigmas", join(c.sigmas));
    integer("k-max", c.k_max);
    num("ell", c.ell);
    str("target", c.target);
    str("out-dir", c.out_dir);
    num("fig3-sigma", c.fig3_sigma);
    str("format", c.format);
    str("output", c.output);
    return kv;
}

std::string serialize(const RunConfig& c) {
    std::string s;
    for (const auto& [k, v] : to_key_values(c)) {
        // Quoted so the config reader keeps spaces and other separators inside one value.
        const bool quote = v.find_first_of(" \t\"'#;") != std::string::npos;
        s += k + '=' + (quote ? '"' + v + '"' : v) + '\n';
    }
    return s;
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig c;
    CLI::App app;
    add_options(app, c);
    std::istringstream is(text);
    app.parse_from_stream(is);
    return c;
}

std::uint64_t config_hash(const RunConfig& c) {
    const std::string s = "command=" + c.command + '\n' + serialize(c);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app("Volatility and variance swaps and options under a mean-reverting commodity model", "volswap");
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "flat key=value file; command-line flags override it");
    app.fallthrough();
    app.require_subcommand(1);
    add_options(app, c);
    auto* price = app.add_subcommand("price", "swap strike or option price");
    auto* pdfc = app.add_subcommand("pdf", "realized-variance density on a grid");
    auto* bound = app.add_subcommand("bound-table", "truncation bounds by kappa, K and sigma");
    auto* repro = app.add_subcommand("reproduce", "write the fig1..fig5 and table1 data sets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return 0;
        }
        app.exit(e, out, err);
        return 2;
    }
    for (auto* s : {price, pdfc, bound, repro})
        if (s->parsed())
            c.command = s->get_name();

    try {
        if (c.command == "reproduce")
            return cmd_reproduce(c, out, err);
        Table t;
        if (c.command == "price")
            t = cmd_price(c, err);
        else if (c.command == "pdf")
            t = cmd_pdf(c);
        else
            t = cmd_bound_table(c);
        const auto meta = make_meta(c);
        if (c.output.empty()) {
            write_table(out, t, meta, c.format, c.command == "price");
        } else {
            std::ofstream os(c.output, std::ios::binary);
            write_table(os, t, meta, c.format, c.command == "price");
            if (!os)
                throw InvalidParameter("cannot write " + c.output);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.is_input_error() ? 2 : 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

} // namespace volswap::cli
