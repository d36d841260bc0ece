#pragma once

// Forward simulation of the joint volatility/return recursion
//   ln V_t = alpha + beta ln V_{t-1} + W_t,   Q_t = theta + V_t (mu + Z_t)
// and the Monte Carlo experiments that check its stationary moments,
// averaging behavior, and return-tail index.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"
#include "rng.hpp"
#include "special.hpp"
#include "stats.hpp"
#include "tails.hpp"
#include "vargamma.hpp"

namespace logheston {

enum class WKind { normal, vargamma, empirical };
enum class Coupling { independent, gaussian_copula };

struct WSpec {
    WKind kind = WKind::normal;
    double normal_sd = 1.0;       // kind == normal: W ~ N(0, normal_sd^2)
    VgParams vg;                  // kind == vargamma
    std::vector<double> pool;     // kind == empirical: iid resampling pool

    static WSpec normal(double sd) {
        WSpec w; w.kind = WKind::normal; w.normal_sd = sd; return w;
    }
    static WSpec vargamma(const VgParams& p) {
        WSpec w; w.kind = WKind::vargamma; w.vg = p; return w;
    }
    static WSpec empirical(std::vector<double> pool) {
        WSpec w; w.kind = WKind::empirical; w.pool = std::move(pool); return w;
    }
};

struct SvModelParams {
    double alpha = 0.0;
    double beta = 0.5;     // must lie in (0,1)
    double theta = 0.0;
    double mu = 0.0;
    double sigma = 1.0;    // stdev of Z, >= 0
    WSpec w_dist;
    Coupling coupling = Coupling::independent;
    double copula_rho = 0.0;  // |rho| < 1 when coupling is gaussian_copula
    double v0 = 1.0;          // initial level, > 0
};

inline void validate(const SvModelParams& m) {
    if (!(m.beta > 0.0 && m.beta < 1.0))
        throw std::invalid_argument("SvModelParams: beta must lie in (0,1)");
    if (!(m.sigma >= 0.0) || !std::isfinite(m.sigma))
        throw std::invalid_argument("SvModelParams: sigma must be >= 0");
    if (!(m.v0 > 0.0))
        throw std::invalid_argument("SvModelParams: v0 must be > 0");
    if (!std::isfinite(m.alpha) || !std::isfinite(m.theta) || !std::isfinite(m.mu))
        throw std::invalid_argument("SvModelParams: non-finite coefficient");
    if (m.coupling == Coupling::gaussian_copula && !(std::abs(m.copula_rho) < 1.0))
        throw std::invalid_argument("SvModelParams: |copula_rho| < 1 required");
    switch (m.w_dist.kind) {
        case WKind::normal:
            if (!(m.w_dist.normal_sd >= 0.0))
                throw std::invalid_argument("SvModelParams: normal_sd must be >= 0");
            break;
        case WKind::vargamma:
            validate(m.w_dist.vg);
            break;
        case WKind::empirical:
            if (m.w_dist.pool.empty())
                throw std::invalid_argument("SvModelParams: empty empirical pool");
            break;
    }
}

// Ten mean-reversion time scales.
inline int default_burnin(double beta) {
    return static_cast<int>(std::ceil(10.0 / (1.0 - beta)));
}

struct SimPath {
    std::vector<double> v, q, z, w;
    std::uint64_t seed = 0, stream = 0;
};

struct SimState {
    double lnv = 0.0;
    double v = 0.0, q = 0.0, z = 0.0, w = 0.0;
};

// Prepared model: quantile table / sorted pool built once, then shared by
// every path and replicate (all const after construction, thread-safe).
class SimModel {
  public:
    explicit SimModel(const SvModelParams& m) : m_(m) {
        validate(m);
        if (m.coupling == Coupling::gaussian_copula) {
            if (m.w_dist.kind == WKind::vargamma)
                table_ = VgQuantileTable::build(m.w_dist.vg);
            if (m.w_dist.kind == WKind::empirical) {
                sorted_pool_ = m.w_dist.pool;
                std::sort(sorted_pool_.begin(), sorted_pool_.end());
            }
        }
    }

    const SvModelParams& params() const { return m_; }

    SimState init() const {
        SimState s;
        s.lnv = std::log(m_.v0);
        s.v = m_.v0;
        return s;
    }

    // One month: draws the volatility innovation first, then the return
    // innovation (fixed order -- part of the replayability contract).
    void advance(SimState& s, Rng& rng) const {
        double w, xi = 0.0;
        const bool copula = m_.coupling == Coupling::gaussian_copula;
        if (copula) {
            xi = rng.normal();
            switch (m_.w_dist.kind) {
                case WKind::normal:
                    w = m_.w_dist.normal_sd * xi;
                    break;
                case WKind::vargamma: {
                    double u = norm_cdf(xi);
                    u = std::min(std::max(u, 1e-16), 1.0 - 1e-16);
                    w = table_.quantile(u);
                    break;
                }
                case WKind::empirical: {
                    double u = norm_cdf(xi);
                    auto idx = static_cast<std::size_t>(u * sorted_pool_.size());
                    if (idx >= sorted_pool_.size()) idx = sorted_pool_.size() - 1;
                    w = sorted_pool_[idx];
                    break;
                }
                default: w = 0.0;
            }
        } else {
            switch (m_.w_dist.kind) {
                case WKind::normal:
                    w = m_.w_dist.normal_sd * rng.normal();
                    break;
                case WKind::vargamma:
                    w = vg_draw(m_.w_dist.vg, rng);
                    break;
                case WKind::empirical:
                    w = m_.w_dist.pool[rng.index(m_.w_dist.pool.size())];
                    break;
                default: w = 0.0;
            }
        }
        s.lnv = m_.alpha + m_.beta * s.lnv + w;
        s.v = std::exp(s.lnv);
        double z;
        if (copula) {
            const double rho = m_.copula_rho;
            z = m_.sigma * (rho * xi + std::sqrt(1.0 - rho * rho) * rng.normal());
        } else {
            z = m_.sigma * rng.normal();
        }
        s.w = w;
        s.z = z;
        s.q = m_.theta + s.v * (m_.mu + z);
    }

    SimPath path(long long T, std::uint64_t seed, std::uint64_t stream = 0) const {
        if (T < 1) throw std::invalid_argument("simulate_path: T >= 1 required");
        Rng rng(seed, stream);
        SimPath p;
        p.seed = seed;
        p.stream = stream;
        p.v.reserve(T); p.q.reserve(T); p.z.reserve(T); p.w.reserve(T);
        SimState s = init();
        for (long long t = 0; t < T; ++t) {
            advance(s, rng);
            p.v.push_back(s.v);
            p.q.push_back(s.q);
            p.z.push_back(s.z);
            p.w.push_back(s.w);
        }
        return p;
    }

  private:
    SvModelParams m_;
    VgQuantileTable table_;
    std::vector<double> sorted_pool_;
};

inline SimPath simulate_path(const SvModelParams& m, long long T,
                             std::uint64_t seed, std::uint64_t stream = 0) {
    return SimModel(m).path(T, seed, stream);
}

// Interval on which E[e^{tW}] is known finite for the given innovation law.
inline std::pair<double, double> w_mgf_interval(const WSpec& w) {
    switch (w.kind) {
        case WKind::vargamma:
            return vg_mgf_domain(w.vg);
        case WKind::normal:
            return {-std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
        case WKind::empirical: {
            const int r = std::max(
                1, std::min(100, static_cast<int>(w.pool.size()) / 4));
            const HillEstimates h = hill_estimates(w.pool, r);
            return mgf_interval_from_hill(h);
        }
    }
    return {0.0, 0.0};
}

// E[e^{tW}] for the innovation law (empirical pool: sample average).
inline double w_mgf(const WSpec& w, double t) {
    switch (w.kind) {
        case WKind::vargamma:
            return vg_mgf(w.vg, t);
        case WKind::normal:
            return std::exp(0.5 * w.normal_sd * w.normal_sd * t * t);
        case WKind::empirical: {
            double s = 0.0;
            for (double x : w.pool) s += std::exp(t * x);
            return s / static_cast<double>(w.pool.size());
        }
    }
    return 1.0;
}

inline double w_mean(const WSpec& w) {
    switch (w.kind) {
        case WKind::vargamma: return w.vg.c + w.vg.a;
        case WKind::normal: return 0.0;
        case WKind::empirical: return mean(w.pool);
    }
    return 0.0;
}

struct StationaryMomentReport {
    double u = 0.0;
    double estimate = 0.0;
    double mc_stderr = 0.0;
    double theory = 0.0;        // product formula / pool MGF, same u
    double max_rel_drift = 0.0; // running-mean drift over last half, rep 0
    bool drift_ok = false;      // max_rel_drift < 0.02
    long long n = 0;
    int burnin = 0;
    int reps = 0;
    std::uint64_t seed = 0;
};

// Closed-form stationary E[V^u] = e^{u alpha/(1-beta)} prod_j M_W(u beta^j).
inline double stationary_moment_theory(const SvModelParams& m, double u) {
    double log_m = u * m.alpha / (1.0 - m.beta);
    double t = u;
    const double ew = w_mean(m.w_dist);
    for (int j = 0; j < 20000; ++j) {
        if (std::abs(t) / (1.0 - m.beta) * (std::abs(ew) + 1.0) < 1e-14) {
            log_m += t / (1.0 - m.beta) * ew;  // remaining factors, first order
            break;
        }
        log_m += std::log(w_mgf(m.w_dist, t));
        t *= m.beta;
    }
    return std::exp(log_m);
}

// Time-average estimate of the stationary moment E[V^u] across independent
// replicates.  Refuses u outside the finite-MGF interval of the innovation
// law -- the moment is not known to exist there.
inline StationaryMomentReport stationary_moment_mc(const SvModelParams& m,
                                                   double u, long long n,
                                                   int burnin, int reps,
                                                   std::uint64_t seed) {
    validate(m);
    if (n < 1 || reps < 1)
        throw std::invalid_argument("stationary_moment_mc: n >= 1, reps >= 1");
    if (burnin < 0) burnin = default_burnin(m.beta);
    const auto dom = w_mgf_interval(m.w_dist);
    if (!(u > dom.first && u < dom.second))
        throw precondition_error(
            "stationary_moment_mc: u = " + std::to_string(u) +
            " outside the finite-MGF interval (" + std::to_string(dom.first) +
            ", " + std::to_string(dom.second) +
            ") of the innovation law; stationary moment may not exist");

    const SimModel model(m);
    std::vector<double> rep_means(reps);
    double drift = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        Rng rng(seed, static_cast<std::uint64_t>(rep));
        SimState s = model.init();
        for (int t = 0; t < burnin; ++t) model.advance(s, rng);
        double acc = 0.0;
        if (rep == 0) {
            // track the running mean to diagnose stabilization
            std::vector<double> running(static_cast<std::size_t>(n));
            for (long long t = 0; t < n; ++t) {
                model.advance(s, rng);
                acc += std::exp(u * s.lnv);
                running[static_cast<std::size_t>(t)] =
                    acc / static_cast<double>(t + 1);
            }
            const double last = running.back();
            for (std::size_t t = running.size() / 2; t < running.size(); ++t)
                drift = std::max(drift,
                                 std::abs(running[t] - last) / std::abs(last));
        } else {
            for (long long t = 0; t < n; ++t) {
                model.advance(s, rng);
                acc += std::exp(u * s.lnv);
            }
        }
        rep_means[rep] = acc / static_cast<double>(n);
    }
    StationaryMomentReport r;
    r.u = u;
    r.estimate = mean(rep_means);
    if (reps > 1) {
        double ss = 0.0;
        for (double v : rep_means) ss += (v - r.estimate) * (v - r.estimate);
        r.mc_stderr = std::sqrt(ss / (reps - 1.0) / reps);
    }
    r.theory = stationary_moment_theory(m, u);
    r.max_rel_drift = drift;
    r.drift_ok = drift < 0.02;
    r.n = n;
    r.burnin = burnin;
    r.reps = reps;
    r.seed = seed;
    return r;
}

struct PathMomentsReport {
    double mean_lnv = 0.0, var_lnv = 0.0;
    double mean_stderr = 0.0, var_stderr = 0.0;  // batch-means standard errors
    double mean_theory = 0.0, var_theory = 0.0;
    long long n = 0;
    int burnin = 0, batches = 0;
    std::uint64_t seed = 0, stream = 0;
};

// Long-path mean and variance of ln V with batch-means uncertainty; the
// theory columns hold (alpha + E W)/(1-beta) and Var(W)/(1-beta^2).
inline PathMomentsReport path_log_moments_mc(const SvModelParams& m, long long n,
                                             int burnin, int batches,
                                             std::uint64_t seed,
                                             std::uint64_t stream = 0) {
    validate(m);
    if (batches < 2 || n < batches)
        throw std::invalid_argument("path_log_moments_mc: need n >= batches >= 2");
    if (burnin < 0) burnin = default_burnin(m.beta);
    const SimModel model(m);
    Rng rng(seed, stream);
    SimState s = model.init();
    for (int t = 0; t < burnin; ++t) model.advance(s, rng);
    const long long blen = n / batches;
    std::vector<double> bmean(batches), bvar(batches);
    for (int b = 0; b < batches; ++b) {
        double s1 = 0.0, s2 = 0.0;
        for (long long t = 0; t < blen; ++t) {
            model.advance(s, rng);
            s1 += s.lnv;
            s2 += s.lnv * s.lnv;
        }
        bmean[b] = s1 / blen;
        bvar[b] = s2 / blen - bmean[b] * bmean[b];
    }
    PathMomentsReport r;
    r.mean_lnv = mean(bmean);
    r.var_lnv = mean(bvar);
    double sm = 0.0, sv = 0.0;
    for (int b = 0; b < batches; ++b) {
        sm += (bmean[b] - r.mean_lnv) * (bmean[b] - r.mean_lnv);
        sv += (bvar[b] - r.var_lnv) * (bvar[b] - r.var_lnv);
    }
    r.mean_stderr = std::sqrt(sm / (batches - 1.0) / batches);
    r.var_stderr = std::sqrt(sv / (batches - 1.0) / batches);
    double wvar = 0.0;
    switch (m.w_dist.kind) {
        case WKind::normal: wvar = m.w_dist.normal_sd * m.w_dist.normal_sd; break;
        case WKind::vargamma: wvar = vg_moments(m.w_dist.vg).variance; break;
        case WKind::empirical: wvar = population_variance(m.w_dist.pool); break;
    }
    r.mean_theory = (m.alpha + w_mean(m.w_dist)) / (1.0 - m.beta);
    r.var_theory = wvar / (1.0 - m.beta * m.beta);
    r.n = blen * batches;
    r.burnin = burnin;
    r.batches = batches;
    r.seed = seed;
    r.stream = stream;
    return r;
}

struct LlnCltSizeRow {
    long long T = 0;
    double mean_of_means = 0.0, sd_of_means = 0.0;
    double jb_pvalue = 0.0, ks_pvalue = 0.0;
};

struct LlnCltReport {
    std::vector<LlnCltSizeRow> rows;
    std::vector<double> sd_ratios;       // consecutive sd ratios
    std::vector<double> expected_ratios; // sqrt(T_i / T_{i+1})
    double sigma_q = 0.0;                // across-rep stdev of sqrt(T) Qbar, largest T
    int reps = 0, burnin = 0;
    std::uint64_t seed = 0;
    bool lln_pass = false, clt_pass = false;
};

// Across-replicate distribution of the sample mean of Q over a ladder of
// horizon sizes: averaging-rate check plus normality of the standardized
// means (Jarque-Bera and Kolmogorov-Smirnov, 1% level at the largest T).
inline LlnCltReport lln_clt_experiment(const SvModelParams& m,
                                       const std::vector<long long>& sizes,
                                       int reps, std::uint64_t seed,
                                       int burnin = -1) {
    validate(m);
    if (reps < 200)
        throw std::invalid_argument("lln_clt_experiment: reps >= 200 required");
    if (sizes.size() < 2)
        throw std::invalid_argument("lln_clt_experiment: need at least two sizes");
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1])
            throw std::invalid_argument("lln_clt_experiment: sizes must increase");
    if (burnin < 0) burnin = default_burnin(m.beta);

    const SimModel model(m);
    LlnCltReport rep;
    rep.reps = reps;
    rep.burnin = burnin;
    rep.seed = seed;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        const long long T = sizes[si];
        std::vector<double> means(reps);
        for (int r = 0; r < reps; ++r) {
            Rng rng(seed, si * static_cast<std::uint64_t>(reps) + r);
            SimState s = model.init();
            for (int t = 0; t < burnin; ++t) model.advance(s, rng);
            double acc = 0.0;
            for (long long t = 0; t < T; ++t) {
                model.advance(s, rng);
                acc += s.q;
            }
            means[r] = acc / static_cast<double>(T);
        }
        LlnCltSizeRow row;
        row.T = T;
        row.mean_of_means = mean(means);
        double ss = 0.0;
        for (double v : means) ss += (v - row.mean_of_means) * (v - row.mean_of_means);
        row.sd_of_means = std::sqrt(ss / (reps - 1.0));
        if (row.sd_of_means > 0.0) {
            const SkewKurt sk = skewness_kurtosis(means);
            const double jb = jarque_bera_stat(static_cast<std::size_t>(reps),
                                               sk.skewness, sk.excess_kurtosis);
            row.jb_pvalue = chi2_sf(jb, 2.0);
            std::vector<double> std_means(means);
            std::sort(std_means.begin(), std_means.end());
            double d = 0.0;
            for (int i = 0; i < reps; ++i) {
                const double f = norm_cdf(
                    (std_means[i] - row.mean_of_means) / row.sd_of_means);
                d = std::max(d, std::abs(f - (i + 1.0) / reps));
                d = std::max(d, std::abs(f - static_cast<double>(i) / reps));
            }
            const double rn = std::sqrt(static_cast<double>(reps));
            row.ks_pvalue = kolmogorov_sf((rn + 0.12 + 0.11 / rn) * d);
        } else {
            row.jb_pvalue = 1.0;  // degenerate point mass: nothing to reject
            row.ks_pvalue = 1.0;
        }
        rep.rows.push_back(row);
    }
    rep.lln_pass = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        const double expected = std::sqrt(static_cast<double>(rep.rows[i - 1].T) /
                                          static_cast<double>(rep.rows[i].T));
        const double ratio = rep.rows[i - 1].sd_of_means > 0.0
                                 ? rep.rows[i].sd_of_means / rep.rows[i - 1].sd_of_means
                                 : expected;
        rep.sd_ratios.push_back(ratio);
        rep.expected_ratios.push_back(expected);
        if (std::abs(ratio / expected - 1.0) > 0.2) rep.lln_pass = false;
    }
    const LlnCltSizeRow& last = rep.rows.back();
    rep.sigma_q = std::sqrt(static_cast<double>(last.T)) * last.sd_of_means;
    rep.clt_pass = last.jb_pvalue > 0.01 && last.ks_pvalue > 0.01;
    return rep;
}

struct TailIndexReport {
    double hill_index = 0.0;
    double t_max = 0.0;       // right MGF boundary of the innovation law
    double rel_gap = 0.0;     // (hill_index - t_max)/t_max
    bool pareto_detected = false;
    long long n = 0;
    int r = 0, burnin = 0;
    std::uint64_t seed = 0;
};

// Hill index of the right tail of ln|Q - theta| on one long simulated path,
// against the innovation law's right MGF boundary (the tail driver of V and
// hence of Q).  Indices above 30 are reported as no detectable power tail.
inline TailIndexReport tail_index_experiment(const SvModelParams& m, long long n,
                                             int r, std::uint64_t seed,
                                             int burnin = -1) {
    validate(m);
    if (n < 1000000)
        throw std::invalid_argument("tail_index_experiment: n >= 1e6 required");
    if (r < 1) r = static_cast<int>(n / 1000);
    if (burnin < 0) burnin = default_burnin(m.beta);
    const SimModel model(m);
    Rng rng(seed, 0);
    SimState s = model.init();
    for (int t = 0; t < burnin; ++t) model.advance(s, rng);
    std::vector<double> lt(static_cast<std::size_t>(n));
    for (long long t = 0; t < n; ++t) {
        model.advance(s, rng);
        const double d = std::abs(s.q - m.theta);
        lt[static_cast<std::size_t>(t)] =
            d > 0.0 ? std::log(d) : -std::numeric_limits<double>::infinity();
    }
    // top r mean excess over the (r+1)-th largest
    std::nth_element(lt.begin(), lt.end() - (r + 1), lt.end());
    const double thresh = lt[lt.size() - (r + 1)];
    double top = 0.0;
    for (std::size_t i = lt.size() - r; i < lt.size(); ++i) top += lt[i];
    const double inv = top / r - thresh;
    if (inv <= 0.0)
        throw precondition_error("tail_index_experiment: flat simulated tail");
    TailIndexReport rep;
    rep.hill_index = 1.0 / inv;
    const auto dom = w_mgf_interval(m.w_dist);
    rep.t_max = dom.second;
    rep.rel_gap = std::isfinite(dom.second)
                      ? (rep.hill_index - dom.second) / dom.second
                      : std::numeric_limits<double>::quiet_NaN();
    rep.pareto_detected = rep.hill_index <= 30.0;
    rep.n = n;
    rep.r = r;
    rep.burnin = burnin;
    rep.seed = seed;
    return rep;
}

// Secant search for the copula parameter reproducing a target Pearson
// corr(Z_t, W_t), using common random numbers across iterations.
inline double calibrate_coupling(SvModelParams m, double target_corr,
                                 std::uint64_t seed, long long T = 200000,
                                 double tol = 1e-4, int max_iter = 40) {
    validate(m);
    m.coupling = Coupling::gaussian_copula;
    auto f = [&](double rho) {
        m.copula_rho = rho;
        const SimPath p = SimModel(m).path(T, seed, 0);
        return pearson_corr(p.z, p.w) - target_corr;
    };
    double r0 = std::clamp(target_corr, -0.95, 0.95);
    double r1 = std::clamp(target_corr * 0.8 + (target_corr >= 0 ? 0.05 : -0.05),
                           -0.95, 0.95);
    if (r0 == r1) r1 = r0 - 0.1;
    double f0 = f(r0), f1 = f(r1);
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(f1) < tol) return r1;
        const double denom = f1 - f0;
        double r2 = std::abs(denom) > 1e-14
                        ? r1 - f1 * (r1 - r0) / denom
                        : 0.5 * (r0 + r1);
        r2 = std::clamp(r2, -0.999, 0.999);
        r0 = r1; f0 = f1;
        r1 = r2; f1 = f(r2);
    }
    throw convergence_error("calibrate_coupling: secant did not converge");
}

}  // namespace logheston
