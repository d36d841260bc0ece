#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "special.hpp"

// Descriptive statistics.  All moments use the population convention
// (divide by T); autocorrelations default to per-window means, i.e. lag-k
// autocorrelation is the plain Pearson correlation of the two overlapping
// windows, each centred by its own mean.

namespace logheston {

inline double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean of empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

/// Population variance, second central moment.
inline double population_variance(std::span<const double> x) {
    double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size());
}

inline double population_stdev(std::span<const double> x) {
    return std::sqrt(population_variance(x));
}

struct SkewKurt {
    double skewness;
    double excess_kurtosis;
};

inline SkewKurt skewness_kurtosis(std::span<const double> x) {
    if (x.size() < 2)
        throw std::invalid_argument("skewness_kurtosis needs >= 2 points");
    double m = mean(x);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        double c = v - m, c2 = c * c;
        m2 += c2;
        m3 += c2 * c;
        m4 += c2 * c2;
    }
    double n = static_cast<double>(x.size());
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 <= 0.0)
        throw precondition_error("skewness_kurtosis: degenerate sample");
    return {m3 / (m2 * std::sqrt(m2)), m4 / (m2 * m2) - 3.0};
}

inline double pearson_corr(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("pearson_corr: mismatched or short inputs");
    double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double a = x[i] - mx, b = y[i] - my;
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    if (sxx <= 0.0 || syy <= 0.0)
        throw precondition_error("pearson_corr: constant input");
    return sxy / std::sqrt(sxx * syy);
}

enum class AcfKind {
    window_mean,   // Pearson correlation of the two windows (default)
    conventional,  // common mean, c_k / c_0
};

/// Autocorrelations at lags 1..max_lag.
inline std::vector<double> acf(std::span<const double> x, int max_lag,
                               AcfKind kind = AcfKind::window_mean) {
    if (max_lag < 1) throw std::invalid_argument("acf: max_lag < 1");
    if (x.size() <= static_cast<std::size_t>(max_lag) + 1)
        throw std::invalid_argument("acf: series shorter than max_lag + 2");
    std::vector<double> rho;
    rho.reserve(max_lag);
    if (kind == AcfKind::window_mean) {
        for (int k = 1; k <= max_lag; ++k) {
            auto head = x.subspan(0, x.size() - k);
            auto tail = x.subspan(k);
            rho.push_back(pearson_corr(head, tail));
        }
        return rho;
    }
    double m = mean(x);
    double c0 = 0.0;
    for (double v : x) c0 += (v - m) * (v - m);
    if (c0 <= 0.0) throw precondition_error("acf: constant series");
    for (int k = 1; k <= max_lag; ++k) {
        double ck = 0.0;
        for (std::size_t t = k; t < x.size(); ++t)
            ck += (x[t] - m) * (x[t - k] - m);
        rho.push_back(ck / c0);
    }
    return rho;
}

/// Sum of squared autocorrelations; the scalar norm used in the summary
/// tables.  Feed it the exact acf() output so the two stay consistent.
inline double acf_norm(std::span<const double> rho) {
    double s = 0.0;
    for (double r : rho) s += r * r;
    return s;
}

inline double jarque_bera_stat(std::size_t n, double skewness,
                               double excess_kurtosis) {
    double t = static_cast<double>(n);
    return t / 6.0 *
           (skewness * skewness + excess_kurtosis * excess_kurtosis / 4.0);
}

struct JarqueBera {
    double stat;
    double pvalue;
};

/// Jarque-Bera normality test against the chi-squared(2) tail.
inline JarqueBera jarque_bera(std::span<const double> x) {
    auto sk = skewness_kurtosis(x);
    double stat = jarque_bera_stat(x.size(), sk.skewness, sk.excess_kurtosis);
    return {stat, chi2_sf(stat, 2.0)};
}

/// Everything the diagnostics tables need for one series.
struct DiagnosticsSummary {
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    std::vector<double> acf;      // lags 1..max_lag of the series
    std::vector<double> abs_acf;  // same for |x|
    double acf_norm = 0.0;
    double abs_acf_norm = 0.0;
    double jb_stat = 0.0;
    double jb_pvalue = 0.0;
};

inline DiagnosticsSummary diagnostics(std::span<const double> x, int max_lag = 5,
                                      AcfKind kind = AcfKind::window_mean) {
    DiagnosticsSummary d;
    auto sk = skewness_kurtosis(x);
    d.skewness = sk.skewness;
    d.excess_kurtosis = sk.excess_kurtosis;
    d.acf = acf(x, max_lag, kind);
    std::vector<double> ax(x.begin(), x.end());
    for (double& v : ax) v = std::fabs(v);
    d.abs_acf = acf(ax, max_lag, kind);
    d.acf_norm = acf_norm(d.acf);
    d.abs_acf_norm = acf_norm(d.abs_acf);
    d.jb_stat = jarque_bera_stat(x.size(), d.skewness, d.excess_kurtosis);
    d.jb_pvalue = chi2_sf(d.jb_stat, 2.0);
    return d;
}

struct PlotPoint {
    double x;  // model/theoretical coordinate
    double y;  // sample coordinate
};

/// Normal QQ points: sorted sample against quantiles of the normal fitted by
/// population moments, at plotting positions (i - 0.5) / T.
inline std::vector<PlotPoint> qq_points(std::span<const double> sample) {
    if (sample.size() < 2) throw std::invalid_argument("qq_points: short sample");
    double m = mean(sample);
    double s = population_stdev(sample);
    if (s <= 0.0) throw precondition_error("qq_points: degenerate sample");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<PlotPoint> pts(sorted.size());
    double n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double p = (static_cast<double>(i) + 0.5) / n;
        pts[i] = {m + s * norm_quantile(p), sorted[i]};
    }
    return pts;
}

/// PP points: model CDF evaluated at the sorted sample against empirical
/// probabilities (i - 0.5) / T.
inline std::vector<PlotPoint> pp_points(
    std::span<const double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("pp_points: empty sample");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<PlotPoint> pts(sorted.size());
    double n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        pts[i] = {cdf(sorted[i]), (static_cast<double>(i) + 0.5) / n};
    return pts;
}

}  // namespace logheston
