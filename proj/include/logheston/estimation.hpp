#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "stats.hpp"

// Closed-form estimation layer: AR(1) fits for the volatility index on both
// scales, the returns regression, and an augmented Dickey-Fuller test.

namespace logheston {

namespace detail {

// A regressor whose variation is lost to rounding makes the closed-form
// slope meaningless; refuse rather than return noise.
inline void require_nondegenerate(std::span<const double> x,
                                  const char* label) {
    double m = mean(x);
    double v = population_variance(x);
    if (v == 0.0 || v < 1e-12 * m * m)
        throw precondition_error(std::string(label) +
                                 ": regressor is numerically degenerate");
}

struct Ols2 {
    double intercept;
    double slope;
    double slope_se;
    double r_squared;
    std::vector<double> residuals;
};

// y = intercept + slope * x, closed form, residual-based slope stderr.
inline Ols2 ols2(std::span<const double> y, std::span<const double> x,
                 const char* label) {
    if (y.size() != x.size() || y.size() < 3)
        throw std::invalid_argument(std::string(label) +
                                    ": need >= 3 aligned observations");
    require_nondegenerate(x, label);
    double n = static_cast<double>(y.size());
    double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double a = x[i] - mx, b = y[i] - my;
        sxx += a * a;
        sxy += a * b;
        syy += b * b;
    }
    Ols2 fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.residuals.resize(y.size());
    double ssr = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        fit.residuals[i] = y[i] - fit.intercept - fit.slope * x[i];
        ssr += fit.residuals[i] * fit.residuals[i];
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 0.0;
    fit.slope_se = std::sqrt(ssr / (n - 2.0) / sxx);
    return fit;
}

}  // namespace detail

enum class Ar1Scale { level, log_scale };

/// AR(1) fit v_t = alpha + beta v_{t-1} + w_t.  The regression is run in
/// mean-reversion form (delta on lagged level), so beta == 1 + slope holds
/// bit-exactly; r_squared, delta_corr and slope_pvalue all describe that
/// delta regression, making slope_pvalue a test of beta = 1.
struct Ar1Fit {
    double alpha = 0.0;
    double beta = 0.0;
    double r_squared = 0.0;
    double delta_corr = 0.0;
    double slope_pvalue = 0.0;
    std::size_t n = 0;  // observations in the regression (T - 1)
    Ar1Scale scale = Ar1Scale::level;
    std::vector<double> residuals;  // w_2 .. w_T
};

namespace detail {

inline Ar1Fit fit_ar1(std::span<const double> v, Ar1Scale scale) {
    if (v.size() < 4)
        throw std::invalid_argument("ar1 fit: need at least 4 observations");
    std::size_t n = v.size() - 1;
    std::vector<double> lag(n), delta(n);
    for (std::size_t t = 0; t < n; ++t) {
        lag[t] = v[t];
        delta[t] = v[t + 1] - v[t];
    }
    auto ols = ols2(delta, lag, "ar1 fit");
    Ar1Fit fit;
    fit.alpha = ols.intercept;
    fit.beta = 1.0 + ols.slope;
    fit.r_squared = ols.r_squared;
    fit.delta_corr = pearson_corr(delta, lag);
    fit.slope_pvalue =
        student_t_pvalue(ols.slope / ols.slope_se, static_cast<double>(n) - 2.0);
    fit.n = n;
    fit.scale = scale;
    fit.residuals = std::move(ols.residuals);
    return fit;
}

}  // namespace detail

/// AR(1) on the raw volatility level.
inline Ar1Fit fit_heston_ar1(std::span<const double> v) {
    return detail::fit_ar1(v, Ar1Scale::level);
}

/// AR(1) on ln v; the innovations returned here feed the distributional
/// analysis downstream.
inline Ar1Fit fit_log_heston(std::span<const double> v) {
    std::vector<double> lv(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0))
            throw precondition_error(
                "fit_log_heston: non-positive volatility value");
        lv[i] = std::log(v[i]);
    }
    return detail::fit_ar1(lv, Ar1Scale::log_scale);
}

/// Fit of q_t = theta + v_t (mu + z_t), estimated as OLS of q/v on (1/v, 1):
/// the slope is theta, the intercept mu.  sigma is the population stdev of
/// the residuals z; p-values use Student t with n - 2 degrees of freedom.
struct ReturnsRegressionFit {
    double theta = 0.0;
    double mu = 0.0;
    double sigma = 0.0;
    double theta_pvalue = 0.0;
    double mu_pvalue = 0.0;
    std::size_t n = 0;
    std::vector<double> residuals;  // z_1 .. z_T
};

inline ReturnsRegressionFit fit_returns_regression(std::span<const double> q,
                                                   std::span<const double> v) {
    if (q.size() != v.size() || q.size() < 3)
        throw std::invalid_argument(
            "returns regression: need >= 3 aligned observations");
    std::size_t n = q.size();
    std::vector<double> y(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(v[i] > 0.0))
            throw precondition_error(
                "returns regression: non-positive volatility value");
        y[i] = q[i] / v[i];
        x[i] = 1.0 / v[i];
    }
    auto ols = detail::ols2(y, x, "returns regression");

    ReturnsRegressionFit fit;
    fit.theta = ols.slope;
    fit.mu = ols.intercept;
    fit.n = n;
    fit.residuals = std::move(ols.residuals);
    fit.sigma = population_stdev(fit.residuals);

    double nn = static_cast<double>(n);
    double mx = mean(x);
    double sxx = 0.0;
    for (double xi : x) sxx += (xi - mx) * (xi - mx);
    double ssr = 0.0;
    for (double r : fit.residuals) ssr += r * r;
    double s2 = ssr / (nn - 2.0);
    double se_theta = std::sqrt(s2 / sxx);
    double se_mu = std::sqrt(s2 * (1.0 / nn + mx * mx / sxx));
    fit.theta_pvalue = student_t_pvalue(fit.theta / se_theta, nn - 2.0);
    fit.mu_pvalue = student_t_pvalue(fit.mu / se_mu, nn - 2.0);
    return fit;
}

/// Mean and population stdev of the normalized returns q/v.
struct NormalizedMoments {
    double mean = 0.0;
    double stdev = 0.0;
};

inline NormalizedMoments normalized_moments(std::span<const double> q,
                                            std::span<const double> v) {
    if (q.size() != v.size() || q.empty())
        throw std::invalid_argument("normalized_moments: mismatched inputs");
    std::vector<double> n(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (!(v[i] > 0.0))
            throw precondition_error(
                "normalized_moments: non-positive volatility value");
        n[i] = q[i] / v[i];
    }
    return {mean(n), population_stdev(n)};
}

/// Correlation between a return-side residual series and the volatility
/// innovations.  The two live on month axes that differ only at the front
/// (innovations start one month later), so the shared suffix is correlated.
inline double residual_cross_correlation(std::span<const double> z,
                                         std::span<const double> w) {
    std::size_t n = std::min(z.size(), w.size());
    if (n < 3)
        throw std::invalid_argument(
            "residual_cross_correlation: overlap too short");
    return pearson_corr(z.subspan(z.size() - n), w.subspan(w.size() - n));
}

/// Augmented Dickey-Fuller test, constant-only specification.
struct AdfResult {
    double statistic = 0.0;
    int lags = 0;
    std::size_t n = 0;  // usable regression rows
    // MacKinnon asymptotic critical values for the constant-only case.
    std::array<double, 3> critical_values{-3.43, -2.86, -2.57};
    std::vector<std::string> reject_at;  // downward-closed: {"1%","5%","10%"}
};

namespace detail {

// Solves the normal equations by Cholesky; dimensions stay tiny (lags + 2).
inline std::vector<double> solve_spd(std::vector<double>& A,
                                     std::vector<double>& b, std::size_t p) {
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            double f = A[j * p + k];
            for (std::size_t i = j; i < p; ++i) A[i * p + j] -= f * A[i * p + k];
        }
        double d = A[j * p + j];
        if (!(d > 0.0))
            throw precondition_error("adf_test: singular design matrix");
        d = std::sqrt(d);
        for (std::size_t i = j; i < p; ++i) A[i * p + j] /= d;
    }
    for (std::size_t i = 0; i < p; ++i) {  // L y = b
        for (std::size_t k = 0; k < i; ++k) b[i] -= A[i * p + k] * b[k];
        b[i] /= A[i * p + i];
    }
    for (std::size_t ii = p; ii-- > 0;) {  // L' x = y
        for (std::size_t k = ii + 1; k < p; ++k) b[ii] -= A[k * p + ii] * b[k];
        b[ii] /= A[ii * p + ii];
    }
    return b;
}

}  // namespace detail

inline AdfResult adf_test(std::span<const double> x, int lags) {
    if (lags < 0) throw std::invalid_argument("adf_test: negative lag order");
    std::size_t p = static_cast<std::size_t>(lags) + 2;
    if (x.size() < p + 10)
        throw precondition_error("adf_test: series too short for lag order");

    std::vector<double> d(x.size() - 1);
    for (std::size_t t = 0; t + 1 < x.size(); ++t) d[t] = x[t + 1] - x[t];

    std::size_t rows = d.size() - static_cast<std::size_t>(lags);
    std::vector<double> X(rows * p), y(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t t = r + static_cast<std::size_t>(lags);  // index into d
        y[r] = d[t];
        X[r * p + 0] = 1.0;
        X[r * p + 1] = x[t];  // level lagged one step behind d[t]
        for (int j = 1; j <= lags; ++j)
            X[r * p + 1 + static_cast<std::size_t>(j)] =
                d[t - static_cast<std::size_t>(j)];
    }

    std::vector<double> XtX(p * p, 0.0), Xty(p, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < p; ++i) {
            Xty[i] += X[r * p + i] * y[r];
            for (std::size_t j = 0; j <= i; ++j)
                XtX[i * p + j] += X[r * p + i] * X[r * p + j];
        }
    }
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) XtX[i * p + j] = XtX[j * p + i];

    std::vector<double> A = XtX, rhs = Xty;
    auto beta = detail::solve_spd(A, rhs, p);

    double ssr = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        double fitv = 0.0;
        for (std::size_t i = 0; i < p; ++i) fitv += X[r * p + i] * beta[i];
        ssr += (y[r] - fitv) * (y[r] - fitv);
    }
    double s2 = ssr / (static_cast<double>(rows) - static_cast<double>(p));

    // (X'X)^{-1}[1][1] via a unit solve.
    std::vector<double> e(p, 0.0);
    e[1] = 1.0;
    std::vector<double> A2 = XtX;
    auto col = detail::solve_spd(A2, e, p);
    double se = std::sqrt(s2 * col[1]);

    AdfResult res;
    res.statistic = beta[1] / se;
    res.lags = lags;
    res.n = rows;
    const char* labels[3] = {"1%", "5%", "10%"};
    for (int i = 0; i < 3; ++i)
        if (res.statistic < res.critical_values[static_cast<std::size_t>(i)])
            res.reject_at.push_back(labels[i]);
    return res;
}

}  // namespace logheston
