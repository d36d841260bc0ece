#pragma once

// Derivative-free minimization: Nelder-Mead simplex with an optional
// restart pass.  Deterministic for a given starting point and step sizes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "core.hpp"

namespace logheston {

struct NelderMeadOptions {
    double diameter_tol = 1e-6;  // stop when max vertex distance to best < tol
    int max_iter = 2000;
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Minimizes f over R^n starting from x0 with per-coordinate initial steps.
// Standard coefficients (reflect 1, expand 2, contract 1/2, shrink 1/2).
template <class F>
NelderMeadResult nelder_mead(F&& f, const std::vector<double>& x0,
                             const std::vector<double>& step,
                             NelderMeadOptions opt = {}) {
    const std::size_t n = x0.size();
    if (n == 0 || step.size() != n)
        throw std::invalid_argument("nelder_mead: bad dimensions");

    std::vector<std::vector<double>> xs(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) {
        if (step[i] == 0.0)
            throw std::invalid_argument("nelder_mead: zero step");
        xs[i + 1][i] += step[i];
    }
    std::vector<double> fs(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fs[i] = f(xs[i]);

    std::vector<std::size_t> ord(n + 1);
    std::vector<double> cen(n), xr(n), xe(n), xc(n);
    NelderMeadResult res;

    auto sort_order = [&] {
        for (std::size_t i = 0; i <= n; ++i) ord[i] = i;
        std::stable_sort(ord.begin(), ord.end(),
                         [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    };
    auto diameter = [&] {
        double d = 0.0;
        const auto& best = xs[ord[0]];
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                d = std::max(d, std::abs(xs[ord[i]][j] - best[j]));
        return d;
    };

    int it = 0;
    for (; it < opt.max_iter; ++it) {
        sort_order();
        if (diameter() < opt.diameter_tol) {
            res.converged = true;
            break;
        }
        const std::size_t worst = ord[n];
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += xs[ord[i]][j];
            cen[j] = s / static_cast<double>(n);
        }
        for (std::size_t j = 0; j < n; ++j) xr[j] = cen[j] + (cen[j] - xs[worst][j]);
        const double fr = f(xr);
        if (fr < fs[ord[0]]) {
            for (std::size_t j = 0; j < n; ++j) xe[j] = cen[j] + 2.0 * (cen[j] - xs[worst][j]);
            const double fe = f(xe);
            if (fe < fr) { xs[worst] = xe; fs[worst] = fe; }
            else         { xs[worst] = xr; fs[worst] = fr; }
            continue;
        }
        if (fr < fs[ord[n - 1]]) { xs[worst] = xr; fs[worst] = fr; continue; }
        const bool outside = fr < fs[worst];
        if (outside)
            for (std::size_t j = 0; j < n; ++j) xc[j] = cen[j] + 0.5 * (xr[j] - cen[j]);
        else
            for (std::size_t j = 0; j < n; ++j) xc[j] = cen[j] + 0.5 * (xs[worst][j] - cen[j]);
        const double fc = f(xc);
        if (fc < (outside ? fr : fs[worst])) { xs[worst] = xc; fs[worst] = fc; continue; }
        // shrink toward the best vertex
        const auto& best = xs[ord[0]];
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == ord[0]) continue;
            for (std::size_t j = 0; j < n; ++j)
                xs[i][j] = best[j] + 0.5 * (xs[i][j] - best[j]);
            fs[i] = f(xs[i]);
        }
    }
    sort_order();
    res.x = xs[ord[0]];
    res.fx = fs[ord[0]];
    res.iterations = it;
    return res;
}

// Nelder-Mead followed by a fresh pass from the incumbent with shrunken
// steps; guards against premature simplex collapse far from the optimum.
template <class F>
NelderMeadResult nelder_mead_restarted(F&& f, const std::vector<double>& x0,
                                       const std::vector<double>& step,
                                       NelderMeadOptions opt = {},
                                       int restarts = 1,
                                       double step_shrink = 0.1) {
    NelderMeadResult best = nelder_mead(f, x0, step, opt);
    std::vector<double> s = step;
    for (int r = 0; r < restarts; ++r) {
        for (auto& v : s) v *= step_shrink;
        NelderMeadResult again = nelder_mead(f, best.x, s, opt);
        again.iterations += best.iterations;
        if (again.fx <= best.fx) {
            again.converged = again.converged || best.converged;
            best = again;
        } else {
            best.iterations = again.iterations;
        }
    }
    return best;
}

}  // namespace logheston
