#pragma once

// Tail-index estimation for exponentiated innovations: reciprocal mean
// excess over the r-th order statistic on each side, cutoff sweeps, and
// the induced finite-MGF interval.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"

namespace logheston {

struct HillEstimates {
    double gamma_left = 0.0;   // lower-tail index of e^w, reported positive
    double gamma_right = 0.0;  // upper-tail index of e^w
    int r = 0;
};

// With ascending order statistics w_(1) <= ... <= w_(T):
//   1/gamma_right = mean(top r) - w_(T-r),
//   1/gamma_left  = |mean(bottom r) - w_(r+1)|.
inline HillEstimates hill_estimates(const std::vector<double>& w, int r) {
    const std::size_t T = w.size();
    if (r < 1 || static_cast<std::size_t>(r) > T - 2 || T < 3)
        throw std::invalid_argument("hill_estimates: require 1 <= r <= T - 2");
    std::vector<double> s(w);
    std::stable_sort(s.begin(), s.end());
    double top = 0.0, bot = 0.0;
    for (int i = 0; i < r; ++i) {
        top += s[T - 1 - i];
        bot += s[i];
    }
    const double inv_right = top / r - s[T - 1 - r];
    const double inv_left = bot / r - s[r];
    if (inv_right == 0.0 || inv_left == 0.0)
        throw precondition_error("hill_estimates: zero denominator (flat tail)");
    HillEstimates h;
    h.gamma_right = 1.0 / inv_right;
    h.gamma_left = std::abs(1.0 / inv_left);
    h.r = r;
    return h;
}

struct HillCurve {
    std::vector<int> r_values;
    std::vector<double> gamma_left, gamma_right;
};

inline HillCurve hill_curve(const std::vector<double>& w, int r_min, int r_max,
                            int step = 1) {
    if (r_min < 1 || r_max < r_min || step < 1)
        throw std::invalid_argument("hill_curve: require 1 <= r_min <= r_max, step >= 1");
    HillCurve c;
    for (int r = r_min; r <= r_max; r += step) {
        const HillEstimates h = hill_estimates(w, r);
        c.r_values.push_back(r);
        c.gamma_left.push_back(h.gamma_left);
        c.gamma_right.push_back(h.gamma_right);
    }
    return c;
}

// Interval of t with E[e^{tW}] provably finite given the tail indices of
// e^W: (-(gamma_left - 1), gamma_right - 1).  Each index must exceed 1 or
// the corresponding side is empty.
inline std::pair<double, double> mgf_interval_from_hill(double gamma_left,
                                                        double gamma_right) {
    if (!(gamma_left > 1.0) || !(gamma_right > 1.0))
        throw precondition_error(
            "mgf_interval_from_hill: tail index <= 1, interval empty on that side");
    return {-(gamma_left - 1.0), gamma_right - 1.0};
}

inline std::pair<double, double> mgf_interval_from_hill(const HillEstimates& h) {
    return mgf_interval_from_hill(h.gamma_left, h.gamma_right);
}

}  // namespace logheston
