#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "logheston/tails.hpp"

using namespace logheston;
using Catch::Approx;

namespace {

// deterministic sample on the quantile grid of an exponential-tailed law:
// P(W > w) = exp(-rate w); the upper tail index of such a sample is rate
std::vector<double> exp_quantile_grid(double rate, int n) {
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) {
        double p = (i + 0.5) / n;
        w[i] = -std::log(1.0 - p) / rate;
    }
    return w;
}

}  // namespace

TEST_CASE("upper index on an exponential-tail quantile grid") {
    // log of a Pareto(5) sample has exponential tail with rate 5
    auto w = exp_quantile_grid(5.0, 10000);
    auto h = hill_estimates(w, 500);
    CHECK(h.gamma_right == Approx(5.0).margin(0.5));
    CHECK(h.r == 500);
    // tighter cutoff, same answer within bias
    CHECK(hill_estimates(w, 100).gamma_right == Approx(5.0).margin(0.5));
}

TEST_CASE("lower index mirrors on negated data bit for bit") {
    auto w = exp_quantile_grid(3.0, 5000);
    for (std::size_t i = 0; i < w.size(); i += 3) w[i] = -w[i] * 0.7;
    std::vector<double> neg(w);
    for (double& x : neg) x = -x;
    auto h = hill_estimates(w, 200);
    auto hn = hill_estimates(neg, 200);
    CHECK(hn.gamma_left == h.gamma_right);
    CHECK(hn.gamma_right == h.gamma_left);
}

TEST_CASE("two-sided estimation on an asymmetric sample") {
    // right tail rate 4, left tail rate 9
    auto up = exp_quantile_grid(4.0, 6000);
    auto dn = exp_quantile_grid(9.0, 6000);
    std::vector<double> w;
    for (double x : up) w.push_back(x);
    for (double x : dn) w.push_back(-x);
    auto h = hill_estimates(w, 300);
    CHECK(h.gamma_right == Approx(4.0).margin(0.4));
    CHECK(h.gamma_left == Approx(9.0).margin(0.9));
}

TEST_CASE("upper index is invariant under constant shifts") {
    auto w = exp_quantile_grid(6.0, 4000);
    std::vector<double> shifted(w);
    for (double& x : shifted) x += 123.25;
    auto a = hill_estimates(w, 150);
    auto b = hill_estimates(shifted, 150);
    CHECK(b.gamma_right == Approx(a.gamma_right).epsilon(1e-9));
}

TEST_CASE("cutoff bounds are enforced") {
    std::vector<double> w(50);
    for (int i = 0; i < 50; ++i) w[i] = i * 0.1;
    CHECK_THROWS_AS(hill_estimates(w, 0), std::invalid_argument);
    CHECK_THROWS_AS(hill_estimates(w, 49), std::invalid_argument);
    CHECK_NOTHROW(hill_estimates(w, 48));
    CHECK_NOTHROW(hill_estimates(w, 1));
    std::vector<double> tiny{1.0, 2.0};
    CHECK_THROWS_AS(hill_estimates(tiny, 1), std::invalid_argument);
}

TEST_CASE("flat order statistics refuse rather than divide by zero") {
    std::vector<double> w(100, 1.0);
    for (int i = 0; i < 10; ++i) w[i] = -2.0 + i * 0.01;
    // top r block is constant: mean excess is exactly zero
    CHECK_THROWS_AS(hill_estimates(w, 20), precondition_error);
}

TEST_CASE("cutoff sweep matches pointwise estimates") {
    auto w = exp_quantile_grid(5.0, 3000);
    for (std::size_t i = 0; i < w.size(); i += 2) w[i] = -w[i];
    auto curve = hill_curve(w, 50, 200, 25);
    REQUIRE(curve.r_values.size() == 7);
    for (std::size_t i = 0; i < curve.r_values.size(); ++i) {
        auto h = hill_estimates(w, curve.r_values[i]);
        CHECK(curve.gamma_right[i] == h.gamma_right);
        CHECK(curve.gamma_left[i] == h.gamma_left);
    }
    CHECK(curve.r_values.front() == 50);
    CHECK(curve.r_values.back() == 200);
}

TEST_CASE("moment-generating interval from the two indices") {
    auto iv = mgf_interval_from_hill(15.7, 7.3);
    CHECK(iv.first == Approx(-14.7));
    CHECK(iv.second == Approx(6.3));
    HillEstimates h;
    h.gamma_left = 15.7;
    h.gamma_right = 7.3;
    auto iv2 = mgf_interval_from_hill(h);
    CHECK(iv2 == iv);
    // an index at or below one leaves no exponential moment to certify
    CHECK_THROWS_AS(mgf_interval_from_hill(0.9, 7.3), precondition_error);
    CHECK_THROWS_AS(mgf_interval_from_hill(15.7, 1.0), precondition_error);
}
