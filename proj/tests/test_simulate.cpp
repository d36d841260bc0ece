#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "logheston/simulate.hpp"

using namespace logheston;
using Catch::Approx;

namespace {

const VgParams kVg{0.0621, 0.1392, -0.0621, 0.6573};

SvModelParams base_model() {
    SvModelParams m;
    m.alpha = 0.346;
    m.beta = 0.882;
    m.theta = 3.67;
    m.mu = -0.13;
    m.sigma = 0.24;
    m.w_dist = WSpec::vargamma(kVg);
    m.v0 = std::exp(m.alpha / (1.0 - m.beta));
    return m;
}

}  // namespace

TEST_CASE("paths are reproducible per seed and stream") {
    auto m = base_model();
    auto a = simulate_path(m, 2000, 99, 1);
    auto b = simulate_path(m, 2000, 99, 1);
    auto c = simulate_path(m, 2000, 99, 2);
    CHECK(a.v == b.v);
    CHECK(a.q == b.q);
    CHECK(a.v != c.v);
    CHECK(a.seed == 99);
    CHECK(a.stream == 1);
}

TEST_CASE("the return identity holds exactly along the path") {
    auto m = base_model();
    m.coupling = Coupling::gaussian_copula;
    m.copula_rho = -0.5;
    auto p = simulate_path(m, 3000, 4242);
    REQUIRE(p.v.size() == 3000);
    REQUIRE(p.q.size() == 3000);
    REQUIRE(p.z.size() == 3000);
    for (std::size_t t = 0; t < p.v.size(); ++t) {
        CHECK(p.q[t] == m.theta + p.v[t] * (m.mu + p.z[t]));
        CHECK(p.v[t] > 0.0);
    }
}

TEST_CASE("volatility recursion follows the stored innovations") {
    auto m = base_model();
    auto p = simulate_path(m, 500, 7);
    // ln v_{t+1} = alpha + beta ln v_t + w_{t+1}, seeded from v0's burn-in end
    for (std::size_t t = 0; t + 1 < p.v.size(); ++t) {
        double pred = m.alpha + m.beta * std::log(p.v[t]) + p.w[t + 1];
        CHECK(std::log(p.v[t + 1]) == Approx(pred).margin(1e-12));
    }
}

TEST_CASE("long-path log moments match AR(1) theory") {
    auto m = base_model();
    auto r = path_log_moments_mc(m, 400000, -1, 32, 2025);
    CHECK(r.mean_theory ==
          Approx((m.alpha + vg_moments(kVg).mean) / (1.0 - m.beta)));
    CHECK(r.var_theory ==
          Approx(vg_moments(kVg).variance / (1.0 - m.beta * m.beta)));
    CHECK(r.mean_lnv == Approx(r.mean_theory).margin(4.0 * r.mean_stderr));
    CHECK(r.var_lnv == Approx(r.var_theory).margin(4.0 * r.var_stderr));
    CHECK(r.mean_stderr > 0.0);
    CHECK(r.batches == 32);
}

TEST_CASE("stationary power moment matches the product formula") {
    auto m = base_model();
    m.beta = 0.7;  // faster mixing keeps the check cheap
    auto rep = stationary_moment_mc(m, 1.0, 100000, -1, 8, 11);
    CHECK(rep.theory == Approx(stationary_moment_theory(m, 1.0)));
    CHECK(rep.estimate == Approx(rep.theory).margin(4.0 * rep.mc_stderr));
    CHECK(rep.drift_ok);
    CHECK(rep.mc_stderr > 0.0);
    CHECK(rep.reps == 8);
}

TEST_CASE("stationary moment refuses exponents outside the product domain") {
    auto m = base_model();
    // t_plus of the innovation law is ~9.73; u beyond it has no finite moment
    CHECK_THROWS_AS(stationary_moment_mc(m, 10.5, 1000, -1, 2, 1),
                    precondition_error);
    CHECK_THROWS_AS(stationary_moment_mc(m, -17.0, 1000, -1, 2, 1),
                    precondition_error);
    CHECK_THROWS_AS(stationary_moment_mc(m, 1.0, 0, -1, 2, 1),
                    std::invalid_argument);
}

TEST_CASE("averaging and normality experiment passes for a well-behaved model") {
    auto m = base_model();
    m.beta = 0.7;
    m.w_dist = WSpec::normal(0.3);
    auto r = lln_clt_experiment(m, {64, 256, 1024}, 300, 17);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.lln_pass);
    CHECK(r.clt_pass);
    REQUIRE(r.sd_ratios.size() == 2);
    CHECK(r.expected_ratios[0] == Approx(0.5));
    CHECK(r.sd_ratios[0] == Approx(0.5).margin(0.1));
    CHECK(r.rows[2].jb_pvalue > 0.01);
    CHECK(r.rows[2].ks_pvalue > 0.01);
    CHECK(r.sigma_q > 0.0);
    CHECK_THROWS_AS(lln_clt_experiment(m, {64, 256}, 100, 17),
                    std::invalid_argument);
    CHECK_THROWS_AS(lln_clt_experiment(m, {256, 64}, 300, 17),
                    std::invalid_argument);
}

TEST_CASE("tail experiment finds the heavy tail and reports the gap") {
    auto m = base_model();
    // sigma = 0 isolates the V-driven tail; with Gaussian return noise the
    // Hill estimate saturates below the boundary at any feasible depth
    m.sigma = 0.0;
    auto r = tail_index_experiment(m, 1000000, 1000, 5);
    CHECK(r.pareto_detected);
    CHECK(r.t_max == Approx(vg_mgf_domain(kVg).second));
    // the index hovers near the moment boundary of V
    CHECK(r.hill_index == Approx(r.t_max).epsilon(0.35));
    CHECK(r.rel_gap == Approx((r.hill_index - r.t_max) / r.t_max));
    CHECK_THROWS_AS(tail_index_experiment(m, 1000, 10, 5),
                    std::invalid_argument);
}

TEST_CASE("tail experiment is reproducible") {
    auto m = base_model();
    auto a = tail_index_experiment(m, 1000000, 500, 77);
    auto b = tail_index_experiment(m, 1000000, 500, 77);
    CHECK(a.hill_index == b.hill_index);
}

TEST_CASE("gaussian copula induces monotone residual correlation") {
    auto m = base_model();
    m.coupling = Coupling::gaussian_copula;
    std::vector<double> corr;
    for (double rho : {-0.8, 0.0, 0.8}) {
        m.copula_rho = rho;
        auto p = simulate_path(m, 50000, 123);
        corr.push_back(pearson_corr(p.z, p.w));
    }
    CHECK(corr[0] < corr[1]);
    CHECK(corr[1] < corr[2]);
    CHECK(corr[0] < -0.3);
    CHECK(corr[2] > 0.3);
    CHECK(std::abs(corr[1]) < 0.05);
}

TEST_CASE("copula calibration hits a target correlation") {
    auto m = base_model();
    const double target = -0.44;
    double rho = calibrate_coupling(m, target, 321);
    m.coupling = Coupling::gaussian_copula;
    m.copula_rho = rho;
    auto p = simulate_path(m, 200000, 321);
    CHECK(pearson_corr(p.z, p.w) == Approx(target).margin(0.02));
}

TEST_CASE("copula preserves the innovation marginal") {
    auto m = base_model();
    m.coupling = Coupling::gaussian_copula;
    m.copula_rho = -0.6;
    auto p = simulate_path(m, 200000, 9);
    // moments of W under the copula match the law it was built from
    auto mm = vg_moments(kVg);
    CHECK(mean(p.w) == Approx(mm.mean).margin(6e-3));
    CHECK(population_variance(p.w) == Approx(mm.variance).epsilon(0.05));
    auto sk = skewness_kurtosis(p.w);
    CHECK(sk.skewness == Approx(mm.skewness).margin(0.25));
}

TEST_CASE("empirical innovations draw from the pool") {
    auto m = base_model();
    std::vector<double> pool{-0.31, -0.17, -0.05, 0.02, 0.11, 0.23, 0.35};
    m.w_dist = WSpec::empirical(pool);
    auto p = simulate_path(m, 5000, 55);
    std::set<double> values(pool.begin(), pool.end());
    for (double w : p.w) CHECK(values.count(w) == 1);
}

TEST_CASE("moment interval dispatches on the innovation law") {
    auto vg = w_mgf_interval(WSpec::vargamma(kVg));
    CHECK(vg.second == Approx(vg_mgf_domain(kVg).second));
    auto nr = w_mgf_interval(WSpec::normal(1.0));
    CHECK(std::isinf(nr.first));
    CHECK(std::isinf(nr.second));
    CHECK(w_mgf(WSpec::normal(0.5), 2.0) == Approx(std::exp(0.5 * 0.25 * 4.0)));
    CHECK(w_mean(WSpec::vargamma(kVg)) == Approx(kVg.c + kVg.a));
}

TEST_CASE("model validation refuses out-of-range parameters") {
    auto m = base_model();
    m.beta = 1.0;
    CHECK_THROWS_AS(validate(m), std::invalid_argument);
    m = base_model();
    m.v0 = 0.0;
    CHECK_THROWS_AS(validate(m), std::invalid_argument);
    m = base_model();
    m.coupling = Coupling::gaussian_copula;
    m.copula_rho = 1.0;
    CHECK_THROWS_AS(validate(m), std::invalid_argument);
    m = base_model();
    m.w_dist = WSpec::empirical({});
    CHECK_THROWS_AS(validate(m), std::invalid_argument);
    m = base_model();
    m.sigma = -0.1;
    CHECK_THROWS_AS(validate(m), std::invalid_argument);
}
