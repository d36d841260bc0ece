#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "logheston/rng.hpp"
#include "logheston/special.hpp"
#include "logheston/stats.hpp"

using namespace logheston;
using Catch::Approx;

TEST_CASE("mean and population moments on hand values") {
    std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    CHECK(mean(x) == Approx(2.5));
    CHECK(population_variance(x) == Approx(1.25));
    CHECK(population_stdev(x) == Approx(std::sqrt(1.25)));
}

TEST_CASE("skewness and kurtosis oracle {-1,0,1}") {
    // symmetric three-point law: zero skew, excess kurtosis 3/2 - 3
    std::vector<double> x{-1.0, 0.0, 1.0};
    auto sk = skewness_kurtosis(x);
    CHECK(sk.skewness == Approx(0.0).margin(1e-15));
    CHECK(sk.excess_kurtosis == Approx(-1.5));
}

TEST_CASE("pearson correlation endpoints") {
    std::vector<double> x{1.0, 2.0, 3.0, 5.0};
    std::vector<double> y{2.0, 4.0, 6.0, 10.0};
    std::vector<double> yn{-2.0, -4.0, -6.0, -10.0};
    CHECK(pearson_corr(x, y) == Approx(1.0));
    CHECK(pearson_corr(x, yn) == Approx(-1.0));
}

TEST_CASE("acf of an alternating sequence is -1 at lag 1") {
    // +1,-1,+1,... : adjacent windows are exact mirror images
    std::vector<double> x(64);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = (i % 2 == 0) ? 1.0 : -1.0;
    auto rho = acf(x, 2);
    CHECK(rho[0] == Approx(-1.0));
    CHECK(rho[1] == Approx(1.0));
}

TEST_CASE("conventional acf matches the autocovariance ratio") {
    std::vector<double> x{0.4, -1.2, 0.9, 2.1, -0.3, 0.8, -1.7, 0.2, 1.1, -0.6};
    auto rho = acf(x, 3, AcfKind::conventional);
    const double m = mean(x);
    for (int k = 1; k <= 3; ++k) {
        double ck = 0.0, c0 = 0.0;
        for (std::size_t t = 0; t + k < x.size(); ++t)
            ck += (x[t] - m) * (x[t + k] - m);
        for (double v : x) c0 += (v - m) * (v - m);
        CHECK(rho[k - 1] == Approx(ck / c0));
    }
}

TEST_CASE("acf_norm is the sum of squares") {
    std::vector<double> rho{0.3, -0.4, 0.5};
    CHECK(acf_norm(rho) == Approx(0.09 + 0.16 + 0.25));
}

TEST_CASE("jarque-bera statistic closed form") {
    // T/6 * (s^2 + k^2/4) with excess kurtosis k
    CHECK(jarque_bera_stat(600, 2.0, 6.0) == Approx(1300.0));
    CHECK(jarque_bera_stat(100, 0.0, 0.0) == Approx(0.0));
}

TEST_CASE("jarque-bera accepts gaussian and rejects uniform data") {
    Rng rng(123);
    std::vector<double> g(5000), u(5000);
    for (auto& v : g) v = rng.normal();
    for (auto& v : u) v = rng.uniform01();
    CHECK(jarque_bera(g).pvalue > 0.01);
    CHECK(jarque_bera(u).pvalue < 1e-6);  // flat law: excess kurtosis -1.2
}

TEST_CASE("chi-squared tail with two degrees of freedom is exp(-x/2)") {
    CHECK(chi2_sf(3.0, 2.0) == Approx(std::exp(-1.5)).epsilon(1e-10));
    CHECK(chi2_sf(0.0, 2.0) == Approx(1.0));
}

TEST_CASE("normal cdf and quantile round trip") {
    for (double p : {0.001, 0.025, 0.2, 0.5, 0.8, 0.975, 0.999})
        CHECK(norm_cdf(norm_quantile(p)) == Approx(p).epsilon(1e-8));
    CHECK(norm_cdf(0.0) == Approx(0.5));
    CHECK(norm_quantile(0.975) == Approx(1.959964).epsilon(1e-5));
}

TEST_CASE("student-t two-sided p-value oracles") {
    // symmetric in t; at t=0 the p-value is 1
    CHECK(student_t_pvalue(0.0, 10.0) == Approx(1.0));
    CHECK(student_t_pvalue(2.5, 20.0) == Approx(student_t_pvalue(-2.5, 20.0)));
    // large-df limit approaches the normal two-sided tail
    CHECK(student_t_pvalue(1.96, 1e6) == Approx(0.05).margin(5e-4));
    // t(1) is Cauchy: P(|T| > 1) = 1/2
    CHECK(student_t_pvalue(1.0, 1.0) == Approx(0.5).epsilon(1e-8));
}

TEST_CASE("regularized incomplete beta against arcsine closed form") {
    for (double x : {0.1, 0.3, 0.5, 0.7, 0.9})
        CHECK(incbeta(0.5, 0.5, x) ==
              Approx(2.0 / M_PI * std::asin(std::sqrt(x))).epsilon(1e-10));
    CHECK(incbeta(2.0, 3.0, 0.0) == Approx(0.0).margin(1e-300));
    CHECK(incbeta(2.0, 3.0, 1.0) == Approx(1.0));
}

TEST_CASE("gamma_p oracles") {
    // shape 1 is exponential
    for (double x : {0.2, 1.0, 4.0})
        CHECK(gamma_p(1.0, x) == Approx(1.0 - std::exp(-x)).epsilon(1e-12));
    CHECK(gamma_p(3.5, 0.0) == Approx(0.0).margin(1e-300));
}

TEST_CASE("kolmogorov tail at the distribution median") {
    CHECK(kolmogorov_sf(0.82757355) == Approx(0.5).margin(1e-4));
    CHECK(kolmogorov_sf(10.0) == Approx(0.0).margin(1e-12));
}

TEST_CASE("diagnostics wires its pieces consistently") {
    Rng rng(7);
    std::vector<double> x(400);
    for (auto& v : x) v = rng.normal() + 0.3;
    auto d = diagnostics(x, 5);
    auto sk = skewness_kurtosis(x);
    CHECK(d.skewness == sk.skewness);
    CHECK(d.excess_kurtosis == sk.excess_kurtosis);
    REQUIRE(d.acf.size() == 5);
    REQUIRE(d.abs_acf.size() == 5);
    CHECK(d.acf_norm == Approx(acf_norm(d.acf)));
    CHECK(d.abs_acf_norm == Approx(acf_norm(d.abs_acf)));
    CHECK(d.jb_stat ==
          Approx(jarque_bera_stat(x.size(), sk.skewness, sk.excess_kurtosis)));
}

TEST_CASE("qq points are monotone and nearly linear for normal data") {
    Rng rng(99);
    std::vector<double> x(2000);
    for (auto& v : x) v = 3.0 + 2.0 * rng.normal();
    auto pts = qq_points(x);
    REQUIRE(pts.size() == x.size());
    std::vector<double> tx, ty;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) {
            CHECK(pts[i].x >= pts[i - 1].x);
            CHECK(pts[i].y >= pts[i - 1].y);
        }
        tx.push_back(pts[i].x);
        ty.push_back(pts[i].y);
    }
    CHECK(pearson_corr(tx, ty) > 0.999);
}

TEST_CASE("input validation throws") {
    std::vector<double> tiny{1.0, 2.0};
    CHECK_THROWS_AS(acf(tiny, 5), std::invalid_argument);
    CHECK_THROWS_AS(acf(tiny, 0), std::invalid_argument);
    std::vector<double> x{1.0, 2.0, 3.0};
    std::vector<double> y{1.0, 2.0};
    CHECK_THROWS_AS(pearson_corr(x, y), std::invalid_argument);
}
