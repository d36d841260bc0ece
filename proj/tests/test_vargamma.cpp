#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "logheston/rng.hpp"
#include "logheston/special.hpp"
#include "logheston/stats.hpp"
#include "logheston/vargamma.hpp"

using namespace logheston;
using Catch::Approx;

namespace {

// parameters in the regime the toolkit actually fits
const VgParams kRef{0.0621, 0.1392, -0.0621, 0.6573};

double simpson_moment(const VgParams& p, int power, double lo, double hi,
                      int n = 40000) {
    // plain composite Simpson; the integrand is smooth away from the cusp
    auto f = [&](double x) {
        double d = vg_pdf(p, x);
        double acc = d;
        for (int k = 0; k < power; ++k) acc *= x;
        return acc;
    };
    double h = (hi - lo) / n;
    double s = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("moment formulas match numerical integration of the density") {
    auto m = vg_moments(kRef);
    const double lo = -4.0, hi = 4.0;  // +-25 stdevs, mass beyond is ~1e-30
    CHECK(simpson_moment(kRef, 0, lo, hi) == Approx(1.0).epsilon(1e-8));
    CHECK(simpson_moment(kRef, 1, lo, hi) == Approx(m.mean).margin(1e-8));
    double num_var = simpson_moment(kRef, 2, lo, hi) - m.mean * m.mean;
    CHECK(num_var == Approx(m.variance).epsilon(1e-7));
}

TEST_CASE("mean is location plus gamma drift") {
    auto m = vg_moments(kRef);
    CHECK(m.mean == Approx(kRef.c + kRef.a).epsilon(1e-14));
    // the reference parameters center the innovation exactly
    CHECK(m.mean == Approx(0.0).margin(1e-12));
}

TEST_CASE("mgf domain closed forms") {
    // symmetric case 1 - t^2 nu b^2/2: roots +-sqrt(2/(nu b^2))
    auto d1 = vg_mgf_domain({0.0, 1.0, 0.0, 2.0});
    CHECK(d1.first == Approx(-1.0).epsilon(1e-12));
    CHECK(d1.second == Approx(1.0).epsilon(1e-12));
    // a = b = nu = 1: 1 - t - t^2/2 has roots -1 +- sqrt(3)
    auto d2 = vg_mgf_domain({1.0, 1.0, 0.0, 1.0});
    CHECK(d2.first == Approx(-1.0 - std::sqrt(3.0)).epsilon(1e-12));
    CHECK(d2.second == Approx(-1.0 + std::sqrt(3.0)).epsilon(1e-12));
    // reference parameters: the interval the tail analysis reports
    auto dr = vg_mgf_domain(kRef);
    CHECK(dr.first == Approx(-16.137).margin(5e-3));
    CHECK(dr.second == Approx(9.7306).margin(5e-3));
}

TEST_CASE("mgf against quadrature and monte carlo") {
    for (double t : {-6.0, -2.0, 1.0, 3.0}) {
        auto f = [&](double x) { return std::exp(t * x) * vg_pdf(kRef, x); };
        int n = 60000;
        double lo = -5.0, hi = 4.0, h = (hi - lo) / n;
        double s = f(lo) + f(hi);
        for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
        s *= h / 3.0;
        CHECK(vg_mgf(kRef, t) == Approx(s).epsilon(1e-6));
    }
    auto w = vg_sample(kRef, 2000000, 7777);
    for (double t : {-4.0, 2.0}) {
        double acc = 0.0;
        for (double x : w) acc += std::exp(t * x);
        acc /= static_cast<double>(w.size());
        CHECK(vg_mgf(kRef, t) == Approx(acc).epsilon(0.01));
    }
}

TEST_CASE("mgf refuses arguments outside its finiteness interval") {
    CHECK_THROWS_AS(vg_mgf(kRef, 9.8), precondition_error);
    CHECK_THROWS_AS(vg_mgf(kRef, -16.2), precondition_error);
    CHECK(vg_mgf(kRef, 0.0) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("small mixing variance approaches the normal density") {
    VgParams p{0.3, 1.0, -0.3, 1e-4};
    const double m = p.c + p.a, sd = std::sqrt(p.b * p.b + p.a * p.a * p.nu);
    for (double x : {-2.0, -0.5, 0.0, 0.7, 2.5}) {
        double ref = std::exp(-0.5 * (x - m) * (x - m) / (sd * sd)) /
                     (sd * std::sqrt(2.0 * M_PI));
        CHECK(vg_pdf(p, x) == Approx(ref).epsilon(2e-3));
    }
}

TEST_CASE("density at the cusp uses the closed form") {
    // at x = c the conditional location term vanishes; for 1/nu > 1/2 the
    // integral collapses to Gamma(k - 1/2) over a power of the quadratic
    // coefficient, all divided by the same normalizer
    VgParams p{0.2, 0.9, -0.1, 0.8};  // k = 1.25
    const double k = 1.0 / p.nu;
    const double c2 = 1.0 / p.nu + p.a * p.a / (2.0 * p.b * p.b);
    const double expect = std::exp(std::lgamma(k - 0.5) -
                                   (k - 0.5) * std::log(c2) - std::lgamma(k) -
                                   k * std::log(p.nu)) /
                          (p.b * std::sqrt(2.0 * M_PI));
    CHECK(vg_pdf(p, p.c) == Approx(expect).epsilon(1e-9));
    // density is continuous into the cusp
    CHECK(vg_pdf(p, p.c + 1e-9) == Approx(expect).epsilon(1e-4));
}

TEST_CASE("heavy cusp diverges when the gamma density is unbounded") {
    VgParams p{0.1, 0.5, 0.0, 4.0};  // k = 0.25 < 1/2
    CHECK(std::isinf(vg_log_pdf(p, p.c)));
    // nearby the density is finite but large
    CHECK(vg_pdf(p, p.c + 1e-6) > 10.0);
}

TEST_CASE("log density matches log of density in the far tails") {
    for (double x : {-1.5, -0.8, 0.9, 1.8}) {
        double lp = vg_log_pdf(kRef, x);
        CHECK(std::exp(lp) == Approx(vg_pdf(kRef, x)).epsilon(1e-12));
        CHECK(std::isfinite(lp));
    }
    // ~40 stdevs out: pdf underflows gracefully, log pdf stays informative
    CHECK(vg_log_pdf(kRef, 8.0) < -60.0);
    CHECK(std::isfinite(vg_log_pdf(kRef, 8.0)));
}

TEST_CASE("sampler is deterministic per seed and stream") {
    auto a = vg_sample(kRef, 1000, 42, 3);
    auto b = vg_sample(kRef, 1000, 42, 3);
    auto c = vg_sample(kRef, 1000, 42, 4);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("sample moments agree with formulas") {
    auto w = vg_sample(kRef, 1000000, 31415);
    auto m = vg_moments(kRef);
    CHECK(mean(w) == Approx(m.mean).margin(4e-4));
    CHECK(population_variance(w) == Approx(m.variance).epsilon(0.01));
    auto sk = skewness_kurtosis(w);
    CHECK(sk.skewness == Approx(m.skewness).margin(0.05));
    CHECK(sk.excess_kurtosis == Approx(m.excess_kurtosis).margin(0.2));
}

TEST_CASE("cdf is a proper distribution function") {
    CHECK(vg_cdf(kRef, -3.0) == Approx(0.0).margin(1e-9));
    CHECK(vg_cdf(kRef, 3.0) == Approx(1.0).margin(1e-9));
    double prev = 0.0;
    for (double x = -1.0; x <= 1.0; x += 0.1) {
        double f = vg_cdf(kRef, x);
        CHECK(f >= prev);
        prev = f;
    }
    // median sanity against monte carlo
    auto w = vg_sample(kRef, 400000, 2718);
    std::size_t below = 0;
    for (double x : w)
        if (x < 0.05) ++below;
    CHECK(vg_cdf(kRef, 0.05) ==
          Approx(static_cast<double>(below) / w.size()).margin(3e-3));
}

TEST_CASE("quantile table inverts the cdf") {
    auto table = VgQuantileTable::build(kRef);
    for (double u : {0.001, 0.05, 0.25, 0.5, 0.75, 0.95, 0.999}) {
        double x = table.quantile(u);
        CHECK(vg_cdf(kRef, x) == Approx(u).margin(2e-5));
    }
    for (double x : {-0.6, -0.1, 0.0, 0.2, 0.9})
        CHECK(table.quantile(table.cdf(x)) == Approx(x).margin(1e-5));
    CHECK_THROWS_AS(table.quantile(0.0), std::invalid_argument);
    CHECK_THROWS_AS(table.quantile(1.0), std::invalid_argument);
}

TEST_CASE("sampler and density agree in distribution") {
    // chi-squared over equal-probability bins from the quantile table
    const int bins = 50;
    const std::size_t n = 200000;
    auto table = VgQuantileTable::build(kRef);
    std::vector<double> edges(bins - 1);
    for (int i = 1; i < bins; ++i)
        edges[i - 1] = table.quantile(static_cast<double>(i) / bins);
    auto w = vg_sample(kRef, n, 5150);
    std::vector<double> count(bins, 0.0);
    for (double x : w) {
        int b = static_cast<int>(
            std::lower_bound(edges.begin(), edges.end(), x) - edges.begin());
        count[b] += 1.0;
    }
    const double expect = static_cast<double>(n) / bins;
    double stat = 0.0;
    for (double cnt : count) stat += (cnt - expect) * (cnt - expect) / expect;
    CHECK(chi2_sf(stat, bins - 1) > 0.01);
}

TEST_CASE("moment fit reproduces sample cumulants") {
    auto w = vg_sample(kRef, 300000, 99);
    auto p = vg_fit_mom(w);
    // the fitted parameters must reproduce the sample k2, k3, k4 they
    // were solved from (that is the contract, regardless of sample noise)
    double m1 = mean(w);
    double k2 = 0.0, k3 = 0.0, k4 = 0.0;
    for (double x : w) {
        double d = x - m1;
        k2 += d * d;
        k3 += d * d * d;
        k4 += d * d * d * d;
    }
    k2 /= w.size();
    k3 /= w.size();
    k4 /= w.size();
    k4 -= 3.0 * k2 * k2;
    auto mm = vg_moments(p);
    CHECK(mm.mean == Approx(m1).margin(1e-10));
    CHECK(mm.variance == Approx(k2).epsilon(1e-8));
    double fit_k3 = mm.skewness * std::pow(mm.variance, 1.5);
    double fit_k4 = mm.excess_kurtosis * mm.variance * mm.variance;
    CHECK(fit_k3 == Approx(k3).epsilon(1e-6));
    CHECK(fit_k4 == Approx(k4).epsilon(1e-6));
    // and land near the truth on a sample this large
    CHECK(p.b == Approx(kRef.b).epsilon(0.25));
    CHECK(p.nu == Approx(kRef.nu).epsilon(0.35));
}

TEST_CASE("maximum likelihood recovers parameters and dominates the truth") {
    auto w = vg_sample(kRef, 50000, 1234);
    auto fit = vg_fit_mle(w);
    REQUIRE(fit.converged);
    CHECK(fit.params.a == Approx(kRef.a).margin(0.02));
    CHECK(fit.params.b == Approx(kRef.b).margin(0.01));
    CHECK(fit.params.c == Approx(kRef.c).margin(0.02));
    CHECK(fit.params.nu == Approx(kRef.nu).margin(0.12));
    CHECK(fit.loglik >= vg_loglik(kRef, w) - 1e-6);
    CHECK(fit.loglik >= vg_loglik(fit.start, w) - 1e-9);
}

TEST_CASE("fit is equivariant under negation and shift") {
    auto w = vg_sample(kRef, 20000, 555);
    auto base = vg_fit_mle(w);
    std::vector<double> neg(w), shifted(w);
    for (double& x : neg) x = -x;
    for (double& x : shifted) x += 0.75;
    auto fneg = vg_fit_mle(neg);
    CHECK(fneg.params.a == Approx(-base.params.a).margin(5e-3));
    CHECK(fneg.params.b == Approx(base.params.b).margin(5e-3));
    CHECK(fneg.params.c == Approx(-base.params.c).margin(5e-3));
    CHECK(fneg.params.nu == Approx(base.params.nu).margin(2e-2));
    auto fsh = vg_fit_mle(shifted);
    CHECK(fsh.params.c == Approx(base.params.c + 0.75).margin(5e-3));
    CHECK(fsh.params.a == Approx(base.params.a).margin(5e-3));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(validate(VgParams{0.0, 0.0, 0.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate(VgParams{0.0, 1.0, 0.0, -1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(vg_pdf({0.0, -1.0, 0.0, 1.0}, 0.0), std::invalid_argument);
    std::vector<double> tiny{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(vg_fit_mom(tiny), precondition_error);
    std::vector<double> flat(100, 2.0);
    CHECK_THROWS_AS(vg_fit_mom(flat), precondition_error);
}
