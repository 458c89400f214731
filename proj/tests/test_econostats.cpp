#include <doctest.h>

#include <cmath>

#include "reference_values.hpp"
#include "valuation_lab/econostats.hpp"
#include "valuation_lab/errors.hpp"
#include "valuation_lab/parallel.hpp"
#include "valuation_lab/special.hpp"

using namespace vlab;
using doctest::Approx;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    return x;
}

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::Io;
}

}  // namespace

TEST_CASE("distribution functions against printed table values") {
    CHECK(special::chi2_sf(3.841459, 1) == Approx(0.05).epsilon(1e-4));
    CHECK(special::chi2_sf(5.991465, 2) == Approx(0.05).epsilon(1e-4));
    CHECK(special::chi2_sf(18.307038, 10) == Approx(0.05).epsilon(1e-4));
    CHECK(special::chi2_sf(6.634897, 1) == Approx(0.01).epsilon(1e-4));
    CHECK(special::chi2_sf(23.209251, 10) == Approx(0.01).epsilon(1e-4));

    CHECK(special::student_t_two_sided(12.706205, 1) == Approx(0.05).epsilon(1e-4));
    CHECK(special::student_t_two_sided(2.228139, 10) == Approx(0.05).epsilon(1e-4));
    CHECK(special::student_t_two_sided(2.085963, 20) == Approx(0.05).epsilon(1e-4));
    CHECK(special::student_t_two_sided(2.845340, 20) == Approx(0.01).epsilon(1e-4));
    CHECK(special::student_t_two_sided(4.032143, 5) == Approx(0.01).epsilon(1e-4));

    CHECK(special::normal_cdf(0.0) == Approx(0.5).epsilon(1e-12));
    CHECK(special::normal_cdf(1.959964) == Approx(0.975).epsilon(1e-6));
    CHECK(special::normal_cdf(1.644854) == Approx(0.95).epsilon(1e-6));
    CHECK(special::normal_cdf(-1.0) == Approx(0.158655).epsilon(1e-5));
    CHECK(special::normal_sf(2.326348) == Approx(0.01).epsilon(1e-5));
}

TEST_CASE("special functions against frozen reference values") {
    CHECK(special::chi2_sf(12.3, 7) == Approx(ref::chi2_sf_12_3_7).epsilon(1e-10));
    CHECK(special::chi2_cdf(0.5, 1) == Approx(ref::chi2_cdf_0_5_1).epsilon(1e-10));
    CHECK(special::chi2_sf(150, 120) == Approx(ref::chi2_sf_150_120).epsilon(1e-9));
    CHECK(special::student_t_two_sided(2.1, 15) == Approx(ref::t2_2_1_15).epsilon(1e-10));
    CHECK(special::student_t_cdf(-1.3, 4) == Approx(ref::tcdf_m1_3_4).epsilon(1e-10));
    CHECK(special::normal_quantile(1e-10) == Approx(ref::norm_ppf_1e_10).epsilon(1e-12));
    CHECK(special::normal_quantile(0.975) == Approx(ref::norm_ppf_0_975).epsilon(1e-14));
    CHECK(special::normal_quantile(0.3) == Approx(ref::norm_ppf_0_3).epsilon(1e-14));
    CHECK(special::gamma_p(2.5, 1.7) == Approx(ref::gammainc_2_5_1_7).epsilon(1e-12));
    CHECK(special::gamma_q(10, 30) == Approx(ref::gammaincc_10_30).epsilon(1e-10));
    CHECK(special::beta_inc(2.5, 3.5, 0.4) == Approx(ref::betainc_2_5_3_5_0_4).epsilon(1e-12));
}

TEST_CASE("OLS basics") {
    SUBCASE("exactly linear response") {
        std::vector<double> x{1, 2, 3, 4, 5, 6};
        std::vector<double> y;
        for (double v : x) y.push_back(2.0 - 0.5 * v);
        const auto fit = ols(design_with_intercept({x}), y);
        CHECK(fit.coefficients[0] == Approx(2.0));
        CHECK(fit.coefficients[1] == Approx(-0.5));
        CHECK(fit.r_squared == Approx(1.0));
        for (double r : fit.residuals) CHECK(std::fabs(r) < 1e-12);
    }
    SUBCASE("intercept only gives the mean") {
        std::vector<double> y{3, 5, 10, 2};
        Eigen::MatrixXd X = Eigen::MatrixXd::Ones(4, 1);
        const auto fit = ols(X, y);
        CHECK(fit.coefficients[0] == Approx(5.0));
        CHECK(fit.k == 1);
    }
    SUBCASE("8-point dataset against a hand-solved 2x2 normal-equation oracle") {
        std::vector<double> x{0.5, 1.5, 2.0, 3.5, 4.0, 5.5, 6.0, 7.5};
        std::vector<double> y{1.2, 1.9, 3.1, 3.9, 5.2, 5.8, 7.1, 7.7};
        // Oracle: b1 = Sxy/Sxx, b0 = ybar - b1 xbar.
        double xb = 0.0;
        double yb = 0.0;
        for (std::size_t i = 0; i < 8; ++i) {
            xb += x[i] / 8.0;
            yb += y[i] / 8.0;
        }
        double sxy = 0.0;
        double sxx = 0.0;
        for (std::size_t i = 0; i < 8; ++i) {
            sxy += (x[i] - xb) * (y[i] - yb);
            sxx += (x[i] - xb) * (x[i] - xb);
        }
        const auto fit = ols(design_with_intercept({x}), y);
        CHECK(fit.coefficients[1] == Approx(sxy / sxx).epsilon(1e-13));
        CHECK(fit.coefficients[0] == Approx(yb - sxy / sxx * xb).epsilon(1e-13));
    }
    SUBCASE("statsmodels reference") {
        const auto fit = ols(design_with_intercept({ref::x50}), ref::y50);
        CHECK(fit.coefficients[0] == Approx(ref::ols_b0).epsilon(1e-12));
        CHECK(fit.coefficients[1] == Approx(ref::ols_b1).epsilon(1e-12));
        CHECK(fit.standard_errors[0] == Approx(ref::ols_se0).epsilon(1e-10));
        CHECK(fit.standard_errors[1] == Approx(ref::ols_se1).epsilon(1e-10));
        CHECK(fit.p_values[1] == Approx(ref::ols_p1).epsilon(1e-8));
        CHECK(fit.sigma_hat == Approx(ref::ols_sigma).epsilon(1e-12));
        CHECK(fit.r_squared == Approx(ref::ols_r2).epsilon(1e-12));
    }
}

TEST_CASE("OLS errors") {
    std::vector<double> x{1, 2, 3};
    std::vector<double> y{1, 2, 4};
    CHECK(kind_of([&] { (void)ols(design_with_intercept({x, x}), y); }) == ErrorKind::TooFewObservations);
    std::vector<double> x4{1, 2, 3, 4, 5};
    std::vector<double> x4b{2, 4, 6, 8, 10};
    std::vector<double> y4{1, 2, 4, 3, 5};
    CHECK(kind_of([&] { (void)ols(design_with_intercept({x4, x4b}), y4); }) == ErrorKind::RankDeficient);
}

TEST_CASE("OLS invariants") {
    const auto x = normals(60, 3);
    const auto z = normals(60, 4);
    const auto e = normals(60, 5);
    std::vector<double> y(60);
    for (std::size_t i = 0; i < 60; ++i) y[i] = 1.0 + 0.7 * x[i] - 0.2 * z[i] + 0.5 * e[i];
    const auto X = design_with_intercept({x, z});
    const auto fit = ols(X, y);

    for (std::size_t i = 0; i < 60; ++i) CHECK(fit.fitted[i] + fit.residuals[i] == Approx(y[i]).epsilon(1e-10));
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        double ip = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < 60; ++i) {
            ip += X(static_cast<Eigen::Index>(i), j) * fit.residuals[i];
            scale += std::fabs(X(static_cast<Eigen::Index>(i), j) * y[i]);
        }
        CHECK(std::fabs(ip) < 1e-8 * scale);
    }
    CHECK(fit.r_squared >= 0.0);
    CHECK(fit.r_squared <= 1.0);

    std::vector<double> shifted = y;
    std::vector<double> scaled = y;
    for (auto& v : shifted) v += 3.0;
    for (auto& v : scaled) v *= -2.5;
    const auto fs = ols(X, shifted);
    const auto fk = ols(X, scaled);
    CHECK(fs.coefficients[0] == Approx(fit.coefficients[0] + 3.0));
    CHECK(fs.coefficients[1] == Approx(fit.coefficients[1]));
    CHECK(fs.coefficients[2] == Approx(fit.coefficients[2]));
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(fk.coefficients[j] == Approx(-2.5 * fit.coefficients[j]));
        CHECK(fk.t_stats[j] == Approx(-fit.t_stats[j]));
    }
    CHECK(fk.sigma_hat == Approx(2.5 * fit.sigma_hat));
    CHECK(fk.r_squared == Approx(fit.r_squared));
}

TEST_CASE("Ljung-Box") {
    const auto x = normals(500, 11);
    const auto r = ljung_box(x, 10);
    CHECK(r.statistic >= 0.0);
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);
    CHECK(r.params.at("lags") == 10.0);

    const auto b = ljung_box(ref::x50, 10, AcfScaling::Biased);
    CHECK(b.statistic == Approx(ref::lb_biased_q10).epsilon(1e-12));
    CHECK(b.p_value == Approx(ref::lb_biased_p10).epsilon(1e-10));
    const auto a = ljung_box(ref::x50, 10, AcfScaling::Adjusted);
    CHECK(a.statistic == Approx(ref::lb_adjusted_q10).epsilon(1e-12));
    CHECK(a.p_value == Approx(ref::lb_adjusted_p10).epsilon(1e-10));

    double prev = 0.0;
    for (std::size_t lags = 1; lags <= 30; ++lags) {
        for (auto s : {AcfScaling::Adjusted, AcfScaling::Biased}) {
            const double q = ljung_box(x, lags, s).statistic;
            if (s == AcfScaling::Adjusted) {
                CHECK(q >= prev);
                prev = q;
            }
        }
    }

    std::vector<double> constant(40, 2.0);
    CHECK(kind_of([&] { (void)ljung_box(constant, 5); }) == ErrorKind::DegenerateSeries);
    CHECK(kind_of([&] { (void)ljung_box(std::vector<double>{1, 2, 3}, 5); }) == ErrorKind::TooFewObservations);
}

TEST_CASE("Jarque-Bera") {
    std::vector<double> alt;
    for (int i = 0; i < 20; ++i) alt.push_back(i % 2 == 0 ? 1.0 : -1.0);
    const auto a = jarque_bera(alt);
    CHECK(std::fabs(a.params.at("skewness")) < 1e-12);

    const auto big = jarque_bera(normals(10000, 21));
    CHECK(big.p_value > 0.01);

    const auto e = jarque_bera(ref::exp200);
    CHECK(e.statistic == Approx(ref::jb_exp_stat).epsilon(1e-10));
    CHECK(e.p_value == Approx(ref::jb_exp_p).epsilon(1e-8));
    const auto n = jarque_bera(ref::x50);
    CHECK(n.statistic == Approx(ref::jb_x50_stat).epsilon(1e-10));
    CHECK(n.p_value == Approx(ref::jb_x50_p).epsilon(1e-10));

    CHECK(kind_of([&] { (void)jarque_bera(std::vector<double>(12, 1.0)); }) == ErrorKind::DegenerateSeries);
}

TEST_CASE("Shapiro-Wilk") {
    SUBCASE("scipy reference values") {
        const std::vector<double> three{1.0, 2.0, 4.0};
        const auto r3 = shapiro_wilk(three);
        CHECK(r3.statistic == Approx(ref::sw3_w).epsilon(1e-6));
        CHECK(r3.p_value == Approx(ref::sw3_p).epsilon(1e-5));
        const std::vector<double> eleven(ref::x50.begin(), ref::x50.begin() + 11);
        const auto r11 = shapiro_wilk(eleven);
        CHECK(r11.statistic == Approx(ref::sw11_w).epsilon(1e-6));
        CHECK(r11.p_value == Approx(ref::sw11_p).epsilon(1e-5));
        const auto r50 = shapiro_wilk(ref::x50);
        CHECK(r50.statistic == Approx(ref::sw50_w).epsilon(1e-6));
        CHECK(r50.p_value == Approx(ref::sw50_p).epsilon(1e-5));
        const auto r200 = shapiro_wilk(ref::exp200);
        CHECK(r200.statistic == Approx(ref::sw200exp_w).epsilon(1e-6));
        CHECK(r200.p_value == Approx(ref::sw200exp_p).epsilon(1e-3));
    }
    SUBCASE("exact normal quantiles give W close to 1") {
        std::vector<double> q;
        for (int i = 1; i <= 100; ++i) q.push_back(special::normal_quantile((i - 0.375) / 100.25));
        CHECK(shapiro_wilk(q).statistic > 0.998);
    }
    SUBCASE("sample size limits") {
        CHECK(kind_of([] { (void)shapiro_wilk(std::vector<double>{1.0, 2.0}); }) ==
              ErrorKind::SampleSizeOutOfRange);
        CHECK(kind_of([] { (void)shapiro_wilk(std::vector<double>(5001, 1.0)); }) ==
              ErrorKind::SampleSizeOutOfRange);
    }
}

TEST_CASE("ADF against statsmodels") {
    auto check = [](const std::vector<double>& x, AdfRegression reg, double stat, double p, double lag, double nobs) {
        const auto r = adf_test(x, reg);
        CHECK(r.statistic == Approx(stat).epsilon(1e-9));
        CHECK(r.p_value == Approx(p).epsilon(1e-6));
        CHECK(r.params.at("usedlag") == lag);
        CHECK(r.params.at("nobs") == nobs);
    };
    check(ref::ar120, AdfRegression::Constant, ref::adf_c_stat, ref::adf_c_p, ref::adf_c_lag, ref::adf_c_nobs);
    check(ref::ar120, AdfRegression::ConstantTrend, ref::adf_ct_stat, ref::adf_ct_p, ref::adf_ct_lag,
          ref::adf_ct_nobs);
    check(ref::ar120, AdfRegression::None, ref::adf_n_stat, ref::adf_n_p, ref::adf_n_lag, ref::adf_n_nobs);
    check(ref::ar2_150, AdfRegression::Constant, ref::adf2_c_stat, ref::adf2_c_p, ref::adf2_c_lag, ref::adf2_c_nobs);
    check(ref::ar2_150, AdfRegression::ConstantTrend, ref::adf2_ct_stat, ref::adf2_ct_p, ref::adf2_ct_lag,
          ref::adf2_ct_nobs);
    const auto r0 = adf_test(ref::ar120, AdfRegression::Constant, 0);
    CHECK(r0.statistic == Approx(ref::adf_c_lag0_stat).epsilon(1e-9));
}

TEST_CASE("MacKinnon p-values against statsmodels") {
    CHECK(mackinnon_p(-4.0, AdfRegression::Constant) == Approx(ref::mk_c_m4_0).epsilon(1e-9));
    CHECK(mackinnon_p(-2.5, AdfRegression::Constant) == Approx(ref::mk_c_m2_5).epsilon(1e-9));
    CHECK(mackinnon_p(-1.0, AdfRegression::Constant) == Approx(ref::mk_c_m1_0).epsilon(1e-9));
    CHECK(mackinnon_p(0.5, AdfRegression::Constant) == Approx(ref::mk_c_0_5).epsilon(1e-9));
    CHECK(mackinnon_p(-4.0, AdfRegression::ConstantTrend) == Approx(ref::mk_ct_m4_0).epsilon(1e-9));
    CHECK(mackinnon_p(-2.5, AdfRegression::ConstantTrend) == Approx(ref::mk_ct_m2_5).epsilon(1e-9));
    CHECK(mackinnon_p(-1.0, AdfRegression::ConstantTrend) == Approx(ref::mk_ct_m1_0).epsilon(1e-9));
    CHECK(mackinnon_p(0.5, AdfRegression::ConstantTrend) == Approx(ref::mk_ct_0_5).epsilon(1e-9));
    CHECK(mackinnon_p(-4.0, AdfRegression::None) == Approx(ref::mk_n_m4_0).epsilon(1e-9));
    CHECK(mackinnon_p(-2.5, AdfRegression::None) == Approx(ref::mk_n_m2_5).epsilon(1e-9));
    CHECK(mackinnon_p(-1.0, AdfRegression::None) == Approx(ref::mk_n_m1_0).epsilon(1e-9));
    CHECK(mackinnon_p(0.5, AdfRegression::None) == Approx(ref::mk_n_0_5).epsilon(1e-9));
}

TEST_CASE("ADF power and size") {
    Rng rng(99);
    std::vector<double> walk(2000);
    std::vector<double> ar(2000);
    for (std::size_t t = 1; t < 2000; ++t) {
        walk[t] = walk[t - 1] + rng.normal();
        ar[t] = 0.2 * ar[t - 1] + rng.normal();
    }
    CHECK(adf_test(walk).p_value > 0.10);
    CHECK(adf_test(ar).p_value < 0.01);
    CHECK(kind_of([] { (void)adf_test(std::vector<double>(19, 1.0)); }) == ErrorKind::TooFewObservations);
}

TEST_CASE("correlation tests") {
    SUBCASE("scipy reference values") {
        const auto p = correlation_test(ref::x50, ref::y50, CorrelationKind::Pearson);
        CHECK(p.statistic == Approx(ref::pearson_r).epsilon(1e-12));
        CHECK(p.p_value == Approx(ref::pearson_p).epsilon(1e-9));
        const auto s = correlation_test(ref::x50, ref::y50, CorrelationKind::Spearman);
        CHECK(s.statistic == Approx(ref::spearman_r).epsilon(1e-12));
        CHECK(s.p_value == Approx(ref::spearman_p).epsilon(1e-9));
        const auto k = correlation_test(ref::x50, ref::y50, CorrelationKind::Kendall);
        CHECK(k.statistic == Approx(ref::kendall_tau).epsilon(1e-12));
        CHECK(k.p_value == Approx(ref::kendall_p).epsilon(1e-9));
    }
    SUBCASE("tied data") {
        const auto s = correlation_test(ref::tie_x, ref::tie_y, CorrelationKind::Spearman);
        CHECK(s.statistic == Approx(ref::spearman_tie_r).epsilon(1e-12));
        CHECK(s.p_value == Approx(ref::spearman_tie_p).epsilon(1e-9));
        const auto k = correlation_test(ref::tie_x, ref::tie_y, CorrelationKind::Kendall);
        CHECK(k.statistic == Approx(ref::kendall_tie_tau).epsilon(1e-12));
        CHECK(k.p_value == Approx(ref::kendall_tie_p).epsilon(1e-9));
    }
    SUBCASE("identity and independence") {
        const auto x = normals(1000, 31);
        const auto y = normals(1000, 32);
        for (auto kind : {CorrelationKind::Pearson, CorrelationKind::Spearman, CorrelationKind::Kendall}) {
            const auto same = correlation_test(x, x, kind);
            CHECK(same.statistic == Approx(1.0));
            CHECK(same.p_value < 1e-12);
            const auto ind = correlation_test(x, y, kind);
            CHECK(std::fabs(ind.statistic) < 0.1);
            CHECK(ind.p_value >= 0.0);
            CHECK(ind.p_value <= 1.0);
        }
    }
    SUBCASE("Spearman is invariant under strictly monotone transforms") {
        const auto x = normals(80, 41);
        const auto y = normals(80, 42);
        std::vector<double> xt;
        std::vector<double> yt;
        for (double v : x) xt.push_back(std::exp(3.0 * v));
        for (double v : y) yt.push_back(-std::atan(v));
        const double a = correlation_test(x, y, CorrelationKind::Spearman).statistic;
        CHECK(correlation_test(xt, y, CorrelationKind::Spearman).statistic == Approx(a).epsilon(1e-14));
        CHECK(correlation_test(x, yt, CorrelationKind::Spearman).statistic == Approx(-a).epsilon(1e-14));
    }
    SUBCASE("errors") {
        std::vector<double> a{1, 2, 3, 4, 5, 6};
        std::vector<double> b{1, 2, 3};
        std::vector<double> c(6, 1.0);
        CHECK(kind_of([&] { (void)correlation_test(a, b, CorrelationKind::Pearson); }) == ErrorKind::LengthMismatch);
        CHECK(kind_of([&] { (void)correlation_test(a, c, CorrelationKind::Spearman); }) ==
              ErrorKind::DegenerateSeries);
        CHECK(kind_of([&] { (void)correlation_test(b, b, CorrelationKind::Kendall); }) ==
              ErrorKind::TooFewObservations);
    }
}

TEST_CASE("descriptive helpers") {
    std::vector<double> x{2, 4, 4, 4, 5, 5, 7, 9};
    CHECK(mean(x) == 5.0);
    CHECK(sample_sd(x) == Approx(std::sqrt(32.0 / 7.0)));
    CHECK(ranks(std::vector<double>{10, 20, 20, 5}) == std::vector<double>{2, 3.5, 3.5, 1});
}
