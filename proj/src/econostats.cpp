#include "valuation_lab/econostats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "valuation_lab/errors.hpp"
#include "valuation_lab/special.hpp"

namespace vlab {

namespace {

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

std::size_t ntrend_of(AdfRegression r) {
    switch (r) {
        case AdfRegression::None: return 0;
        case AdfRegression::Constant: return 1;
        case AdfRegression::ConstantTrend: return 2;
    }
    return 1;
}

const char* adf_code(AdfRegression r) {
    switch (r) {
        case AdfRegression::None: return "n";
        case AdfRegression::Constant: return "c";
        case AdfRegression::ConstantTrend: return "ct";
    }
    return "c";
}

double poly(std::span<const double> c, double x) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

double swilk_pvalue(std::size_t n, double w, double w1) {
    if (n == 3) {
        const double pi6 = 6.0 / M_PI;
        const double stqr = M_PI / 3.0;
        return std::max(0.0, pi6 * (std::asin(std::sqrt(w)) - stqr));
    }
    static const double g[] = {-2.273, 0.459};
    static const double c3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
    static const double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
    static const double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
    static const double c6[] = {-0.4803, -0.082676, 0.0030302};
    const double an = static_cast<double>(n);
    double y = std::log(w1);
    double mu;
    double s;
    if (n <= 11) {
        const double gamma = poly(g, an);
        if (y >= gamma) return 1e-99;
        y = -std::log(gamma - y);
        mu = poly(c3, an);
        s = std::exp(poly(c4, an));
    } else {
        const double xx = std::log(an);
        mu = poly(c5, xx);
        s = std::exp(poly(c6, xx));
    }
    return special::normal_sf((y - mu) / s);
}

// Regressors for the ADF regression on sample rows j = first..m-1 of the differenced series.
Eigen::MatrixXd adf_design(std::span<const double> x, std::span<const double> dx, std::size_t first,
                           std::size_t lags, std::size_t ntrend, bool trend_first) {
    const std::size_t m = dx.size();
    const std::size_t nobs = m - first;
    const std::size_t k = ntrend + 1 + lags;
    Eigen::MatrixXd X(static_cast<Eigen::Index>(nobs), static_cast<Eigen::Index>(k));
    const std::size_t off = trend_first ? ntrend : 0;
    const std::size_t toff = trend_first ? 0 : 1 + lags;
    for (std::size_t r = 0; r < nobs; ++r) {
        const std::size_t j = first + r;
        const auto row = static_cast<Eigen::Index>(r);
        X(row, static_cast<Eigen::Index>(off)) = x[j];
        for (std::size_t l = 1; l <= lags; ++l) X(row, static_cast<Eigen::Index>(off + l)) = dx[j - l];
        if (ntrend >= 1) X(row, static_cast<Eigen::Index>(toff)) = 1.0;
        if (ntrend >= 2) X(row, static_cast<Eigen::Index>(toff + 1)) = static_cast<double>(r + 1);
    }
    return X;
}

double ols_aic(const OlsFit& f) {
    const double n = static_cast<double>(f.n);
    const double llf = -n / 2.0 * (std::log(2.0 * M_PI) + std::log(f.ssr / n) + 1.0);
    return -2.0 * llf + 2.0 * static_cast<double>(f.k);
}

struct TieCounts {
    double pairs = 0.0;  // sum t(t-1)/2
    double v0 = 0.0;     // sum t(t-1)(t-2)
    double v1 = 0.0;     // sum t(t-1)(2t+5)
};

TieCounts tie_counts(std::span<const double> x) {
    std::vector<double> s(x.begin(), x.end());
    std::sort(s.begin(), s.end());
    TieCounts tc;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t j = i;
        while (j + 1 < s.size() && s[j + 1] == s[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        if (t > 1) {
            tc.pairs += t * (t - 1) / 2.0;
            tc.v0 += t * (t - 1) * (t - 2);
            tc.v1 += t * (t - 1) * (2 * t + 5);
        }
        i = j + 1;
    }
    return tc;
}

}  // namespace

std::string_view to_string(TestName name) noexcept {
    switch (name) {
        case TestName::LjungBox: return "LjungBox";
        case TestName::JarqueBera: return "JarqueBera";
        case TestName::ShapiroWilk: return "ShapiroWilk";
        case TestName::ADF: return "ADF";
        case TestName::PearsonT: return "PearsonT";
        case TestName::SpearmanT: return "SpearmanT";
        case TestName::KendallT: return "KendallT";
        case TestName::StudentT: return "StudentT";
    }
    return "Unknown";
}

OlsFit ols(const Eigen::MatrixXd& X, std::span<const double> y) {
    const auto n = static_cast<std::size_t>(X.rows());
    const auto k = static_cast<std::size_t>(X.cols());
    if (y.size() != n) throw Error(ErrorKind::LengthMismatch, "ols: response length differs from design rows");
    if (n <= k) throw Error(ErrorKind::TooFewObservations, "ols: need n > k");
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(n));

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-12);
    if (static_cast<std::size_t>(qr.rank()) < k) throw Error(ErrorKind::RankDeficient, "ols: design matrix is rank deficient");
    const Eigen::VectorXd beta = qr.solve(yv);
    const Eigen::VectorXd fitted = X * beta;
    const Eigen::VectorXd resid = yv - fitted;

    OlsFit fit;
    fit.n = n;
    fit.k = k;
    fit.coefficients.assign(beta.data(), beta.data() + k);
    fit.residuals.assign(resid.data(), resid.data() + n);
    fit.fitted.assign(fitted.data(), fitted.data() + n);
    fit.ssr = resid.squaredNorm();
    const double dof = static_cast<double>(n - k);
    fit.sigma_hat = std::sqrt(fit.ssr / dof);

    const double ybar = yv.mean();
    const double sst = (yv.array() - ybar).square().sum();
    fit.r_squared = sst > 0.0 ? std::clamp(1.0 - fit.ssr / sst, 0.0, 1.0) : 1.0;

    // (X'X)^{-1} = P R^{-1} R^{-T} P^T
    const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k))
                                  .template triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rinv = R.template triangularView<Eigen::Upper>().solve(
        Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)));
    const Eigen::MatrixXd covp = Rinv * Rinv.transpose();
    const Eigen::MatrixXd cov = qr.colsPermutation() * covp * qr.colsPermutation().transpose();

    const double s2 = fit.ssr / dof;
    for (std::size_t i = 0; i < k; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double se = std::sqrt(std::max(0.0, cov(ii, ii) * s2));
        fit.standard_errors.push_back(se);
        double t;
        double p;
        if (se > 0.0) {
            t = fit.coefficients[i] / se;
            p = special::student_t_two_sided(t, dof);
        } else if (fit.coefficients[i] == 0.0) {
            t = 0.0;
            p = 1.0;
        } else {
            t = std::copysign(std::numeric_limits<double>::infinity(), fit.coefficients[i]);
            p = 0.0;
        }
        fit.t_stats.push_back(t);
        fit.p_values.push_back(p);
    }
    return fit;
}

Eigen::MatrixXd design_with_intercept(std::initializer_list<std::span<const double>> columns) {
    const std::size_t n = columns.size() == 0 ? 0 : columns.begin()->size();
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(columns.size() + 1));
    X.col(0).setOnes();
    Eigen::Index c = 1;
    for (auto col : columns) {
        if (col.size() != n) throw Error(ErrorKind::LengthMismatch, "design columns differ in length");
        for (std::size_t i = 0; i < n; ++i) X(static_cast<Eigen::Index>(i), c) = col[i];
        ++c;
    }
    return X;
}

double mean(std::span<const double> x) {
    if (x.empty()) throw Error(ErrorKind::TooFewObservations, "mean of empty series");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
    if (x.size() < 2) throw Error(ErrorKind::TooFewObservations, "sd needs at least two values");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size() - 1));
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorKind::LengthMismatch, "pearson: lengths differ");
    if (x.size() < 2) throw Error(ErrorKind::TooFewObservations, "pearson needs at least two pairs");
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::DegenerateSeries, "pearson: zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> ranks(std::span<const double> x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(x.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t q = i; q <= j; ++q) r[idx[q]] = avg;
        i = j + 1;
    }
    return r;
}

std::vector<double> acf(std::span<const double> x, std::size_t lags, AcfScaling scaling) {
    const std::size_t n = x.size();
    if (n <= lags) throw Error(ErrorKind::TooFewObservations, "acf: need more observations than lags");
    const double m = mean(x);
    double c0 = 0.0;
    for (double v : x) c0 += (v - m) * (v - m);
    c0 /= static_cast<double>(n);
    if (!(c0 > 0.0)) throw Error(ErrorKind::DegenerateSeries, "acf: zero variance series");
    std::vector<double> rho(lags);
    for (std::size_t k = 1; k <= lags; ++k) {
        double ck = 0.0;
        for (std::size_t t = k; t < n; ++t) ck += (x[t] - m) * (x[t - k] - m);
        ck /= scaling == AcfScaling::Adjusted ? static_cast<double>(n - k) : static_cast<double>(n);
        rho[k - 1] = ck / c0;
    }
    return rho;
}

TestReport ljung_box(std::span<const double> x, std::size_t lags, AcfScaling scaling) {
    if (lags < 1) throw Error(ErrorKind::InvalidArgument, "ljung_box: lags must be >= 1");
    const auto rho = acf(x, lags, scaling);
    const double n = static_cast<double>(x.size());
    double q = 0.0;
    for (std::size_t k = 1; k <= lags; ++k) q += rho[k - 1] * rho[k - 1] / (n - static_cast<double>(k));
    q *= n * (n + 2.0);
    TestReport rep;
    rep.name = TestName::LjungBox;
    rep.statistic = q;
    rep.p_value = clamp01(special::chi2_sf(q, static_cast<double>(lags)));
    rep.params = {{"lags", static_cast<double>(lags)}, {"n", n}};
    return rep;
}

TestReport jarque_bera(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 8) throw Error(ErrorKind::TooFewObservations, "jarque_bera needs n >= 8");
    const double m = mean(x);
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (double v : x) {
        const double d = v - m;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    const double nn = static_cast<double>(n);
    m2 /= nn;
    m3 /= nn;
    m4 /= nn;
    if (!(m2 > 0.0)) throw Error(ErrorKind::DegenerateSeries, "jarque_bera: zero variance");
    const double skew = m3 / std::pow(m2, 1.5);
    const double kurt = m4 / (m2 * m2);
    const double jb = nn / 6.0 * (skew * skew + (kurt - 3.0) * (kurt - 3.0) / 4.0);
    TestReport rep;
    rep.name = TestName::JarqueBera;
    rep.statistic = jb;
    rep.p_value = clamp01(special::chi2_sf(jb, 2.0));
    rep.params = {{"n", nn}, {"skewness", skew}, {"kurtosis", kurt}};
    return rep;
}

TestReport shapiro_wilk(std::span<const double> data) {
    const std::size_t n = data.size();
    if (n < 3 || n > 5000) throw Error(ErrorKind::SampleSizeOutOfRange, "shapiro_wilk needs 3 <= n <= 5000");
    std::vector<double> x(data.begin(), data.end());
    std::sort(x.begin(), x.end());
    const double range = x.back() - x.front();
    if (!(range > 1e-19 * std::max(1.0, std::fabs(x.front())))) {
        throw Error(ErrorKind::DegenerateSeries, "shapiro_wilk: all values identical");
    }

    const double an = static_cast<double>(n);
    const std::size_t nn2 = n / 2;
    std::vector<double> a(nn2 + 1, 0.0);  // 1-based half coefficients, positive
    if (n == 3) {
        a[1] = std::sqrt(0.5);
    } else {
        static const double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
        static const double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
        std::vector<double> m(nn2 + 1);
        double summ2 = 0.0;
        for (std::size_t i = 1; i <= nn2; ++i) {
            m[i] = special::normal_quantile((static_cast<double>(i) - 0.375) / (an + 0.25));
            summ2 += m[i] * m[i];
        }
        summ2 *= 2.0;
        const double ssumm2 = std::sqrt(summ2);
        const double rsn = 1.0 / std::sqrt(an);
        const double a1 = poly(c1, rsn) - m[1] / ssumm2;
        std::size_t i1;
        double fac;
        if (n > 5) {
            i1 = 3;
            const double a2 = -m[2] / ssumm2 + poly(c2, rsn);
            fac = std::sqrt((summ2 - 2.0 * m[1] * m[1] - 2.0 * m[2] * m[2]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
            a[2] = a2;
        } else {
            i1 = 2;
            fac = std::sqrt((summ2 - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1));
        }
        a[1] = a1;
        for (std::size_t i = i1; i <= nn2; ++i) a[i] = -m[i] / fac;
    }

    // W as the squared correlation between ordered data and the antisymmetric coefficients.
    std::vector<double> coef(n, 0.0);
    for (std::size_t i = 1; i <= nn2; ++i) {
        coef[i - 1] = -a[i];
        coef[n - i] = a[i];
    }
    const double ca = mean(coef);
    const double cx = mean(x);
    double saa = 0.0;
    double sxx = 0.0;
    double sax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = coef[i] - ca;
        const double dx = (x[i] - cx) / range;
        saa += da * da;
        sxx += dx * dx;
        sax += da * dx;
    }
    const double ssassx = std::sqrt(saa * sxx);
    const double w1 = (ssassx - sax) * (ssassx + sax) / (saa * sxx);
    const double w = 1.0 - w1;

    const double pw = swilk_pvalue(n, w, w1);
    TestReport rep;
    rep.name = TestName::ShapiroWilk;
    rep.statistic = w;
    rep.p_value = clamp01(pw);
    rep.params = {{"n", an}};
    return rep;
}

double mackinnon_p(double tau, AdfRegression regression) {
    struct Table {
        double max, min, star;
        double small[3];
        double large[4];
    };
    static const Table tc{2.74, -18.83, -1.61, {2.1659, 1.4412, 0.038269}, {1.7339, 0.93202, -0.12745, -0.010368}};
    static const Table tct{0.7, -16.18, -2.89, {3.2512, 1.6047, 0.049588}, {2.5261, 0.61654, -0.37956, -0.060285}};
    static const Table tn{std::numeric_limits<double>::infinity(), -19.04, -1.04, {0.6344, 1.2378, 0.032496},
                          {0.4797, 0.93557, -0.06999, 0.033066}};
    const Table& t = regression == AdfRegression::Constant ? tc : regression == AdfRegression::ConstantTrend ? tct : tn;
    if (tau > t.max) return 1.0;
    if (tau < t.min) return 0.0;
    const double z = tau <= t.star ? poly(t.small, tau) : poly(t.large, tau);
    return special::normal_cdf(z);
}

TestReport adf_test(std::span<const double> x, AdfRegression regression, std::optional<std::size_t> maxlag_opt) {
    const std::size_t n = x.size();
    if (n < 20) throw Error(ErrorKind::TooFewObservations, "adf_test needs n >= 20");
    const std::size_t ntrend = ntrend_of(regression);
    std::size_t maxlag = maxlag_opt.value_or(
        static_cast<std::size_t>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25))));
    const long cap = static_cast<long>(n / 2) - static_cast<long>(ntrend) - 1;
    if (cap < 0) throw Error(ErrorKind::TooFewObservations, "adf_test: sample too short for any lag");
    maxlag = std::min(maxlag, static_cast<std::size_t>(cap));

    std::vector<double> dx(n - 1);
    for (std::size_t i = 1; i < n; ++i) dx[i - 1] = x[i] - x[i - 1];

    // AIC search on the common sample that supports maxlag lagged differences.
    std::size_t best = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    {
        const Eigen::MatrixXd full = adf_design(x, dx, maxlag, maxlag, ntrend, true);
        std::span<const double> y(dx.data() + maxlag, dx.size() - maxlag);
        for (std::size_t lag = 0; lag <= maxlag; ++lag) {
            const auto cols = static_cast<Eigen::Index>(ntrend + 1 + lag);
            const auto fit = ols(full.leftCols(cols), y);
            const double aic = ols_aic(fit);
            if (aic < best_aic) {
                best_aic = aic;
                best = lag;
            }
        }
    }
    const Eigen::MatrixXd X = adf_design(x, dx, best, best, ntrend, false);
    std::span<const double> y(dx.data() + best, dx.size() - best);
    const auto fit = ols(X, y);

    TestReport rep;
    rep.name = TestName::ADF;
    rep.statistic = fit.t_stats[0];
    rep.p_value = clamp01(mackinnon_p(rep.statistic, regression));
    rep.params = {{"usedlag", static_cast<double>(best)},
                  {"maxlag", static_cast<double>(maxlag)},
                  {"nobs", static_cast<double>(fit.n)},
                  {"icbest", best_aic}};
    rep.label = std::string("regression=") + adf_code(regression);
    return rep;
}

TestReport correlation_test(std::span<const double> x, std::span<const double> y, CorrelationKind kind) {
    if (x.size() != y.size()) throw Error(ErrorKind::LengthMismatch, "correlation_test: lengths differ");
    const std::size_t n = x.size();
    if (n < 5) throw Error(ErrorKind::TooFewObservations, "correlation_test needs n >= 5");
    const double nn = static_cast<double>(n);
    TestReport rep;
    rep.params["n"] = nn;

    if (kind == CorrelationKind::Kendall) {
        rep.name = TestName::KendallT;
        double cmd = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double sx = (x[i] > x[j]) - (x[i] < x[j]);
                const double sy = (y[i] > y[j]) - (y[i] < y[j]);
                cmd += sx * sy;
            }
        }
        const auto tx = tie_counts(x);
        const auto ty = tie_counts(y);
        const double tot = nn * (nn - 1.0) / 2.0;
        if (tx.pairs == tot || ty.pairs == tot) throw Error(ErrorKind::DegenerateSeries, "kendall: constant series");
        const double tau = cmd / std::sqrt((tot - tx.pairs) * (tot - ty.pairs));
        const double m = nn * (nn - 1.0);
        const double var = (m * (2.0 * nn + 5.0) - tx.v1 - ty.v1) / 18.0 + 2.0 * tx.pairs * ty.pairs / m +
                           tx.v0 * ty.v0 / (9.0 * m * (nn - 2.0));
        const double z = cmd / std::sqrt(var);
        rep.statistic = std::clamp(tau, -1.0, 1.0);
        rep.p_value = clamp01(std::erfc(std::fabs(z) / std::sqrt(2.0)));
        rep.params["z"] = z;
        return rep;
    }

    double r;
    if (kind == CorrelationKind::Pearson) {
        rep.name = TestName::PearsonT;
        r = pearson(x, y);
    } else {
        rep.name = TestName::SpearmanT;
        const auto rx = ranks(x);
        const auto ry = ranks(y);
        r = pearson(rx, ry);
    }
    const double df = nn - 2.0;
    double t;
    double p;
    if (std::fabs(r) >= 1.0) {
        t = std::copysign(std::numeric_limits<double>::infinity(), r);
        p = 0.0;
    } else {
        t = r * std::sqrt(df / (1.0 - r * r));
        p = special::student_t_two_sided(t, df);
    }
    rep.statistic = r;
    rep.p_value = clamp01(p);
    rep.params["t"] = t;
    return rep;
}

TestReport coefficient_t_test(const OlsFit& fit, std::size_t index, double null_value) {
    if (index >= fit.coefficients.size()) throw Error(ErrorKind::InvalidArgument, "coefficient index out of range");
    const double num = fit.coefficients[index] - null_value;
    const double se = fit.standard_errors[index];
    const double df = static_cast<double>(fit.n - fit.k);
    TestReport rep;
    rep.name = TestName::StudentT;
    if (se > 0.0) {
        rep.statistic = num / se;
        rep.p_value = clamp01(special::student_t_two_sided(rep.statistic, df));
    } else if (num == 0.0) {
        rep.statistic = 0.0;
        rep.p_value = 1.0;
    } else {
        rep.statistic = std::copysign(std::numeric_limits<double>::infinity(), num);
        rep.p_value = 0.0;
    }
    rep.params = {{"df", df}, {"null_value", null_value}, {"coefficient_index", static_cast<double>(index)}};
    return rep;
}

}  // namespace vlab
