#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace vlab {

enum class TestName { LjungBox, JarqueBera, ShapiroWilk, ADF, PearsonT, SpearmanT, KendallT, StudentT };

[[nodiscard]] std::string_view to_string(TestName name) noexcept;

struct TestReport {
    TestName name = TestName::StudentT;
    double statistic = 0.0;
    double p_value = 1.0;
    std::map<std::string, double> params;
    std::string label;  ///< what was tested, e.g. "residuals"
};

struct OlsFit {
    std::vector<double> coefficients;
    std::vector<double> standard_errors;
    std::vector<double> t_stats;
    std::vector<double> p_values;
    std::vector<double> residuals;
    std::vector<double> fitted;
    double sigma_hat = 0.0;  ///< sqrt(SSR / (n - k))
    double ssr = 0.0;
    double r_squared = 0.0;
    std::size_t n = 0;
    std::size_t k = 0;
};

/**
 * @brief Least squares via column-pivoted Householder QR.
 * @throws Error TooFewObservations (n <= k), RankDeficient, LengthMismatch
 */
[[nodiscard]] OlsFit ols(const Eigen::MatrixXd& X, std::span<const double> y);

/// Design matrix with an intercept column followed by the given regressors.
[[nodiscard]] Eigen::MatrixXd design_with_intercept(std::initializer_list<std::span<const double>> columns);

[[nodiscard]] double mean(std::span<const double> x);
/// Sample standard deviation with n-1 divisor.
[[nodiscard]] double sample_sd(std::span<const double> x);
[[nodiscard]] double pearson(std::span<const double> x, std::span<const double> y);
/// Average ranks (1-based), ties share the mean rank.
[[nodiscard]] std::vector<double> ranks(std::span<const double> x);

enum class AcfScaling {
    Adjusted,  ///< lag-k autocovariance divided by n-k
    Biased,    ///< lag-k autocovariance divided by n
};

/// Sample autocorrelations rho_1..rho_lags.
[[nodiscard]] std::vector<double> acf(std::span<const double> x, std::size_t lags,
                                      AcfScaling scaling = AcfScaling::Adjusted);

/**
 * @brief Ljung-Box portmanteau test, Q = n(n+2) sum rho_k^2/(n-k), chi-squared with `lags` df.
 * @throws Error TooFewObservations, DegenerateSeries (zero variance)
 */
[[nodiscard]] TestReport ljung_box(std::span<const double> x, std::size_t lags,
                                   AcfScaling scaling = AcfScaling::Adjusted);

/// JB = n/6 (S^2 + (K-3)^2/4) with population moments; chi-squared(2). Needs n >= 8.
[[nodiscard]] TestReport jarque_bera(std::span<const double> x);

/// Shapiro-Wilk W with Royston's (AS R94) coefficient and p-value approximations, 3 <= n <= 5000.
[[nodiscard]] TestReport shapiro_wilk(std::span<const double> x);

enum class AdfRegression { Constant, ConstantTrend, None };

/// MacKinnon (1994, 2010) response-surface p-value for a single-series ADF statistic.
[[nodiscard]] double mackinnon_p(double tau, AdfRegression regression);

/**
 * @brief Augmented Dickey-Fuller test.
 *
 * Lag order chosen by AIC from 0..maxlag on a common sample, default
 * maxlag = floor(12 (n/100)^{1/4}) capped at n/2 - ntrend - 1. The chosen lag is
 * refit on its full sample; the statistic is the t-value of the lagged level.
 *
 * @throws Error TooFewObservations (n < 20)
 */
[[nodiscard]] TestReport adf_test(std::span<const double> x, AdfRegression regression = AdfRegression::Constant,
                                  std::optional<std::size_t> maxlag = std::nullopt);

enum class CorrelationKind { Pearson, Spearman, Kendall };

/**
 * @brief Correlation coefficient (statistic) with a two-sided p-value.
 *
 * Pearson and Spearman use the t approximation with n-2 df; Kendall is tau-b with the
 * tie-corrected normal approximation.
 *
 * @throws Error LengthMismatch, TooFewObservations (n < 5), DegenerateSeries
 */
[[nodiscard]] TestReport correlation_test(std::span<const double> x, std::span<const double> y, CorrelationKind kind);

/// Two-sided t-test of an OLS coefficient against null_value.
[[nodiscard]] TestReport coefficient_t_test(const OlsFit& fit, std::size_t index, double null_value);

}  // namespace vlab
