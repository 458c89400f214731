#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "valuation_lab/econostats.hpp"

namespace vlab {

struct DiagnosticOptions {
    std::vector<std::size_t> ljung_box_lags{5, 10, 15, 20};
    AcfScaling acf_scaling = AcfScaling::Adjusted;
    /// Growth series aligned with the residuals; enables the independence tests.
    std::optional<std::vector<double>> growth;
    bool adf = true;
};

struct Ar1Fit {
    double alpha = 0.0;
    double beta = 0.0;
    double sigma_eps = 0.0;
    double long_run_mean = 0.0;  ///< alpha / (1 - beta)
    std::vector<double> residuals;
    OlsFit ols;
    std::vector<TestReport> diagnostics;
};

struct BubbleFit {
    double alpha_h = 0.0;
    double beta_h = 0.0;
    double c = 0.0;
    double sigma_eps = 0.0;
    double h = 0.0;  ///< alpha_h / (1 - beta_h)
    std::vector<double> raw_coeffs;  ///< (alpha_h + c, beta_h - 1, c (1 - beta_h))
    std::vector<double> b_series;    ///< ln H(t) - c t, same indexing as the input
    std::vector<double> t_index;
    std::vector<double> residuals;
    OlsFit ols;
    std::vector<TestReport> diagnostics;
};

/**
 * @brief OLS of lnG(t) on [1, lnG(t-1)] with the diagnostic battery attached.
 * @throws Error TooFewObservations (fewer than 30 points)
 */
[[nodiscard]] Ar1Fit fit_tr_cape(std::span<const double> lnG, const DiagnosticOptions& options = {});

/**
 * @brief Trend AR(1) for ln H: regress ln H(t) - ln H(t-1) on [1, ln H(t-1), t-1].
 *
 * t_index holds the time index of every entry of lnH; the regressor uses t_index[i-1].
 * The normal-equation solution is mapped back to (alpha_h, beta_h, c).
 *
 * @throws Error TooFewObservations, RankDeficient
 */
[[nodiscard]] BubbleFit fit_bubble(std::span<const double> lnH, std::span<const double> t_index,
                                   const DiagnosticOptions& options = {});

/// Raw regression coefficients implied by (alpha_h, beta_h, c).
[[nodiscard]] std::vector<double> bubble_raw_from_implied(double alpha_h, double beta_h, double c);

/**
 * @brief Pearson correlation of measure(t) with mean(R(t+1..t+horizon)).
 *
 * Both series share one index; NaN entries are skipped. Only t with a full forward
 * window of defined returns contribute.
 *
 * @throws Error TooFewObservations (fewer than 3 usable points), LengthMismatch
 */
[[nodiscard]] double predictive_correlation(std::span<const double> measure, std::span<const double> R,
                                            std::size_t horizon);

/// Two-sided t-test of the slope coefficient against null_value (slope = beta for Ar1Fit,
/// beta_h for BubbleFit; the bubble regression carries beta_h - 1).
[[nodiscard]] TestReport student_t_slope_test(const Ar1Fit& fit, double null_value);
[[nodiscard]] TestReport student_t_slope_test(const BubbleFit& fit, double null_value);

[[nodiscard]] const TestReport* find_diagnostic(const std::vector<TestReport>& diags, TestName name,
                                                const std::string& label, double lags = 0.0);

}  // namespace vlab
