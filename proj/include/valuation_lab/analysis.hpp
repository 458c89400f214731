#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "valuation_lab/discrete_dynamics.hpp"
#include "valuation_lab/market_data.hpp"
#include "valuation_lab/valuation_models.hpp"

namespace vlab {

/// Everything estimated from one market table. Model inputs run over t = W..T, growth over t = W+1..T.
struct HistoricalAnalysis {
    DerivedSeries d;
    std::vector<double> lnG, lnF, lnH, t_index;
    std::vector<double> g_real, g_tr;
    Ar1Fit tr_cape;
    BubbleFit bubble;

    /// Gaussian AR(1) for the bubble measure with (alpha_h, beta_h, c, sigma_eps) and block-bootstrapped g_real.
    [[nodiscard]] DiscreteModelSpec bubble_spec() const;
    /// Observed bubble measure in the last year.
    [[nodiscard]] double b_last() const { return bubble.b_series.back(); }
    /// ln CAPE, ln TR-CAPE and the bubble measure on the full index, NaN before W.
    [[nodiscard]] std::vector<double> measure(std::string_view name) const;
};

[[nodiscard]] HistoricalAnalysis analyze(const RawMarketTable& raw, const DiagnosticOptions& base = {},
                                         std::size_t window = 10);

struct PredictiveRow {
    std::string measure;  ///< "tr_cape", "cape" or "bubble"
    std::size_t horizon = 1;
    double correlation = 0.0;
    std::size_t n = 0;
};

[[nodiscard]] std::vector<PredictiveRow> predictive_table(const HistoricalAnalysis& a,
                                                          const std::vector<std::size_t>& horizons = {1, 10});
[[nodiscard]] std::string predictive_to_csv(const std::vector<PredictiveRow>& rows);
[[nodiscard]] std::vector<PredictiveRow> parse_predictive_csv(std::string_view content);

struct GoldenCheck {
    enum class Kind { Within, AtMost, AtLeast };
    int criterion = 0;
    std::string name;
    double value = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    Kind kind = Kind::Within;
    bool pass = false;
};

[[nodiscard]] GoldenCheck make_check(int criterion, std::string name, double value, double expected, double tolerance,
                                     GoldenCheck::Kind kind = GoldenCheck::Kind::Within);

/// Published reference values for the historical analysis with their tolerances.
[[nodiscard]] std::vector<GoldenCheck> golden_checks(const HistoricalAnalysis& a);

}  // namespace vlab
