#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vlab {

struct MarketRow {
    int year = 0;
    double price = 0.0;                ///< January nominal index level
    std::optional<double> dividend;    ///< nominal, calendar year
    std::optional<double> earnings;    ///< nominal, calendar year
    double cpi = 0.0;                  ///< January CPI level
};

struct RawMarketTable {
    std::vector<MarketRow> rows;

    [[nodiscard]] std::size_t size() const noexcept { return rows.size(); }
    /// Number of rows carrying both dividend and earnings.
    [[nodiscard]] std::size_t dividend_rows() const noexcept;
};

/**
 * @brief Parse `year,price,dividend,earnings,cpi` CSV content.
 *
 * Dividend and earnings may be empty on the final row only. Trailing blank lines
 * are ignored.
 *
 * @throws Error MalformedRow, GapInYears, NonPositive, TooFewRows (fewer than min_rows)
 */
[[nodiscard]] RawMarketTable parse_market_csv(std::string_view content, std::size_t min_rows = 2);

[[nodiscard]] RawMarketTable load_market_csv(const std::string& path, std::size_t min_rows = 2);

/**
 * @brief Real series in final-year dollars, indexed t = 0..T (T = rows - 1).
 *
 * S(t) is the price of row t. D(t) and E(t) for t >= 1 are the dividend and earnings
 * of row t-1 (the calendar year ending at the January of row t), deflated by the CPI
 * of row t. D(0) and E(0) are NaN.
 */
struct RealSeries {
    std::vector<double> S;
    std::vector<double> D;
    std::vector<double> E;
    std::vector<double> cpi_ratio;  ///< C(T)/C(t)
};

[[nodiscard]] RealSeries deflate(const RawMarketTable& raw);

/// R(t) = ln((S(t)+D(t))/S(t-1)) for t = 1..T; returned vector has length T, entry k holds R(k+1).
[[nodiscard]] std::vector<double> total_returns(std::span<const double> S, std::span<const double> D);

/// V(0) = 1, V(t) = V(t-1) exp(R(t)); input entry k holds R(k+1), output has length R.size()+1.
[[nodiscard]] std::vector<double> wealth(std::span<const double> R);

/// Inclusive trailing mean; entry k of the output ends at x[k + window - 1].
[[nodiscard]] std::vector<double> trailing_average(std::span<const double> x, std::size_t window);

/**
 * @brief All derived series on the common index t = 0..T.
 *
 * Undefined entries hold NaN: R, D, E, Ebar at t = 0 and the trailing quantities before
 * base_index = window.
 */
struct DerivedSeries {
    int first_year = 0;
    std::size_t window = 10;
    std::size_t base_index = 10;
    std::vector<double> S, D, E, R, V, E10, Ebar, Ebar10, cape, tr_cape, H;

    [[nodiscard]] std::size_t T() const noexcept { return S.empty() ? 0 : S.size() - 1; }
    [[nodiscard]] int year(std::size_t t) const noexcept { return first_year + static_cast<int>(t); }
};

[[nodiscard]] DerivedSeries build_derived(const RawMarketTable& raw, std::size_t window = 10);

/// Values of `x` at t = from..T as a contiguous vector.
[[nodiscard]] std::vector<double> slice_from(const std::vector<double>& x, std::size_t from);

/// ln x(t) - ln x(t-1) for t = from+1..T.
[[nodiscard]] std::vector<double> log_growth(const std::vector<double>& x, std::size_t from);

/// Real trailing-average earnings growth g(t) = ln E10(t) - ln E10(t-1), t = W+1..T.
[[nodiscard]] std::vector<double> real_earnings_growth(const DerivedSeries& d);

/// TR-adjusted growth ln Ebar10(t) - ln Ebar10(t-1), t = W+1..T.
[[nodiscard]] std::vector<double> tr_earnings_growth(const DerivedSeries& d);

[[nodiscard]] std::string derived_to_csv(const DerivedSeries& d);

/// Inverse of derived_to_csv (window is inferred from the first defined E10 entry).
[[nodiscard]] DerivedSeries parse_derived_csv(std::string_view content);

/// Yearly risk-free real rate table (`year,rate` CSV, rate in percent per year).
struct RateTable {
    int first_year = 0;
    std::vector<double> percent;
};

[[nodiscard]] RateTable parse_rate_csv(std::string_view content);
[[nodiscard]] RateTable load_rate_csv(const std::string& path);

/**
 * @brief Real rate on the derived index: r(t) = ln(1 + i/100) - mean CPI log-inflation.
 *
 * i is the nominal rate of row t-1; inflation is averaged over the `window` years ending
 * at row t-1. Defined for t = window+1..T, NaN elsewhere.
 */
[[nodiscard]] std::vector<double> real_riskfree(const RawMarketTable& raw, const RateTable& rates,
                                                std::size_t window = 10);

}  // namespace vlab
