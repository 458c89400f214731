#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "valuation_lab/market_data.hpp"

namespace testing {

inline std::string data_path(const std::string& name) { return std::string(VLAB_DATA_DIR) + "/" + name; }

inline const vlab::RawMarketTable& shiller() {
    static const vlab::RawMarketTable t = vlab::load_market_csv(data_path("shiller_annual.csv"));
    return t;
}

/// Synthetic annual table with smooth prices, dividends and earnings; cpi_growth 0 keeps CPI constant.
inline std::string synthetic_csv(int n, double dividend_yield = 0.04, double cpi_growth = 0.02,
                                 bool blank_last = true) {
    std::ostringstream out;
    out << "year,price,dividend,earnings,cpi\n";
    for (int i = 0; i < n; ++i) {
        const double p = 100.0 * std::exp(0.03 * i + 0.15 * std::sin(0.7 * i));
        const double e = 6.0 * std::exp(0.02 * i + 0.05 * std::cos(1.3 * i));
        const double c = 10.0 * std::exp(cpi_growth * i);
        out.precision(17);
        out << 1900 + i << ',' << p << ',';
        if (!(blank_last && i == n - 1)) out << dividend_yield * p << ',' << e;
        else out << ',';
        out << ',' << c << '\n';
    }
    return out.str();
}

inline double rel_err(double a, double b) { return std::fabs(a - b) / std::max(1e-300, std::fabs(b)); }

}  // namespace testing
