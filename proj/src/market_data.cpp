#include "valuation_lab/market_data.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "valuation_lab/errors.hpp"
#include "valuation_lab/io.hpp"

namespace vlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string row_ctx(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

std::vector<double> nan_vector(std::size_t n) { return std::vector<double>(n, kNaN); }

}  // namespace

std::size_t RawMarketTable::dividend_rows() const noexcept {
    std::size_t n = 0;
    for (const auto& r : rows) n += (r.dividend && r.earnings) ? 1 : 0;
    return n;
}

RawMarketTable parse_market_csv(std::string_view content, std::size_t min_rows) {
    auto ls = io::lines(content);
    if (ls.empty()) throw Error(ErrorKind::TooFewRows, "empty input");
    auto header = io::split_csv_line(ls[0]);
    const char* expected[] = {"year", "price", "dividend", "earnings", "cpi"};
    if (header.size() != 5) throw Error(ErrorKind::MalformedRow, "header must be year,price,dividend,earnings,cpi");
    for (std::size_t i = 0; i < 5; ++i) {
        if (header[i] != expected[i]) {
            throw Error(ErrorKind::MalformedRow, "header must be year,price,dividend,earnings,cpi");
        }
    }

    RawMarketTable table;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        auto cells = io::split_csv_line(ls[i]);
        if (cells.size() != 5) throw Error(ErrorKind::MalformedRow, row_ctx(i + 1) + "expected 5 fields");
        MarketRow row;
        if (!io::parse_int(cells[0], row.year)) throw Error(ErrorKind::MalformedRow, row_ctx(i + 1) + "bad year");
        if (!io::parse_double(cells[1], row.price)) throw Error(ErrorKind::MalformedRow, row_ctx(i + 1) + "bad price");
        if (!io::parse_double(cells[4], row.cpi)) throw Error(ErrorKind::MalformedRow, row_ctx(i + 1) + "bad cpi");
        double v = 0.0;
        if (!cells[2].empty()) {
            if (!io::parse_double(cells[2], v)) throw Error(ErrorKind::MalformedRow, row_ctx(i + 1) + "bad dividend");
            row.dividend = v;
        }
        if (!cells[3].empty()) {
            if (!io::parse_double(cells[3], v)) throw Error(ErrorKind::MalformedRow, row_ctx(i + 1) + "bad earnings");
            row.earnings = v;
        }
        if (row.price <= 0.0 || row.cpi <= 0.0) {
            throw Error(ErrorKind::NonPositive, row_ctx(i + 1) + "price and cpi must be positive");
        }
        if (row.dividend && *row.dividend < 0.0) {
            throw Error(ErrorKind::NonPositive, row_ctx(i + 1) + "dividend must be nonnegative");
        }
        if (!table.rows.empty() && row.year != table.rows.back().year + 1) {
            throw Error(ErrorKind::GapInYears, row_ctx(i + 1) + "year " + std::to_string(row.year) +
                                                   " does not follow " + std::to_string(table.rows.back().year));
        }
        table.rows.push_back(row);
    }
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
        if (!table.rows[i].dividend || !table.rows[i].earnings) {
            throw Error(ErrorKind::MalformedRow,
                        "dividend/earnings missing for year " + std::to_string(table.rows[i].year) +
                            " (allowed only on the final row)");
        }
    }
    if (table.rows.size() < min_rows) {
        throw Error(ErrorKind::TooFewRows, "need at least " + std::to_string(min_rows) + " rows, got " +
                                               std::to_string(table.rows.size()));
    }
    return table;
}

RawMarketTable load_market_csv(const std::string& path, std::size_t min_rows) {
    return parse_market_csv(io::read_file(path), min_rows);
}

RealSeries deflate(const RawMarketTable& raw) {
    const std::size_t n = raw.rows.size();
    if (n == 0) throw Error(ErrorKind::TooFewRows, "empty table");
    const double cT = raw.rows.back().cpi;
    RealSeries out;
    out.S.resize(n);
    out.cpi_ratio.resize(n);
    out.D = nan_vector(n);
    out.E = nan_vector(n);
    for (std::size_t t = 0; t < n; ++t) {
        out.cpi_ratio[t] = cT / raw.rows[t].cpi;
        out.S[t] = out.cpi_ratio[t] * raw.rows[t].price;
        if (t >= 1) {
            const auto& prev = raw.rows[t - 1];
            out.D[t] = out.cpi_ratio[t] * prev.dividend.value_or(kNaN);
            out.E[t] = out.cpi_ratio[t] * prev.earnings.value_or(kNaN);
        }
    }
    return out;
}

std::vector<double> total_returns(std::span<const double> S, std::span<const double> D) {
    if (S.size() < 2) throw Error(ErrorKind::TooFewObservations, "need at least two index values");
    if (D.size() < S.size()) throw Error(ErrorKind::LengthMismatch, "dividend series shorter than index");
    std::vector<double> R(S.size() - 1);
    for (std::size_t t = 1; t < S.size(); ++t) {
        const double num = S[t] + D[t];
        if (!(num > 0.0) || !(S[t - 1] > 0.0)) {
            throw Error(ErrorKind::NonPositive, "S(t)+D(t) must be positive at t=" + std::to_string(t));
        }
        R[t - 1] = std::log(num / S[t - 1]);
    }
    return R;
}

std::vector<double> wealth(std::span<const double> R) {
    std::vector<double> V(R.size() + 1);
    V[0] = 1.0;
    for (std::size_t k = 0; k < R.size(); ++k) V[k + 1] = V[k] * std::exp(R[k]);
    return V;
}

std::vector<double> trailing_average(std::span<const double> x, std::size_t window) {
    if (window == 0) throw Error(ErrorKind::InvalidArgument, "window must be at least 1");
    if (x.size() < window) {
        throw Error(ErrorKind::WindowTooLarge, "window " + std::to_string(window) + " exceeds series length " +
                                                   std::to_string(x.size()));
    }
    std::vector<double> out(x.size() - window + 1);
    for (std::size_t k = 0; k < out.size(); ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < window; ++j) s += x[k + j];
        out[k] = s / static_cast<double>(window);
    }
    return out;
}

DerivedSeries build_derived(const RawMarketTable& raw, std::size_t window) {
    if (window == 0) throw Error(ErrorKind::InvalidArgument, "window must be at least 1");
    if (raw.rows.size() < window + 2) {
        throw Error(ErrorKind::TooFewRows, "need at least window+2 = " + std::to_string(window + 2) + " rows");
    }
    const auto real = deflate(raw);
    const std::size_t n = raw.rows.size();
    const std::size_t T = n - 1;

    DerivedSeries d;
    d.first_year = raw.rows.front().year;
    d.window = window;
    d.base_index = window;
    d.S = real.S;
    d.D = real.D;
    d.E = real.E;

    auto R = total_returns(d.S, d.D);
    auto V = wealth(R);
    d.R = nan_vector(n);
    for (std::size_t t = 1; t <= T; ++t) d.R[t] = R[t - 1];
    d.V = V;

    d.Ebar = nan_vector(n);
    for (std::size_t t = 1; t <= T; ++t) d.Ebar[t] = d.V[t] / d.S[t] * d.E[t];

    auto e10 = trailing_average(std::span<const double>(d.E).subspan(1), window);
    auto eb10 = trailing_average(std::span<const double>(d.Ebar).subspan(1), window);
    d.E10 = nan_vector(n);
    d.Ebar10 = nan_vector(n);
    d.cape = nan_vector(n);
    d.tr_cape = nan_vector(n);
    d.H = nan_vector(n);
    for (std::size_t t = window; t <= T; ++t) {
        d.E10[t] = e10[t - window];
        d.Ebar10[t] = eb10[t - window];
        if (!(d.E10[t] > 0.0) || !(d.Ebar10[t] > 0.0)) {
            throw Error(ErrorKind::NonPositive, "trailing average earnings not positive in year " +
                                                    std::to_string(d.year(t)));
        }
        d.cape[t] = d.S[t] / d.E10[t];
        d.tr_cape[t] = d.V[t] / d.Ebar10[t];
        d.H[t] = d.V[t] / d.E10[t];
    }
    return d;
}

std::vector<double> slice_from(const std::vector<double>& x, std::size_t from) {
    if (from > x.size()) return {};
    return std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(from), x.end());
}

std::vector<double> log_growth(const std::vector<double>& x, std::size_t from) {
    std::vector<double> out;
    for (std::size_t t = from + 1; t < x.size(); ++t) out.push_back(std::log(x[t]) - std::log(x[t - 1]));
    return out;
}

std::vector<double> real_earnings_growth(const DerivedSeries& d) { return log_growth(d.E10, d.base_index); }

std::vector<double> tr_earnings_growth(const DerivedSeries& d) { return log_growth(d.Ebar10, d.base_index); }

std::string derived_to_csv(const DerivedSeries& d) {
    std::ostringstream out;
    out << "year,S,D,E,R,V,E10,Ebar,Ebar10,cape,tr_cape,H\n";
    for (std::size_t t = 0; t < d.S.size(); ++t) {
        out << d.year(t);
        for (const auto* col : {&d.S, &d.D, &d.E, &d.R, &d.V, &d.E10, &d.Ebar, &d.Ebar10, &d.cape, &d.tr_cape, &d.H}) {
            out << ',' << io::fmt((*col)[t]);
        }
        out << '\n';
    }
    return out.str();
}

DerivedSeries parse_derived_csv(std::string_view content) {
    auto ls = io::lines(content);
    if (ls.empty() || ls[0] != "year,S,D,E,R,V,E10,Ebar,Ebar10,cape,tr_cape,H") {
        throw Error(ErrorKind::MalformedRow, "derived CSV header mismatch");
    }
    DerivedSeries d;
    std::vector<double>* cols[] = {&d.S, &d.D, &d.E, &d.R, &d.V, &d.E10, &d.Ebar, &d.Ebar10, &d.cape, &d.tr_cape, &d.H};
    for (std::size_t i = 1; i < ls.size(); ++i) {
        auto cells = io::split_csv_line(ls[i]);
        if (cells.size() != 12) throw Error(ErrorKind::MalformedRow, row_ctx(i + 1) + "expected 12 fields");
        int year = 0;
        if (!io::parse_int(cells[0], year)) throw Error(ErrorKind::MalformedRow, row_ctx(i + 1) + "bad year");
        if (i == 1) d.first_year = year;
        for (std::size_t c = 0; c < 11; ++c) {
            double v = kNaN;
            if (!cells[c + 1].empty() && !io::parse_double(cells[c + 1], v)) {
                throw Error(ErrorKind::MalformedRow, row_ctx(i + 1) + "bad value");
            }
            cols[c]->push_back(v);
        }
    }
    d.window = 0;
    for (std::size_t t = 0; t < d.E10.size(); ++t) {
        if (!std::isnan(d.E10[t])) {
            d.window = t;
            break;
        }
    }
    d.base_index = d.window;
    return d;
}

RateTable parse_rate_csv(std::string_view content) {
    auto ls = io::lines(content);
    if (ls.empty() || ls[0] != "year,rate") throw Error(ErrorKind::MalformedRow, "rate CSV header must be year,rate");
    RateTable table;
    int prev = 0;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        auto cells = io::split_csv_line(ls[i]);
        int year = 0;
        double v = 0.0;
        if (cells.size() != 2 || !io::parse_int(cells[0], year) || !io::parse_double(cells[1], v)) {
            throw Error(ErrorKind::MalformedRow, row_ctx(i + 1) + "expected year,rate");
        }
        if (i == 1) {
            table.first_year = year;
        } else if (year != prev + 1) {
            throw Error(ErrorKind::GapInYears, row_ctx(i + 1) + "rate years must be consecutive");
        }
        prev = year;
        table.percent.push_back(v);
    }
    if (table.percent.empty()) throw Error(ErrorKind::TooFewRows, "empty rate table");
    return table;
}

RateTable load_rate_csv(const std::string& path) { return parse_rate_csv(io::read_file(path)); }

std::vector<double> real_riskfree(const RawMarketTable& raw, const RateTable& rates, std::size_t window) {
    const std::size_t n = raw.rows.size();
    std::vector<double> r = nan_vector(n);
    for (std::size_t t = window + 1; t < n; ++t) {
        const int year = raw.rows[t - 1].year;
        const long k = static_cast<long>(year) - rates.first_year;
        if (k < 0 || k >= static_cast<long>(rates.percent.size())) {
            throw Error(ErrorKind::LengthMismatch, "rate table does not cover year " + std::to_string(year));
        }
        double infl = 0.0;
        for (std::size_t j = t - window; j < t; ++j) infl += std::log(raw.rows[j].cpi / raw.rows[j - 1].cpi);
        r[t] = std::log1p(rates.percent[static_cast<std::size_t>(k)] / 100.0) - infl / static_cast<double>(window);
    }
    return r;
}

}  // namespace vlab
