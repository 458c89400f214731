#include "valuation_lab/analysis.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "valuation_lab/econostats.hpp"
#include "valuation_lab/errors.hpp"
#include "valuation_lab/io.hpp"

namespace vlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> logs(const std::vector<double>& x, std::size_t from) {
    std::vector<double> out;
    out.reserve(x.size() - from);
    for (std::size_t t = from; t < x.size(); ++t) out.push_back(std::log(x[t]));
    return out;
}

double p_of(const std::vector<TestReport>& diags, TestName name, const std::string& label, double lags = 0.0) {
    const auto* r = find_diagnostic(diags, name, label, lags);
    return r ? r->p_value : kNaN;
}

}  // namespace

DiscreteModelSpec HistoricalAnalysis::bubble_spec() const {
    DiscreteModelSpec s;
    s.alpha = bubble.alpha_h;
    s.beta = bubble.beta_h;
    s.c = bubble.c;
    s.sigma_eps = bubble.sigma_eps;
    s.noise = NoiseKind::Gaussian;
    s.residual_pool = bubble.residuals;
    s.g_source.kind = GrowthSource::Kind::HistoricalBlocks;
    s.g_source.history = g_real;
    s.g_source.g = mean(g_real);
    return s;
}

std::vector<double> HistoricalAnalysis::measure(std::string_view name) const {
    std::vector<double> out(d.S.size(), kNaN);
    const std::size_t W = d.base_index;
    for (std::size_t t = W; t < out.size(); ++t) {
        if (name == "cape") {
            out[t] = std::log(d.cape[t]);
        } else if (name == "tr_cape") {
            out[t] = std::log(d.tr_cape[t]);
        } else if (name == "bubble") {
            out[t] = bubble.b_series[t - W];
        } else {
            throw Error(ErrorKind::InvalidArgument, "unknown measure '" + std::string(name) + "'");
        }
    }
    return out;
}

HistoricalAnalysis analyze(const RawMarketTable& raw, const DiagnosticOptions& base, std::size_t window) {
    HistoricalAnalysis a;
    a.d = build_derived(raw, window);
    const std::size_t W = a.d.base_index;
    a.lnG = logs(a.d.tr_cape, W);
    a.lnF = logs(a.d.cape, W);
    a.lnH = logs(a.d.H, W);
    for (std::size_t t = W; t <= a.d.T(); ++t) a.t_index.push_back(static_cast<double>(t));
    a.g_real = real_earnings_growth(a.d);
    a.g_tr = tr_earnings_growth(a.d);

    DiagnosticOptions opt = base;
    opt.growth = a.g_tr;
    a.tr_cape = fit_tr_cape(a.lnG, opt);
    opt.growth = a.g_real;
    a.bubble = fit_bubble(a.lnH, a.t_index, opt);
    return a;
}

std::vector<PredictiveRow> predictive_table(const HistoricalAnalysis& a, const std::vector<std::size_t>& horizons) {
    std::vector<PredictiveRow> rows;
    for (const char* name : {"tr_cape", "cape", "bubble"}) {
        const auto m = a.measure(name);
        for (auto hz : horizons) {
            PredictiveRow row;
            row.measure = name;
            row.horizon = hz;
            row.correlation = predictive_correlation(m, a.d.R, hz);
            for (std::size_t t = 0; t + hz < m.size(); ++t) {
                if (!std::isnan(m[t])) ++row.n;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

std::string predictive_to_csv(const std::vector<PredictiveRow>& rows) {
    std::ostringstream out;
    out << "measure,horizon,correlation,n\n";
    for (const auto& r : rows) out << r.measure << ',' << r.horizon << ',' << io::fmt(r.correlation) << ',' << r.n << '\n';
    return out.str();
}

std::vector<PredictiveRow> parse_predictive_csv(std::string_view content) {
    const auto ls = io::lines(content);
    if (ls.empty() || ls[0] != "measure,horizon,correlation,n") {
        throw Error(ErrorKind::MalformedRow, "predictive CSV header mismatch");
    }
    std::vector<PredictiveRow> rows;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto cells = io::split_csv_line(ls[i]);
        PredictiveRow r;
        int hz = 0;
        int n = 0;
        if (cells.size() != 4 || cells[0].empty() || !io::parse_int(cells[1], hz) ||
            !io::parse_double(cells[2], r.correlation) || !io::parse_int(cells[3], n) || hz < 1 || n < 0) {
            throw Error(ErrorKind::MalformedRow, "bad predictive row " + std::to_string(i + 1));
        }
        r.measure = std::string(cells[0]);
        r.horizon = static_cast<std::size_t>(hz);
        r.n = static_cast<std::size_t>(n);
        rows.push_back(r);
    }
    return rows;
}

GoldenCheck make_check(int criterion, std::string name, double value, double expected, double tolerance,
                       GoldenCheck::Kind kind) {
    GoldenCheck c{criterion, std::move(name), value, expected, tolerance, kind, false};
    switch (kind) {
        case GoldenCheck::Kind::Within: c.pass = std::fabs(value - expected) <= tolerance; break;
        case GoldenCheck::Kind::AtMost: c.pass = value <= expected; break;
        case GoldenCheck::Kind::AtLeast: c.pass = value >= expected; break;
    }
    return c;
}

std::vector<GoldenCheck> golden_checks(const HistoricalAnalysis& a) {
    using K = GoldenCheck::Kind;
    std::vector<GoldenCheck> out;
    auto add = [&](int crit, std::string name, double v, double e, double tol, K k = K::Within) {
        out.push_back(make_check(crit, std::move(name), v, e, tol, k));
    };
    const auto& tr = a.tr_cape;
    const auto& bu = a.bubble;

    add(1, "tr_cape.alpha", tr.alpha, 0.34452, 0.005);
    add(1, "tr_cape.beta", tr.beta, 0.88321, 0.005);
    add(1, "tr_cape.sigma_eps", tr.sigma_eps, 0.16907, 0.005);

    add(2, "bubble.raw_intercept", bu.raw_coeffs[0], 0.0220, 0.002);
    add(2, "bubble.raw_slope", bu.raw_coeffs[1], -0.1315, 0.002);
    add(2, "bubble.raw_trend", bu.raw_coeffs[2], 0.0061, 0.002);
    add(2, "bubble.c", bu.c, 0.04668, 0.003);
    add(2, "bubble.beta_h", bu.beta_h, 0.8685, 0.005);
    add(2, "bubble.h", bu.h, -0.1875, 0.01);
    add(2, "bubble.B_last", a.b_last(), -0.3434, 0.01);

    const double tr_lb[] = {0.16, 0.15, 0.29, 0.24};
    const double bu_lb[] = {0.16, 0.14, 0.17, 0.03};
    const double lags[] = {5, 10, 15, 20};
    for (int i = 0; i < 4; ++i) {
        const auto lag = std::to_string(static_cast<int>(lags[i]));
        add(3, "tr_cape.ljung_box_p.lag" + lag, p_of(tr.diagnostics, TestName::LjungBox, "residuals", lags[i]),
            tr_lb[i], 0.03);
    }
    for (int i = 0; i < 4; ++i) {
        const auto lag = std::to_string(static_cast<int>(lags[i]));
        add(3, "bubble.ljung_box_p.lag" + lag, p_of(bu.diagnostics, TestName::LjungBox, "residuals", lags[i]),
            bu_lb[i], 0.03);
    }
    add(3, "tr_cape.shapiro_wilk_p", p_of(tr.diagnostics, TestName::ShapiroWilk, "residuals"), 0.045, 0.02);
    add(3, "tr_cape.jarque_bera_p", p_of(tr.diagnostics, TestName::JarqueBera, "residuals"), 0.031, 0.02);
    add(3, "bubble.shapiro_wilk_p", p_of(bu.diagnostics, TestName::ShapiroWilk, "residuals"), 0.06, 0.02);
    add(3, "bubble.jarque_bera_p", p_of(bu.diagnostics, TestName::JarqueBera, "residuals"), 0.06, 0.02);
    add(3, "tr_cape.adf_p", p_of(tr.diagnostics, TestName::ADF, "lnG regression=c"), 0.073, 0.03);
    add(3, "bubble.slope_t_test_p", p_of(bu.diagnostics, TestName::StudentT, "beta_h=1"), 0.01, 0.0, K::AtMost);

    const auto rows = predictive_table(a);
    auto corr = [&](const std::string& m, std::size_t hz) {
        for (const auto& r : rows) {
            if (r.measure == m && r.horizon == hz) return r.correlation;
        }
        return kNaN;
    };
    add(4, "predict.tr_cape.h10", corr("tr_cape", 10), -0.541, 0.02);
    add(4, "predict.cape.h10", corr("cape", 10), -0.538, 0.02);
    add(4, "predict.bubble.h10", corr("bubble", 10), -0.49, 0.02);
    add(4, "predict.tr_cape.h1", corr("tr_cape", 1), -0.178, 0.02);
    add(4, "predict.cape.h1", corr("cape", 1), -0.182, 0.02);
    add(4, "predict.bubble.h1", corr("bubble", 1), -0.180, 0.02);
    add(4, "corr.lnF.lnG", pearson(a.lnF, a.lnG), 0.99, 0.0, K::AtLeast);

    const auto R = slice_from(a.d.R, 1);
    const auto F = slice_from(a.d.cape, a.d.base_index);
    const auto G = slice_from(a.d.tr_cape, a.d.base_index);
    add(5, "sd.R", sample_sd(R), 0.17076, 0.002);
    add(5, "growth.tr.mean", mean(a.g_tr), 0.05933, 0.001);
    add(5, "growth.tr.sd", sample_sd(a.g_tr), 0.03566, 0.001);
    add(5, "growth.real.mean", mean(a.g_real), 0.01773, 0.0005);
    add(5, "growth.real.sd", sample_sd(a.g_real), 0.03689, 0.001);
    add(5, "mean.cape", mean(F), 17.0, 0.5);
    add(5, "mean.tr_cape", mean(G), 19.9, 0.5);

    const auto base = earnings_linked_stats(0.0, a.g_real);
    add(6, "mean.exp_neg_g", base.mean_exp_neg_g, 0.917, 0.01);
    const double printed_m[] = {0.074, 0.064, 0.055, 0.046};
    for (int i = 0; i < 4; ++i) {
        const double w = 0.01 * (i + 1);
        add(6, "earnings_linked.M(" + std::to_string(i + 1) + "%)", mean_withdrawal(w, base.mean_exp_neg_g),
            printed_m[i], 0.005);
    }
    return out;
}

}  // namespace vlab
