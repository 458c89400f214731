#include "valuation_lab/valuation_models.hpp"

#include <algorithm>
#include <cmath>

#include "valuation_lab/errors.hpp"

namespace vlab {

namespace {

constexpr std::size_t kMinLength = 30;

std::vector<double> absolute(std::span<const double> x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::fabs(x[i]);
    return out;
}

TestReport labeled(TestReport rep, std::string label) {
    rep.label = std::move(label);
    return rep;
}

// Exact fits (synthetic noiseless data) have no residual distribution to test.
bool degenerate(const OlsFit& fit, std::span<const double> y) {
    double scale = 0.0;
    for (double v : y) scale = std::max(scale, std::fabs(v));
    return fit.sigma_hat <= 1e-12 * std::max(1.0, scale);
}

void residual_battery(std::span<const double> resid, const DiagnosticOptions& opt, std::vector<TestReport>& out) {
    const auto abs_resid = absolute(resid);
    for (auto lag : opt.ljung_box_lags) out.push_back(labeled(ljung_box(resid, lag, opt.acf_scaling), "residuals"));
    for (auto lag : opt.ljung_box_lags) {
        out.push_back(labeled(ljung_box(abs_resid, lag, opt.acf_scaling), "abs_residuals"));
    }
    // Royston's approximation is only calibrated up to n = 5000; Jarque-Bera covers larger samples.
    if (resid.size() <= 5000) out.push_back(labeled(shapiro_wilk(resid), "residuals"));
    out.push_back(labeled(jarque_bera(resid), "residuals"));
    if (opt.growth) {
        const auto& g = *opt.growth;
        if (g.size() != resid.size()) {
            throw Error(ErrorKind::LengthMismatch, "growth series must align with residuals");
        }
        const auto abs_g = absolute(g);
        for (auto kind : {CorrelationKind::Pearson, CorrelationKind::Spearman, CorrelationKind::Kendall}) {
            out.push_back(labeled(correlation_test(resid, g, kind), "residuals~growth"));
            out.push_back(labeled(correlation_test(abs_resid, abs_g, kind), "abs_residuals~abs_growth"));
        }
    }
}

}  // namespace

Ar1Fit fit_tr_cape(std::span<const double> lnG, const DiagnosticOptions& options) {
    if (lnG.size() < kMinLength) throw Error(ErrorKind::TooFewObservations, "fit_tr_cape needs at least 30 points");
    const auto prev = lnG.first(lnG.size() - 1);
    const auto y = lnG.subspan(1);
    Ar1Fit fit;
    fit.ols = ols(design_with_intercept({prev}), y);
    fit.alpha = fit.ols.coefficients[0];
    fit.beta = fit.ols.coefficients[1];
    fit.sigma_eps = fit.ols.sigma_hat;
    fit.long_run_mean = fit.alpha / (1.0 - fit.beta);
    fit.residuals = fit.ols.residuals;

    if (degenerate(fit.ols, y)) return fit;
    residual_battery(fit.residuals, options, fit.diagnostics);
    if (options.adf) {
        fit.diagnostics.push_back(labeled(adf_test(lnG, AdfRegression::Constant), "lnG regression=c"));
        fit.diagnostics.push_back(labeled(adf_test(lnG, AdfRegression::ConstantTrend), "lnG regression=ct"));
    }
    fit.diagnostics.push_back(labeled(student_t_slope_test(fit, 1.0), "beta=1"));
    return fit;
}

std::vector<double> bubble_raw_from_implied(double alpha_h, double beta_h, double c) {
    return {alpha_h + c, beta_h - 1.0, c * (1.0 - beta_h)};
}

BubbleFit fit_bubble(std::span<const double> lnH, std::span<const double> t_index, const DiagnosticOptions& options) {
    if (lnH.size() != t_index.size()) throw Error(ErrorKind::LengthMismatch, "fit_bubble: lnH and t_index differ");
    if (lnH.size() < kMinLength) throw Error(ErrorKind::TooFewObservations, "fit_bubble needs at least 30 points");
    const std::size_t n = lnH.size() - 1;
    std::vector<double> dy(n);
    std::vector<double> lag(n);
    std::vector<double> tprev(n);
    for (std::size_t i = 0; i < n; ++i) {
        dy[i] = lnH[i + 1] - lnH[i];
        lag[i] = lnH[i];
        tprev[i] = t_index[i];
    }
    BubbleFit fit;
    fit.ols = ols(design_with_intercept({lag, tprev}), dy);
    const auto& b = fit.ols.coefficients;
    fit.raw_coeffs = b;
    fit.beta_h = 1.0 + b[1];
    if (b[1] == 0.0) throw Error(ErrorKind::DegenerateSeries, "fit_bubble: unit slope, trend not identified");
    fit.c = b[2] / (1.0 - fit.beta_h);
    fit.alpha_h = b[0] - fit.c;
    fit.h = fit.alpha_h / (1.0 - fit.beta_h);
    fit.sigma_eps = fit.ols.sigma_hat;
    fit.residuals = fit.ols.residuals;
    fit.t_index.assign(t_index.begin(), t_index.end());
    fit.b_series.resize(lnH.size());
    for (std::size_t i = 0; i < lnH.size(); ++i) fit.b_series[i] = lnH[i] - fit.c * t_index[i];

    if (degenerate(fit.ols, dy)) return fit;
    residual_battery(fit.residuals, options, fit.diagnostics);
    if (options.adf) fit.diagnostics.push_back(labeled(adf_test(lnH, AdfRegression::ConstantTrend), "lnH regression=ct"));
    fit.diagnostics.push_back(labeled(student_t_slope_test(fit, 1.0), "beta_h=1"));
    fit.diagnostics.push_back(labeled(coefficient_t_test(fit.ols, 2, 0.0), "c(1-beta_h)=0"));
    return fit;
}

double predictive_correlation(std::span<const double> measure, std::span<const double> R, std::size_t horizon) {
    if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be >= 1");
    if (measure.size() != R.size()) throw Error(ErrorKind::LengthMismatch, "measure and returns must share an index");
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t t = 0; t + horizon < R.size(); ++t) {
        if (std::isnan(measure[t])) continue;
        double s = 0.0;
        bool ok = true;
        for (std::size_t k = 1; k <= horizon; ++k) {
            if (std::isnan(R[t + k])) {
                ok = false;
                break;
            }
            s += R[t + k];
        }
        if (!ok) continue;
        xs.push_back(measure[t]);
        ys.push_back(s / static_cast<double>(horizon));
    }
    if (xs.size() < 3) throw Error(ErrorKind::TooFewObservations, "predictive_correlation: too few aligned points");
    return pearson(xs, ys);
}

TestReport student_t_slope_test(const Ar1Fit& fit, double null_value) {
    return coefficient_t_test(fit.ols, 1, null_value);
}

TestReport student_t_slope_test(const BubbleFit& fit, double null_value) {
    return coefficient_t_test(fit.ols, 1, null_value - 1.0);
}

const TestReport* find_diagnostic(const std::vector<TestReport>& diags, TestName name, const std::string& label,
                                  double lags) {
    for (const auto& d : diags) {
        if (d.name != name || d.label != label) continue;
        if (lags > 0.0) {
            auto it = d.params.find("lags");
            if (it == d.params.end() || it->second != lags) continue;
        }
        return &d;
    }
    return nullptr;
}

}  // namespace vlab
