#include "valuation_lab/serialization.hpp"

#include <cmath>

#include "valuation_lab/errors.hpp"

namespace vlab {

namespace {

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json numbers(const std::vector<double>& xs) {
    Json a = Json::array();
    for (double x : xs) a.push_back(number(x));
    return a;
}

template <typename T>
void read_opt(const Json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("config key '") + key + "': " + e.what());
    }
}

Json ols_block(const OlsFit& o, const char* const* names) {
    Json coef = Json::object();
    Json se = Json::object();
    Json p = Json::object();
    for (std::size_t i = 0; i < o.coefficients.size(); ++i) {
        coef[names[i]] = number(o.coefficients[i]);
        se[names[i]] = number(o.standard_errors[i]);
        p[names[i]] = number(o.p_values[i]);
    }
    return Json{{"coefficients", coef}, {"standard_errors", se}, {"p_values", p}};
}

}  // namespace

Json to_json(const TestReport& r) {
    Json params = Json::object();
    for (const auto& [k, v] : r.params) params[k] = number(v);
    return Json{{"test", std::string(to_string(r.name))},
                {"label", r.label},
                {"statistic", number(r.statistic)},
                {"p_value", number(r.p_value)},
                {"params", params}};
}

Json to_json(const std::vector<TestReport>& reports) {
    Json a = Json::array();
    for (const auto& r : reports) a.push_back(to_json(r));
    return a;
}

Json fit_to_json(const Ar1Fit& fit) {
    static const char* const names[] = {"const", "lnG_lag"};
    Json j{{"model", "tr_cape_ar1"}};
    j.update(ols_block(fit.ols, names));
    j["implied"] = Json{{"alpha", number(fit.alpha)},
                        {"beta", number(fit.beta)},
                        {"sigma_eps", number(fit.sigma_eps)},
                        {"long_run_mean", number(fit.long_run_mean)}};
    j["n"] = fit.ols.n;
    j["r_squared"] = number(fit.ols.r_squared);
    return j;
}

Json fit_to_json(const BubbleFit& fit) {
    static const char* const names[] = {"const", "lnH_lag", "t_lag"};
    Json j{{"model", "bubble_trend_ar1"}};
    j.update(ols_block(fit.ols, names));
    j["implied"] = Json{{"alpha", number(fit.alpha_h)},
                        {"beta", number(fit.beta_h)},
                        {"c", number(fit.c)},
                        {"h", number(fit.h)},
                        {"sigma_eps", number(fit.sigma_eps)},
                        {"B_last", number(fit.b_series.empty() ? NAN : fit.b_series.back())}};
    j["n"] = fit.ols.n;
    j["r_squared"] = number(fit.ols.r_squared);
    return j;
}

Json to_json(const DiscreteModelSpec& s) {
    return Json{{"alpha", s.alpha},
                {"beta", s.beta},
                {"c", s.c},
                {"sigma_eps", s.sigma_eps},
                {"noise", s.noise == NoiseKind::Gaussian ? "gaussian" : "empirical"},
                {"g_source",
                 {{"kind", s.g_source.kind == GrowthSource::Kind::Constant ? "constant" : "historical_blocks"},
                  {"g", s.g_source.g},
                  {"history_length", s.g_source.history.size()}}}};
}

DiscreteModelSpec discrete_spec_from_json(const Json& j, DiscreteModelSpec base) {
    read_opt(j, "alpha", base.alpha);
    read_opt(j, "beta", base.beta);
    read_opt(j, "c", base.c);
    read_opt(j, "sigma_eps", base.sigma_eps);
    if (j.contains("noise")) {
        std::string n;
        read_opt(j, "noise", n);
        if (n == "gaussian") {
            base.noise = NoiseKind::Gaussian;
        } else if (n == "empirical") {
            base.noise = NoiseKind::Empirical;
        } else {
            throw Error(ErrorKind::InvalidArgument, "noise must be gaussian or empirical");
        }
    }
    if (j.contains("g_source")) {
        const auto& g = j.at("g_source");
        std::string kind;
        read_opt(g, "kind", kind);
        if (kind == "constant") {
            base.g_source.kind = GrowthSource::Kind::Constant;
        } else if (kind == "historical_blocks") {
            base.g_source.kind = GrowthSource::Kind::HistoricalBlocks;
        } else if (!kind.empty()) {
            throw Error(ErrorKind::InvalidArgument, "g_source.kind must be constant or historical_blocks");
        }
        read_opt(g, "g", base.g_source.g);
    }
    base.validate();
    return base;
}

Json to_json(const CtModelSpec& s) {
    return Json{{"beta_rev", s.drift.beta_rev}, {"h_inf", s.drift.h_inf}, {"sigma", s.sigma}, {"g", s.g},
                {"rho", s.rho},           {"c", s.c},              {"r", s.r},         {"r_steps", numbers(s.r_steps)}};
}

CtModelSpec ct_spec_from_json(const Json& j, CtModelSpec base) {
    double beta_rev = base.drift.beta_rev;
    double h_inf = base.drift.h_inf;
    read_opt(j, "beta_rev", beta_rev);
    read_opt(j, "h_inf", h_inf);
    base.drift = CtDrift::linear_ou(beta_rev, h_inf);
    read_opt(j, "sigma", base.sigma);
    read_opt(j, "g", base.g);
    read_opt(j, "rho", base.rho);
    read_opt(j, "c", base.c);
    read_opt(j, "r", base.r);
    read_opt(j, "r_steps", base.r_steps);
    base.validate();
    return base;
}

LevySpec levy_spec_from_json(const Json& j) {
    LevySpec l;
    read_opt(j, "b", l.b);
    read_opt(j, "sigma", l.sigma);
    if (j.contains("jumps")) {
        for (const auto& e : j.at("jumps")) {
            JumpComponent c;
            read_opt(e, "rate", c.rate);
            read_opt(e, "a", c.a);
            read_opt(e, "sd", c.sd);
            std::string size = "symmetric";
            read_opt(e, "size", size);
            if (size == "fixed") {
                c.size = JumpComponent::Size::Fixed;
            } else if (size == "symmetric") {
                c.size = JumpComponent::Size::Symmetric;
            } else if (size == "normal") {
                c.size = JumpComponent::Size::Normal;
            } else {
                throw Error(ErrorKind::InvalidArgument, "jump size must be fixed, symmetric or normal");
            }
            l.jumps.push_back(c);
        }
    }
    bool zero_mean = false;
    read_opt(j, "zero_mean", zero_mean);
    if (zero_mean) l.enforce_zero_mean();
    l.validate();
    return l;
}

Json to_json(const GoldenCheck& c) {
    const char* kind = c.kind == GoldenCheck::Kind::Within ? "within" : c.kind == GoldenCheck::Kind::AtMost ? "at_most"
                                                                                                       : "at_least";
    return Json{{"criterion", c.criterion}, {"name", c.name},          {"value", number(c.value)},
                {"expected", c.expected},   {"tolerance", c.tolerance}, {"comparison", kind},
                {"pass", c.pass}};
}

}  // namespace vlab
