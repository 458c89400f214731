#include "valuation_lab/cli.hpp"

#include <filesystem>

#include "valuation_lab/errors.hpp"
#include "valuation_lab/io.hpp"
#include "valuation_lab/ruin_mc.hpp"

namespace vlab::cli {

namespace fs = std::filesystem;

namespace {

constexpr Command kAll[] = {Command::Ingest, Command::Fit,       Command::Diagnose, Command::Predict,
                            Command::Ruin,   Command::Portfolio, Command::CtSim,    Command::Report};

template <typename T>
T opt(const Json& j, const char* key, T fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("config key '") + key + "': " + e.what());
    }
}

const Json& section(const Json& j, const char* key) {
    static const Json empty = Json::object();
    if (!j.is_object() || !j.contains(key)) return empty;
    const auto& s = j.at(key);
    if (!s.is_object()) throw Error(ErrorKind::InvalidArgument, std::string("config section '") + key + "' must be an object");
    return s;
}

class Session {
public:
    explicit Session(const RunConfig& cfg) : cfg_(cfg), out_(cfg.out_dir) {}

    void write(const std::string& name, std::string_view content) {
        const auto path = (out_ / name).string();
        io::write_file(path, content);
        files_.push_back(path);
    }
    void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

    const RawMarketTable& raw() {
        if (!raw_) {
            if (cfg_.input.empty()) throw Error(ErrorKind::InvalidArgument, "--input is required for this command");
            raw_ = load_market_csv(cfg_.input, opt<std::size_t>(cfg_.overrides, "window", 10) + 2);
        }
        return *raw_;
    }

    const HistoricalAnalysis& analysis() {
        if (!analysis_) {
            DiagnosticOptions d;
            const auto& s = section(cfg_.overrides, "diagnostics");
            d.ljung_box_lags = opt(s, "ljung_box_lags", d.ljung_box_lags);
            const auto scaling = opt<std::string>(s, "acf_scaling", "adjusted");
            if (scaling == "biased") {
                d.acf_scaling = AcfScaling::Biased;
            } else if (scaling != "adjusted") {
                throw Error(ErrorKind::InvalidArgument, "acf_scaling must be adjusted or biased");
            }
            analysis_ = analyze(raw(), d, opt<std::size_t>(cfg_.overrides, "window", 10));
        }
        return *analysis_;
    }

    /// Real risk-free rate aligned with g_real.
    std::vector<double> riskfree() {
        std::string path = cfg_.rates;
        if (path.empty()) {
            const auto guess = fs::path(cfg_.input).parent_path() / "shiller_rates.csv";
            if (!fs::exists(guess)) {
                throw Error(ErrorKind::InvalidArgument, "portfolio needs --rates (year,rate CSV of nominal rates)");
            }
            path = guess.string();
        }
        const auto& a = analysis();
        const auto r = real_riskfree(raw(), load_rate_csv(path), a.d.window);
        return slice_from(r, a.d.base_index + 1);
    }

    std::vector<std::string> files() const { return files_; }
    const RunConfig& cfg() const { return cfg_; }

private:
    const RunConfig& cfg_;
    fs::path out_;
    std::optional<RawMarketTable> raw_;
    std::optional<HistoricalAnalysis> analysis_;
    std::vector<std::string> files_;
};

struct Scenario0 {
    const char* tag;
    double b0;
};

std::vector<Scenario0> b0_scenarios(const HistoricalAnalysis& a) { return {{"h", a.bubble.h}, {"BT", a.b_last()}}; }

RuinConfig ruin_config(const HistoricalAnalysis& a, const Json& s, std::uint64_t seed) {
    RuinConfig rc;
    rc.model = discrete_spec_from_json(section(s, "model"), a.bubble_spec());
    rc.horizons = opt<std::vector<std::size_t>>(s, "horizons", {10, 20, 30, 40, 50});
    rc.withdrawal_grid = opt<std::vector<double>>(s, "rates", {0.03, 0.035, 0.04, 0.045, 0.05, 0.055, 0.06});
    rc.n_sims = opt<std::size_t>(s, "n_sims", 10000);
    rc.master_seed = seed;
    rc.growth_history = a.g_real;
    return rc;
}

PortfolioRuleConfig portfolio_config(Session& ses, const Json& s) {
    const auto& a = ses.analysis();
    PortfolioRuleConfig pc;
    pc.model = discrete_spec_from_json(section(s, "model"), a.bubble_spec());
    pc.gamma_grid = opt<std::vector<double>>(s, "gammas", pc.gamma_grid);
    pc.withdrawal = opt(s, "withdrawal", pc.withdrawal);
    pc.horizons = opt<std::vector<std::size_t>>(s, "horizons", pc.horizons);
    pc.n_sims = opt<std::size_t>(s, "n_sims", pc.n_sims);
    pc.master_seed = ses.cfg().master_seed;
    pc.growth_history = a.g_real;
    pc.riskfree_history = ses.riskfree();
    pc.calibrate_growth();
    const auto mode = opt<std::string>(s, "pi_mode", "drift_consistent");
    if (mode == "drift_consistent") {
        pc.mode = PiMode::DriftConsistent;
    } else if (mode == "printed") {
        pc.mode = PiMode::Printed;
    } else if (mode == "fixed") {
        pc.mode = PiMode::Fixed;
    } else {
        throw Error(ErrorKind::InvalidArgument, "pi_mode must be drift_consistent, printed or fixed");
    }
    pc.fixed_pi = opt(s, "fixed_pi", pc.fixed_pi);
    if (s.contains("clamp")) {
        const auto c = opt<std::vector<double>>(s, "clamp", {});
        if (c.size() != 2) throw Error(ErrorKind::InvalidArgument, "clamp must be [lo, hi]");
        pc.clamp = std::make_pair(c[0], c[1]);
    }
    return pc;
}

void cmd_ingest(Session& ses) {
    const auto& a = ses.analysis();
    ses.write("derived_series.csv", derived_to_csv(a.d));
}

void cmd_fit(Session& ses) {
    const auto& a = ses.analysis();
    ses.write_json("fit_tr_cape.json", fit_to_json(a.tr_cape));
    ses.write_json("fit_bubble.json", fit_to_json(a.bubble));
}

void cmd_diagnose(Session& ses) {
    const auto& a = ses.analysis();
    Json j{{"tr_cape", to_json(a.tr_cape.diagnostics)}, {"bubble", to_json(a.bubble.diagnostics)}};
    ses.write_json("diagnostics.json", j);
}

void cmd_predict(Session& ses) {
    const auto& s = section(ses.cfg().overrides, "predict");
    const auto horizons = opt<std::vector<std::size_t>>(s, "horizons", {1, 10});
    ses.write("predictive_correlations.csv", predictive_to_csv(predictive_table(ses.analysis(), horizons)));
}

void cmd_ruin(Session& ses) {
    const auto& a = ses.analysis();
    const auto& s = section(ses.cfg().overrides, "ruin");
    for (const auto& sc : b0_scenarios(a)) {
        auto rc = ruin_config(a, s, ses.cfg().master_seed);
        rc.b0 = sc.b0;
        ses.write(std::string("ruin_surface_b0=") + sc.tag + ".csv", surface_to_csv(ruin_surface(rc)));
    }
}

void cmd_portfolio(Session& ses) {
    const auto& s = section(ses.cfg().overrides, "portfolio");
    auto pc = portfolio_config(ses, s);
    for (const auto& sc : b0_scenarios(ses.analysis())) {
        pc.b0 = sc.b0;
        ses.write(std::string("portfolio_ruin_b0=") + sc.tag + ".csv", portfolio_to_csv(portfolio_ruin(pc)));
    }
}

void cmd_ctsim(Session& ses) {
    const auto& s = section(ses.cfg().overrides, "ctsim");
    CtModelSpec base;
    base.drift = CtDrift::linear_ou(0.1315, 0.0);
    base.sigma = 0.1697;
    base.g = 0.01773;
    base.rho = 0.0369;
    base.c = 0.04668;
    base.r = 0.01;
    const auto spec = ct_spec_from_json(section(s, "model"), base);
    const double dt = opt(s, "dt", 0.01);
    const double T = opt(s, "T", 50.0);
    const double h0 = opt(s, "h0", spec.drift.h_inf);
    const auto n_paths = opt<std::size_t>(s, "n_paths", 3);
    const double pi_gamma = opt(s, "pi_gamma", 1.0);
    std::optional<LevySpec> levy;
    if (s.contains("levy")) levy = levy_spec_from_json(s.at("levy"));

    const std::uint64_t seed = ses.cfg().master_seed;
    Json summary{{"model", to_json(spec)}, {"dt", dt}, {"T", T}, {"h0", h0}, {"levy", levy.has_value()}};
    Json paths = Json::array();
    for (std::size_t i = 0; i < n_paths; ++i) {
        const auto H = levy ? simulate_levy_factor(spec, *levy, h0, dt, T, seed + i)
                            : simulate_factor(spec, h0, dt, T, seed + i);
        CtPathTable p;
        p.F = simulate_fundamental(spec, dt, T, seed + i);
        p.V = wealth_from_factor(H, p.F, spec.c, dt);
        p.H = H;
        for (std::size_t k = 0; k < H.size(); ++k) {
            p.t.push_back(dt * static_cast<double>(k));
            p.pi.push_back(optimal_pi(H[k], spec, pi_gamma, spec.rate_at(p.t.back())));
        }
        ses.write("ct_path_" + std::to_string(i) + ".csv", ct_path_to_csv(p));
        paths.push_back(Json{{"index", i}, {"log_wealth_slope", std::log(p.V.back() / p.V.front()) / T}});
    }
    summary["paths"] = paths;

    const auto& gs = section(s, "grid");
    auto grid = default_theta_grid(spec, opt(gs, "half_width_sd", 6.0));
    grid.n_h = opt<std::size_t>(gs, "n_h", 121);
    grid.n_t = opt<std::size_t>(gs, "n_t", 300);
    grid.horizon = opt(gs, "horizon", 30.0);
    const double delta = opt(s, "discount_rate", 0.05);
    Json thetas = Json::array();
    for (double gamma : opt<std::vector<double>>(s, "gammas", {1.0, 2.0, 3.0})) {
        const auto g = io::fmt(gamma);
        const auto pde = solve_terminal_pde(spec, gamma, grid);
        ses.write("theta_pde_gamma=" + g + ".csv", theta_to_csv(pde));
        const auto ode = solve_consumption_ode(spec, gamma, delta, grid);
        ses.write("theta_ode_gamma=" + g + ".csv", theta_to_csv(ode));
        thetas.push_back(Json{{"gamma", gamma},
                              {"pde_residual", pde.residual_norm},
                              {"ode_residual", ode.residual_norm},
                              {"ode_iterations", ode.iterations},
                              {"pi_star_at_h_inf", optimal_pi(spec.drift.h_inf, spec, gamma)}});
    }
    summary["discount_rate"] = delta;
    summary["theta"] = thetas;
    ses.write_json("ct_summary.json", summary);
}

void cmd_report(Session& ses) {
    const auto& a = ses.analysis();
    auto checks = golden_checks(a);
    const auto& s = section(ses.cfg().overrides, "report");
    const auto n_sims = opt<std::size_t>(s, "n_sims", 10000);

    auto rc = ruin_config(a, Json::object(), ses.cfg().master_seed);
    rc.horizons = {30};
    rc.withdrawal_grid = {0.04};
    rc.n_sims = n_sims;
    rc.b0 = a.bubble.h;
    checks.push_back(make_check(8, "ruin.b0=h.w=4%.T=30", ruin_surface(rc).entries.at(0).ruin_prob, 0.10, 0.0,
                                GoldenCheck::Kind::AtMost));

    Json pcfg{{"horizons", Json::array({30})}, {"n_sims", n_sims}};
    auto pc = portfolio_config(ses, pcfg);
    pc.b0 = a.bubble.h;
    const auto pr = portfolio_ruin(pc);
    for (const auto& cell : pr.entries) {
        checks.push_back(make_check(8, "portfolio.b0=h.w=5%.T=30.gamma=" + io::fmt(cell.gamma), cell.ruin_prob, 0.05,
                                    0.0, GoldenCheck::Kind::AtMost));
    }

    Json arr = Json::array();
    std::size_t passed = 0;
    for (const auto& c : checks) {
        arr.push_back(to_json(c));
        passed += c.pass ? 1 : 0;
    }
    Json j{{"input", fs::path(ses.cfg().input).filename().string()},
           {"master_seed", ses.cfg().master_seed},
           {"n_checks", checks.size()},
           {"n_pass", passed},
           {"n_fail", checks.size() - passed},
           {"checks", arr}};
    ses.write_json("report.json", j);
}

Json error_json(std::string_view kind, const std::string& message, int code) {
    return Json{{"error", kind}, {"message", message}, {"exit_code", code}};
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
    for (auto c : kAll) {
        if (to_string(c) == name) return c;
    }
    return std::nullopt;
}

std::string_view to_string(Command c) {
    switch (c) {
        case Command::Ingest: return "ingest";
        case Command::Fit: return "fit";
        case Command::Diagnose: return "diagnose";
        case Command::Predict: return "predict";
        case Command::Ruin: return "ruin";
        case Command::Portfolio: return "portfolio";
        case Command::CtSim: return "ctsim";
        case Command::Report: return "report";
    }
    return "";
}

Json load_overrides(const std::string& arg) {
    if (arg.empty()) return Json::object();
    const std::string text = arg.front() == '{' ? arg : io::read_file(arg);
    try {
        auto j = Json::parse(text);
        if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "config must be a JSON object");
        return j;
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("config is not valid JSON: ") + e.what());
    }
}

RunResult run(const RunConfig& config) {
    RunResult result;
    Session ses(config);
    try {
        std::error_code ec;
        fs::create_directories(config.out_dir, ec);
        if (ec || !fs::is_directory(config.out_dir)) {
            throw Error(ErrorKind::Io, "cannot create output directory " + config.out_dir);
        }
        switch (config.command) {
            case Command::Ingest: cmd_ingest(ses); break;
            case Command::Fit: cmd_fit(ses); break;
            case Command::Diagnose: cmd_diagnose(ses); break;
            case Command::Predict: cmd_predict(ses); break;
            case Command::Ruin: cmd_ruin(ses); break;
            case Command::Portfolio: cmd_portfolio(ses); break;
            case Command::CtSim: cmd_ctsim(ses); break;
            case Command::Report: cmd_report(ses); break;
        }
    } catch (const Error& e) {
        result.exit_code = exit_code(e.kind());
        result.error_json = error_json(to_string(e.kind()), e.what(), result.exit_code).dump();
    } catch (const nlohmann::json::exception& e) {
        result.exit_code = 2;
        result.error_json = error_json("InvalidArgument", e.what(), 2).dump();
    } catch (const std::exception& e) {
        result.exit_code = 3;
        result.error_json = error_json("Internal", e.what(), 3).dump();
    }
    result.files = ses.files();
    return result;
}

}  // namespace vlab::cli
