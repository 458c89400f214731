#include "valuation_lab/ruin_mc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "valuation_lab/econostats.hpp"
#include "valuation_lab/errors.hpp"
#include "valuation_lab/io.hpp"

namespace vlab {

std::size_t block_start(double u, std::size_t L, std::size_t T) {
    if (T > L) throw Error(ErrorKind::WindowTooLarge, "block length exceeds history length");
    const std::size_t choices = L - T + 1;
    auto k = static_cast<std::size_t>(u * static_cast<double>(choices));
    return std::min(k, choices - 1);
}

std::vector<double> block_bootstrap_growth(std::span<const double> history, std::size_t T, Rng& rng) {
    const std::size_t start = block_start(rng.uniform(), history.size(), T);
    return {history.begin() + static_cast<std::ptrdiff_t>(start),
            history.begin() + static_cast<std::ptrdiff_t>(start + T)};
}

void RuinConfig::validate() const {
    model.validate();
    if (n_sims < 1) throw Error(ErrorKind::InvalidArgument, "n_sims must be >= 1");
    if (horizons.empty() || withdrawal_grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty ruin grid");
    for (auto T : horizons) {
        if (T < 1 || T + 1 > growth_history.size()) {
            throw Error(ErrorKind::WindowTooLarge, "horizon " + std::to_string(T) + " needs a growth history of " +
                                                       std::to_string(T + 1) + "+ entries");
        }
    }
}

const RuinCell* RuinSurface::find(double rate, std::size_t horizon) const {
    for (const auto& c : entries) {
        if (c.horizon == horizon && std::fabs(c.rate - rate) < 1e-12) return &c;
    }
    return nullptr;
}

Scenario draw_scenario(const DiscreteModelSpec& model, std::size_t max_horizon, std::uint64_t stream_seed) {
    Rng rng(stream_seed);
    Scenario sc;
    sc.u = rng.uniform();
    sc.eps.resize(max_horizon);
    for (auto& e : sc.eps) e = draw_noise(model, rng);
    return sc;
}

std::vector<double> scenario_returns(const DiscreteModelSpec& model, double b0, const Scenario& sc,
                                     std::span<const double> growth_history, std::size_t T,
                                     std::vector<double>* b_path) {
    if (T > sc.eps.size()) throw Error(ErrorKind::InvalidArgument, "scenario shorter than horizon");
    const std::size_t start = block_start(sc.u, growth_history.size(), T);
    std::vector<double> R(T);
    if (b_path) b_path->assign(1, b0);
    double b = b0;
    for (std::size_t k = 0; k < T; ++k) {
        const double next = model.alpha + model.beta * b + sc.eps[k];
        R[k] = next - b + model.c + growth_history[start + k];
        b = next;
        if (b_path) b_path->push_back(b);
    }
    return R;
}

std::optional<std::size_t> constant_real_ruin_time(std::span<const double> R, double w) {
    double v = 1.0;
    for (std::size_t k = 0; k < R.size(); ++k) {
        v = v * std::exp(R[k]) - w;
        if (v <= 0.0) return k + 1;
    }
    return std::nullopt;
}

RuinSurface ruin_surface(const RuinConfig& config) {
    config.validate();
    const std::size_t nh = config.horizons.size();
    const std::size_t nw = config.withdrawal_grid.size();
    const std::size_t cells = nh * nw;
    const std::size_t max_t = *std::max_element(config.horizons.begin(), config.horizons.end());
    std::vector<std::uint8_t> ruined(config.n_sims * cells, 0);

    parallel_for(config.n_sims, [&](std::size_t i) {
        const auto sc = draw_scenario(config.model, max_t, config.master_seed + i);
        for (std::size_t h = 0; h < nh; ++h) {
            const auto R = scenario_returns(config.model, config.b0, sc, config.growth_history, config.horizons[h]);
            for (std::size_t j = 0; j < nw; ++j) {
                ruined[i * cells + h * nw + j] = constant_real_ruin_time(R, config.withdrawal_grid[j]) ? 1 : 0;
            }
        }
    });

    RuinSurface s;
    s.n_sims = config.n_sims;
    s.b0 = config.b0;
    for (std::size_t h = 0; h < nh; ++h) {
        for (std::size_t j = 0; j < nw; ++j) {
            std::size_t count = 0;
            for (std::size_t i = 0; i < config.n_sims; ++i) count += ruined[i * cells + h * nw + j];
            s.entries.push_back({config.withdrawal_grid[j], config.horizons[h],
                                 static_cast<double>(count) / static_cast<double>(config.n_sims), count});
        }
    }
    return s;
}

std::string surface_to_csv(const RuinSurface& s) {
    std::ostringstream out;
    out << "rate,horizon,ruin_prob,n_sims\n";
    for (const auto& c : s.entries) {
        out << io::fmt(c.rate) << ',' << c.horizon << ',' << io::fmt(c.ruin_prob) << ',' << s.n_sims << '\n';
    }
    return out.str();
}

RuinSurface parse_surface_csv(std::string_view content) {
    auto ls = io::lines(content);
    if (ls.empty() || ls[0] != "rate,horizon,ruin_prob,n_sims") {
        throw Error(ErrorKind::MalformedRow, "ruin surface header mismatch");
    }
    RuinSurface s;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        auto cells = io::split_csv_line(ls[i]);
        RuinCell c;
        int horizon = 0;
        int n = 0;
        if (cells.size() != 4 || !io::parse_double(cells[0], c.rate) || !io::parse_int(cells[1], horizon) ||
            !io::parse_double(cells[2], c.ruin_prob) || !io::parse_int(cells[3], n) || horizon < 0 || n < 0) {
            throw Error(ErrorKind::MalformedRow, "bad ruin surface row " + std::to_string(i + 1));
        }
        c.horizon = static_cast<std::size_t>(horizon);
        s.n_sims = static_cast<std::size_t>(n);
        c.ruined = static_cast<std::size_t>(std::llround(c.ruin_prob * n));
        s.entries.push_back(c);
    }
    return s;
}

void PortfolioRuleConfig::calibrate_growth() {
    g_mean = mean(growth_history);
    rho = sample_sd(growth_history);
}

void PortfolioRuleConfig::validate() const {
    model.validate();
    if (n_sims < 1) throw Error(ErrorKind::InvalidArgument, "n_sims must be >= 1");
    if (riskfree_history.size() != growth_history.size()) {
        throw Error(ErrorKind::LengthMismatch, "risk-free and growth histories must be aligned");
    }
    for (double g : gamma_grid) {
        if (!(g > 0.0)) throw Error(ErrorKind::InvalidArgument, "gamma must be positive");
    }
    for (auto T : horizons) {
        if (T < 1 || T + 1 > growth_history.size()) throw Error(ErrorKind::WindowTooLarge, "horizon exceeds history");
    }
    if (clamp && clamp->first > clamp->second) throw Error(ErrorKind::InvalidArgument, "clamp bounds reversed");
}

double portfolio_rule_share(double b, double gamma, double r, double g, const PortfolioRuleConfig& cfg) {
    if (!(gamma > 0.0)) throw Error(ErrorKind::InvalidArgument, "gamma must be positive");
    const auto& m = cfg.model;
    const double var = m.sigma_eps * m.sigma_eps + cfg.rho * cfg.rho;
    double pi = 0.0;
    switch (cfg.mode) {
        case PiMode::Fixed:
            pi = cfg.fixed_pi;
            break;
        case PiMode::Printed:
            pi = 1.0 / (2.0 * gamma) + (g + m.alpha - m.beta * b - r) / (gamma * var);
            break;
        case PiMode::DriftConsistent:
            pi = 1.0 / (2.0 * gamma) + (g + m.c + m.alpha + (m.beta - 1.0) * b - r) / (gamma * var);
            break;
    }
    if (cfg.clamp) pi = std::clamp(pi, cfg.clamp->first, cfg.clamp->second);
    return pi;
}

const PortfolioCell* PortfolioRuin::find(double gamma, std::size_t horizon) const {
    for (const auto& c : entries) {
        if (c.horizon == horizon && std::fabs(c.gamma - gamma) < 1e-12) return &c;
    }
    return nullptr;
}

PortfolioRuin portfolio_ruin(const PortfolioRuleConfig& config) {
    config.validate();
    const std::size_t ng = config.gamma_grid.size();
    const std::size_t nh = config.horizons.size();
    const std::size_t cells = ng * nh;
    const std::size_t max_t = *std::max_element(config.horizons.begin(), config.horizons.end());
    std::vector<std::uint8_t> ruined(config.n_sims * cells, 0);
    const std::size_t L = config.growth_history.size();

    parallel_for(config.n_sims, [&](std::size_t i) {
        const auto sc = draw_scenario(config.model, max_t, config.master_seed + i);
        std::vector<double> bpath;
        for (std::size_t h = 0; h < nh; ++h) {
            const std::size_t T = config.horizons[h];
            const auto R = scenario_returns(config.model, config.b0, sc, config.growth_history, T, &bpath);
            const std::size_t start = block_start(sc.u, L, T);
            for (std::size_t q = 0; q < ng; ++q) {
                double v = 1.0;
                bool hit = false;
                for (std::size_t k = 0; k < T; ++k) {
                    const double r = config.riskfree_history[start + k];
                    const double pi = portfolio_rule_share(bpath[k], config.gamma_grid[q], r, config.g_mean, config);
                    v = v * (pi * std::exp(R[k]) + (1.0 - pi) * std::exp(r)) - config.withdrawal;
                    if (v <= 0.0) {
                        hit = true;
                        break;
                    }
                }
                ruined[i * cells + q * nh + h] = hit ? 1 : 0;
            }
        }
    });

    PortfolioRuin out;
    out.n_sims = config.n_sims;
    out.b0 = config.b0;
    for (std::size_t q = 0; q < ng; ++q) {
        for (std::size_t h = 0; h < nh; ++h) {
            std::size_t count = 0;
            for (std::size_t i = 0; i < config.n_sims; ++i) count += ruined[i * cells + q * nh + h];
            out.entries.push_back({config.gamma_grid[q], config.withdrawal, config.horizons[h],
                                   static_cast<double>(count) / static_cast<double>(config.n_sims), count});
        }
    }
    return out;
}

std::string portfolio_to_csv(const PortfolioRuin& p) {
    std::ostringstream out;
    out << "gamma,rate,horizon,ruin_prob,n_sims\n";
    for (const auto& c : p.entries) {
        out << io::fmt(c.gamma) << ',' << io::fmt(c.rate) << ',' << c.horizon << ',' << io::fmt(c.ruin_prob) << ','
            << p.n_sims << '\n';
    }
    return out.str();
}

PortfolioRuin parse_portfolio_csv(std::string_view content) {
    const auto ls = io::lines(content);
    if (ls.empty() || ls[0] != "gamma,rate,horizon,ruin_prob,n_sims") {
        throw Error(ErrorKind::MalformedRow, "portfolio CSV header mismatch");
    }
    PortfolioRuin p;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto cells = io::split_csv_line(ls[i]);
        PortfolioCell c;
        int horizon = 0;
        int n = 0;
        if (cells.size() != 5 || !io::parse_double(cells[0], c.gamma) || !io::parse_double(cells[1], c.rate) ||
            !io::parse_int(cells[2], horizon) || !io::parse_double(cells[3], c.ruin_prob) ||
            !io::parse_int(cells[4], n) || horizon < 0 || n < 0) {
            throw Error(ErrorKind::MalformedRow, "bad portfolio row " + std::to_string(i + 1));
        }
        c.horizon = static_cast<std::size_t>(horizon);
        p.n_sims = static_cast<std::size_t>(n);
        c.ruined = static_cast<std::size_t>(std::llround(c.ruin_prob * n));
        p.entries.push_back(c);
    }
    return p;
}

}  // namespace vlab
