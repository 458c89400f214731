#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "valuation_lab/discrete_dynamics.hpp"

namespace vlab {

/// One consecutive block of `T` entries starting at a uniformly drawn index.
[[nodiscard]] std::vector<double> block_bootstrap_growth(std::span<const double> history, std::size_t T, Rng& rng);

/// Start index of a T-block in a history of length L, from a uniform draw u in [0, 1).
[[nodiscard]] std::size_t block_start(double u, std::size_t L, std::size_t T);

struct RuinConfig {
    DiscreteModelSpec model;
    double b0 = 0.0;
    std::vector<std::size_t> horizons{30};
    std::vector<double> withdrawal_grid{0.04};
    std::size_t n_sims = 10000;
    std::uint64_t master_seed = 0;
    std::vector<double> growth_history;

    void validate() const;
};

struct RuinCell {
    double rate = 0.0;
    std::size_t horizon = 0;
    double ruin_prob = 0.0;
    std::size_t ruined = 0;
};

struct RuinSurface {
    std::vector<RuinCell> entries;  ///< horizon-major, rates in grid order
    std::size_t n_sims = 0;
    double b0 = 0.0;

    [[nodiscard]] const RuinCell* find(double rate, std::size_t horizon) const;
};

/**
 * @brief Random inputs of simulation i: one uniform block draw, then AR(1) innovations.
 *
 * Stream seed = master_seed + i. The same draws serve every horizon (shorter horizons use a
 * prefix of eps and rescale u), every rate and every b0, so scenarios are common random
 * numbers across the grid.
 */
struct Scenario {
    double u = 0.0;
    std::vector<double> eps;
};

[[nodiscard]] Scenario draw_scenario(const DiscreteModelSpec& model, std::size_t max_horizon,
                                     std::uint64_t stream_seed);

/// Log returns R(1..T) of a scenario at horizon T: R = B(t) - B(t-1) + c + G(t).
[[nodiscard]] std::vector<double> scenario_returns(const DiscreteModelSpec& model, double b0, const Scenario& sc,
                                                   std::span<const double> growth_history, std::size_t T,
                                                   std::vector<double>* b_path = nullptr);

/// First t with V(t) <= 0 under V(t) = V(t-1) e^{R(t)} - w, V(0) = 1; nullopt if never.
[[nodiscard]] std::optional<std::size_t> constant_real_ruin_time(std::span<const double> R, double w);

[[nodiscard]] RuinSurface ruin_surface(const RuinConfig& config);

[[nodiscard]] std::string surface_to_csv(const RuinSurface& s);
[[nodiscard]] RuinSurface parse_surface_csv(std::string_view content);

enum class PiMode {
    Printed,          ///< 1/(2 gamma) + (g + alpha - beta B - r) / (gamma (s^2 + rho^2))
    DriftConsistent,  ///< 1/(2 gamma) + (g + c + alpha + (beta - 1) B - r) / (gamma (s^2 + rho^2))
    Fixed,            ///< constant share fixed_pi
};

struct PortfolioRuleConfig {
    DiscreteModelSpec model;
    double b0 = 0.0;
    std::vector<double> gamma_grid{2.0, 3.0, 4.0, 6.0};
    double withdrawal = 0.05;
    std::vector<std::size_t> horizons{30, 50};
    std::vector<double> growth_history;
    std::vector<double> riskfree_history;  ///< aligned with growth_history
    double g_mean = 0.0;                   ///< growth drift in the share formula
    double rho = 0.0;                      ///< growth volatility in the share formula
    PiMode mode = PiMode::DriftConsistent;
    double fixed_pi = 1.0;
    std::optional<std::pair<double, double>> clamp;
    std::size_t n_sims = 10000;
    std::uint64_t master_seed = 0;

    /// Fills g_mean and rho from growth_history (mean and n-1 sd).
    void calibrate_growth();
    void validate() const;
};

/// Stock share for current valuation b, risk aversion gamma, rate r and growth drift g.
[[nodiscard]] double portfolio_rule_share(double b, double gamma, double r, double g, const PortfolioRuleConfig& cfg);

struct PortfolioCell {
    double gamma = 0.0;
    double rate = 0.0;
    std::size_t horizon = 0;
    double ruin_prob = 0.0;
    std::size_t ruined = 0;
};

struct PortfolioRuin {
    std::vector<PortfolioCell> entries;
    std::size_t n_sims = 0;
    double b0 = 0.0;

    [[nodiscard]] const PortfolioCell* find(double gamma, std::size_t horizon) const;
};

/**
 * @brief Ruin frequencies for the valuation-dependent portfolio rule.
 *
 * Each year V <- V (pi e^{R} + (1 - pi) e^{r}) - w, with G and r read from the same bootstrap
 * block. Scenarios match ruin_surface for the same seed.
 */
[[nodiscard]] PortfolioRuin portfolio_ruin(const PortfolioRuleConfig& config);

[[nodiscard]] std::string portfolio_to_csv(const PortfolioRuin& p);
[[nodiscard]] PortfolioRuin parse_portfolio_csv(std::string_view content);

}  // namespace vlab
