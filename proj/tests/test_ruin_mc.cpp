#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "valuation_lab/analysis.hpp"
#include "valuation_lab/errors.hpp"
#include "valuation_lab/ruin_mc.hpp"
#include "valuation_lab/special.hpp"

using namespace vlab;
using doctest::Approx;

namespace {

const HistoricalAnalysis& hist() {
    static const HistoricalAnalysis a = analyze(testing::shiller());
    return a;
}

RuinConfig base_ruin(std::size_t n_sims) {
    RuinConfig cfg;
    cfg.model = hist().bubble_spec();
    cfg.b0 = cfg.model.h();
    cfg.growth_history = hist().g_real;
    cfg.horizons = {10, 20, 30, 40, 50};
    cfg.withdrawal_grid = {0.03, 0.035, 0.04, 0.045, 0.05, 0.055, 0.06};
    cfg.n_sims = n_sims;
    cfg.master_seed = 77;
    return cfg;
}

PortfolioRuleConfig base_portfolio(std::size_t n_sims) {
    PortfolioRuleConfig cfg;
    cfg.model = hist().bubble_spec();
    cfg.b0 = cfg.model.h();
    cfg.growth_history = hist().g_real;
    // A flat 1% real rate keeps these tests independent of the rate file.
    cfg.riskfree_history.assign(cfg.growth_history.size(), 0.01);
    cfg.calibrate_growth();
    cfg.n_sims = n_sims;
    cfg.master_seed = 77;
    return cfg;
}

}  // namespace

TEST_CASE("block bootstrap") {
    std::vector<double> hist_g(20);
    for (std::size_t i = 0; i < hist_g.size(); ++i) hist_g[i] = static_cast<double>(i);
    Rng rng(3);
    CHECK(block_bootstrap_growth(hist_g, 20, rng) == hist_g);
    CHECK_THROWS_AS((void)block_start(0.5, 20, 21), Error);
    CHECK(block_start(0.0, 20, 5) == 0);
    CHECK(block_start(0.999999999, 20, 5) == 15);

    const auto block = block_bootstrap_growth(hist_g, 7, rng);
    for (std::size_t k = 1; k < block.size(); ++k) CHECK(block[k] == block[k - 1] + 1.0);

    Rng a(9);
    Rng b(9);
    CHECK(block_bootstrap_growth(hist_g, 5, a) == block_bootstrap_growth(hist_g, 5, b));
}

TEST_CASE("single-year blocks are uniform over the history") {
    const std::size_t L = 139;
    std::vector<double> counts(L, 0.0);
    Rng rng(2024);
    const std::size_t draws = 100000;
    for (std::size_t i = 0; i < draws; ++i) counts[block_start(rng.uniform(), L, 1)] += 1.0;
    const double expected = static_cast<double>(draws) / static_cast<double>(L);
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(special::chi2_sf(chi2, static_cast<double>(L - 1)) > 0.01);
}

TEST_CASE("constant-real ruin time") {
    const std::vector<double> zero(10, 0.0);
    CHECK(constant_real_ruin_time(zero, 1.0) == std::optional<std::size_t>(1));
    CHECK(constant_real_ruin_time(zero, 0.3) == std::optional<std::size_t>(4));
    CHECK_FALSE(constant_real_ruin_time(zero, 0.0).has_value());
    const std::vector<double> up(30, 0.1);
    CHECK_FALSE(constant_real_ruin_time(up, 0.05).has_value());
}

TEST_CASE("scenario returns reproduce the AR(1) recursion") {
    const auto cfg = base_ruin(1);
    const auto sc = draw_scenario(cfg.model, 50, 5);
    REQUIRE(sc.eps.size() == 50);
    std::vector<double> B;
    const auto R = scenario_returns(cfg.model, cfg.b0, sc, cfg.growth_history, 30, &B);
    REQUIRE(R.size() == 30);
    REQUIRE(B.size() == 31);
    const std::size_t start = block_start(sc.u, cfg.growth_history.size(), 30);
    for (std::size_t k = 0; k < 30; ++k) {
        CHECK(B[k + 1] == Approx(cfg.model.alpha + cfg.model.beta * B[k] + sc.eps[k]));
        CHECK(R[k] == Approx(B[k + 1] - B[k] + cfg.model.c + cfg.growth_history[start + k]));
    }
}

TEST_CASE("ruin surface properties") {
    const auto cfg = base_ruin(4000);
    CHECK_NOTHROW(cfg.validate());
    const auto s = ruin_surface(cfg);
    REQUIRE(s.entries.size() == cfg.horizons.size() * cfg.withdrawal_grid.size());
    const double slack = 3.0 / std::sqrt(static_cast<double>(cfg.n_sims));
    for (const auto& cell : s.entries) {
        CHECK(cell.ruin_prob >= 0.0);
        CHECK(cell.ruin_prob <= 1.0);
    }
    for (auto T : cfg.horizons) {
        for (std::size_t k = 1; k < cfg.withdrawal_grid.size(); ++k) {
            CHECK(s.find(cfg.withdrawal_grid[k], T)->ruin_prob + slack >= s.find(cfg.withdrawal_grid[k - 1], T)->ruin_prob);
        }
    }
    for (double w : cfg.withdrawal_grid) {
        for (std::size_t k = 1; k < cfg.horizons.size(); ++k) {
            // Common random numbers make ruin by a shorter horizon imply ruin by a longer one.
            CHECK(s.find(w, cfg.horizons[k])->ruined >= s.find(w, cfg.horizons[k - 1])->ruined);
        }
    }

    SUBCASE("no withdrawals never ruin") {
        auto z = cfg;
        z.withdrawal_grid = {0.0};
        z.n_sims = 500;
        for (const auto& cell : ruin_surface(z).entries) CHECK(cell.ruined == 0);
    }
    SUBCASE("reproducible") {
        const auto again = ruin_surface(cfg);
        REQUIRE(again.entries.size() == s.entries.size());
        for (std::size_t i = 0; i < s.entries.size(); ++i) CHECK(again.entries[i].ruined == s.entries[i].ruined);
    }
    SUBCASE("cheaper starting valuation never adds ruins") {
        auto cheap = cfg;
        cheap.b0 = hist().b_last();
        REQUIRE(cheap.b0 < cfg.b0);
        const auto c = ruin_surface(cheap);
        for (std::size_t i = 0; i < s.entries.size(); ++i) CHECK(c.entries[i].ruined <= s.entries[i].ruined);
    }
    SUBCASE("estimates stabilise as the sample grows") {
        auto small = cfg;
        small.n_sims = 1000;
        const auto a = ruin_surface(small);
        const double bound = 2.0 / std::sqrt(1000.0);
        std::size_t ok = 0;
        for (std::size_t i = 0; i < s.entries.size(); ++i) {
            if (std::fabs(a.entries[i].ruin_prob - s.entries[i].ruin_prob) < bound) ++ok;
        }
        CHECK(static_cast<double>(ok) >= 0.95 * static_cast<double>(s.entries.size()));
    }
    SUBCASE("CSV round-trip") {
        const auto back = parse_surface_csv(surface_to_csv(s));
        REQUIRE(back.entries.size() == s.entries.size());
        CHECK(back.n_sims == s.n_sims);
        for (std::size_t i = 0; i < s.entries.size(); ++i) {
            CHECK(back.entries[i].rate == s.entries[i].rate);
            CHECK(back.entries[i].horizon == s.entries[i].horizon);
            CHECK(back.entries[i].ruin_prob == s.entries[i].ruin_prob);
        }
    }
}

TEST_CASE("ruin configuration validation") {
    auto cfg = base_ruin(10);
    cfg.n_sims = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = base_ruin(10);
    cfg.horizons = {cfg.growth_history.size()};
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("portfolio share formula") {
    PortfolioRuleConfig cfg;
    cfg.model.alpha = -0.02466;
    cfg.model.beta = 0.8685;
    cfg.model.sigma_eps = 0.1697;
    cfg.model.c = 0.04668;
    cfg.rho = 0.05;
    cfg.mode = PiMode::Printed;
    const double h = cfg.model.h();
    CHECK(portfolio_rule_share(h, 3.0, 0.01, 0.01773, cfg) == Approx(1.7209523233980761).epsilon(1e-12));

    // Zero excess return leaves only the 1/(2 gamma) term.
    const double b = 0.1;
    const double r = 0.01773 + cfg.model.alpha - cfg.model.beta * b;
    CHECK(portfolio_rule_share(b, 4.0, r, 0.01773, cfg) == Approx(0.125));
    cfg.mode = PiMode::DriftConsistent;
    const double r2 = 0.01773 + cfg.model.c + cfg.model.alpha + (cfg.model.beta - 1.0) * b;
    CHECK(portfolio_rule_share(b, 4.0, r2, 0.01773, cfg) == Approx(0.125));

    CHECK(std::fabs(portfolio_rule_share(h, 1e9, 0.01, 0.01773, cfg)) < 1e-8);
    CHECK_THROWS_AS((void)portfolio_rule_share(h, 0.0, 0.01, 0.01773, cfg), Error);

    cfg.clamp = std::make_pair(0.0, 1.0);
    CHECK(portfolio_rule_share(h, 0.5, 0.01, 0.01773, cfg) == 1.0);
    cfg.clamp.reset();
    cfg.mode = PiMode::Fixed;
    cfg.fixed_pi = 0.6;
    CHECK(portfolio_rule_share(h, 3.0, 0.01, 0.01773, cfg) == 0.6);
}

TEST_CASE("growth calibration") {
    PortfolioRuleConfig cfg;
    cfg.growth_history = {0.01, 0.03, 0.02, 0.06};
    cfg.calibrate_growth();
    CHECK(cfg.g_mean == Approx(0.03));
    CHECK(cfg.rho == Approx(std::sqrt((0.0004 + 0.0 + 0.0001 + 0.0009) / 3.0)));
}

TEST_CASE("all-stock portfolio reduces to the constant-withdrawal surface") {
    auto pc = base_portfolio(3000);
    pc.mode = PiMode::Fixed;
    pc.fixed_pi = 1.0;
    pc.gamma_grid = {3.0};
    pc.withdrawal = 0.05;
    pc.horizons = {30, 50};
    const auto p = portfolio_ruin(pc);

    auto rc = base_ruin(3000);
    rc.withdrawal_grid = {0.05};
    rc.horizons = {30, 50};
    const auto s = ruin_surface(rc);
    for (auto T : rc.horizons) CHECK(p.find(3.0, T)->ruined == s.find(0.05, T)->ruined);
}

TEST_CASE("portfolio ruin is reproducible, bounded and round-trips") {
    const auto pc = base_portfolio(2000);
    CHECK_NOTHROW(pc.validate());
    const auto a = portfolio_ruin(pc);
    const auto b = portfolio_ruin(pc);
    REQUIRE(a.entries.size() == pc.gamma_grid.size() * pc.horizons.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].ruined == b.entries[i].ruined);
        CHECK(a.entries[i].ruin_prob >= 0.0);
        CHECK(a.entries[i].ruin_prob <= 1.0);
    }
    for (double g : pc.gamma_grid) CHECK(a.find(g, 50)->ruined >= a.find(g, 30)->ruined);

    const auto back = parse_portfolio_csv(portfolio_to_csv(a));
    REQUIRE(back.entries.size() == a.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(back.entries[i].gamma == a.entries[i].gamma);
        CHECK(back.entries[i].horizon == a.entries[i].horizon);
        CHECK(back.entries[i].ruin_prob == a.entries[i].ruin_prob);
    }

    auto bad = pc;
    bad.riskfree_history.pop_back();
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = pc;
    bad.gamma_grid = {-1.0};
    CHECK_THROWS_AS(bad.validate(), Error);
}
