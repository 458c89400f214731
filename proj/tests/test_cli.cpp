#include <doctest.h>

#include <filesystem>
#include <string>

#include "test_support.hpp"
#include "valuation_lab/analysis.hpp"
#include "valuation_lab/cli.hpp"
#include "valuation_lab/continuous_time.hpp"
#include "valuation_lab/errors.hpp"
#include "valuation_lab/io.hpp"
#include "valuation_lab/ruin_mc.hpp"

using namespace vlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("vlab_cli_test_" + name);
    fs::remove_all(dir);
    return dir;
}

// Small enough to keep every command well under a second.
Json quick_overrides() {
    return Json::parse(R"({
        "ruin": {"n_sims": 10},
        "portfolio": {"n_sims": 200},
        "report": {"n_sims": 500},
        "ctsim": {"T": 3, "n_paths": 2, "gammas": [1, 3], "grid": {"n_h": 31, "n_t": 30}}
    })");
}

cli::RunResult run_command(cli::Command c, const fs::path& out, std::uint64_t seed = 0) {
    cli::RunConfig cfg;
    cfg.command = c;
    cfg.input = testing::data_path("shiller_annual.csv");
    cfg.out_dir = out.string();
    cfg.overrides = quick_overrides();
    cfg.master_seed = seed;
    return cli::run(cfg);
}

std::string file_name(const std::string& path) { return fs::path(path).filename().string(); }

}  // namespace

TEST_CASE("command names") {
    for (auto name : {"ingest", "fit", "diagnose", "predict", "ruin", "portfolio", "ctsim", "report"}) {
        const auto c = cli::parse_command(name);
        REQUIRE(c.has_value());
        CHECK(cli::to_string(*c) == name);
    }
    CHECK_FALSE(cli::parse_command("plot").has_value());
}

TEST_CASE("config overrides") {
    CHECK(cli::load_overrides("").empty());
    CHECK(cli::load_overrides(R"({"window": 10})").at("window") == 10);
    CHECK_THROWS_AS((void)cli::load_overrides("{not json"), Error);
    CHECK_THROWS_AS((void)cli::load_overrides("/no/such/config.json"), Error);
}

TEST_CASE("fit writes both model files") {
    const auto out = scratch("fit");
    const auto r = run_command(cli::Command::Fit, out);
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.files.size() == 2);
    const auto tr = Json::parse(io::read_file((out / "fit_tr_cape.json").string()));
    CHECK(std::fabs(tr.at("implied").at("alpha").get<double>() - 0.34452) <= 0.005);
    const auto bub = Json::parse(io::read_file((out / "fit_bubble.json").string()));
    CHECK(bub.at("implied").contains("h"));
    fs::remove_all(out);
}

TEST_CASE("ingest, diagnose and predict outputs") {
    const auto out = scratch("tables");
    REQUIRE(run_command(cli::Command::Ingest, out).exit_code == 0);
    const auto derived = io::read_file((out / "derived_series.csv").string());
    CHECK(derived.rfind("year,", 0) == 0);

    REQUIRE(run_command(cli::Command::Diagnose, out).exit_code == 0);
    const auto diag = Json::parse(io::read_file((out / "diagnostics.json").string()));
    CHECK(diag.at("tr_cape").size() > 10);
    CHECK(diag.at("bubble").size() > 10);

    REQUIRE(run_command(cli::Command::Predict, out).exit_code == 0);
    const auto rows = parse_predictive_csv(io::read_file((out / "predictive_correlations.csv").string()));
    CHECK(rows.size() == 6);
    fs::remove_all(out);
}

TEST_CASE("ruin and portfolio surfaces for both starting valuations") {
    const auto out = scratch("ruin");
    const auto r = run_command(cli::Command::Ruin, out, 5);
    REQUIRE(r.exit_code == 0);
    for (auto name : {"ruin_surface_b0=h.csv", "ruin_surface_b0=BT.csv"}) {
        const auto s = parse_surface_csv(io::read_file((out / name).string()));
        CHECK(s.n_sims == 10);
        CHECK(!s.entries.empty());
    }
    const auto p = run_command(cli::Command::Portfolio, out, 5);
    REQUIRE(p.exit_code == 0);
    for (auto name : {"portfolio_ruin_b0=h.csv", "portfolio_ruin_b0=BT.csv"}) {
        const auto s = parse_portfolio_csv(io::read_file((out / name).string()));
        CHECK(s.n_sims == 200);
        CHECK(s.entries.size() == 8);
    }
    fs::remove_all(out);
}

TEST_CASE("ctsim emits paths and theta grids") {
    const auto out = scratch("ctsim");
    cli::RunConfig cfg;
    cfg.command = cli::Command::CtSim;
    cfg.out_dir = out.string();
    cfg.overrides = quick_overrides();
    const auto r = cli::run(cfg);
    REQUIRE(r.exit_code == 0);
    const auto path = parse_ct_path_csv(io::read_file((out / "ct_path_0.csv").string()));
    CHECK(path.t.size() == 301);
    CHECK(path.pi.size() == path.t.size());
    const auto pde = parse_theta_csv(io::read_file((out / "theta_pde_gamma=3.csv").string()));
    CHECK(pde.h.size() == 31);
    CHECK(pde.t.size() == 31);
    const auto ode = parse_theta_csv(io::read_file((out / "theta_ode_gamma=1.csv").string()));
    CHECK(ode.kind == ThetaSolution::Kind::ConsumptionODE);
    CHECK(fs::exists(out / "ct_summary.json"));
    fs::remove_all(out);
}

TEST_CASE("report compares every reference value") {
    const auto out = scratch("report");
    REQUIRE(run_command(cli::Command::Report, out).exit_code == 0);
    const auto j = Json::parse(io::read_file((out / "report.json").string()));
    CHECK(j.at("n_checks").get<std::size_t>() >= 20);
    CHECK(j.at("n_pass").get<std::size_t>() + j.at("n_fail").get<std::size_t>() == j.at("n_checks").get<std::size_t>());
    for (const auto& c : j.at("checks")) {
        CHECK(c.contains("criterion"));
        CHECK(c.contains("pass"));
    }
    fs::remove_all(out);
}

TEST_CASE("every command is byte-identical across reruns") {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    for (auto c : {cli::Command::Ingest, cli::Command::Fit, cli::Command::Diagnose, cli::Command::Predict,
                   cli::Command::Ruin, cli::Command::Portfolio, cli::Command::CtSim, cli::Command::Report}) {
        const auto ra = run_command(c, a, 11);
        const auto rb = run_command(c, b, 11);
        REQUIRE(ra.exit_code == 0);
        REQUIRE(rb.exit_code == 0);
        REQUIRE(ra.files.size() == rb.files.size());
        for (std::size_t i = 0; i < ra.files.size(); ++i) {
            CHECK(file_name(ra.files[i]) == file_name(rb.files[i]));
            CHECK(io::read_file(ra.files[i]) == io::read_file(rb.files[i]));
        }
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("different seeds change simulated output") {
    const auto a = scratch("seed_a");
    const auto b = scratch("seed_b");
    REQUIRE(run_command(cli::Command::Portfolio, a, 1).exit_code == 0);
    REQUIRE(run_command(cli::Command::Portfolio, b, 2).exit_code == 0);
    CHECK(io::read_file((a / "portfolio_ruin_b0=h.csv").string()) != io::read_file((b / "portfolio_ruin_b0=h.csv").string()));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("errors are reported as JSON with exit codes") {
    const auto out = scratch("errors");
    cli::RunConfig cfg;
    cfg.command = cli::Command::Fit;
    cfg.input = "/no/such/file.csv";
    cfg.out_dir = out.string();
    auto r = cli::run(cfg);
    CHECK(r.exit_code == 2);
    auto j = Json::parse(r.error_json);
    CHECK(j.at("error") == "Io");
    CHECK(j.at("exit_code") == 2);

    cfg.input = testing::data_path("shiller_annual.csv");
    cfg.overrides = Json::parse(R"({"ruin": {"n_sims": "many"}})");
    cfg.command = cli::Command::Ruin;
    r = cli::run(cfg);
    CHECK(r.exit_code == 2);
    CHECK(Json::parse(r.error_json).contains("message"));

    cfg.overrides = Json::parse(R"({"window": 200})");
    cfg.command = cli::Command::Fit;
    r = cli::run(cfg);
    CHECK(r.exit_code == 2);

    const auto bad_csv = out / "bad.csv";
    fs::create_directories(out);
    io::write_file(bad_csv.string(), "year,price,dividend,earnings,cpi\n1900,abc,1,1,1\n");
    cfg.overrides = Json::object();
    cfg.input = bad_csv.string();
    r = cli::run(cfg);
    CHECK(r.exit_code == 2);
    CHECK(Json::parse(r.error_json).at("error") == "MalformedRow");
    fs::remove_all(out);
}
