#include <CLI11.hpp>

#include <iostream>

#include "valuation_lab/cli.hpp"
#include "valuation_lab/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Valuation-measure econometrics, ruin simulation and continuous-time portfolio tools"};
    std::string command = "report";
    std::string config;
    vlab::cli::RunConfig rc;
    app.add_option("--command", command, "ingest|fit|diagnose|predict|ruin|portfolio|ctsim|report")
        ->capture_default_str();
    app.add_option("--input", rc.input, "Annual market CSV (year,price,dividend,earnings,cpi)");
    app.add_option("--out", rc.out_dir, "Output directory")->capture_default_str();
    app.add_option("--seed", rc.master_seed, "Master seed")->capture_default_str();
    app.add_option("--config", config, "JSON overrides: inline object or file path");
    app.add_option("--rates", rc.rates, "Nominal rate CSV (year,rate in percent) for the portfolio rule");
    CLI11_PARSE(app, argc, argv);

    const auto cmd = vlab::cli::parse_command(command);
    if (!cmd) {
        std::cerr << R"({"error":"InvalidArgument","message":"unknown command","exit_code":2})" << '\n';
        return 2;
    }
    rc.command = *cmd;
    try {
        rc.overrides = vlab::cli::load_overrides(config);
    } catch (const vlab::Error& e) {
        const int code = vlab::exit_code(e.kind());
        std::cerr << vlab::Json{{"error", vlab::to_string(e.kind())}, {"message", e.what()}, {"exit_code", code}}.dump()
                  << '\n';
        return code;
    }
    const auto result = vlab::cli::run(rc);
    if (result.exit_code != 0) {
        std::cerr << result.error_json << '\n';
        return result.exit_code;
    }
    for (const auto& f : result.files) std::cout << f << '\n';
    return 0;
}
