#include "qlbm/driver.hpp"

#include "CLI11.hpp"

#include <exception>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Desk-scale quantum lattice-Boltzmann simulator: streaming and bounce-back "
                 "obstacles as quantum circuits on an exact statevector, with momentum-exchange "
                 "force readout and a classical reference solver"};
    app.require_subcommand(1);

    CLI::App* run_cmd = app.add_subcommand("run", "Execute a simulation from a config file");
    std::string config_path;
    run_cmd->add_option("config", config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    bool compare = false;
    bool report_gates = false;
    bool verbose = false;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    std::uint64_t shots = 0;
    std::string mode;
    run_cmd->add_flag("--compare", compare, "Run the classical solver in lockstep and compare");
    run_cmd->add_flag("--report-gates", report_gates, "Print per-phase gate counts first");
    run_cmd->add_option("--out", out_dir, "Output directory for the CSV (default: .)");
    CLI::Option* seed_opt =
        run_cmd->add_option("--seed", seed, "Override the measurement seed");
    CLI::Option* shots_opt =
        run_cmd->add_option("--shots", shots, "Override the shot count");
    run_cmd->add_option("--mode", mode, "Force measurement mode")
        ->check(CLI::IsMember({"observable", "ancilla", "shots"}));
    run_cmd->add_flag("--verbose", verbose, "Per-step progress and diagnostics on stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        qlbm::cli::RunConfig config = qlbm::cli::RunConfig::from_json_file(config_path);
        if (compare)
            config.compare = true;
        if (seed_opt->count() > 0)
            config.measurement.seed = seed;
        if (shots_opt->count() > 0)
            config.measurement.shots = shots;
        if (mode == "observable")
            config.measurement.mode = qlbm::qmem::ForceMeasurementConfig::Mode::ObservableExact;
        else if (mode == "ancilla")
            config.measurement.mode = qlbm::qmem::ForceMeasurementConfig::Mode::AncillaExact;
        else if (mode == "shots")
            config.measurement.mode = qlbm::qmem::ForceMeasurementConfig::Mode::AncillaShots;

        if (report_gates)
            std::cout << qlbm::cli::gate_report(config);

        const qlbm::cli::RunResult result =
            qlbm::cli::run(config, out_dir, std::cout, verbose);
        std::cout << "wrote " << result.csv_path.string() << "\n";
        if (result.exit_code != 0)
            std::cerr << "comparison failed: max deviation " << result.max_deviation
                      << " exceeds " << qlbm::cli::kCompareTolerance << "\n";
        return result.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
