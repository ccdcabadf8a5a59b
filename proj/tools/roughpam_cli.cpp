// roughpam: batch driver for the solver, chaos, Feynman-Kac and intermittency experiments.
#ifdef ROUGHPAM_CLI11_SINGLE_HEADER
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <iostream>
#include <optional>

#include "roughpam/common.hpp"
#include "roughpam/harness.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> threads;
};

roughpam::RunConfig load(const Flags& f) {
    roughpam::RunConfig c = f.config.empty() ? roughpam::RunConfig{} : roughpam::load_config(f.config);
    if (f.seed) c.seed = *f.seed;
    if (f.out) c.output_dir = *f.out;
    if (f.threads) c.threads = *f.threads;
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rough-noise parabolic Anderson model experiments"};
    app.require_subcommand(0, 1);
    Flags flags;
    app.add_option("--config", flags.config, "JSON run configuration (defaults when omitted)");
    app.add_option("--seed", flags.seed, "Override the configured seed");
    app.add_option("--out", flags.out, "Output directory");
    app.add_option("--threads", flags.threads, "Worker threads (0 = all cores)");
    bool print_config = false;
    app.add_flag("--print-config", print_config, "Print the effective configuration and exit");

    bool synthetic = false;
    auto* validate = app.add_subcommand("validate", "Check parameters and initial-condition admissibility");
    auto* solve = app.add_subcommand("solve", "Run a solver ensemble");
    auto* moments = app.add_subcommand("moments", "Feynman-Kac moments along the eps schedule");
    auto* inter = app.add_subcommand("intermittency", "Moment growth scan and scaling fits");
    inter->add_flag("--synthetic", synthetic, "Use an exact power-law table instead of Monte Carlo");
    auto* chaos = app.add_subcommand("chaos", "Chaos norm table and second-moment series");
    auto* selftest = app.add_subcommand("selftest", "Invariant checks and byte-level replay");
    for (auto* sub : {validate, solve, moments, inter, chaos, selftest}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    using namespace roughpam;
    try {
        const RunConfig config = load(flags);
        if (print_config) {
            std::cout << config.to_json() << '\n';
            return kExitOk;
        }
        if (app.get_subcommands().empty()) {
            std::cerr << app.help();
            return kExitConfig;
        }
        CommandResult result;
        if (*validate) result = cmd_validate(config);
        else if (*solve) result = cmd_solve(config);
        else if (*moments) result = cmd_moments(config);
        else if (*inter) result = cmd_intermittency(config, synthetic);
        else if (*chaos) result = cmd_chaos(config);
        else result = cmd_selftest(config);

        const ResultRecord rec = persist(result, config);
        std::cout << result.summary << "fingerprint " << rec.fingerprint << "\nwrote";
        for (const auto& [name, bytes] : result.artifacts) std::cout << ' ' << name;
        std::cout << " to " << config.output_dir << '\n';
        return result.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IntegrityError& e) {
        std::cerr << "integrity error: " << e.what() << '\n';
        return kExitIntegrity;
    } catch (const QuadratureError& e) {
        std::cerr << "quadrature error: " << e.what() << " (achieved " << e.achieved_error() << ")\n";
        return kExitFlagged;
    } catch (const InstabilityError& e) {
        std::cerr << "instability: " << e.what() << '\n';
        return kExitFlagged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
