#pragma once

#include <string>

#include "roughpam/intermittency_lab.hpp"
#include "roughpam/results_store.hpp"
#include "roughpam/run_config.hpp"

namespace roughpam {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitFlagged = 3, kExitIntegrity = 4 };

struct CommandResult {
    std::string command;
    std::string fingerprint;
    Artifacts artifacts;  // every artifact embeds the fingerprint
    std::string summary;  // short human-readable text
    int exit_code = kExitOk;
};

CommandResult cmd_validate(const RunConfig& config);
CommandResult cmd_solve(const RunConfig& config);
CommandResult cmd_moments(const RunConfig& config);
// synthetic = true replaces FK estimates by exact gamma_n = n^{1+1/h} kappa^{1-1/h} tables.
CommandResult cmd_intermittency(const RunConfig& config, bool synthetic = false);
CommandResult cmd_chaos(const RunConfig& config);
// Fast invariant checks plus a byte-level replay of two fixed-seed pipelines.
CommandResult cmd_selftest(const RunConfig& config);

// Exact log-linear growth table with gamma = scale * n^{1+1/h} kappa^{1-1/h}.
GrowthTable synthetic_growth_table(const HurstParam& h, const std::vector<int>& n_list,
                                   const std::vector<double>& kappa_list, const std::vector<double>& t_grid,
                                   double scale = 1.0);

// Writes the artifacts into config.output_dir and appends to records.jsonl.
ResultRecord persist(const CommandResult& result, const RunConfig& config);

}  // namespace roughpam
