#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roughpam/heat_solver.hpp"

namespace roughpam {

struct SolverSection {
    std::int64_t trajectories = 1000;
    std::int64_t snapshot_every = 100;
    int probe_modes = 8;
};

struct FkSection {
    double dt_b = 6.25e-5;
    std::vector<double> eps_schedule{1e-1, 1e-2, 1e-3};
    std::int64_t samples = 20'000;
    std::vector<int> n_list{1, 2, 3};
    double t = 0.25;
    double x = 0.0;
};

struct ChaosSection {
    int n_max = 8;
    double t = 0.25;
    double x = 0.0;
    std::int64_t max_samples = 2'000'000;
    double target_rel_stderr = 0.01;
};

struct LabSection {
    std::vector<int> n_list{2, 3, 4, 5};
    std::vector<double> t_grid{0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<double> kappa_list{0.5, 1.0, 2.0};
    std::int64_t samples = 20'000;
    double tolerance = 0.25;
};

// Versioned JSON run description. Unknown keys are rejected.
struct RunConfig {
    static constexpr int kSchemaVersion = 1;

    ModelParams model;
    SpectralGrid grid;
    SolverSection solver;
    FkSection fk;
    ChaosSection chaos;
    LabSection lab;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = all cores
    std::string output_dir = "roughpam-out";

    // Throws ConfigError naming the offending field.
    void validate() const;
    // Canonical JSON text; output_dir and threads are left out because they
    // do not change results.
    std::string canonical() const;
    // SHA-256 of canonical(), hex.
    std::string fingerprint() const;
    std::string to_json() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

std::string sha256_hex(const std::string& data);

}  // namespace roughpam
