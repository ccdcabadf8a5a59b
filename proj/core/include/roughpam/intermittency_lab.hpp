#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "roughpam/chaos_expansion.hpp"
#include "roughpam/feynman_kac.hpp"

namespace roughpam {

struct GrowthRow {
    double kappa = 1.0;
    MomentEstimate estimate;
    bool excluded = false;  // flagged estimates never enter fits
};

struct GrowthTable {
    std::vector<GrowthRow> rows;
    std::vector<std::string> exclusions;  // one line per excluded cell
};

// One extrapolated FK estimate per (n, t); every cell uses options.seed.
GrowthTable moment_growth_scan(const std::vector<int>& n_list, const std::vector<double>& t_grid,
                               const ModelParams& params, const std::vector<double>& eps_schedule,
                               const FkOptions& options);

struct GrowthFit {
    int n = 0;
    double kappa = 1.0;
    double gamma = 0.0;  // d log E[u^n] / dt
    double gamma_std_error = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
    int points = 0;
};

// Weighted least squares of log(mean) against t at order n (and kappa), with
// weights (mean / stderr)^2. Needs at least 4 unflagged rows.
GrowthFit fit_growth(const GrowthTable& table, int n, double kappa = 1.0);

struct ScalingReport {
    double slope_n = 0.0;
    double slope_kappa = 0.0;
    double target_n = 0.0;      // 1 + 1/h
    double target_kappa = 0.0;  // 1 - 1/h
    double tolerance = 0.25;    // relative
    bool pass_n = false;
    bool pass_kappa = false;
    std::vector<GrowthFit> n_fits;
    std::vector<GrowthFit> kappa_fits;
};

// Log-log regressions of gamma against n and against kappa.
ScalingReport scaling_exponents(const std::vector<GrowthFit>& n_fits, const std::vector<GrowthFit>& kappa_fits,
                                const HurstParam& h, double tolerance = 0.25);

struct MajorantReport {
    int n = 0;
    double t = 0.0;
    double majorant = 0.0;  // sum_m (n-1)^{m/2} ||I_m||_2 plus the tail from chaos majorants
    double tail = 0.0;
    double fk_root = 0.0;   // (E u^n)^{1/n}
    double fk_root_std_error = 0.0;
    bool under_resolved = false;
    bool holds = false;
};

// Hypercontractivity bound ||u||_n <= sum_m (n-1)^{m/2} ||I_m||_2 against an FK estimate.
MajorantReport upper_bound_audit(int n, double t, const ModelParams& params, const MomentEstimate& fk,
                                 const ChaosBudget& budget, int m_max = 8);

void write_growth_csv(std::ostream& out, const GrowthTable& table);
std::string fits_json(const ScalingReport& report);

}  // namespace roughpam
