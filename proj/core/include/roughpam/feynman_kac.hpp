#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "roughpam/heat_solver.hpp"
#include "roughpam/rng.hpp"

namespace roughpam {

// Discretized paths r -> B^j_{kappa r} on a uniform grid.
struct BrownianEnsemble {
    int n_paths = 0;
    double dt = 0.0;
    bool kappa_scaled = true;
    std::vector<double> times;
    std::vector<std::vector<double>> values;  // values[j][i] at times[i]

    std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
};

BrownianEnsemble sample_ensemble(int n, double t, double dt_b, double kappa, RngStream& rng);

// V^{eps,j,k} = int_0^t f_eps(B^j - B^k) dr by the trapezoidal rule.
double pair_functional(const BrownianEnsemble& ensemble, int j, int k, double eps, const HurstParam& h);

// E V^{eps,1,2} = (2 pi)^-1 Gamma(1-h) ((kappa t + eps)^h - eps^h) / (kappa h).
double expected_pair_functional(double t, double eps, const HurstParam& h, double kappa);

struct FkOptions {
    std::int64_t samples = 20'000;
    std::int64_t batch_size = 500;
    std::uint64_t seed = 11;
    int threads = 1;
    double dt_b = 6.25e-5;
    // Test hooks.
    std::optional<double> c1h_override;
    bool identical_paths = false;
};

struct MomentEstimate {
    int n = 0;
    double t = 0.0;
    double x = 0.0;
    double eps = 0.0;  // 0 tags an extrapolated value
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
    std::int64_t clipped = 0;
    bool clip_flag = false;          // clipped > 0.1% of samples
    bool monotonicity_flag = false;  // schedule decreased beyond 3 combined stderr
    double last_increment = 0.0;     // mean(eps_last) - mean(eps_prev)
    double raw_mean = 0.0;           // smallest-eps estimate before extrapolation
    double extrapolation_uncertainty = 0.0;

    bool flagged() const { return clip_flag || monotonicity_flag; }
};

inline constexpr double kExponentClip = 700.0;

// E[u_eps^n(t,x)] = E_B[prod_j u0(x + B^j_{kappa t}) exp(2 pi c1h sum_{j<k} V^{eps,j,k})].
MomentEstimate fk_moment(int n, double t, double x, double eps, const ModelParams& params, const FkOptions& options);

// The same Brownian ensembles for every eps in the schedule.
std::vector<MomentEstimate> fk_moment_schedule(int n, double t, double x, const std::vector<double>& eps_schedule,
                                               const ModelParams& params, const FkOptions& options);

// Rate of E[u^n] - E[u_eps^n] as eps -> 0 used for the extrapolation.
double extrapolation_rate(const HurstParam& h);

// Runs the schedule, checks monotonicity, and extrapolates from the two
// smallest eps assuming a deficit C eps^rate.
MomentEstimate fk_moment_extrapolated(int n, double t, double x, const ModelParams& params,
                                      const std::vector<double>& eps_schedule, const FkOptions& options,
                                      std::vector<MomentEstimate>* schedule_out = nullptr);

}  // namespace roughpam
