#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "roughpam/heat_solver.hpp"

namespace roughpam {

struct MultiIndex {
    std::vector<double> alpha;

    std::size_t size() const { return alpha.size(); }
    double total() const;
    // Throws ConfigError unless every alpha_i > -1.
    void validate() const;
};

// J_m(t, alpha) = int over 0 < r_1 < ... < r_m < t of prod (r_i - r_{i-1})^{alpha_i}, r_0 = 0,
// evaluated as t^{|alpha|+m} prod Gamma(alpha_i + 1) / Gamma(|alpha| + m + 1).
double simplex_integral_exact(double t, const MultiIndex& alpha);

struct SimplexBoundReport {
    double exact = 0.0;
    double bound = 0.0;      // c^m t^{|alpha|+m} / Gamma(|alpha|+m+1)
    double minimal_c = 0.0;  // (prod Gamma(alpha_i + 1))^{1/m}
    bool holds = false;
};

SimplexBoundReport simplex_bound_check(double t, const MultiIndex& alpha, double c);

// Heat kernel of (kappa/2) Laplacian on the line.
double heat_kernel(double t, double x, double kappa);

struct SpaceTimePoint {
    double s;
    double y;
};

// f_n((s_1,y_1),...,(s_n,y_n); t, x): the symmetrized chaos kernel.
double chaos_kernel(const std::vector<SpaceTimePoint>& points, double t, double x, const ModelParams& params);

enum class ChaosMethod { quadrature, monte_carlo };

struct ChaosBudget {
    std::int64_t max_samples = 2'000'000;
    std::int64_t batch_size = 20'000;
    double target_rel_stderr = 0.01;
    std::uint64_t seed = 7;
    int threads = 1;
    double quad_tol = 1e-9;
    bool force_monte_carlo = false;
};

struct ChaosNormEstimate {
    int order = 0;
    double value = 0.0;  // n! ||f_n(., t, x)||^2
    double std_error = 0.0;
    ChaosMethod method = ChaosMethod::quadrature;
    std::int64_t samples = 0;
    bool budget_exhausted = false;  // stderr target not reached
};

// n! ||f_n(., t, x)||^2 in the Fourier representation; eps > 0 adds the
// mollifier e^{-eps xi^2} to each spectral factor (moments of u_eps).
// Orders n <= 2 use tensor quadrature, larger orders importance sampling.
ChaosNormEstimate chaos_norm_sq(int n, double t, double x, const ModelParams& params, const ChaosBudget& budget,
                                double eps = 0.0);

// Explicit majorant of n! ||f_n||^2; see the README for the derivation and constants.
double chaos_norm_upper_bound(int n, double t, double x, const ModelParams& params);

// The multi-index pattern sums entering the majorant (exposed for tests):
// sum over the 2^{n-1} admissible patterns of prod_i pi / cos(pi alpha_i / 2).
double pattern_constant(int n, double a, bool with_first_factor);

struct SeriesResult {
    double partial_sum = 0.0;  // includes the zeroth chaos (p_t * u0)(x)^2
    double std_error = 0.0;
    double tail_bound = 0.0;   // sum of majorants over n > n_max
    bool tail_flag = false;       // tail > 10% of partial sum
    bool under_resolved = false;  // tail flag, or an MC term missed its target
    std::vector<ChaosNormEstimate> terms;
};

SeriesResult second_moment_series(double t, double x, const ModelParams& params, int n_max,
                                  const ChaosBudget& budget, double eps = 0.0);

struct MittagLefflerReport {
    double partial_sum = 0.0;
    double envelope = 0.0;
    // Logarithms stay finite where the values overflow.
    double log_partial_sum = 0.0;
    double log_envelope = 0.0;
    std::int64_t terms = 0;
    bool within_envelope = false;
};

// Sum of x^m / Gamma(a m + 1) against c1 exp(c2 x^{1/a}). The default c1 <= 0
// selects 1 + 1/a, which covers the asymptotic E_a(x) ~ exp(x^{1/a}) / a.
MittagLefflerReport mittag_leffler_envelope(double x, double a, double c1 = 0.0, double c2 = 1.0);

void write_chaos_table_csv(std::ostream& out, const std::vector<ChaosNormEstimate>& terms,
                           const std::vector<double>& upper_bounds);

}  // namespace roughpam
