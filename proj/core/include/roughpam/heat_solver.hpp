#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "roughpam/rng.hpp"
#include "roughpam/spectral_noise.hpp"

namespace roughpam {

class InitialCondition {
public:
    enum class Kind { constant, gaussian_bump, spectral_decay, catalog };

    static InitialCondition constant(double c);
    // amplitude * exp(-(x - center)^2 / (2 width^2))
    static InitialCondition gaussian_bump(double center, double width, double amplitude);
    // Defined through F u0(xi) = amplitude / (1 + |xi|)^power; no pointwise form.
    static InitialCondition spectral_decay(double amplitude, double power);
    // Unit-mass catalog bump (time support ignored).
    static InitialCondition catalog(const TestFunction& f);

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    double amplitude() const { return amplitude_; }
    double center() const { return center_; }
    double width() const { return width_; }
    double power() const { return power_; }

    bool is_constant() const { return kind_ == Kind::constant; }
    bool has_pointwise_form() const { return kind_ != Kind::spectral_decay; }
    double operator()(double x) const;
    // F u0(xi); for constants the transform is 2 pi c delta, which has no
    // function value, so this throws.
    std::complex<double> fourier(double xi) const;
    // (p_t * u0)(x) with p_t the heat kernel of (kappa/2) Laplacian.
    double heat_flow(double t, double x, double kappa) const;

    std::string describe() const;

private:
    Kind kind_ = Kind::constant;
    std::string name_ = "constant";
    double amplitude_ = 1.0;
    double center_ = 0.0;
    double width_ = 1.0;
    double power_ = 0.0;
};

struct AdmissibilityReport {
    bool chaos_ok = false;
    double chaos_integral = 0.0;   // int (1 + |xi|^{1/2-h}) |F u0| dxi
    bool picard_ok = false;
    double picard_integral = 0.0;  // int |F u0|^2 (1 + |xi|^{1-2h}) dxi
    std::string note;
};

// Constants pass both checks by convention. Other kinds are integrated over
// doubling shells; a shell increment that fails to shrink marks divergence.
AdmissibilityReport check_admissibility(const InitialCondition& u0, const HurstParam& h);

struct ModelParams {
    HurstParam h{0.35};
    double kappa = 1.0;
    double horizon = 0.25;
    InitialCondition u0 = InitialCondition::constant(1.0);
    // Multiplies the noise variance; 0 gives the deterministic heat flow.
    double noise_scale = 1.0;

    void validate() const;
};

// Half-spectrum Fourier coefficients c_k, k = 0..K, of u(x) = sum_k c_k e^{i xi_k x}.
struct SolutionField {
    double time = 0.0;
    std::vector<std::complex<double>> coeffs;

    int mode_cutoff() const { return static_cast<int>(coeffs.size()) - 1; }
    std::complex<double> coeff(int k) const {
        return k >= 0 ? coeffs[static_cast<std::size_t>(k)] : std::conj(coeffs[static_cast<std::size_t>(-k)]);
    }
    // u(time, x) from the truncated Fourier series.
    double value_at(double x, const SpectralGrid& grid) const;
    SolutionField& operator*=(double alpha);
};

// Projection of u0 onto the grid modes (periodized; constants are the k = 0 mode).
SolutionField project_initial_condition(const InitialCondition& u0, const SpectralGrid& grid);

// u on the real-space collocation points x_j = j L / N, N = grid.collocation_size().
std::vector<double> real_values(const SolutionField& field, const SpectralGrid& grid);

SolutionField heat_semigroup_apply(const SolutionField& field, double tau, double kappa, const SpectralGrid& grid);

double v_norm(const SolutionField& field, const HurstParam& h, const SpectralGrid& grid);

// Exponential Euler stepper. Owns the FFT plans and scratch buffers, so one
// instance per thread.
class MildStepper {
public:
    MildStepper(const ModelParams& params, const SpectralGrid& grid);
    ~MildStepper();
    MildStepper(const MildStepper&) = delete;
    MildStepper& operator=(const MildStepper&) = delete;

    // u <- e^{-kappa dt xi^2 / 2} (u + F[u dW]) using the pre-step u.
    void step(SolutionField& field, const NoiseIncrement& dw);
    // F[u dW] only (no semigroup); used by the Picard probe.
    void multiplicative_term(const SolutionField& field, const NoiseIncrement& dw,
                             std::vector<std::complex<double>>& out);
    void apply_heat(std::vector<std::complex<double>>& coeffs) const;
    double v_norm(const SolutionField& field) const;

    const SpectralGrid& grid() const { return grid_; }
    const NoiseSampler& sampler() const { return sampler_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    SpectralGrid grid_;
    NoiseSampler sampler_;
    std::vector<double> heat_factor_;
    std::vector<double> v_weight_;
};

SolutionField step_mild(const SolutionField& field, const NoiseIncrement& dw, const ModelParams& params,
                        const SpectralGrid& grid);

inline constexpr double kInstabilityThreshold = 1e12;

struct Trajectory {
    std::vector<SolutionField> snapshots;
};

// Iterates step_mild from the projected u0 for n_steps (n_steps * dt must equal
// the horizon) and keeps every `snapshot_every`-th field plus the first and
// last. Throws InstabilityError when a V-norm exceeds 1e12.
Trajectory solve(const ModelParams& params, const SpectralGrid& grid, RngStream& rng, std::int64_t n_steps,
                 std::int64_t snapshot_every = 1);

std::int64_t steps_for_horizon(double horizon, double dt);

struct PicardProbe {
    // sup_t E ||u_{m+1} - u_m||_V^2 for m = 0 .. n_iter - 1
    std::vector<double> differences;
    // E ||u_{n_iter} - u_solve||_V^2 / E ||u_solve||_V^2 at the horizon.
    double final_relative_discrepancy = 0.0;
};

// Picard iterates u_{m+1} = p_t u0 + int p_{t-s} u_m dW driven by common
// noise, advanced in lockstep; iterate 0 is the heat flow of u0.
PicardProbe picard_contraction_probe(const ModelParams& params, const SpectralGrid& grid, int n_iter,
                                     std::int64_t mc_samples, std::uint64_t seed, int threads = 1);

struct EnsembleOptions {
    std::int64_t trajectories = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
    std::int64_t snapshot_every = 100;
    int probe_modes = 8;          // record c_k for |k| <= probe_modes
    double probe_x = 0.0;
};

struct ModeStats {
    std::vector<double> mean_re, mean_im, stderr_re, stderr_im;  // index k = 0..probe_modes
};

struct EnsembleSummary {
    std::vector<double> times;
    std::vector<double> mean_at_x, mean_stderr;
    std::vector<double> second_moment_at_x, second_moment_stderr;
    // Spatial mean of u^2 over the torus. For constant u0 the law is shift
    // invariant, so this estimates E u^2(t, x) at any x with far less variance.
    std::vector<double> spatial_second_moment, spatial_second_moment_stderr;
    std::vector<ModeStats> modes;  // per snapshot time
    std::int64_t samples = 0;
    double probe_x = 0.0;
};

EnsembleSummary run_ensemble(const ModelParams& params, const SpectralGrid& grid, const EnsembleOptions& options);

// Snapshot stream: char[8] "RPTRAJ01", f64 L, i32 K, f64 dt, f64 h, f64 kappa,
// u64 seed, u64 n_snapshots, then per snapshot f64 time and (K+1) (re, im) f64 pairs.
void write_trajectory_binary(std::ostream& out, const ModelParams& params, const SpectralGrid& grid,
                             std::uint64_t seed, const Trajectory& trajectory);
// Columns t, mean_at_0, second_moment_at_0, stderr, n_samples; stderr refers to
// the second moment.
void write_summary_csv(std::ostream& out, const EnsembleSummary& summary);

}  // namespace roughpam
