#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "roughpam/rng.hpp"

namespace roughpam {

class HurstParam {
public:
    // Throws ConfigError unless 1/4 < h < 1/2.
    explicit HurstParam(double h);

    double value() const { return h_; }
    // Spectral exponent 1 - 2h.
    double exponent() const { return 1.0 - 2.0 * h_; }

private:
    double h_;
};

// Gamma(2h+1) sin(pi h) / (2 pi); defined for any h in (0, 1).
double c1h(double h);
double c1h(const HurstParam& h);

struct SpectralDensityWeight {
    double exponent;
    double c1h;

    static SpectralDensityWeight from(const HurstParam& h);
    // c1h |xi|^exponent, zero at xi = 0.
    double operator()(double xi) const;
};

struct SpectralGrid {
    double domain_length = 32.0;
    int mode_cutoff = 1024;
    double dt = 2.5e-4;

    // Throws ConfigError on L <= 0, K < 2 or dt <= 0.
    void validate() const;
    double frequency(int k) const;
    double mode_spacing() const;
    // Real-space collocation size used for products: smallest 5-smooth multiple
    // of 16 above 3K, so products of two band-limited fields do not alias.
    int collocation_size() const;
};

// Smallest integer >= n whose only prime factors are 2, 3 and 5.
int next_five_smooth(int n);

// Fourier coefficients of one noise increment, stored for k = 0..K; negative
// modes follow from Hermitian symmetry.
class NoiseIncrement {
public:
    NoiseIncrement() = default;
    explicit NoiseIncrement(int mode_cutoff) : half_(static_cast<std::size_t>(mode_cutoff) + 1) {}

    int mode_cutoff() const { return static_cast<int>(half_.size()) - 1; }
    std::complex<double> coeff(int k) const {
        return k >= 0 ? half_[static_cast<std::size_t>(k)] : std::conj(half_[static_cast<std::size_t>(-k)]);
    }
    std::vector<std::complex<double>>& half_spectrum() { return half_; }
    const std::vector<std::complex<double>>& half_spectrum() const { return half_; }

private:
    std::vector<std::complex<double>> half_;
};

// Per-mode standard deviations are computed once; sampling is then a fill.
class NoiseSampler {
public:
    // noise_scale multiplies the variance (test hook; 1 for the model).
    NoiseSampler(const SpectralGrid& grid, const HurstParam& h, double noise_scale = 1.0);

    void sample(RngStream& rng, NoiseIncrement& out) const;
    NoiseIncrement sample(RngStream& rng) const;
    // E|c_k|^2 for k >= 0.
    double variance(int k) const;
    const SpectralGrid& grid() const { return grid_; }

private:
    SpectralGrid grid_;
    std::vector<double> half_sigma_;  // sqrt(variance / 2)
};

NoiseIncrement sample_noise_increment(const SpectralGrid& grid, const HurstParam& h, RngStream& rng);

// ---- test-function catalog ----------------------------------------------

// phi(s, x) = 1_[t_begin, t_end)(s) * g(x), g the unit-mass Gaussian with the
// given center and width, so F g(xi) = exp(-width^2 xi^2 / 2 - i xi center).
struct TestFunction {
    std::string name;
    double center = 0.0;
    double width = 1.0;
    double t_begin = 0.0;
    double t_end = 1.0;
    double scale = 1.0;

    double operator()(double s, double x) const;
    std::complex<double> fourier(double xi) const;
};

// Whitespace-separated lines "name center width t_begin t_end"; '#' starts a comment.
std::vector<TestFunction> parse_catalog(std::istream& in);
std::vector<TestFunction> load_catalog(const std::string& path);
// The ten functions shipped in tests/data/test_functions.txt.
std::vector<TestFunction> default_catalog();

// c1h * int int F phi conj(F psi) |xi|^(1-2h) dxi ds by adaptive quadrature.
double inner_product_H(const TestFunction& phi, const TestFunction& psi, const HurstParam& h, double tol = 1e-10);

// Same inner product for grid functions: per-step real-space samples on the
// collocation points of `grid`; phi[i] and psi[i] are step i, length N each.
double inner_product_H(const std::vector<std::vector<double>>& phi, const std::vector<std::vector<double>>& psi,
                       const SpectralGrid& grid, const HurstParam& h);

// ---- mollified covariance -------------------------------------------------

// f_eps(x) = (2 pi)^-1 int e^{i xi x} e^{-eps xi^2} |xi|^(1-2h) dxi by adaptive
// cosine-transform quadrature.
double mollified_cov(double x, double eps, const HurstParam& h, double tol = 1e-10);

// Profile F with f_eps(x) = eps^(h-1) F(|x| / sqrt(eps)); quadrature based.
double mollified_profile(double y, const HurstParam& h, double tol = 1e-12);
double mollified_profile_derivative(double y, const HurstParam& h, double tol = 1e-12);

// Interpolated f_eps for hot loops. The profile F is tabulated once per h
// from quadrature values and slopes (cubic Hermite, step 0.01) on
// [0, y_split]; beyond y_split its algebraic expansion in 1/y is summed,
// which for y >= 16 is accurate to rounding.
class MollifiedKernel {
public:
    explicit MollifiedKernel(const HurstParam& h, double y_split = 16.0);

    double profile(double y) const;
    double operator()(double x, double eps) const;
    const HurstParam& hurst() const { return h_; }

    // Evaluates at a fixed eps without recomputing scale factors.
    class AtEps {
    public:
        double operator()(double x) const { return scale_ * kernel_->profile(std::abs(x) * inv_sqrt_eps_); }
        double at_zero() const { return scale_ * kernel_->profile(0.0); }

    private:
        friend class MollifiedKernel;
        const MollifiedKernel* kernel_;
        double scale_;
        double inv_sqrt_eps_;
    };
    AtEps at(double eps) const;

    // Shared per-h instance.
    static std::shared_ptr<const MollifiedKernel> shared(const HurstParam& h);

private:
    static constexpr double kTableStep = 0.01;
    static constexpr int kTailTerms = 30;
    double tail(double y) const;

    HurstParam h_;
    double y_split_;
    std::vector<double> values_;
    std::vector<double> slopes_;
    std::vector<double> tail_coeffs_;
};

// ---- isometry check ---------------------------------------------------------

struct IsometryReport {
    std::string name;
    double empirical = 0.0;       // mean of (int g dW)^2
    double empirical_stderr = 0.0;
    double grid_norm = 0.0;       // ||g||_H^2 with the grid spectral sum
    double exact_norm = 0.0;      // ||g||_H^2 by quadrature
    double z = 0.0;               // (empirical - exact) / stderr
    std::int64_t samples = 0;
};

// Discrete stochastic integral of g against `samples` independent noise
// realizations on `grid` (time steps of length grid.dt starting at 0).
IsometryReport ito_integral_variance_check(const TestFunction& g, const SpectralGrid& grid, const HurstParam& h,
                                           std::int64_t samples, std::uint64_t seed, int threads = 1);

// ---- binary export ------------------------------------------------------------

// Layout (little endian): char[8] "RPNOISE1", f64 L, i32 K, f64 dt, f64 h,
// u64 seed, u64 n_steps, then per step (K+1) pairs of f64 (re, im) for k = 0..K.
void write_noise_binary(std::ostream& out, const SpectralGrid& grid, const HurstParam& h, std::uint64_t seed,
                        const std::vector<NoiseIncrement>& steps);

}  // namespace roughpam
