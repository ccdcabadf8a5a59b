#include "roughpam/spectral_noise.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <type_traits>
#include <ostream>

#include "fft.hpp"
#include "roughpam/common.hpp"
#include "roughpam/parallel.hpp"
#include "roughpam/stats.hpp"

namespace roughpam {

HurstParam::HurstParam(double h) : h_(h) {
    if (!(h > 0.25 && h < 0.5)) {
        throw ConfigError("Hurst parameter must satisfy 1/4 < h < 1/2, got " + std::to_string(h));
    }
}

double c1h(double h) { return std::tgamma(2.0 * h + 1.0) * std::sin(kPi * h) / (2.0 * kPi); }

double c1h(const HurstParam& h) { return c1h(h.value()); }

SpectralDensityWeight SpectralDensityWeight::from(const HurstParam& h) { return {h.exponent(), roughpam::c1h(h)}; }

double SpectralDensityWeight::operator()(double xi) const {
    return xi == 0.0 ? 0.0 : c1h * std::pow(std::abs(xi), exponent);
}

void SpectralGrid::validate() const {
    if (!(domain_length > 0.0)) throw ConfigError("grid.domain_length must be positive");
    if (mode_cutoff < 2) throw ConfigError("grid.mode_cutoff must be at least 2");
    if (!(dt > 0.0)) throw ConfigError("grid.dt must be positive");
}

double SpectralGrid::frequency(int k) const { return 2.0 * kPi * k / domain_length; }

double SpectralGrid::mode_spacing() const { return 2.0 * kPi / domain_length; }

int next_five_smooth(int n) {
    for (int m = std::max(n, 1);; ++m) {
        int r = m;
        for (int p : {2, 3, 5}) {
            while (r % p == 0) r /= p;
        }
        if (r == 1) return m;
    }
}

int SpectralGrid::collocation_size() const {
    // Multiples of 16 keep FFTW on its fast radix-2 codelets (3125 = 5^5 is
    // several times slower than 3200 = 2^7 5^2).
    int n = next_five_smooth(3 * mode_cutoff + 1);
    while (n % 16 != 0) n = next_five_smooth(n + 1);
    return n;
}

NoiseSampler::NoiseSampler(const SpectralGrid& grid, const HurstParam& h, double noise_scale) : grid_(grid) {
    grid.validate();
    const SpectralDensityWeight w = SpectralDensityWeight::from(h);
    half_sigma_.resize(static_cast<std::size_t>(grid.mode_cutoff) + 1);
    for (int k = 0; k <= grid.mode_cutoff; ++k) {
        const double var = noise_scale * w(grid.frequency(k)) * grid.dt * grid.mode_spacing();
        half_sigma_[static_cast<std::size_t>(k)] = std::sqrt(var / 2.0);
    }
}

double NoiseSampler::variance(int k) const {
    const double s = half_sigma_.at(static_cast<std::size_t>(k));
    return 2.0 * s * s;
}

void NoiseSampler::sample(RngStream& rng, NoiseIncrement& out) const {
    auto& c = out.half_spectrum();
    c.resize(half_sigma_.size());
    c[0] = 0.0;
    thread_local std::vector<double> z;
    z.resize(2 * (c.size() - 1));
    rng.fill_normal(z.data(), z.size());
    for (std::size_t k = 1; k < c.size(); ++k) {
        c[k] = {half_sigma_[k] * z[2 * k - 2], half_sigma_[k] * z[2 * k - 1]};
    }
}

NoiseIncrement NoiseSampler::sample(RngStream& rng) const {
    NoiseIncrement out(grid_.mode_cutoff);
    sample(rng, out);
    return out;
}

NoiseIncrement sample_noise_increment(const SpectralGrid& grid, const HurstParam& h, RngStream& rng) {
    return NoiseSampler(grid, h).sample(rng);
}

double inner_product_H(const std::vector<std::vector<double>>& phi, const std::vector<std::vector<double>>& psi,
                       const SpectralGrid& grid, const HurstParam& h) {
    grid.validate();
    if (phi.size() != psi.size()) throw ConfigError("inner_product_H: step counts differ");
    const int n = grid.collocation_size();
    const int K = grid.mode_cutoff;
    detail::RealFft fft(n);
    std::vector<std::complex<double>> a(static_cast<std::size_t>(n / 2 + 1)), b(a.size());
    const SpectralDensityWeight w = SpectralDensityWeight::from(h);
    double total = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (phi[i].size() != static_cast<std::size_t>(n) || psi[i].size() != static_cast<std::size_t>(n)) {
            throw ConfigError("inner_product_H: grid function length must equal the collocation size");
        }
        std::copy(phi[i].begin(), phi[i].end(), fft.real());
        fft.forward();
        std::copy(fft.spectrum(), fft.spectrum() + a.size(), a.begin());
        std::copy(psi[i].begin(), psi[i].end(), fft.real());
        fft.forward();
        std::copy(fft.spectrum(), fft.spectrum() + b.size(), b.begin());
        double s = 0.0;
        for (int k = 1; k <= K; ++k) {
            // coefficient c_k = X_k / n; F g(xi_k) = L c_k
            s += 2.0 * w(grid.frequency(k)) * std::real(a[k] * std::conj(b[k]));
        }
        const double L = grid.domain_length;
        total += grid.dt * s * grid.mode_spacing() * (L / n) * (L / n);
    }
    return total;
}

IsometryReport ito_integral_variance_check(const TestFunction& g, const SpectralGrid& grid, const HurstParam& h,
                                           std::int64_t samples, std::uint64_t seed, int threads) {
    grid.validate();
    IsometryReport report;
    report.name = g.name;
    report.samples = samples;

    // Left-point time weights; only steps with nonzero weight draw noise.
    std::vector<double> theta;
    for (int i = 0;; ++i) {
        const double s = i * grid.dt;
        if (s >= g.t_end) break;
        theta.push_back(s >= g.t_begin ? 1.0 : 0.0);
    }
    const int K = grid.mode_cutoff;
    const NoiseSampler sampler(grid, h);
    std::vector<std::complex<double>> conj_fg(static_cast<std::size_t>(K) + 1);
    double spectral_sum = 0.0;
    for (int k = 1; k <= K; ++k) {
        const std::complex<double> fg = g.fourier(grid.frequency(k));
        conj_fg[static_cast<std::size_t>(k)] = std::conj(fg);
        spectral_sum += 2.0 * sampler.variance(k) * std::norm(fg);
    }
    double theta_sq = 0.0;
    for (double th : theta) theta_sq += th * th;
    report.grid_norm = theta_sq * spectral_sum;
    report.exact_norm = inner_product_H(g, g, h);

    const BatchPlan plan{samples, 1000};
    std::vector<RunningStats> partial(static_cast<std::size_t>(plan.count()));
    for_each_batch(plan.count(), threads, [&](std::int64_t b) {
        RngStream rng(seed, stream_id(stream_tag::kIsometry, static_cast<std::uint64_t>(b)));
        NoiseIncrement dw(K);
        RunningStats acc;
        for (std::int64_t s = plan.begin(b); s < plan.end(b); ++s) {
            double x = 0.0;
            for (double th : theta) {
                if (th == 0.0) continue;
                sampler.sample(rng, dw);
                const auto& c = dw.half_spectrum();
                double step = 0.0;
                for (int k = 1; k <= K; ++k) step += std::real(c[k] * conj_fg[k]);
                x += th * 2.0 * step;
            }
            acc.add(x * x);
        }
        partial[static_cast<std::size_t>(b)] = acc;
    });
    RunningStats total;
    for (const auto& p : partial) total.merge(p);
    report.empirical = total.mean();
    report.empirical_stderr = total.std_error();
    report.z = report.empirical_stderr > 0.0 ? (report.empirical - report.exact_norm) / report.empirical_stderr : 0.0;
    return report;
}

namespace {

template <class T>
void put(std::ostream& out, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.write(bytes, sizeof(T));
}

}  // namespace

void write_noise_binary(std::ostream& out, const SpectralGrid& grid, const HurstParam& h, std::uint64_t seed,
                        const std::vector<NoiseIncrement>& steps) {
    out.write("RPNOISE1", 8);
    put(out, grid.domain_length);
    put(out, static_cast<std::int32_t>(grid.mode_cutoff));
    put(out, grid.dt);
    put(out, h.value());
    put(out, seed);
    put(out, static_cast<std::uint64_t>(steps.size()));
    for (const auto& step : steps) {
        for (int k = 0; k <= grid.mode_cutoff; ++k) {
            const auto c = step.coeff(k);
            put(out, c.real());
            put(out, c.imag());
        }
    }
}

}  // namespace roughpam
