#include "roughpam/heat_solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <sstream>
#include <ostream>
#include <type_traits>

#include "fft.hpp"
#include "roughpam/common.hpp"
#include "roughpam/parallel.hpp"
#include "roughpam/stats.hpp"

namespace roughpam {

double SolutionField::value_at(double x, const SpectralGrid& grid) const {
    double v = coeffs.empty() ? 0.0 : coeffs[0].real();
    for (std::size_t k = 1; k < coeffs.size(); ++k) {
        v += 2.0 * std::real(coeffs[k] * std::polar(1.0, grid.frequency(static_cast<int>(k)) * x));
    }
    return v;
}

SolutionField& SolutionField::operator*=(double alpha) {
    for (auto& c : coeffs) c *= alpha;
    return *this;
}

SolutionField project_initial_condition(const InitialCondition& u0, const SpectralGrid& grid) {
    grid.validate();
    SolutionField f;
    f.coeffs.assign(static_cast<std::size_t>(grid.mode_cutoff) + 1, 0.0);
    if (u0.is_constant()) {
        f.coeffs[0] = u0.amplitude();
        return f;
    }
    for (int k = 0; k <= grid.mode_cutoff; ++k) {
        f.coeffs[static_cast<std::size_t>(k)] = u0.fourier(grid.frequency(k)) / grid.domain_length;
    }
    f.coeffs[0] = f.coeffs[0].real();
    return f;
}

std::vector<double> real_values(const SolutionField& field, const SpectralGrid& grid) {
    const int n = grid.collocation_size();
    detail::RealFft fft(n);
    std::fill(fft.spectrum(), fft.spectrum() + fft.spectrum_size(), 0.0);
    std::copy(field.coeffs.begin(), field.coeffs.end(), fft.spectrum());
    fft.backward();
    return std::vector<double>(fft.real(), fft.real() + n);
}

SolutionField heat_semigroup_apply(const SolutionField& field, double tau, double kappa, const SpectralGrid& grid) {
    if (tau < 0.0) throw ConfigError("heat_semigroup_apply: tau must be nonnegative");
    SolutionField out = field;
    out.time = field.time + tau;
    for (std::size_t k = 1; k < out.coeffs.size(); ++k) {
        const double xi = grid.frequency(static_cast<int>(k));
        out.coeffs[k] *= std::exp(-0.5 * kappa * tau * xi * xi);
    }
    return out;
}

double v_norm(const SolutionField& field, const HurstParam& h, const SpectralGrid& grid) {
    // int |F u|^2 (1 + |xi|^a) dxi with F u(xi_k) = L c_k and spacing 2 pi / L.
    double s = field.coeffs.empty() ? 0.0 : std::norm(field.coeffs[0]);
    for (std::size_t k = 1; k < field.coeffs.size(); ++k) {
        const double xi = grid.frequency(static_cast<int>(k));
        s += 2.0 * std::norm(field.coeffs[k]) * (1.0 + std::pow(xi, h.exponent()));
    }
    return 2.0 * kPi * grid.domain_length * s;
}

struct MildStepper::Impl {
    explicit Impl(int n) : fft(n, FFTW_MEASURE), u(static_cast<std::size_t>(n)) {}
    detail::RealFft fft;
    std::vector<double> u;
};

MildStepper::MildStepper(const ModelParams& params, const SpectralGrid& grid)
    : impl_(std::make_unique<Impl>(grid.collocation_size())),
      grid_(grid),
      sampler_(grid, params.h, params.noise_scale) {
    params.validate();
    const int K = grid.mode_cutoff;
    heat_factor_.resize(static_cast<std::size_t>(K) + 1);
    v_weight_.resize(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) {
        const double xi = grid.frequency(k);
        heat_factor_[static_cast<std::size_t>(k)] = std::exp(-0.5 * params.kappa * grid.dt * xi * xi);
        v_weight_[static_cast<std::size_t>(k)] = k == 0 ? 1.0 : 2.0 * (1.0 + std::pow(xi, params.h.exponent()));
    }
}

MildStepper::~MildStepper() = default;

void MildStepper::multiplicative_term(const SolutionField& field, const NoiseIncrement& dw,
                                      std::vector<std::complex<double>>& out) {
    Impl& m = *impl_;
    const std::size_t K1 = static_cast<std::size_t>(grid_.mode_cutoff) + 1;
    if (field.coeffs.size() != K1 || dw.half_spectrum().size() != K1) {
        throw ConfigError("step_mild: field and noise increment are on different grids");
    }
    const int n = m.fft.size();
    std::complex<double>* spec = m.fft.spectrum();
    double* real = m.fft.real();
    std::fill(spec + K1, spec + m.fft.spectrum_size(), 0.0);
    std::copy(field.coeffs.begin(), field.coeffs.end(), spec);
    m.fft.backward();
    std::copy(real, real + n, m.u.begin());
    std::fill(spec + K1, spec + m.fft.spectrum_size(), 0.0);
    std::copy(dw.half_spectrum().begin(), dw.half_spectrum().end(), spec);
    m.fft.backward();
    for (int j = 0; j < n; ++j) real[j] *= m.u[static_cast<std::size_t>(j)];
    m.fft.forward();
    out.resize(K1);
    const double inv_n = 1.0 / n;
    for (std::size_t k = 0; k < K1; ++k) out[k] = spec[k] * inv_n;
    out[0] = out[0].real();
}

void MildStepper::apply_heat(std::vector<std::complex<double>>& coeffs) const {
    for (std::size_t k = 0; k < coeffs.size(); ++k) coeffs[k] *= heat_factor_[k];
}

void MildStepper::step(SolutionField& field, const NoiseIncrement& dw) {
    thread_local std::vector<std::complex<double>> product;
    multiplicative_term(field, dw, product);
    for (std::size_t k = 0; k < field.coeffs.size(); ++k) {
        field.coeffs[k] = heat_factor_[k] * (field.coeffs[k] + product[k]);
    }
    field.time += grid_.dt;
}

double MildStepper::v_norm(const SolutionField& field) const {
    double s = 0.0;
    for (std::size_t k = 0; k < field.coeffs.size(); ++k) s += v_weight_[k] * std::norm(field.coeffs[k]);
    return 2.0 * kPi * grid_.domain_length * s;
}

SolutionField step_mild(const SolutionField& field, const NoiseIncrement& dw, const ModelParams& params,
                        const SpectralGrid& grid) {
    MildStepper stepper(params, grid);
    SolutionField out = field;
    stepper.step(out, dw);
    return out;
}

std::int64_t steps_for_horizon(double horizon, double dt) {
    const double r = horizon / dt;
    const auto n = static_cast<std::int64_t>(std::llround(r));
    if (n < 1 || std::abs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, r)) {
        throw ConfigError("horizon must be an integer multiple of the time step");
    }
    return n;
}

namespace {

void check_stability(double vn, double t) {
    if (!(vn <= kInstabilityThreshold)) {
        std::ostringstream os;
        os << "V-norm " << vn << " exceeded " << kInstabilityThreshold << " at t = " << t
           << "; reduce dt or check the configuration";
        throw InstabilityError(os.str());
    }
}

}  // namespace

Trajectory solve(const ModelParams& params, const SpectralGrid& grid, RngStream& rng, std::int64_t n_steps,
                 std::int64_t snapshot_every) {
    params.validate();
    grid.validate();
    if (n_steps != steps_for_horizon(params.horizon, grid.dt)) {
        throw ConfigError("solve: n_steps * dt must equal the horizon");
    }
    if (snapshot_every < 1) snapshot_every = 1;
    MildStepper stepper(params, grid);
    Trajectory traj;
    SolutionField u = project_initial_condition(params.u0, grid);
    traj.snapshots.push_back(u);
    NoiseIncrement dw(grid.mode_cutoff);
    for (std::int64_t i = 1; i <= n_steps; ++i) {
        stepper.sampler().sample(rng, dw);
        stepper.step(u, dw);
        u.time = static_cast<double>(i) * grid.dt;
        check_stability(stepper.v_norm(u), u.time);
        if (i % snapshot_every == 0 || i == n_steps) traj.snapshots.push_back(u);
    }
    return traj;
}

PicardProbe picard_contraction_probe(const ModelParams& params, const SpectralGrid& grid, int n_iter,
                                     std::int64_t mc_samples, std::uint64_t seed, int threads) {
    if (n_iter < 2) throw ConfigError("picard_contraction_probe requires n_iter >= 2");
    params.validate();
    const std::int64_t n_steps = steps_for_horizon(params.horizon, grid.dt);
    const std::size_t M = static_cast<std::size_t>(n_iter);

    struct Partial {
        std::vector<std::vector<double>> diff;  // [m][step] sum over samples
        double discrepancy = 0.0, solution = 0.0;
    };
    const BatchPlan plan{mc_samples, 1};
    std::vector<Partial> partial(static_cast<std::size_t>(plan.count()));
    for_each_batch(plan.count(), threads, [&](std::int64_t b) {
        Partial& p = partial[static_cast<std::size_t>(b)];
        p.diff.assign(M, std::vector<double>(static_cast<std::size_t>(n_steps) + 1, 0.0));
        MildStepper stepper(params, grid);
        RngStream rng(seed, stream_id(stream_tag::kPicard, static_cast<std::uint64_t>(b)));
        const SolutionField u0 = project_initial_condition(params.u0, grid);
        // iterates[m] for m = 0..M plus the direct solution.
        std::vector<SolutionField> it(M + 1, u0);
        SolutionField direct = u0;
        NoiseIncrement dw(grid.mode_cutoff);
        std::vector<std::complex<double>> prod;
        for (std::int64_t i = 1; i <= n_steps; ++i) {
            stepper.sampler().sample(rng, dw);
            // Descending m so that u_{m+1} reads u_m before u_m advances.
            for (std::size_t m = M; m >= 1; --m) {
                stepper.multiplicative_term(it[m - 1], dw, prod);
                for (std::size_t k = 0; k < prod.size(); ++k) it[m].coeffs[k] += prod[k];
                stepper.apply_heat(it[m].coeffs);
            }
            stepper.apply_heat(it[0].coeffs);
            stepper.step(direct, dw);
            for (std::size_t m = 0; m < M; ++m) {
                SolutionField d = it[m + 1];
                for (std::size_t k = 0; k < d.coeffs.size(); ++k) d.coeffs[k] -= it[m].coeffs[k];
                p.diff[m][static_cast<std::size_t>(i)] = stepper.v_norm(d);
            }
        }
        SolutionField d = it[M];
        for (std::size_t k = 0; k < d.coeffs.size(); ++k) d.coeffs[k] -= direct.coeffs[k];
        p.discrepancy = stepper.v_norm(d);
        p.solution = stepper.v_norm(direct);
    });
    PicardProbe out;
    out.differences.assign(M, 0.0);
    std::vector<std::vector<double>> mean(M, std::vector<double>(static_cast<std::size_t>(n_steps) + 1, 0.0));
    double disc = 0.0, sol = 0.0;
    for (const Partial& p : partial) {
        for (std::size_t m = 0; m < M; ++m) {
            for (std::size_t i = 0; i < mean[m].size(); ++i) mean[m][i] += p.diff[m][i];
        }
        disc += p.discrepancy;
        sol += p.solution;
    }
    for (std::size_t m = 0; m < M; ++m) {
        out.differences[m] = *std::max_element(mean[m].begin(), mean[m].end()) / static_cast<double>(mc_samples);
    }
    out.final_relative_discrepancy = sol > 0.0 ? disc / sol : 0.0;
    return out;
}

EnsembleSummary run_ensemble(const ModelParams& params, const SpectralGrid& grid, const EnsembleOptions& options) {
    params.validate();
    grid.validate();
    const std::int64_t n_steps = steps_for_horizon(params.horizon, grid.dt);
    const std::int64_t every = std::max<std::int64_t>(1, options.snapshot_every);
    std::vector<std::int64_t> snap_steps;
    for (std::int64_t i = 0; i <= n_steps; ++i) {
        if (i % every == 0 || i == n_steps) snap_steps.push_back(i);
    }
    const std::size_t S = snap_steps.size();
    const int P = std::min(options.probe_modes, grid.mode_cutoff);
    const std::size_t P1 = static_cast<std::size_t>(P) + 1;

    struct Acc {
        std::vector<RunningStats> mean, second, spatial;
        std::vector<std::vector<RunningStats>> re, im;
    };
    auto make_acc = [&] {
        Acc a;
        a.mean.resize(S);
        a.second.resize(S);
        a.spatial.resize(S);
        a.re.assign(S, std::vector<RunningStats>(P1));
        a.im.assign(S, std::vector<RunningStats>(P1));
        return a;
    };
    const BatchPlan plan{options.trajectories, 16};
    std::vector<Acc> partial(static_cast<std::size_t>(plan.count()));
    for_each_batch(plan.count(), options.threads, [&](std::int64_t b) {
        Acc acc = make_acc();
        MildStepper stepper(params, grid);
        NoiseIncrement dw(grid.mode_cutoff);
        std::vector<std::complex<double>> phase(static_cast<std::size_t>(grid.mode_cutoff) + 1);
        for (int k = 0; k <= grid.mode_cutoff; ++k) {
            phase[static_cast<std::size_t>(k)] = std::polar(1.0, grid.frequency(k) * options.probe_x);
        }
        auto record = [&](const SolutionField& u, std::size_t s) {
            double v = u.coeffs[0].real();
            for (std::size_t k = 1; k < u.coeffs.size(); ++k) v += 2.0 * std::real(u.coeffs[k] * phase[k]);
            acc.mean[s].add(v);
            acc.second[s].add(v * v);
            // Parseval: (1/L) int u^2 dx = sum over all modes of |c_k|^2.
            double energy = std::norm(u.coeffs[0]);
            for (std::size_t k = 1; k < u.coeffs.size(); ++k) energy += 2.0 * std::norm(u.coeffs[k]);
            acc.spatial[s].add(energy);
            for (std::size_t k = 0; k < P1; ++k) {
                acc.re[s][k].add(u.coeffs[k].real());
                acc.im[s][k].add(u.coeffs[k].imag());
            }
        };
        for (std::int64_t tr = plan.begin(b); tr < plan.end(b); ++tr) {
            RngStream rng(options.seed, stream_id(stream_tag::kSolver, static_cast<std::uint64_t>(tr)));
            SolutionField u = project_initial_condition(params.u0, grid);
            std::size_t s = 0;
            record(u, s++);
            for (std::int64_t i = 1; i <= n_steps; ++i) {
                stepper.sampler().sample(rng, dw);
                stepper.step(u, dw);
                u.time = static_cast<double>(i) * grid.dt;
                if (s < S && snap_steps[s] == i) {
                    check_stability(stepper.v_norm(u), u.time);
                    record(u, s++);
                }
            }
        }
        partial[static_cast<std::size_t>(b)] = std::move(acc);
    });
    Acc total = make_acc();
    for (const Acc& a : partial) {
        for (std::size_t s = 0; s < S; ++s) {
            total.mean[s].merge(a.mean[s]);
            total.second[s].merge(a.second[s]);
            total.spatial[s].merge(a.spatial[s]);
            for (std::size_t k = 0; k < P1; ++k) {
                total.re[s][k].merge(a.re[s][k]);
                total.im[s][k].merge(a.im[s][k]);
            }
        }
    }
    EnsembleSummary out;
    out.samples = options.trajectories;
    out.probe_x = options.probe_x;
    for (std::size_t s = 0; s < S; ++s) {
        out.times.push_back(static_cast<double>(snap_steps[s]) * grid.dt);
        out.mean_at_x.push_back(total.mean[s].mean());
        out.mean_stderr.push_back(total.mean[s].std_error());
        out.second_moment_at_x.push_back(total.second[s].mean());
        out.second_moment_stderr.push_back(total.second[s].std_error());
        out.spatial_second_moment.push_back(total.spatial[s].mean());
        out.spatial_second_moment_stderr.push_back(total.spatial[s].std_error());
        ModeStats ms;
        for (std::size_t k = 0; k < P1; ++k) {
            ms.mean_re.push_back(total.re[s][k].mean());
            ms.mean_im.push_back(total.im[s][k].mean());
            ms.stderr_re.push_back(total.re[s][k].std_error());
            ms.stderr_im.push_back(total.im[s][k].std_error());
        }
        out.modes.push_back(std::move(ms));
    }
    return out;
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

void write_trajectory_binary(std::ostream& out, const ModelParams& params, const SpectralGrid& grid,
                             std::uint64_t seed, const Trajectory& trajectory) {
    out.write("RPTRAJ01", 8);
    put(out, grid.domain_length);
    put(out, static_cast<std::int32_t>(grid.mode_cutoff));
    put(out, grid.dt);
    put(out, params.h.value());
    put(out, params.kappa);
    put(out, seed);
    put(out, static_cast<std::uint64_t>(trajectory.snapshots.size()));
    for (const auto& f : trajectory.snapshots) {
        put(out, f.time);
        for (const auto& c : f.coeffs) {
            put(out, c.real());
            put(out, c.imag());
        }
    }
}

void write_summary_csv(std::ostream& out, const EnsembleSummary& s) {
    out << "t,mean_at_0,second_moment_at_0,stderr,n_samples\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        out << s.times[i] << ',' << s.mean_at_x[i] << ',' << s.second_moment_at_x[i] << ','
            << s.second_moment_stderr[i] << ',' << s.samples << '\n';
    }
}

}  // namespace roughpam
