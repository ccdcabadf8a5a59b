#include "roughpam/feynman_kac.hpp"

#include <algorithm>
#include <cmath>

#include "roughpam/common.hpp"
#include "roughpam/parallel.hpp"
#include "roughpam/spectral_noise.hpp"
#include "roughpam/stats.hpp"

namespace roughpam {

namespace {

std::size_t steps_for(double t, double dt_b) {
    if (!(dt_b > 0.0)) throw ConfigError("path step must be positive");
    if (t < 0.0) throw ConfigError("time must be nonnegative");
    const double r = t / dt_b;
    const double n = std::round(r);
    if (std::abs(r - n) > 1e-9 * std::max(1.0, r)) throw ConfigError("path step must divide t");
    return static_cast<std::size_t>(n);
}

void fill_path(double* path, std::size_t steps, double sd, RngStream& rng) {
    path[0] = 0.0;
    rng.fill_normal(path + 1, steps);
    double b = 0.0;
    for (std::size_t i = 1; i <= steps; ++i) {
        b += sd * path[i];
        path[i] = b;
    }
}

template <class Kernel>
double trapezoid(const double* p, const double* q, std::size_t steps, double dt, const Kernel& f) {
    if (steps == 0) return 0.0;
    double s = 0.5 * (f(p[0] - q[0]) + f(p[steps] - q[steps]));
    for (std::size_t i = 1; i < steps; ++i) s += f(p[i] - q[i]);
    return s * dt;
}

struct ScheduleAccumulator {
    std::vector<RunningStats> stats;
    std::vector<RunningCovariance> consecutive;  // (eps_i, eps_{i+1})
    std::vector<std::int64_t> clipped;

    explicit ScheduleAccumulator(std::size_t m) : stats(m), consecutive(m > 0 ? m - 1 : 0), clipped(m, 0) {}

    void merge(const ScheduleAccumulator& o) {
        for (std::size_t i = 0; i < stats.size(); ++i) {
            stats[i].merge(o.stats[i]);
            clipped[i] += o.clipped[i];
        }
        for (std::size_t i = 0; i < consecutive.size(); ++i) consecutive[i].merge(o.consecutive[i]);
    }
};

ScheduleAccumulator run_schedule(int n, double t, double x, const std::vector<double>& eps_schedule,
                                 const ModelParams& params, const FkOptions& options) {
    if (n < 1) throw ConfigError("moment order must be at least 1");
    if (eps_schedule.empty()) throw ConfigError("eps schedule is empty");
    for (double e : eps_schedule) {
        if (!(e > 0.0)) throw ConfigError("eps must be positive; the eps = 0 functional is never evaluated");
    }
    if (options.samples < 2) throw ConfigError("need at least two Feynman-Kac samples");
    if (options.batch_size < 1) throw ConfigError("batch size must be positive");
    if (!params.u0.has_pointwise_form()) throw ConfigError("Feynman-Kac moments need a pointwise initial condition");
    params.validate();

    const std::size_t steps = steps_for(t, options.dt_b);
    const double sd = std::sqrt(params.kappa * options.dt_b);
    const double c1 = options.c1h_override ? *options.c1h_override : c1h(params.h) * params.noise_scale;
    const double coupling = 2.0 * kPi * c1;
    const auto kernel = MollifiedKernel::shared(params.h);
    std::vector<MollifiedKernel::AtEps> kernels;
    for (double e : eps_schedule) kernels.push_back(kernel->at(e));
    const std::size_t m = eps_schedule.size();
    const std::size_t paths = static_cast<std::size_t>(n);

    const BatchPlan plan{options.samples, options.batch_size};
    std::vector<ScheduleAccumulator> partial(static_cast<std::size_t>(plan.count()), ScheduleAccumulator(m));
    for_each_batch(plan.count(), options.threads, [&](std::int64_t b) {
        RngStream rng(options.seed, stream_id(stream_tag::kBrownian,
                                              (static_cast<std::uint64_t>(n) << 40) + static_cast<std::uint64_t>(b)));
        ScheduleAccumulator& acc = partial[static_cast<std::size_t>(b)];
        std::vector<double> buf(paths * (steps + 1));
        std::vector<double> values(m);
        for (std::int64_t s = plan.begin(b); s < plan.end(b); ++s) {
            for (std::size_t j = 0; j < paths; ++j) {
                double* p = buf.data() + j * (steps + 1);
                if (options.identical_paths && j > 0) {
                    std::copy(buf.data(), buf.data() + steps + 1, p);
                } else {
                    fill_path(p, steps, sd, rng);
                }
            }
            double weight = 1.0;
            for (std::size_t j = 0; j < paths; ++j) weight *= params.u0(x + buf[j * (steps + 1) + steps]);
            for (std::size_t e = 0; e < m; ++e) {
                double sum_v = 0.0;
                for (std::size_t j = 0; j < paths; ++j) {
                    for (std::size_t k = j + 1; k < paths; ++k) {
                        sum_v += trapezoid(buf.data() + j * (steps + 1), buf.data() + k * (steps + 1), steps,
                                           options.dt_b, kernels[e]);
                    }
                }
                double expo = coupling * sum_v;
                if (expo > kExponentClip) {
                    expo = kExponentClip;
                    ++acc.clipped[e];
                }
                values[e] = weight * std::exp(expo);
                acc.stats[e].add(values[e]);
            }
            for (std::size_t e = 0; e + 1 < m; ++e) acc.consecutive[e].add(values[e], values[e + 1]);
        }
    });
    ScheduleAccumulator total(m);
    for (const auto& p : partial) total.merge(p);
    return total;
}

MomentEstimate make_estimate(int n, double t, double x, double eps, const RunningStats& st, std::int64_t clipped,
                             std::uint64_t seed) {
    MomentEstimate e;
    e.n = n;
    e.t = t;
    e.x = x;
    e.eps = eps;
    e.mean = st.mean();
    e.raw_mean = st.mean();
    e.std_error = st.std_error();
    e.samples = st.count();
    e.seed = seed;
    e.clipped = clipped;
    e.clip_flag = static_cast<double>(clipped) > 1e-3 * static_cast<double>(st.count());
    return e;
}

}  // namespace

BrownianEnsemble sample_ensemble(int n, double t, double dt_b, double kappa, RngStream& rng) {
    if (n < 1) throw ConfigError("ensemble needs at least one path");
    if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
    const std::size_t steps = steps_for(t, dt_b);
    BrownianEnsemble ens;
    ens.n_paths = n;
    ens.dt = dt_b;
    ens.kappa_scaled = true;
    ens.times.resize(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) ens.times[i] = static_cast<double>(i) * dt_b;
    ens.values.assign(static_cast<std::size_t>(n), std::vector<double>(steps + 1));
    const double sd = std::sqrt(kappa * dt_b);
    for (auto& path : ens.values) fill_path(path.data(), steps, sd, rng);
    return ens;
}

double pair_functional(const BrownianEnsemble& ensemble, int j, int k, double eps, const HurstParam& h) {
    if (j == k) throw ConfigError("pair functional needs j != k");
    if (j < 0 || k < 0 || j >= ensemble.n_paths || k >= ensemble.n_paths) throw ConfigError("path index out of range");
    if (!(eps > 0.0)) throw ConfigError("eps must be positive; the eps = 0 functional is never evaluated");
    const auto kernel = MollifiedKernel::shared(h)->at(eps);
    const auto& p = ensemble.values[static_cast<std::size_t>(std::min(j, k))];
    const auto& q = ensemble.values[static_cast<std::size_t>(std::max(j, k))];
    return trapezoid(p.data(), q.data(), ensemble.steps(), ensemble.dt, kernel);
}

double expected_pair_functional(double t, double eps, const HurstParam& h, double kappa) {
    const double hv = h.value();
    return std::tgamma(1.0 - hv) * (std::pow(kappa * t + eps, hv) - std::pow(eps, hv)) / (2.0 * kPi * kappa * hv);
}

MomentEstimate fk_moment(int n, double t, double x, double eps, const ModelParams& params, const FkOptions& options) {
    const ScheduleAccumulator acc = run_schedule(n, t, x, {eps}, params, options);
    return make_estimate(n, t, x, eps, acc.stats[0], acc.clipped[0], options.seed);
}

std::vector<MomentEstimate> fk_moment_schedule(int n, double t, double x, const std::vector<double>& eps_schedule,
                                               const ModelParams& params, const FkOptions& options) {
    const ScheduleAccumulator acc = run_schedule(n, t, x, eps_schedule, params, options);
    std::vector<MomentEstimate> out;
    for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
        out.push_back(make_estimate(n, t, x, eps_schedule[i], acc.stats[i], acc.clipped[i], options.seed));
    }
    return out;
}

double extrapolation_rate(const HurstParam& h) { return 2.0 * h.value() - 0.5; }

MomentEstimate fk_moment_extrapolated(int n, double t, double x, const ModelParams& params,
                                      const std::vector<double>& eps_schedule, const FkOptions& options,
                                      std::vector<MomentEstimate>* schedule_out) {
    if (eps_schedule.size() < 3) throw ConfigError("eps schedule needs at least three points");
    for (std::size_t i = 1; i < eps_schedule.size(); ++i) {
        if (!(eps_schedule[i] < eps_schedule[i - 1])) throw ConfigError("eps schedule must be strictly decreasing");
    }
    const ScheduleAccumulator acc = run_schedule(n, t, x, eps_schedule, params, options);
    const std::size_t m = eps_schedule.size();
    std::vector<MomentEstimate> points;
    for (std::size_t i = 0; i < m; ++i) {
        points.push_back(make_estimate(n, t, x, eps_schedule[i], acc.stats[i], acc.clipped[i], options.seed));
    }

    MomentEstimate out = points.back();
    out.eps = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double se = std::hypot(points[i].std_error, points[i + 1].std_error);
        if (points[i + 1].mean < points[i].mean - 3.0 * se) out.monotonicity_flag = true;
        out.clip_flag = out.clip_flag || points[i].clip_flag;
    }

    const MomentEstimate& lo = points[m - 1];
    const MomentEstimate& prev = points[m - 2];
    out.last_increment = lo.mean - prev.mean;
    out.raw_mean = lo.mean;
    if (n == 1) {
        out.extrapolation_uncertainty = std::abs(out.last_increment);
    } else {
        // Richardson step for E(eps) = E0 - C eps^p.
        const double r = std::pow(lo.eps / prev.eps, extrapolation_rate(params.h));
        out.mean = (lo.mean - r * prev.mean) / (1.0 - r);
        const double n_s = static_cast<double>(lo.samples);
        const double var_lo = lo.std_error * lo.std_error * n_s;
        const double var_prev = prev.std_error * prev.std_error * n_s;
        const double cov = acc.consecutive[m - 2].covariance();
        const double var = (var_lo + r * r * var_prev - 2.0 * r * cov) / ((1.0 - r) * (1.0 - r));
        out.std_error = std::sqrt(std::max(var, 0.0) / n_s);
        out.extrapolation_uncertainty = std::abs(out.mean - lo.mean);
    }
    if (schedule_out) *schedule_out = std::move(points);
    return out;
}

}  // namespace roughpam
