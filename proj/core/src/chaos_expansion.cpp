#include "roughpam/chaos_expansion.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "roughpam/common.hpp"
#include "roughpam/parallel.hpp"
#include "roughpam/quadrature.hpp"
#include "roughpam/special.hpp"
#include "roughpam/stats.hpp"

namespace roughpam {

double MultiIndex::total() const {
    double s = 0.0;
    for (double a : alpha) s += a;
    return s;
}

void MultiIndex::validate() const {
    if (alpha.empty()) throw ConfigError("multi-index must be nonempty");
    for (double a : alpha) {
        if (!(a > -1.0)) throw ConfigError("simplex integral diverges: multi-index entry <= -1");
    }
}

double simplex_integral_exact(double t, const MultiIndex& alpha) {
    alpha.validate();
    if (!(t > 0.0)) throw ConfigError("simplex integral needs t > 0");
    const double m = static_cast<double>(alpha.size());
    const double s = alpha.total() + m;
    double log_v = s * std::log(t) - std::lgamma(s + 1.0);
    for (double a : alpha.alpha) log_v += std::lgamma(a + 1.0);
    return std::exp(log_v);
}

SimplexBoundReport simplex_bound_check(double t, const MultiIndex& alpha, double c) {
    SimplexBoundReport r;
    r.exact = simplex_integral_exact(t, alpha);
    const double m = static_cast<double>(alpha.size());
    const double s = alpha.total() + m;
    r.bound = std::pow(c, m) * std::exp(s * std::log(t) - std::lgamma(s + 1.0));
    double log_prod = 0.0;
    for (double a : alpha.alpha) log_prod += std::lgamma(a + 1.0);
    r.minimal_c = std::exp(log_prod / m);
    r.holds = r.exact <= r.bound * (1.0 + 1e-12);
    return r;
}

double heat_kernel(double t, double x, double kappa) {
    const double v = kappa * t;
    return std::exp(-0.5 * x * x / v) / std::sqrt(2.0 * kPi * v);
}

double chaos_kernel(const std::vector<SpaceTimePoint>& points, double t, double x, const ModelParams& params) {
    if (points.empty()) return params.u0.heat_flow(t, x, params.kappa);
    std::vector<SpaceTimePoint> p = points;
    std::sort(p.begin(), p.end(), [](const auto& l, const auto& r) { return l.s < r.s; });
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i].s > 0.0 && p[i].s < t)) throw ConfigError("chaos_kernel: times must lie in (0, t)");
        if (i > 0 && p[i].s == p[i - 1].s) throw ConfigError("chaos_kernel: coincident times");
    }
    const double k = params.kappa;
    double v = params.u0.heat_flow(p[0].s, p[0].y, k);
    for (std::size_t i = 1; i < p.size(); ++i) v *= heat_kernel(p[i].s - p[i - 1].s, p[i].y - p[i - 1].y, k);
    v *= heat_kernel(t - p.back().s, x - p.back().y, k);
    return v / std::tgamma(static_cast<double>(p.size()) + 1.0);
}

namespace {

// Gaussian reduction of |F g|^2 for constant or Gaussian-bump u0:
// |F g|^2 = amp * exp(-eta^T Q eta), Q = kappa diag(tau) - kappa^2 tau tau^T / P,
// with eta_i the cumulative frequencies; the covariance (2Q)^{-1} is
// diag(1/(2 kappa tau_i)) + r 1 1^T.
struct GaussianReduction {
    bool constant = true;
    double c = 1.0;      // constant value
    double amp_a = 0.0;  // bump amplitude
    double w2 = 0.0;     // bump width^2
    double center = 0.0;
    double kappa = 1.0;
    double t = 0.0;
    double x = 0.0;

    double amp() const {
        if (constant) return c * c;
        const double P = w2 + kappa * t;
        const double d = x - center;
        return amp_a * amp_a * w2 / P * std::exp(-d * d / P);
    }
    double r(double s1) const { return constant ? 0.0 : 1.0 / (2.0 * (w2 + kappa * s1)); }
    // log det Q given sum log tau
    double log_det_q(int n, double sum_log_tau, double s1) const {
        double v = n * std::log(kappa) + sum_log_tau;
        if (!constant) v += std::log((w2 + kappa * s1) / (w2 + kappa * t));
        return v;
    }
};

GaussianReduction reduction_for(const ModelParams& params, double t, double x) {
    GaussianReduction g;
    g.kappa = params.kappa;
    g.t = t;
    g.x = x;
    switch (params.u0.kind()) {
        case InitialCondition::Kind::constant:
            g.constant = true;
            g.c = params.u0.amplitude();
            break;
        case InitialCondition::Kind::gaussian_bump:
        case InitialCondition::Kind::catalog:
            g.constant = false;
            g.amp_a = params.u0.amplitude();
            g.w2 = params.u0.width() * params.u0.width();
            g.center = params.u0.center();
            break;
        case InitialCondition::Kind::spectral_decay:
            throw ConfigError("chaos norms need a constant or Gaussian initial condition");
    }
    return g;
}

// int exp(-q xi^2) |xi|^a dxi
double gauss_abs_integral_1d(double q, double a) { return std::tgamma((1.0 + a) / 2.0) * std::pow(q, -(1.0 + a) / 2.0); }

// Precision of eta for the given gaps: (2 Sigma)^{-1} with Sigma = D + r 1 1^T,
// D = diag(1 / (2 kappa tau_i)); Sherman-Morrison keeps it finite as tau_i -> 0.
double first_order_integrand(double tau, const GaussianReduction& g, double a, double c1, double eps) {
    const double d = 2.0 * g.kappa * tau;
    const double r = g.r(g.t - tau);
    const double q = 0.5 * d / (1.0 + r * d);
    const double v = c1 * g.amp() * gauss_abs_integral_1d(q + eps, a);
    return std::isfinite(v) ? v : 0.0;
}

double second_order_integrand(double tau1, double tau2, const GaussianReduction& g, double a, double c1, double eps) {
    const double s1 = g.t - tau1 - tau2;
    const double r = g.r(std::max(s1, 0.0));
    const double d1 = 2.0 * g.kappa * tau1;
    const double d2 = 2.0 * g.kappa * tau2;
    const double k = r / (1.0 + r * (d1 + d2));
    // Q_eta = (D^{-1} - k D^{-1} 1 1^T D^{-1}) / 2
    const double q11 = 0.5 * (d1 - k * d1 * d1);
    const double q22 = 0.5 * (d2 - k * d2 * d2);
    const double q12 = -0.5 * k * d1 * d2;
    // xi = (eta1, eta2 - eta1): R = L^T Q L with eta = L xi, L = [[1, 0], [1, 1]].
    const double rxx = q11 + 2.0 * q12 + q22 + eps;
    const double ryy = q22 + eps;
    const double rxy = q12 + q22;
    // det(L^T Q L) = det Q = d1 d2 / (4 (1 + r (d1 + d2))), kept free of cancellation.
    const double det_q = 0.25 * d1 * d2 / (1.0 + r * (d1 + d2));
    const double det_r = det_q + eps * (rxx + ryy - 2.0 * eps) + eps * eps;
    if (!(det_r > 0.0)) return 0.0;
    // Covariance (2 R')^{-1}
    const double cxx = ryy / (2.0 * det_r);
    const double cyy = rxx / (2.0 * det_r);
    const double cxy = -rxy / (2.0 * det_r);
    const double sx = std::sqrt(cxx), sy = std::sqrt(cyy);
    const double rho = std::clamp(cxy / (sx * sy), -1.0, 1.0);
    const double v = c1 * c1 * g.amp() * kPi / std::sqrt(det_r) * bivariate_abs_moment(a, sx, sy, rho);
    return std::isfinite(v) ? v : 0.0;
}

ChaosNormEstimate quadrature_order1(const GaussianReduction& g, double a, double c1, double eps, double tol) {
    auto f = [&](double tau) { return tau > 0.0 ? first_order_integrand(tau, g, a, c1, eps) : 0.0; };
    const QuadResult r = integrate_tanh_sinh(f, 0.0, g.t, tol);
    if (!(r.error <= tol * std::abs(r.value) * 10.0 + 1e-300)) {
        throw QuadratureError("first-order chaos quadrature did not converge", r.error);
    }
    ChaosNormEstimate e;
    e.order = 1;
    e.value = r.value;
    e.std_error = r.error;
    e.method = ChaosMethod::quadrature;
    return e;
}

ChaosNormEstimate quadrature_order2(const GaussianReduction& g, double a, double c1, double eps, double tol) {
    const double t = g.t;
    double worst = 0.0;
    auto inner = [&](double u) {
        if (!(u > 0.0 && u < 1.0)) return 0.0;
        const double tau1 = t * u;
        auto f = [&](double v) {
            if (!(v > 0.0 && v < 1.0)) return 0.0;
            const double tau2 = t * (1.0 - u) * v;
            return second_order_integrand(tau1, tau2, g, a, c1, eps);
        };
        const QuadResult r = integrate_tanh_sinh(f, 0.0, 1.0, tol);
        worst = std::max(worst, r.error / (std::abs(r.value) + 1e-300));
        return r.value * t * t * (1.0 - u);
    };
    const QuadResult r = integrate_tanh_sinh(inner, 0.0, 1.0, tol);
    ChaosNormEstimate e;
    e.order = 2;
    e.value = r.value;
    e.std_error = std::abs(r.error) + worst * std::abs(r.value);
    e.method = ChaosMethod::quadrature;
    if (!(e.std_error <= 1e3 * tol * std::abs(e.value) + 1e-300)) {
        throw QuadratureError("second-order chaos quadrature did not converge", e.std_error);
    }
    return e;
}

ChaosNormEstimate monte_carlo_order(int n, const GaussianReduction& g, double a, double c1, double eps,
                                    double h, const ChaosBudget& budget) {
    const double t = g.t;
    const double beta = std::max(0.05, 2.0 * h - 0.5);
    const double log_norm = -n * std::log(t) + std::lgamma(1.0 + n * beta) - n * std::lgamma(beta);
    const double log_amp = std::log(g.amp());
    const double log_const = n * std::log(c1) + log_amp + 0.5 * n * std::log(kPi);
    const std::size_t N = static_cast<std::size_t>(n);

    auto run_batch = [&](std::int64_t b) {
        RunningStats acc;
        RngStream rng(budget.seed, stream_id(stream_tag::kChaos, (static_cast<std::uint64_t>(n) << 32) +
                                                                      static_cast<std::uint64_t>(b)));
        std::vector<double> gap(N + 1), tau(N), eta(N);
        for (std::int64_t s = 0; s < budget.batch_size; ++s) {
            double sum = 0.0;
            gap[0] = rng.gamma(1.0);
            sum += gap[0];
            for (std::size_t i = 1; i <= N; ++i) {
                gap[i] = rng.gamma(beta);
                sum += gap[i];
            }
            double sum_log_x = 0.0, sum_log_tau = 0.0;
            bool degenerate = false;
            for (std::size_t i = 0; i < N; ++i) {
                const double xi = gap[i + 1] / sum;
                if (!(xi > 1e-300)) degenerate = true;
                tau[i] = t * xi;
                sum_log_x += std::log(xi);
                sum_log_tau += std::log(tau[i]);
            }
            if (degenerate) {
                acc.add(0.0);
                continue;
            }
            const double s1 = t * gap[0] / sum;
            const double log_p = log_norm + (beta - 1.0) * sum_log_x;
            const double shared = std::sqrt(g.r(s1)) * rng.normal();
            for (std::size_t i = 0; i < N; ++i) eta[i] = rng.normal() / std::sqrt(2.0 * g.kappa * tau[i]) + shared;
            double log_f = 0.0, quad = 0.0, prev = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double d = eta[i] - prev;
                log_f += a * std::log(std::abs(d));
                quad += d * d;
                prev = eta[i];
            }
            const double log_w = log_const - 0.5 * g.log_det_q(n, sum_log_tau, s1) + log_f - eps * quad - log_p;
            acc.add(std::exp(log_w));
        }
        return acc;
    };

    RunningStats total;
    std::int64_t batches = 0;
    const std::int64_t max_batches = std::max<std::int64_t>(1, budget.max_samples / budget.batch_size);
    constexpr std::int64_t kRound = 4;  // stopping rule is checked after fixed rounds
    bool reached = false;
    while (batches < max_batches) {
        const std::int64_t round = std::min(kRound, max_batches - batches);
        std::vector<RunningStats> partial(static_cast<std::size_t>(round));
        for_each_batch(round, budget.threads,
                       [&](std::int64_t i) { partial[static_cast<std::size_t>(i)] = run_batch(batches + i); });
        for (const auto& p : partial) total.merge(p);
        batches += round;
        if (total.mean() > 0.0 && total.std_error() <= budget.target_rel_stderr * total.mean()) {
            reached = true;
            break;
        }
    }
    ChaosNormEstimate e;
    e.order = n;
    e.value = total.mean();
    e.std_error = total.std_error();
    e.method = ChaosMethod::monte_carlo;
    e.samples = total.count();
    e.budget_exhausted = !reached;
    return e;
}

}  // namespace

ChaosNormEstimate chaos_norm_sq(int n, double t, double x, const ModelParams& params, const ChaosBudget& budget,
                                double eps) {
    if (n < 1) throw ConfigError("chaos order must be at least 1");
    if (!(t > 0.0)) throw ConfigError("chaos norms need t > 0");
    if (eps < 0.0) throw ConfigError("mollification parameter must be nonnegative");
    params.validate();
    const double a = params.h.exponent();
    const double c1 = c1h(params.h) * params.noise_scale;
    if (params.u0.is_constant() && params.u0.amplitude() == 0.0) {
        ChaosNormEstimate e;
        e.order = n;
        e.method = n <= 2 && !budget.force_monte_carlo ? ChaosMethod::quadrature : ChaosMethod::monte_carlo;
        return e;
    }
    const GaussianReduction g = reduction_for(params, t, x);
    if (c1 == 0.0 || g.amp() == 0.0) {
        ChaosNormEstimate e;
        e.order = n;
        return e;
    }
    if (!budget.force_monte_carlo) {
        if (n == 1) return quadrature_order1(g, a, c1, eps, budget.quad_tol);
        if (n == 2) return quadrature_order2(g, a, c1, eps, budget.quad_tol);
    }
    return monte_carlo_order(n, g, a, c1, eps, params.h.value(), budget);
}

double pattern_constant(int n, double a, bool with_first_factor) {
    if (n < 1) return 1.0;
    auto g = [](double alpha) { return kPi / std::cos(kPi * alpha / 2.0); };
    // F[c] for factor i choosing own (c = 0) or left (c = 1); alpha_i gets a
    // from its own choice and a from factor i+1 choosing left.
    double f_own = g(a), f_left = g(0.0);  // i = n
    for (int i = n - 1; i >= 1; --i) {
        const double own = g(a) * f_own + g(2.0 * a) * f_left;
        const double left = g(0.0) * f_own + g(a) * f_left;
        f_own = own;
        f_left = left;
    }
    return with_first_factor ? f_own : f_left;
}

double chaos_norm_upper_bound(int n, double t, double x, const ModelParams& params) {
    (void)x;
    if (n < 1) throw ConfigError("chaos order must be at least 1");
    params.validate();
    const double h = params.h.value();
    const double a = params.h.exponent();
    const double kappa = params.kappa;
    const double xv = c1h(params.h) * params.noise_scale * std::pow(t, h) * std::pow(kappa, h - 1.0);
    double z0 = 0.0, z1 = 0.0;
    if (params.u0.is_constant()) {
        z0 = std::abs(params.u0.amplitude());
    } else {
        auto f0 = [&](double z) { return std::abs(params.u0.fourier(z)); };
        auto f1 = [&](double z) { return std::pow(z, a / 2.0) * std::abs(params.u0.fourier(z)); };
        z0 = integrate_to_infinity(f0, 0.0, 1e-10).value / kPi;
        z1 = integrate_to_infinity(f1, 0.0, 1e-10).value / kPi;
    }
    const double dn = static_cast<double>(n);
    const double l0 = std::exp(dn * std::log(xv) + std::log(pattern_constant(n, a, true)) - std::lgamma(dn * h + 1.0));
    double l1 = 0.0;
    if (z1 > 0.0) {
        l1 = std::exp(dn * std::log(xv) + 0.5 * a * std::log(kappa * t) + std::log(pattern_constant(n, a, false)) -
                      std::lgamma(dn * h + 0.5 * a + 1.0));
    }
    const double root = z0 * std::sqrt(l0) + z1 * std::sqrt(l1);
    return root * root;
}

SeriesResult second_moment_series(double t, double x, const ModelParams& params, int n_max,
                                  const ChaosBudget& budget, double eps) {
    if (n_max < 2) throw ConfigError("second_moment_series needs n_max >= 2");
    SeriesResult out;
    const double zeroth = params.u0.heat_flow(t, x, params.kappa);
    out.partial_sum = zeroth * zeroth;
    double var = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        ChaosNormEstimate e = chaos_norm_sq(n, t, x, params, budget, eps);
        out.partial_sum += e.value;
        var += e.std_error * e.std_error;
        if (e.budget_exhausted) out.under_resolved = true;
        out.terms.push_back(e);
    }
    out.std_error = std::sqrt(var);
    for (int n = n_max + 1; n <= n_max + 400; ++n) {
        const double b = chaos_norm_upper_bound(n, t, x, params);
        out.tail_bound += b;
        if (b <= 1e-17 * out.tail_bound) break;
    }
    if (out.tail_bound > 0.1 * out.partial_sum) {
        out.tail_flag = true;
        out.under_resolved = true;
    }
    return out;
}

MittagLefflerReport mittag_leffler_envelope(double x, double a, double c1, double c2) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("Mittag-Leffler index must lie in (0, 1)");
    if (x < 0.0) throw ConfigError("Mittag-Leffler argument must be nonnegative");
    if (c1 <= 0.0) c1 = 1.0 + 1.0 / a;
    MittagLefflerReport r;
    r.log_envelope = std::log(c1) + c2 * std::pow(x, 1.0 / a);
    r.envelope = std::exp(r.log_envelope);
    if (x == 0.0) {
        r.partial_sum = 1.0;
        r.log_partial_sum = 0.0;
        r.terms = 1;
        r.within_envelope = r.log_partial_sum <= r.log_envelope;
        return r;
    }
    // Terms peak near m = x^{1/a} / a and then fall off super-exponentially.
    const double lx = std::log(x);
    const double peak = std::pow(x, 1.0 / a) / a;
    const auto cap = static_cast<std::int64_t>(std::min(1e8, 4.0 * peak + 1000.0));
    double log_max = -INFINITY;
    std::vector<double> logs;
    for (std::int64_t m = 0; m < cap; ++m) {
        const double lt = static_cast<double>(m) * lx - std::lgamma(a * static_cast<double>(m) + 1.0);
        logs.push_back(lt);
        log_max = std::max(log_max, lt);
        const bool past_peak = m > 0 && lt < logs[static_cast<std::size_t>(m) - 1];
        if (past_peak && lt < log_max + std::log(1e-16) - 5.0) break;
    }
    double s = 0.0;
    for (double lt : logs) s += std::exp(lt - log_max);
    r.log_partial_sum = log_max + std::log(s);
    r.partial_sum = std::exp(r.log_partial_sum);
    r.terms = static_cast<std::int64_t>(logs.size());
    r.within_envelope = r.log_partial_sum <= r.log_envelope;
    return r;
}

void write_chaos_table_csv(std::ostream& out, const std::vector<ChaosNormEstimate>& terms,
                           const std::vector<double>& upper_bounds) {
    out << "n,chaos_norm_sq,stderr,upper_bound,method\n" << std::setprecision(17);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        out << terms[i].order << ',' << terms[i].value << ',' << terms[i].std_error << ','
            << (i < upper_bounds.size() ? upper_bounds[i] : 0.0) << ','
            << (terms[i].method == ChaosMethod::quadrature ? "quadrature" : "monte_carlo") << '\n';
    }
}

}  // namespace roughpam
