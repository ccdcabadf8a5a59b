#include "roughpam/spectral_noise.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include "roughpam/common.hpp"
#include "roughpam/quadrature.hpp"

namespace roughpam {

namespace {

constexpr double kPanelLimit = 16.0;

// Smallest u with e^{-u^2} u^a <= threshold.
double gaussian_cutoff(double a, double threshold) {
    double u = std::sqrt(-std::log(threshold));
    for (int i = 0; i < 50; ++i) {
        const double g = u * u - a * std::log(u) + std::log(threshold);
        const double dg = 2.0 * u - a / u;
        const double step = g / dg;
        u -= step;
        if (std::abs(step) < 1e-14) break;
    }
    return u;
}

// (1/pi) int_0^inf trig(u y) e^{-u^2} u^p du with trig = cos (derivative = false)
// or -(1/pi) int sin(u y) e^{-u^2} u^{p+1} du (derivative = true).
double profile_panels(double y, double a, bool derivative, double threshold, double tol) {
    const double uc = gaussian_cutoff(a, threshold);
    const double width = y > 0.0 ? std::min(0.5, kPi / y) : 0.5;
    auto f = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double g = std::exp(-u * u) * std::pow(u, a);
        return derivative ? -u * g * std::sin(u * y) : g * std::cos(u * y);
    };
    double total = 0.0;
    double err = 0.0;
    // First panel carries the u^a cusp.
    const double first_end = std::min(width, uc);
    QuadResult r = integrate_tanh_sinh(f, 0.0, first_end, 1e-14);
    total += r.value;
    err += r.error;
    for (double lo = first_end; lo < uc; lo += width) {
        const double hi = std::min(lo + width, uc);
        r = integrate_gk21(f, lo, hi, 1e-14, 0);
        total += r.value;
        err += r.error;
    }
    total /= kPi;
    err /= kPi;
    if (err > tol) throw QuadratureError("mollified profile quadrature did not converge", err);
    return total;
}

double profile_ooura(double y, double a, bool derivative, double tol) {
    static thread_local boost::math::quadrature::ooura_fourier_cos<double> cos_rule(1e-13, 10);
    static thread_local boost::math::quadrature::ooura_fourier_sin<double> sin_rule(1e-13, 10);
    std::pair<double, double> r;
    if (derivative) {
        auto f = [a](double u) { return u > 0.0 ? std::exp(-u * u) * std::pow(u, a + 1.0) : 0.0; };
        r = sin_rule.integrate(f, y);
        r.first = -r.first;
    } else {
        auto f = [a](double u) { return u > 0.0 ? std::exp(-u * u) * std::pow(u, a) : 0.0; };
        r = cos_rule.integrate(f, y);
    }
    const double err = std::abs(r.second * r.first) / kPi;
    if (err > tol) throw QuadratureError("mollified profile oscillatory quadrature did not converge", err);
    return r.first / kPi;
}

double profile_impl(double y, double a, bool derivative, double threshold, double tol) {
    y = std::abs(y);
    if (y <= kPanelLimit) return profile_panels(y, a, derivative, threshold, tol);
    return profile_ooura(y, a, derivative, tol);
}

}  // namespace

double mollified_profile(double y, const HurstParam& h, double tol) {
    return profile_impl(y, h.exponent(), false, 1e-16, tol);
}

double mollified_profile_derivative(double y, const HurstParam& h, double tol) {
    const double s = y < 0.0 ? -1.0 : 1.0;
    return s * profile_impl(y, h.exponent(), true, 1e-16, tol);
}

double mollified_cov(double x, double eps, const HurstParam& h, double tol) {
    if (!(eps > 0.0)) throw ConfigError("mollified_cov requires eps > 0");
    const double a = h.exponent();
    // xi = u / sqrt(eps): f = eps^{h-1} F(x / sqrt(eps)); the truncation rule
    // e^{-eps xi^2} xi^a < 1e-16 becomes e^{-u^2} u^a < 1e-16 eps^{a/2}.
    const double scale = std::pow(eps, h.value() - 1.0);
    const double threshold = 1e-16 * std::pow(eps, a / 2.0);
    return scale * profile_impl(x / std::sqrt(eps), a, false, threshold, tol / scale);
}

MollifiedKernel::MollifiedKernel(const HurstParam& h, double y_split) : h_(h), y_split_(y_split) {
    const double a = h.exponent();
    const std::size_t nodes = static_cast<std::size_t>(std::ceil(y_split_ / kTableStep - 1e-9)) + 1;
    y_split_ = kTableStep * static_cast<double>(nodes - 1);
    values_.resize(nodes);
    slopes_.resize(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        const double y = kTableStep * static_cast<double>(i);
        values_[i] = profile_impl(y, a, false, 1e-16, 1e-12);
        slopes_[i] = profile_impl(y, a, true, 1e-16, 1e-12);
    }
    // F(y) = y^{-1-a} sum_m c_m y^{-2m}, c_m = cos(pi(1+a)/2) Gamma(1+a+2m) / (pi m!);
    // asymptotic, with error below the smallest retained term for y >= 16.
    const double c = std::cos(kPi * (1.0 + a) / 2.0) / kPi;
    tail_coeffs_.resize(kTailTerms);
    for (int m = 0; m < kTailTerms; ++m) {
        tail_coeffs_[static_cast<std::size_t>(m)] = c * std::exp(std::lgamma(1.0 + a + 2.0 * m) - std::lgamma(m + 1.0));
    }
}

double MollifiedKernel::tail(double y) const {
    const double z = 1.0 / (y * y);
    const int terms = y < 24.0 ? kTailTerms : (y < 64.0 ? 14 : 8);
    double acc = 0.0;
    for (int m = terms - 1; m >= 0; --m) acc = acc * z + tail_coeffs_[static_cast<std::size_t>(m)];
    return acc * std::pow(y, -1.0 - h_.exponent());
}

double MollifiedKernel::profile(double y) const {
    y = std::abs(y);
    if (y >= y_split_) return tail(y);
    const double t = y / kTableStep;
    const std::size_t i = static_cast<std::size_t>(t);
    const double u = t - static_cast<double>(i);
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
    return h00 * values_[i] + h10 * kTableStep * slopes_[i] + h01 * values_[i + 1] +
           h11 * kTableStep * slopes_[i + 1];
}

double MollifiedKernel::operator()(double x, double eps) const { return at(eps)(x); }

MollifiedKernel::AtEps MollifiedKernel::at(double eps) const {
    if (!(eps > 0.0)) throw ConfigError("mollified kernel requires eps > 0");
    AtEps r;
    r.kernel_ = this;
    r.scale_ = std::pow(eps, h_.value() - 1.0);
    r.inv_sqrt_eps_ = 1.0 / std::sqrt(eps);
    return r;
}

std::shared_ptr<const MollifiedKernel> MollifiedKernel::shared(const HurstParam& h) {
    static std::mutex m;
    static std::map<double, std::shared_ptr<const MollifiedKernel>> cache;
    std::lock_guard<std::mutex> lock(m);
    auto& slot = cache[h.value()];
    if (!slot) slot = std::make_shared<const MollifiedKernel>(h);
    return slot;
}

}  // namespace roughpam
