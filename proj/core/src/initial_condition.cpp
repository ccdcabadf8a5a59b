#include <cmath>
#include <sstream>

#include "roughpam/common.hpp"
#include "roughpam/heat_solver.hpp"
#include "roughpam/quadrature.hpp"

namespace roughpam {

InitialCondition InitialCondition::constant(double c) {
    InitialCondition u;
    u.kind_ = Kind::constant;
    u.name_ = "constant";
    u.amplitude_ = c;
    return u;
}

InitialCondition InitialCondition::gaussian_bump(double center, double width, double amplitude) {
    if (!(width > 0.0)) throw ConfigError("gaussian_bump width must be positive");
    InitialCondition u;
    u.kind_ = Kind::gaussian_bump;
    u.name_ = "gaussian_bump";
    u.center_ = center;
    u.width_ = width;
    u.amplitude_ = amplitude;
    return u;
}

InitialCondition InitialCondition::spectral_decay(double amplitude, double power) {
    if (!(power >= 0.0)) throw ConfigError("spectral_decay power must be nonnegative");
    InitialCondition u;
    u.kind_ = Kind::spectral_decay;
    u.name_ = "spectral_decay";
    u.amplitude_ = amplitude;
    u.power_ = power;
    return u;
}

InitialCondition InitialCondition::catalog(const TestFunction& f) {
    InitialCondition u = gaussian_bump(f.center, f.width, f.scale / (f.width * std::sqrt(2.0 * kPi)));
    u.kind_ = Kind::catalog;
    u.name_ = f.name;
    return u;
}

double InitialCondition::operator()(double x) const {
    switch (kind_) {
        case Kind::constant:
            return amplitude_;
        case Kind::gaussian_bump:
        case Kind::catalog: {
            const double z = (x - center_) / width_;
            return amplitude_ * std::exp(-0.5 * z * z);
        }
        case Kind::spectral_decay:
            break;
    }
    throw ConfigError("initial condition '" + name_ + "' has no pointwise form");
}

std::complex<double> InitialCondition::fourier(double xi) const {
    switch (kind_) {
        case Kind::constant:
            break;
        case Kind::gaussian_bump:
        case Kind::catalog:
            return amplitude_ * width_ * std::sqrt(2.0 * kPi) * std::exp(-0.5 * width_ * width_ * xi * xi) *
                   std::polar(1.0, -xi * center_);
        case Kind::spectral_decay:
            return amplitude_ / std::pow(1.0 + std::abs(xi), power_);
    }
    throw ConfigError("the Fourier transform of a constant is a point mass");
}

double InitialCondition::heat_flow(double t, double x, double kappa) const {
    switch (kind_) {
        case Kind::constant:
            return amplitude_;
        case Kind::gaussian_bump:
        case Kind::catalog: {
            const double var = width_ * width_ + kappa * t;
            const double d = x - center_;
            return amplitude_ * width_ / std::sqrt(var) * std::exp(-0.5 * d * d / var);
        }
        case Kind::spectral_decay: {
            auto f = [&](double xi) {
                return amplitude_ * std::cos(xi * x) * std::exp(-0.5 * kappa * t * xi * xi) /
                       std::pow(1.0 + xi, power_);
            };
            if (!(t > 0.0)) break;
            return integrate_to_infinity(f, 0.0, 1e-12).value / kPi;
        }
    }
    throw ConfigError("initial condition '" + name_ + "' has no pointwise form at t = 0");
}

std::string InitialCondition::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case Kind::constant:
            os << "constant(" << amplitude_ << ")";
            break;
        case Kind::gaussian_bump:
            os << "gaussian_bump(center=" << center_ << ", width=" << width_ << ", amplitude=" << amplitude_ << ")";
            break;
        case Kind::spectral_decay:
            os << "spectral_decay(amplitude=" << amplitude_ << ", power=" << power_ << ")";
            break;
        case Kind::catalog:
            os << "catalog(" << name_ << ")";
            break;
    }
    return os.str();
}

namespace {

struct ShellResult {
    double value;
    bool converged;
};

// int_{-inf}^{inf} g(|xi|) dxi for even g, by doubling shells [R, 2R].
template <class G>
ShellResult integrate_even_with_divergence_check(G g) {
    double total = 2.0 * integrate_tanh_sinh(g, 0.0, 1.0, 1e-12).value;
    double last = 0.0;
    for (int j = 0; j < 60; ++j) {
        const double lo = std::ldexp(1.0, j);
        const double inc = 2.0 * integrate_gk21(g, lo, 2.0 * lo, 1e-10, 10).value;
        total += inc;
        if (j >= 4 && std::abs(inc) <= 1e-12 * std::abs(total) && std::abs(last) <= 1e-10 * std::abs(total) + 1e-300) {
            return {total, true};
        }
        last = inc;
    }
    return {total, false};
}

}  // namespace

AdmissibilityReport check_admissibility(const InitialCondition& u0, const HurstParam& h) {
    AdmissibilityReport r;
    if (u0.is_constant()) {
        r.chaos_ok = r.picard_ok = true;
        r.chaos_integral = r.picard_integral = 0.0;
        r.note = "constant initial condition: admissible by the torus convention (k = 0 mode)";
        return r;
    }
    const double chaos_exp = 0.5 - h.value();
    const double a = h.exponent();
    const auto chaos = integrate_even_with_divergence_check(
        [&](double xi) { return (1.0 + std::pow(xi, chaos_exp)) * std::abs(u0.fourier(xi)); });
    const auto picard = integrate_even_with_divergence_check(
        [&](double xi) { return std::norm(u0.fourier(xi)) * (1.0 + std::pow(xi, a)); });
    r.chaos_integral = chaos.value;
    r.chaos_ok = chaos.converged && std::isfinite(chaos.value);
    r.picard_integral = picard.value;
    r.picard_ok = picard.converged && std::isfinite(picard.value);
    if (!r.chaos_ok) r.note += "chaos integral does not settle over doubling shells up to 2^60; ";
    if (!r.picard_ok) r.note += "Picard integral does not settle over doubling shells up to 2^60; ";
    return r;
}

void ModelParams::validate() const {
    if (!(kappa > 0.0)) throw ConfigError("model.kappa must be positive");
    if (!(horizon > 0.0)) throw ConfigError("model.horizon must be positive");
    if (!(noise_scale >= 0.0)) throw ConfigError("model.noise_scale must be nonnegative");
}

}  // namespace roughpam
