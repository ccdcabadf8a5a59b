#include "roughpam/special.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_pFq.hpp>
#include <cmath>
#include <stdexcept>

#include "roughpam/common.hpp"

namespace roughpam {

namespace {

double hyp2f1_series(double a, double b, double c, double z) {
    double term = 1.0;
    double sum = 1.0;
    for (int n = 0; n < 4000; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) return sum;
    }
    return sum;
}

}  // namespace

double hyp2f1_unit(double a, double b, double c, double z) {
    if (z < 0.0 || z >= 1.0) throw std::domain_error("hyp2f1_unit: z outside [0, 1)");
    if (a == 0.0 || b == 0.0 || z == 0.0) return 1.0;
    if (z <= 0.5) return hyp2f1_series(a, b, c, z);
    // Linear transformation to 1 - z.
    const double w = 1.0 - z;
    const double s = c - a - b;
    // The connection formula degenerates near integer c - a - b.
    if (std::abs(s - std::round(s)) < 1e-3) return boost::math::hypergeometric_pFq({a, b}, {c}, z);
    const double g1 = std::tgamma(c) * std::tgamma(s) / (std::tgamma(c - a) * std::tgamma(c - b));
    const double g2 = std::tgamma(c) * std::tgamma(-s) / (std::tgamma(a) * std::tgamma(b));
    return g1 * hyp2f1_series(a, b, 1.0 - s, w) + std::pow(w, s) * g2 * hyp2f1_series(c - a, c - b, 1.0 + s, w);
}

double gaussian_abs_moment(double p, double sigma) {
    return std::pow(sigma, p) * std::pow(2.0, p / 2.0) * std::tgamma((1.0 + p) / 2.0) / std::sqrt(kPi);
}

double bivariate_abs_moment(double p, double sx, double sy, double rho) {
    const double r2 = std::min(rho * rho, 1.0 - 1e-16);
    return std::pow(2.0, p) / kPi * std::pow(std::tgamma((p + 1.0) / 2.0), 2) * std::pow(sx, p) * std::pow(sy, p) *
           hyp2f1_unit(-p / 2.0, -p / 2.0, 0.5, r2);
}

}  // namespace roughpam
