#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_pFq.hpp>
#include <cmath>

#include "roughpam/common.hpp"
#include "roughpam/quadrature.hpp"
#include "roughpam/special.hpp"

using namespace roughpam;

TEST(Hyp2f1, MatchesGeneralizedSeries) {
    for (double p : {0.1, 0.3, 0.5}) {
        for (double z : {0.0, 0.2, 0.5, 0.7, 0.9, 0.99}) {
            const double ref = boost::math::hypergeometric_pFq({-p / 2, -p / 2}, {0.5}, z);
            EXPECT_NEAR(hyp2f1_unit(-p / 2, -p / 2, 0.5, z), ref, 1e-12 * std::abs(ref)) << p << ' ' << z;
        }
    }
    EXPECT_THROW(hyp2f1_unit(0.1, 0.1, 0.5, 1.0), std::domain_error);
}

TEST(AbsMoments, GaussianAgainstQuadrature) {
    for (double p : {0.2, 0.5, 1.0}) {
        const double s = 1.7;
        const auto r = integrate_to_infinity(
            [&](double x) { return 2.0 * std::pow(x, p) * std::exp(-x * x / (2 * s * s)) / (s * std::sqrt(2 * kPi)); },
            0.0, 1e-12);
        EXPECT_NEAR(gaussian_abs_moment(p, s), r.value, 1e-10);
    }
}

TEST(AbsMoments, BivariateAgainstQuadrature) {
    const double p = 0.3, sx = 0.8, sy = 1.4;
    for (double rho : {-0.9, -0.3, 0.0, 0.6, 0.95}) {
        // E|X|^p |Y|^p = E|X|^p E[|Y|^p | X]; Y | X is Gaussian with shifted mean,
        // integrated numerically in both variables.
        auto inner = [&](double x) {
            const double m = rho * sy / sx * x;
            const double sc = sy * std::sqrt(1 - rho * rho);
            auto g = [&](double y) { return std::pow(std::abs(y), p) * std::exp(-0.5 * std::pow((y - m) / sc, 2)); };
            const double v = integrate_gk21(g, m - 12 * sc, 0.0, 1e-11, 12).value + integrate_gk21(g, 0.0, m + 12 * sc, 1e-11, 12).value;
            return v / (sc * std::sqrt(2 * kPi)) * std::pow(std::abs(x), p) * std::exp(-0.5 * x * x / (sx * sx)) /
                   (sx * std::sqrt(2 * kPi));
        };
        const double ref = integrate_gk21(inner, -12 * sx, 0.0, 1e-10, 12).value +
                           integrate_gk21(inner, 0.0, 12 * sx, 1e-10, 12).value;
        EXPECT_NEAR(bivariate_abs_moment(p, sx, sy, rho), ref, 1e-7 * ref) << rho;
    }
}
