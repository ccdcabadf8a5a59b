#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <cmath>

#include "roughpam/common.hpp"
#include "roughpam/quadrature.hpp"
#include "roughpam/spectral_noise.hpp"

using namespace roughpam;

namespace {

// Kummer form of the mollified covariance.
double kummer_cov(double x, double eps, double h) {
    const double y = x / std::sqrt(eps);
    return std::tgamma(1 - h) / (2 * kPi) * std::pow(eps, h - 1) *
           boost::math::hypergeometric_1F1(1 - h, 0.5, -y * y / 4);
}

// Cosine transform summed over half-periods of cos(xi x).
double brute_cov(double x, double eps, double h) {
    const double a = 1 - 2 * h;
    const double cut = std::sqrt(45.0 / eps);
    auto f = [&](double xi) { return std::cos(xi * x) * std::exp(-eps * xi * xi) * std::pow(xi, a); };
    const double step = x > 0 ? kPi / x : cut;
    double s = 0.0;
    for (double lo = 0.0; lo < cut; lo += step) s += integrate_gk21(f, lo, std::min(cut, lo + step), 1e-14, 10).value;
    return s / kPi;
}

}  // namespace

TEST(MollifiedCov, ValueAtZero) {
    for (double h : {0.3, 0.35, 0.45}) {
        for (double eps : {1e-1, 1e-2, 1e-3}) {
            const double ref = std::tgamma(1 - h) * std::pow(eps, h - 1) / (2 * kPi);
            EXPECT_NEAR(mollified_cov(0.0, eps, HurstParam(h)) / ref, 1.0, 1e-9);
        }
    }
}

TEST(MollifiedCov, DecreasesInEps) {
    const HurstParam h(0.35);
    EXPECT_GT(mollified_cov(0.0, 1e-3, h), mollified_cov(0.0, 1e-2, h));
    EXPECT_GT(mollified_cov(0.0, 1e-2, h), mollified_cov(0.0, 1e-1, h));
}

TEST(MollifiedCov, KummerOracle) {
    for (double h : {0.3, 0.4}) {
        for (double eps : {0.05, 1.0}) {
            for (double y : {0.1, 0.7, 1.5, 3.0, 5.0, 8.0}) {
                const double x = y * std::sqrt(eps);
                const double ref = kummer_cov(x, eps, h);
                const double scale = kummer_cov(0.0, eps, h);
                EXPECT_NEAR(mollified_cov(x, eps, HurstParam(h)), ref, 1e-9 * scale) << h << ' ' << eps << ' ' << y;
            }
        }
    }
}

TEST(MollifiedCov, EvenInX) {
    const HurstParam h(0.35);
    for (double x : {0.01, 0.3, 2.0, 7.5}) EXPECT_EQ(mollified_cov(x, 0.01, h), mollified_cov(-x, 0.01, h));
}

TEST(MollifiedCov, LargeArgumentAgainstBruteForce) {
    const HurstParam h(0.35);
    const double eps = 0.01;
    const double f0 = mollified_cov(0.0, eps, h);
    for (int i = 0; i < 20; ++i) {
        const double x = std::sqrt(eps) * (10.0 + 2.0 * i);
        const double v = mollified_cov(x, eps, h);
        EXPECT_LE(std::abs(v), f0);
        EXPECT_NEAR(v, brute_cov(x, eps, 0.35), 1e-8 * f0) << x;
    }
    EXPECT_LT(std::abs(mollified_cov(5.0, eps, h)), std::abs(mollified_cov(1.0, eps, h)));
    EXPECT_THROW(mollified_cov(0.1, 0.0, h), ConfigError);
    EXPECT_THROW(mollified_cov(0.1, -1.0, h), ConfigError);
}

TEST(MollifiedCov, PositiveSemidefinite) {
    const HurstParam h(0.3);
    const int m = 40;
    Eigen::MatrixXd k(m, m);
    std::vector<double> pts(m);
    for (int i = 0; i < m; ++i) pts[static_cast<std::size_t>(i)] = 0.37 * i - 0.011 * i * i + std::sin(i) * 0.2;
    const auto kernel = MollifiedKernel::shared(h);
    for (double eps : {1e-1, 1e-2}) {
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                k(i, j) = mollified_cov(pts[static_cast<std::size_t>(i)] - pts[static_cast<std::size_t>(j)], eps, h);
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8) << eps;
    }
}

TEST(MollifiedKernel, TableMatchesQuadrature) {
    for (double h : {0.3, 0.35, 0.45}) {
        const HurstParam hp(h);
        const auto kernel = MollifiedKernel::shared(hp);
        for (double eps : {1e-3, 0.1}) {
            const auto at = kernel->at(eps);
            const double f0 = mollified_cov(0.0, eps, hp);
            EXPECT_NEAR(at.at_zero(), f0, 1e-10 * f0);
            for (double y : {0.003, 0.5, 1.234, 4.0, 9.99, 15.9, 16.1, 30.0, 100.0}) {
                const double x = y * std::sqrt(eps);
                EXPECT_NEAR(at(x), mollified_cov(x, eps, hp), 1e-8 * f0) << h << ' ' << y;
                EXPECT_EQ(at(x), (*kernel)(x, eps));
            }
        }
    }
}
