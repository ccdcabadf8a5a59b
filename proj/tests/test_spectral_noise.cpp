#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "roughpam/common.hpp"
#include "roughpam/quadrature.hpp"
#include "roughpam/spectral_noise.hpp"
#include "roughpam/stats.hpp"

using namespace roughpam;

TEST(HurstParam, Range) {
    EXPECT_NO_THROW(HurstParam(0.3));
    EXPECT_THROW(HurstParam(0.2), ConfigError);
    EXPECT_THROW(HurstParam(0.25), ConfigError);
    EXPECT_THROW(HurstParam(0.5), ConfigError);
    EXPECT_DOUBLE_EQ(HurstParam(0.35).exponent(), 0.3);
}

TEST(SpectralWeight, Constant) {
    // At h = 1/2 the constant reduces to 1/(2 pi).
    EXPECT_NEAR(c1h(0.5), 1.0 / (2.0 * kPi), 1e-15);
    const double h = 0.35;
    EXPECT_NEAR(c1h(h), std::tgamma(2 * h + 1) * std::sin(kPi * h) / (2 * kPi), 1e-15);
    const auto w = SpectralDensityWeight::from(HurstParam(h));
    EXPECT_EQ(w(0.0), 0.0);
    EXPECT_NEAR(w(-2.0), c1h(h) * std::pow(2.0, 0.3), 1e-15);
}

TEST(SpectralGrid, CollocationSize) {
    auto smooth = [](int n) {
        for (int p : {2, 3, 5}) {
            while (n % p == 0) n /= p;
        }
        return n == 1;
    };
    for (int k : {2, 7, 64, 100, 512, 1000, 1024}) {
        SpectralGrid g{32.0, k, 1e-3};
        const int n = g.collocation_size();
        int ref = 3 * k + 1;
        while (ref % 16 != 0 || !smooth(ref)) ++ref;
        EXPECT_EQ(n, ref) << k;
    }
    EXPECT_EQ((SpectralGrid{32.0, 1024, 1e-3}.collocation_size()), 3200);
    EXPECT_THROW((SpectralGrid{-1.0, 64, 1e-3}.validate()), ConfigError);
    EXPECT_THROW((SpectralGrid{1.0, 1, 1e-3}.validate()), ConfigError);
}

TEST(NoiseSampler, ModeVariances) {
    const SpectralGrid grid{16.0, 32, 0.01};
    const HurstParam h(0.3);
    NoiseSampler s(grid, h);
    RngStream rng(3, 4);
    std::vector<RunningStats> st(33);
    NoiseIncrement dw(32);
    for (int i = 0; i < 20000; ++i) {
        s.sample(rng, dw);
        EXPECT_EQ(dw.coeff(0), std::complex<double>(0.0, 0.0));
        for (int k = 1; k <= 32; ++k) st[static_cast<std::size_t>(k)].add(std::norm(dw.coeff(k)));
    }
    for (int k = 1; k <= 32; ++k) {
        const double xi = 2 * kPi * k / grid.domain_length;
        const double expected = c1h(0.3) * std::pow(xi, 0.4) * grid.dt * 2 * kPi / grid.domain_length;
        EXPECT_NEAR(s.variance(k), expected, 1e-14 * expected);
        EXPECT_NEAR(st[static_cast<std::size_t>(k)].mean(), expected, 4.5 * st[static_cast<std::size_t>(k)].std_error());
        EXPECT_EQ(dw.coeff(-k), std::conj(dw.coeff(k)));
    }
}

TEST(Catalog, FileMatchesBuiltIn) {
    const auto file = load_catalog(std::string(ROUGHPAM_TEST_DATA) + "/test_functions.txt");
    const auto built = default_catalog();
    ASSERT_EQ(file.size(), 10u);
    ASSERT_EQ(built.size(), 10u);
    for (std::size_t i = 0; i < file.size(); ++i) {
        EXPECT_EQ(file[i].name, built[i].name);
        EXPECT_EQ(file[i].center, built[i].center);
        EXPECT_EQ(file[i].width, built[i].width);
        EXPECT_EQ(file[i].t_begin, built[i].t_begin);
        EXPECT_EQ(file[i].t_end, built[i].t_end);
    }
}

TEST(Catalog, RejectsMalformedLines) {
    for (const char* bad : {"f 0 -1 0 1\n", "f 0 1 1 1\n", "f 0 1 0\n", "f 0 x 0 1\n"}) {
        std::istringstream in(bad);
        EXPECT_THROW(parse_catalog(in), ConfigError) << bad;
    }
}

TEST(TestFunction, FourierTransformOfGaussian) {
    const TestFunction f{"g", 0.7, 1.3, 0.0, 1.0};
    for (double xi : {0.0, 0.5, 2.0}) {
        const double re = integrate_gk21([&](double x) { return f(0.5, x) * std::cos(xi * x); }, -15, 15, 1e-13).value;
        const double im = integrate_gk21([&](double x) { return -f(0.5, x) * std::sin(xi * x); }, -15, 15, 1e-13).value;
        EXPECT_NEAR(f.fourier(xi).real(), re, 1e-11);
        EXPECT_NEAR(f.fourier(xi).imag(), im, 1e-11);
    }
    EXPECT_EQ(f(1.0, 0.7), 0.0);
}

TEST(InnerProduct, SpectralQuadratureOracle) {
    const HurstParam h(0.35);
    const auto cat = default_catalog();
    for (std::size_t i = 0; i < cat.size(); i += 3) {
        for (std::size_t j = i; j < cat.size(); j += 4) {
            const auto& a = cat[i];
            const auto& b = cat[j];
            const double overlap = std::max(0.0, std::min(a.t_end, b.t_end) - std::max(a.t_begin, b.t_begin));
            auto f = [&](double xi) {
                return 2.0 * std::pow(xi, 0.3) * (a.fourier(xi) * std::conj(b.fourier(xi))).real();
            };
            const double ref = c1h(h) * overlap * integrate_tanh_sinh(f, 0.0, 40.0, 1e-14).value;
            EXPECT_NEAR(inner_product_H(a, b, h), ref, 1e-9 * std::abs(ref) + 1e-13) << a.name << ' ' << b.name;
            EXPECT_NEAR(inner_product_H(a, b, h), inner_product_H(b, a, h), 1e-13);
        }
    }
}

TEST(InnerProduct, GridMatchesContinuum) {
    // The mode sum misses the |xi|^{1-2h} cusp at zero, an O(dxi^{2-2h}) bias.
    const HurstParam h(0.35);
    const TestFunction f{"f", 1.0, 1.5, 0.0, 0.5};
    const TestFunction g{"g", -0.5, 2.0, 0.25, 1.0};
    auto grid_value = [&](const SpectralGrid& grid) {
        const int n = grid.collocation_size();
        const int steps = 4;
        std::vector<std::vector<double>> phi(steps, std::vector<double>(static_cast<std::size_t>(n)));
        auto psi = phi;
        for (int s = 0; s < steps; ++s) {
            for (int j = 0; j < n; ++j) {
                double x = j * grid.domain_length / n;
                if (x > grid.domain_length / 2) x -= grid.domain_length;
                phi[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] = f(s * grid.dt, x);
                psi[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] = g(s * grid.dt, x);
            }
        }
        return inner_product_H(phi, psi, grid, h);
    };
    const double exact = inner_product_H(f, g, h);
    const double coarse = std::abs(grid_value(SpectralGrid{256.0, 128, 0.25}) / exact - 1.0);
    const double fine = std::abs(grid_value(SpectralGrid{1024.0, 512, 0.25}) / exact - 1.0);
    EXPECT_LT(coarse, 0.015);
    EXPECT_LT(fine, 3e-3);
    EXPECT_NEAR(coarse / fine, std::pow(4.0, 1.3), 1.5);
}

TEST(Isometry, SingleCatalogFunction) {
    const SpectralGrid grid{256.0, 256, 0.25};
    const auto cat = default_catalog();
    const auto r = ito_integral_variance_check(cat[0], grid, HurstParam(0.35), 20000, 99, 1);
    EXPECT_LT(std::abs(r.z), 4.0);
    EXPECT_NEAR(r.grid_norm, r.exact_norm, 0.01 * r.exact_norm);
}

TEST(NoiseBinary, Header) {
    const SpectralGrid grid{16.0, 8, 0.01};
    RngStream rng(1, 2);
    std::vector<NoiseIncrement> steps{sample_noise_increment(grid, HurstParam(0.3), rng)};
    std::ostringstream out;
    write_noise_binary(out, grid, HurstParam(0.3), 1, steps);
    const std::string s = out.str();
    EXPECT_EQ(s.substr(0, 8), "RPNOISE1");
    EXPECT_EQ(s.size(), 8u + 8 + 4 + 8 + 8 + 8 + 8 + 9 * 16);
}
