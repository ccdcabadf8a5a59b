#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "roughpam/common.hpp"
#include "roughpam/harness.hpp"
#include "roughpam/intermittency_lab.hpp"

using namespace roughpam;

namespace {

GrowthTable table_from(int n, double kappa, const std::vector<double>& t, const std::vector<double>& mean) {
    GrowthTable tab;
    for (std::size_t i = 0; i < t.size(); ++i) {
        GrowthRow r;
        r.kappa = kappa;
        r.estimate.n = n;
        r.estimate.t = t[i];
        r.estimate.mean = mean[i];
        r.estimate.std_error = 0.01 * mean[i];
        tab.rows.push_back(r);
    }
    return tab;
}

}  // namespace

TEST(GrowthFit, ExactExponential) {
    const std::vector<double> t{0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<double> m;
    for (double s : t) m.push_back(std::exp(3 * s));
    const auto f = fit_growth(table_from(2, 1.0, t, m), 2);
    EXPECT_NEAR(f.gamma, 3.0, 1e-10);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
    EXPECT_EQ(f.points, 5);
    EXPECT_EQ(f.t_min, 0.1);
    EXPECT_EQ(f.t_max, 0.5);
}

TEST(GrowthFit, NoisyExponential) {
    std::vector<double> t, m;
    RngStream rng(4, 4);
    for (int i = 1; i <= 10; ++i) {
        t.push_back(0.1 * i);
        m.push_back(std::exp(3 * 0.1 * i) * (1.0 + 0.01 * rng.normal()));
    }
    EXPECT_NEAR(fit_growth(table_from(2, 1.0, t, m), 2).gamma, 3.0, 0.15);
}

TEST(GrowthFit, NeedsFourRows) {
    auto tab = table_from(2, 1.0, {0.1, 0.2, 0.3, 0.4}, {1.1, 1.2, 1.3, 1.4});
    EXPECT_NO_THROW(fit_growth(tab, 2));
    tab.rows[1].excluded = true;
    EXPECT_THROW(fit_growth(tab, 2), ConfigError);
    EXPECT_THROW(fit_growth(tab, 3), ConfigError);
}

TEST(Scaling, SyntheticPowerLaw) {
    const HurstParam h(0.35);
    const std::vector<int> ns{2, 3, 4, 5};
    const std::vector<double> ks{0.5, 1.0, 2.0};
    const auto tab = synthetic_growth_table(h, ns, ks, {0.1, 0.2, 0.3, 0.4, 0.5}, 0.7);
    std::vector<GrowthFit> nf, kf;
    for (int n : ns) nf.push_back(fit_growth(tab, n, 1.0));
    for (double k : ks) kf.push_back(fit_growth(tab, 2, k));
    const auto r = scaling_exponents(nf, kf, h);
    EXPECT_NEAR(r.target_n, 1 + 1 / 0.35, 1e-15);
    EXPECT_NEAR(r.target_kappa, 1 - 1 / 0.35, 1e-15);
    EXPECT_NEAR(r.slope_n, r.target_n, 1e-8);
    EXPECT_NEAR(r.slope_kappa, r.target_kappa, 1e-8);
    EXPECT_TRUE(r.pass_n);
    EXPECT_TRUE(r.pass_kappa);
    EXPECT_THROW(scaling_exponents({nf[0], nf[1]}, kf, h), ConfigError);
    const std::string js = fits_json(r);
    EXPECT_NE(js.find("\"slope_n\""), std::string::npos);
}

TEST(Scan, FlatFirstMomentAndDeterminism) {
    ModelParams p;
    FkOptions o;
    o.samples = 300;
    o.dt_b = 2.5e-3;
    const auto tab = moment_growth_scan({1, 2}, {0.05, 0.1, 0.15, 0.25}, p, {1e-1, 1e-2, 1e-3}, o);
    ASSERT_EQ(tab.rows.size(), 8u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(tab.rows[i].estimate.mean, 1.0);
    const auto alone = fk_moment_extrapolated(2, 0.25, 0.0, p, {1e-1, 1e-2, 1e-3}, o);
    EXPECT_EQ(tab.rows[7].estimate.mean, alone.mean);
    std::ostringstream csv;
    write_growth_csv(csv, tab);
    EXPECT_EQ(csv.str().substr(0, 43), "n,t,kappa,eps,mean,stderr,samples,seed,flag");
    EXPECT_THROW(moment_growth_scan({7}, {0.1, 0.2}, p, {1e-1, 1e-2, 1e-3}, o), ConfigError);
}

TEST(Majorant, DominatesSeriesRootForSecondMoment) {
    ModelParams p;
    ChaosBudget b;
    MomentEstimate fk;
    fk.n = 2;
    fk.mean = second_moment_series(0.25, 0.0, p, 8, b).partial_sum;
    const auto r = upper_bound_audit(2, 0.25, p, fk, b);
    EXPECT_GE(r.majorant, std::sqrt(fk.mean));
    EXPECT_TRUE(r.holds);
    EXPECT_FALSE(r.under_resolved);
}

TEST(Majorant, FiniteForRoughNoise) {
    ModelParams p;
    p.h = HurstParam(0.3);
    ChaosBudget b;
    b.target_rel_stderr = 0.05;
    MomentEstimate fk;
    fk.n = 3;
    fk.mean = 1.0;
    for (double t : {0.1, 0.5}) {
        const auto r = upper_bound_audit(3, t, p, fk, b, 4);
        EXPECT_TRUE(std::isfinite(r.majorant)) << t;
        EXPECT_GT(r.majorant, 1.0);
    }
}
