#include "roughpam/intermittency_lab.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "roughpam/common.hpp"

namespace roughpam {

namespace {

struct LineFit {
    double slope = 0.0;
    double slope_se = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LineFit weighted_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += w[i] * (x[i] - mx) * (x[i] - mx);
        sxy += w[i] * (x[i] - mx) * (y[i] - my);
        syy += w[i] * (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw ConfigError("regression needs distinct abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        rss += w[i] * r * r;
    }
    f.r_squared = syy > 0.0 ? 1.0 - rss / syy : 1.0;
    // Weights are inverse variances, so 1/sxx is the slope variance.
    f.slope_se = std::sqrt(1.0 / sxx);
    return f;
}

}  // namespace

GrowthTable moment_growth_scan(const std::vector<int>& n_list, const std::vector<double>& t_grid,
                               const ModelParams& params, const std::vector<double>& eps_schedule,
                               const FkOptions& options) {
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1])) throw ConfigError("t grid must be increasing");
    }
    for (int n : n_list) {
        if (n < 1 || n > 6) throw ConfigError("moment orders must lie in 1..6");
    }
    GrowthTable table;
    for (int n : n_list) {
        for (double t : t_grid) {
            GrowthRow row;
            row.kappa = params.kappa;
            row.estimate = fk_moment_extrapolated(n, t, 0.0, params, eps_schedule, options);
            if (row.estimate.flagged()) {
                row.excluded = true;
                std::ostringstream note;
                note << "n=" << n << " t=" << t << " kappa=" << params.kappa << ':'
                     << (row.estimate.clip_flag ? " clipped" : "") << (row.estimate.monotonicity_flag ? " non-monotone" : "");
                table.exclusions.push_back(note.str());
            }
            table.rows.push_back(row);
        }
    }
    return table;
}

GrowthFit fit_growth(const GrowthTable& table, int n, double kappa) {
    std::vector<double> t, y, w;
    for (const auto& row : table.rows) {
        if (row.excluded || row.estimate.n != n || row.kappa != kappa) continue;
        const auto& e = row.estimate;
        if (!(e.mean > 0.0)) continue;
        t.push_back(e.t);
        y.push_back(std::log(e.mean));
        // d log m = dm / m
        const double sd = e.std_error > 0.0 ? e.std_error / e.mean : 1e-12;
        w.push_back(1.0 / (sd * sd));
    }
    if (t.size() < 4) throw ConfigError("growth fit needs at least 4 unflagged rows");
    const LineFit f = weighted_line(t, y, w);
    GrowthFit g;
    g.n = n;
    g.kappa = kappa;
    g.gamma = f.slope;
    g.gamma_std_error = f.slope_se;
    g.intercept = f.intercept;
    g.r_squared = f.r_squared;
    g.t_min = *std::min_element(t.begin(), t.end());
    g.t_max = *std::max_element(t.begin(), t.end());
    g.points = static_cast<int>(t.size());
    return g;
}

ScalingReport scaling_exponents(const std::vector<GrowthFit>& n_fits, const std::vector<GrowthFit>& kappa_fits,
                                const HurstParam& h, double tolerance) {
    if (n_fits.size() < 3) throw ConfigError("scaling in n needs at least 3 fits");
    if (kappa_fits.size() < 3) throw ConfigError("scaling in kappa needs at least 3 fits");
    ScalingReport r;
    r.target_n = 1.0 + 1.0 / h.value();
    r.target_kappa = 1.0 - 1.0 / h.value();
    r.tolerance = tolerance;
    r.n_fits = n_fits;
    r.kappa_fits = kappa_fits;
    auto regress = [](const std::vector<GrowthFit>& fits, bool by_n) {
        std::vector<double> x, y, w;
        for (const auto& f : fits) {
            if (!(f.gamma > 0.0)) throw ConfigError("log-log regression needs positive growth rates");
            x.push_back(std::log(by_n ? static_cast<double>(f.n) : f.kappa));
            y.push_back(std::log(f.gamma));
            w.push_back(1.0);
        }
        return weighted_line(x, y, w).slope;
    };
    r.slope_n = regress(n_fits, true);
    r.slope_kappa = regress(kappa_fits, false);
    r.pass_n = std::abs(r.slope_n - r.target_n) <= tolerance * std::abs(r.target_n);
    r.pass_kappa = std::abs(r.slope_kappa - r.target_kappa) <= tolerance * std::abs(r.target_kappa);
    return r;
}

MajorantReport upper_bound_audit(int n, double t, const ModelParams& params, const MomentEstimate& fk,
                                 const ChaosBudget& budget, int m_max) {
    if (n < 2) throw ConfigError("majorant audit needs n >= 2");
    MajorantReport r;
    r.n = n;
    r.t = t;
    const double factor = std::sqrt(static_cast<double>(n - 1));
    const double x = fk.x;
    double sum = std::abs(params.u0.heat_flow(t, x, params.kappa));
    double weight = 1.0;
    for (int m = 1; m <= m_max; ++m) {
        weight *= factor;
        const ChaosNormEstimate e = chaos_norm_sq(m, t, x, params, budget);
        if (e.budget_exhausted) r.under_resolved = true;
        sum += weight * std::sqrt(e.value + 2.0 * e.std_error);
    }
    for (int m = m_max + 1; m <= m_max + 400; ++m) {
        weight *= factor;
        const double term = weight * std::sqrt(chaos_norm_upper_bound(m, t, x, params));
        r.tail += term;
        if (term <= 1e-16 * (sum + r.tail)) break;
    }
    r.majorant = sum + r.tail;
    if (r.tail > 0.1 * sum) r.under_resolved = true;
    const double dn = static_cast<double>(n);
    r.fk_root = std::pow(std::max(fk.mean, 0.0), 1.0 / dn);
    r.fk_root_std_error = fk.mean > 0.0 ? r.fk_root * fk.std_error / (dn * fk.mean) : 0.0;
    r.holds = r.fk_root - 3.0 * r.fk_root_std_error <= r.majorant;
    return r;
}

void write_growth_csv(std::ostream& out, const GrowthTable& table) {
    out << "n,t,kappa,eps,mean,stderr,samples,seed,flags\n" << std::setprecision(17);
    for (const auto& row : table.rows) {
        const auto& e = row.estimate;
        std::string flags;
        if (e.clip_flag) flags += "clipped";
        if (e.monotonicity_flag) flags += flags.empty() ? "non_monotone" : "|non_monotone";
        out << e.n << ',' << e.t << ',' << row.kappa << ',' << e.eps << ',' << e.mean << ',' << e.std_error << ','
            << e.samples << ',' << e.seed << ',' << flags << '\n';
    }
}

std::string fits_json(const ScalingReport& report) {
    auto fit = [](const GrowthFit& f) {
        return nlohmann::json{{"n", f.n},         {"kappa", f.kappa}, {"gamma", f.gamma},
                              {"gamma_stderr", f.gamma_std_error}, {"intercept", f.intercept},
                              {"r_squared", f.r_squared}, {"t_window", {f.t_min, f.t_max}}, {"points", f.points}};
    };
    nlohmann::json j;
    for (const auto& f : report.n_fits) j["n_fits"].push_back(fit(f));
    for (const auto& f : report.kappa_fits) j["kappa_fits"].push_back(fit(f));
    j["scaling"] = {{"slope_n", report.slope_n},       {"target_n", report.target_n},
                    {"slope_kappa", report.slope_kappa}, {"target_kappa", report.target_kappa},
                    {"tolerance", report.tolerance},   {"pass_n", report.pass_n},
                    {"pass_kappa", report.pass_kappa}};
    return j.dump(2);
}

}  // namespace roughpam
