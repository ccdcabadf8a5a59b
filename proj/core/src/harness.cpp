#include "roughpam/harness.hpp"

#include <cmath>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

#include "roughpam/common.hpp"
#include "roughpam/parallel.hpp"
#include "roughpam/rng.hpp"
#include "roughpam/spectral_noise.hpp"

namespace roughpam {

using nlohmann::json;

namespace {

std::string csv_header(const std::string& fingerprint) { return "# fingerprint=" + fingerprint + "\n"; }

std::string dump(json j, const std::string& fingerprint) {
    j["fingerprint"] = fingerprint;
    return j.dump(2) + "\n";
}

CommandResult start(const std::string& command, const RunConfig& config) {
    config.validate();
    CommandResult r;
    r.command = command;
    r.fingerprint = config.fingerprint();
    return r;
}

int threads_of(const RunConfig& c) { return resolve_threads(c.threads); }

ChaosBudget chaos_budget(const RunConfig& c) {
    ChaosBudget b;
    b.max_samples = c.chaos.max_samples;
    b.target_rel_stderr = c.chaos.target_rel_stderr;
    b.seed = c.seed;
    b.threads = threads_of(c);
    return b;
}

FkOptions fk_options(const RunConfig& c, std::int64_t samples) {
    FkOptions o;
    o.samples = samples;
    o.seed = c.seed;
    o.threads = threads_of(c);
    o.dt_b = c.fk.dt_b;
    return o;
}

json estimate_json(const MomentEstimate& e) {
    return {{"n", e.n},
            {"t", e.t},
            {"x", e.x},
            {"eps", e.eps},
            {"mean", e.mean},
            {"stderr", e.std_error},
            {"samples", e.samples},
            {"seed", e.seed},
            {"clipped", e.clipped},
            {"clip_flag", e.clip_flag},
            {"monotonicity_flag", e.monotonicity_flag},
            {"raw_mean", e.raw_mean},
            {"last_increment", e.last_increment},
            {"extrapolation_uncertainty", e.extrapolation_uncertainty}};
}

}  // namespace

CommandResult cmd_validate(const RunConfig& config) {
    CommandResult r = start("validate", config);
    const AdmissibilityReport a = check_admissibility(config.model.u0, config.model.h);
    json j = {{"u0", config.model.u0.describe()},
              {"h", config.model.h.value()},
              {"chaos_condition", {{"pass", a.chaos_ok}, {"integral", a.chaos_integral}}},
              {"picard_condition", {{"pass", a.picard_ok}, {"integral", a.picard_integral}}},
              {"note", a.note},
              {"parameters", "ok"}};
    r.artifacts["validate.json"] = dump(j, r.fingerprint);
    std::ostringstream s;
    s << "chaos condition: " << (a.chaos_ok ? "pass" : "FAIL") << " (integral " << a.chaos_integral << ")\n"
      << "picard condition: " << (a.picard_ok ? "pass" : "FAIL") << " (integral " << a.picard_integral << ")\n";
    if (!a.note.empty()) s << a.note << '\n';
    r.summary = s.str();
    r.exit_code = a.chaos_ok && a.picard_ok ? kExitOk : kExitConfig;
    return r;
}

CommandResult cmd_solve(const RunConfig& config) {
    CommandResult r = start("solve", config);
    EnsembleOptions opt;
    opt.trajectories = config.solver.trajectories;
    opt.seed = config.seed;
    opt.threads = threads_of(config);
    opt.snapshot_every = config.solver.snapshot_every;
    opt.probe_modes = config.solver.probe_modes;
    const EnsembleSummary sum = run_ensemble(config.model, config.grid, opt);

    std::ostringstream csv;
    csv << csv_header(r.fingerprint);
    write_summary_csv(csv, sum);
    r.artifacts["summary.csv"] = csv.str();

    // One replayable trajectory on the ensemble's first stream.
    RngStream rng(config.seed, stream_id(stream_tag::kSolver, 0));
    const Trajectory traj = solve(config.model, config.grid, rng, steps_for_horizon(config.model.horizon, config.grid.dt),
                                  config.solver.snapshot_every);
    std::ostringstream bin(std::ios::binary);
    write_trajectory_binary(bin, config.model, config.grid, config.seed, traj);
    bin << "RPFPRINT" << r.fingerprint;
    r.artifacts["trajectory.bin"] = bin.str();

    const SolutionField heat = heat_semigroup_apply(project_initial_condition(config.model.u0, config.grid),
                                                    config.model.horizon, config.model.kappa, config.grid);
    const std::size_t last = sum.times.size() - 1;
    json modes = json::array();
    for (int k = 0; k <= config.solver.probe_modes; ++k) {
        const auto& m = sum.modes[last];
        const auto ku = static_cast<std::size_t>(k);
        modes.push_back({{"k", k},
                         {"mean_re", m.mean_re[ku]},
                         {"mean_im", m.mean_im[ku]},
                         {"stderr_re", m.stderr_re[ku]},
                         {"stderr_im", m.stderr_im[ku]},
                         {"heat_re", heat.coeff(k).real()},
                         {"heat_im", heat.coeff(k).imag()}});
    }
    json j = {{"horizon", sum.times[last]},
              {"trajectories", sum.samples},
              {"mean_at_x", sum.mean_at_x[last]},
              {"mean_stderr", sum.mean_stderr[last]},
              {"heat_flow_at_x", config.model.u0.has_pointwise_form()
                                     ? config.model.u0.heat_flow(config.model.horizon, sum.probe_x, config.model.kappa)
                                     : heat.value_at(sum.probe_x, config.grid)},
              {"second_moment_at_x", sum.second_moment_at_x[last]},
              {"second_moment_stderr", sum.second_moment_stderr[last]},
              {"spatial_second_moment", sum.spatial_second_moment[last]},
              {"spatial_second_moment_stderr", sum.spatial_second_moment_stderr[last]},
              {"modes", modes}};
    r.artifacts["solve.json"] = dump(j, r.fingerprint);
    std::ostringstream s;
    s << std::setprecision(6) << "E u(t,0) = " << sum.mean_at_x[last] << " +- " << sum.mean_stderr[last]
      << ", E u^2(t,0) = " << sum.second_moment_at_x[last] << " +- " << sum.second_moment_stderr[last] << " over "
      << sum.samples << " trajectories\n";
    r.summary = s.str();
    return r;
}

CommandResult cmd_moments(const RunConfig& config) {
    CommandResult r = start("moments", config);
    const FkOptions opt = fk_options(config, config.fk.samples);
    std::ostringstream csv;
    csv << csv_header(r.fingerprint) << "n,t,x,eps,mean,stderr,samples,seed,flags\n" << std::setprecision(17);
    json rows = json::array();
    std::ostringstream s;
    bool flagged = false;
    for (int n : config.fk.n_list) {
        std::vector<MomentEstimate> schedule;
        const MomentEstimate e =
            fk_moment_extrapolated(n, config.fk.t, config.fk.x, config.model, config.fk.eps_schedule, opt, &schedule);
        schedule.push_back(e);
        for (const auto& p : schedule) {
            std::string flags;
            if (p.clip_flag) flags += "clipped";
            if (p.monotonicity_flag) flags += flags.empty() ? "non_monotone" : "|non_monotone";
            csv << p.n << ',' << p.t << ',' << p.x << ',' << p.eps << ',' << p.mean << ',' << p.std_error << ','
                << p.samples << ',' << p.seed << ',' << flags << '\n';
            rows.push_back(estimate_json(p));
        }
        flagged = flagged || e.flagged();
        s << std::setprecision(6) << "n=" << n << ": E u^n = " << e.mean << " +- " << e.std_error
          << " (smallest eps " << e.raw_mean << ")" << (e.flagged() ? " FLAGGED" : "") << '\n';
    }
    r.artifacts["moments.csv"] = csv.str();
    r.artifacts["moments.json"] = dump({{"estimates", rows}}, r.fingerprint);
    r.summary = s.str();
    r.exit_code = flagged ? kExitFlagged : kExitOk;
    return r;
}

GrowthTable synthetic_growth_table(const HurstParam& h, const std::vector<int>& n_list,
                                   const std::vector<double>& kappa_list, const std::vector<double>& t_grid,
                                   double scale) {
    GrowthTable table;
    const double hv = h.value();
    auto add = [&](int n, double kappa) {
        const double gamma = scale * std::pow(n, 1.0 + 1.0 / hv) * std::pow(kappa, 1.0 - 1.0 / hv);
        for (double t : t_grid) {
            GrowthRow row;
            row.kappa = kappa;
            row.estimate.n = n;
            row.estimate.t = t;
            row.estimate.mean = std::exp(gamma * t);
            row.estimate.std_error = 1e-3 * row.estimate.mean;
            row.estimate.samples = 1;
            table.rows.push_back(row);
        }
    };
    for (int n : n_list) add(n, 1.0);
    for (double k : kappa_list) {
        if (k != 1.0) add(2, k);
    }
    return table;
}

CommandResult cmd_intermittency(const RunConfig& config, bool synthetic) {
    CommandResult r = start(synthetic ? "intermittency-synthetic" : "intermittency", config);
    GrowthTable table;
    const double base_kappa = synthetic ? 1.0 : config.model.kappa;
    if (synthetic) {
        table = synthetic_growth_table(config.model.h, config.lab.n_list, config.lab.kappa_list, config.lab.t_grid);
    } else {
        const FkOptions opt = fk_options(config, config.lab.samples);
        table = moment_growth_scan(config.lab.n_list, config.lab.t_grid, config.model, config.fk.eps_schedule, opt);
        bool have_n2 = false;
        for (int n : config.lab.n_list) have_n2 = have_n2 || n == 2;
        for (double kappa : config.lab.kappa_list) {
            if (kappa == base_kappa && have_n2) continue;
            ModelParams p = config.model;
            p.kappa = kappa;
            const GrowthTable k = moment_growth_scan({2}, config.lab.t_grid, p, config.fk.eps_schedule, opt);
            table.rows.insert(table.rows.end(), k.rows.begin(), k.rows.end());
            table.exclusions.insert(table.exclusions.end(), k.exclusions.begin(), k.exclusions.end());
        }
    }

    std::ostringstream csv;
    csv << csv_header(r.fingerprint);
    write_growth_csv(csv, table);
    r.artifacts["growth.csv"] = csv.str();

    std::ostringstream s;
    try {
        std::vector<GrowthFit> n_fits, k_fits;
        for (int n : config.lab.n_list) n_fits.push_back(fit_growth(table, n, base_kappa));
        for (double k : config.lab.kappa_list) k_fits.push_back(fit_growth(table, 2, k));
        const ScalingReport rep = scaling_exponents(n_fits, k_fits, config.model.h, config.lab.tolerance);
        json j = json::parse(fits_json(rep));
        j["exclusions"] = table.exclusions;
        r.artifacts["fits.json"] = dump(j, r.fingerprint);
        s << std::setprecision(5) << "slope in n: " << rep.slope_n << " (target " << rep.target_n << ", "
          << (rep.pass_n ? "pass" : "FAIL") << ")\nslope in kappa: " << rep.slope_kappa << " (target "
          << rep.target_kappa << ", " << (rep.pass_kappa ? "pass" : "FAIL") << ")\n";
    } catch (const ConfigError& e) {
        r.artifacts["fits.json"] = dump({{"error", e.what()}, {"exclusions", table.exclusions}}, r.fingerprint);
        s << "fit failed: " << e.what() << '\n';
        r.exit_code = kExitFlagged;
    }
    for (const auto& x : table.exclusions) s << "excluded " << x << '\n';
    if (!table.exclusions.empty()) r.exit_code = kExitFlagged;
    r.summary = s.str();
    return r;
}

CommandResult cmd_chaos(const RunConfig& config) {
    CommandResult r = start("chaos", config);
    const ChaosBudget budget = chaos_budget(config);
    const SeriesResult series = second_moment_series(config.chaos.t, config.chaos.x, config.model, config.chaos.n_max, budget);
    std::vector<double> bounds;
    for (const auto& t : series.terms) bounds.push_back(chaos_norm_upper_bound(t.order, config.chaos.t, config.chaos.x, config.model));
    std::ostringstream csv;
    csv << csv_header(r.fingerprint);
    write_chaos_table_csv(csv, series.terms, bounds);
    r.artifacts["chaos.csv"] = csv.str();
    json j = {{"t", config.chaos.t},
              {"x", config.chaos.x},
              {"n_max", config.chaos.n_max},
              {"second_moment", series.partial_sum},
              {"stderr", series.std_error},
              {"tail_bound", series.tail_bound},
              {"tail_flag", series.tail_flag},
              {"under_resolved", series.under_resolved}};
    r.artifacts["chaos.json"] = dump(j, r.fingerprint);
    std::ostringstream s;
    s << std::setprecision(7) << "E u^2 = " << series.partial_sum << " +- " << series.std_error << " (tail <= "
      << series.tail_bound << ")" << (series.under_resolved ? " UNDER-RESOLVED" : "") << '\n';
    r.summary = s.str();
    r.exit_code = series.under_resolved ? kExitFlagged : kExitOk;
    return r;
}

CommandResult cmd_selftest(const RunConfig& config) {
    CommandResult r = start("selftest", config);
    json checks = json::array();
    bool all_ok = true;
    auto check = [&](const std::string& name, bool ok, double value) {
        checks.push_back({{"check", name}, {"pass", ok}, {"value", value}});
        all_ok = all_ok && ok;
    };

    {
        const auto out = Philox4x32::encrypt({0, 0, 0, 0}, {0, 0});
        check("philox known answer", out[0] == 0x6627e8d5u && out[3] == 0x9b00dbd8u, static_cast<double>(out[0]));
    }
    for (double eps : {1e-1, 1e-3}) {
        const double v = mollified_cov(0.0, eps, config.model.h) * 2.0 * kPi /
                         (std::tgamma(1.0 - config.model.h.value()) * std::pow(eps, config.model.h.value() - 1.0));
        check("mollifier at zero, eps=" + std::to_string(eps), std::abs(v - 1.0) < 1e-6, v);
    }
    {
        const double t = 0.7;
        const double v = simplex_integral_exact(t, MultiIndex{{0.0, 0.0}});
        check("simplex volume", std::abs(v - t * t / 2.0) < 1e-14, v);
    }
    {
        ModelParams p;
        p.h = config.model.h;
        const double hv = p.h.value();
        const double v = chaos_norm_sq(1, 0.25, 0.0, p, ChaosBudget{}).value;
        const double exact = c1h(p.h) * std::tgamma(1.0 - hv) * std::pow(0.25, hv) / hv;
        check("first chaos closed form", std::abs(v / exact - 1.0) < 1e-8, v);
        check("first chaos majorant is exact", std::abs(chaos_norm_upper_bound(1, 0.25, 0.0, p) / exact - 1.0) < 1e-10,
              exact);
    }

    // Two fixed-seed pipelines, each run twice with different thread counts.
    RunConfig small = config;
    small.seed = 20240601;
    small.grid = SpectralGrid{32.0, 64, 2.5e-4};
    small.model.horizon = 0.025;
    small.solver = SolverSection{16, 20, 4};
    small.fk.samples = 400;
    small.fk.dt_b = 2.5e-4;
    small.fk.n_list = {1, 2};
    small.fk.t = 0.05;
    int diffs = 0;
    for (int pipeline = 0; pipeline < 2; ++pipeline) {
        RunConfig a = small, b = small;
        a.threads = 1;
        b.threads = 2;
        const CommandResult ra = pipeline == 0 ? cmd_solve(a) : cmd_moments(a);
        const CommandResult rb = pipeline == 0 ? cmd_solve(b) : cmd_moments(b);
        if (ra.artifacts.size() != rb.artifacts.size()) ++diffs;
        for (const auto& [name, bytes] : ra.artifacts) {
            const auto it = rb.artifacts.find(name);
            if (it == rb.artifacts.end() || it->second != bytes) ++diffs;
        }
    }
    checks.push_back({{"check", "replay byte differences"}, {"pass", diffs == 0}, {"value", diffs}});

    r.artifacts["selftest.json"] = dump({{"checks", checks}}, r.fingerprint);
    std::ostringstream s;
    for (const auto& c : checks) {
        s << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["check"].get<std::string>() << '\n';
    }
    r.summary = s.str();
    if (diffs != 0) {
        r.exit_code = kExitIntegrity;
    } else if (!all_ok) {
        r.exit_code = kExitFlagged;
    }
    return r;
}

ResultRecord persist(const CommandResult& result, const RunConfig& config) {
    ResultsStore store(config.output_dir);
    return store.append(result.fingerprint, result.command, result.artifacts);
}

}  // namespace roughpam
