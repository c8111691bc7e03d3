// Command-line front end: runs the reach/fetch/shoot cases, wave-speed and
// chi1 sweeps, and re-analyses saved control fields.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "cosserat/experiments.hpp"

namespace fs = std::filesystem;
using namespace cosserat;

namespace {

struct Common {
    std::string profile;
    std::string out;
    int workers = 1;
};

ExperimentConfig load(const std::string& file, const Common& common) {
    ExperimentConfig c = parse_config_file(file);
    if (!common.profile.empty()) apply_profile(c, profile_from_string(common.profile));
    if (!common.out.empty()) c.output_dir = common.out;
    c.validate();
    return c;
}

void print_record(const IterationRecord& r) {
    std::printf("iter %3d  J = %-12.6g running = %-12.6g terminal = %-12.6g du_max = %-10.4g tip_dist = %.5f m\n",
                r.k, r.J, r.J_running, r.J_terminal, r.du_max, r.tip_dist);
}

int cmd_run(const std::string& file, const Common& common) {
    const ExperimentConfig c = load(file, common);
    std::printf("case %s: N = %d, dt = %g s, T = %g s, %d iterations -> %s\n", to_string(c.task).c_str(), c.rod.N,
                c.dt, c.weights.T, c.iterations, c.output_dir.c_str());
    try {
        const CaseResult r = run_case(c, c.output_dir);
        for (const auto& rec : r.solve.log.records) print_record(rec);
        for (const auto& w : r.solve.log.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    } catch (const SolveAborted& e) {
        for (const auto& rec : e.log().records) print_record(rec);
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}

int cmd_sweep(const std::string& file, const Common& common) {
    const ExperimentConfig c = load(file, common);
    const fs::path out = c.output_dir;
    fs::create_directories(out);
    int failures = 0;
    if (!c.sweep_chi1.empty()) {
        const auto rows = chi1_sweep(c, out, common.workers);
        write_chi1_csv(rows, out / "chi1.csv");
        for (const auto& r : rows) {
            if (!r.error.empty()) {
                ++failures;
                std::printf("chi1 = %-6g failed: %s\n", r.chi1, r.error.c_str());
                continue;
            }
            std::printf("chi1 = %-6g whole %+.3f m/s (R2 %.2f)  base half %+.3f (R2 %.2f)  tip half %+.3f (R2 %.2f)%s\n",
                        r.chi1, r.whole.direction * r.whole.speed, r.whole.r2,
                        r.base_half.direction * r.base_half.speed, r.base_half.r2,
                        r.tip_half.direction * r.tip_half.speed, r.tip_half.r2, r.bimodal ? "  bimodal" : "");
        }
    }
    if (!c.sweep_E.empty() || !c.sweep_rho.empty()) {
        const auto rows = wave_speed_sweep(c, out, common.workers);
        write_wave_speed_csv(rows, out / "wavespeed.csv");
        for (const auto& r : rows) {
            if (!r.error.empty()) {
                ++failures;
                std::printf("E = %g, rho = %g failed: %s\n", r.E, r.rho, r.error.c_str());
                continue;
            }
            std::printf("E = %-8g rho = %-6g c = %.4f m/s  c/sqrt(E/rho) = %.4f  R2 = %.3f%s\n", r.E, r.rho,
                        r.fit.speed, r.coeff, r.fit.r2, r.fit.reliable ? "" : "  (unreliable)");
        }
    }
    if (c.sweep_chi1.empty() && c.sweep_E.empty() && c.sweep_rho.empty()) {
        std::fprintf(stderr, "error: config has no sweep.E, sweep.rho or sweep.chi1 list\n");
        return 1;
    }
    return failures ? 2 : 0;
}

int cmd_wavespeed(const std::string& dir, std::optional<std::vector<double>> window, const std::string& field,
                  const std::string& signal) {
    const fs::path run = dir;
    ExperimentConfig c = parse_config_file(run / "config.cfg");
    if (window) {
        c.wave_window.t_begin = (*window)[0];
        c.wave_window.t_end = (*window)[1];
    }
    if (!field.empty()) c.peak_field = peak_field_from_string(field);
    if (!signal.empty()) c.peak_signal = peak_signal_from_string(signal);
    const double ds = c.rod.L0 / c.rod.N;
    const SpaceTimeSeries series = read_control_series(run / "control_final.csv", c.peak_field, ds);

    WaveSpeedRow row;
    row.E = c.rod.E;
    row.rho = c.rod.rho;
    row.fit = estimate_wave_speed(series, c.wave_window, c.peak_signal);
    row.coeff = row.fit.speed / std::sqrt(row.E / row.rho);
    write_wave_speed_csv({row}, run / "wavespeed.csv");
    std::printf("c = %.4f m/s  c/sqrt(E/rho) = %.4f  R2 = %.3f  direction %s%s\n", row.fit.speed, row.coeff,
                row.fit.r2, row.fit.direction > 0 ? "base->tip" : "tip->base",
                row.fit.reliable ? "" : "  (unreliable: no clear peak motion)");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Open-loop optimal control of a planar Cosserat rod"};
    app.require_subcommand(1);
    app.footer("Environment: COSSERAT_SEED is reserved for future stochastic components and currently unused.");

    Common common;
    app.add_option("--profile", common.profile, "Resolution profile overriding the config: paper (N=100, dt=1e-5) "
                                                "or desk (N=50, dt=2e-5)")
        ->check(CLI::IsMember({"paper", "desk"}));
    app.add_option("--out", common.out, "Output directory overriding the config");
    app.add_option("--workers", common.workers, "Parallel sweep rows")->check(CLI::PositiveNumber);

    std::string config_file, run_dir, field, signal;
    std::vector<double> window;
    auto* run = app.add_subcommand("run", "Solve one case and write its outputs");
    run->add_option("config", config_file, "Config file")->required()->check(CLI::ExistingFile);
    auto* sweep = app.add_subcommand("sweep", "Run the sweep lists of a config (wave speed and/or chi1)");
    sweep->add_option("config", config_file, "Config file")->required()->check(CLI::ExistingFile);
    auto* wave = app.add_subcommand("wavespeed", "Estimate the wave speed from a run directory");
    wave->add_option("run-dir", run_dir, "Directory written by `run`")->required()->check(CLI::ExistingDirectory);
    wave->add_option("--window", window, "Time window t_begin t_end [s]")->expected(2);
    wave->add_option("--field", field, "Tracked component")->check(CLI::IsMember({"C", "Fx", "Fy"}));
    wave->add_option("--signal", signal, "Tracked quantity")->check(CLI::IsMember({"rate", "magnitude"}));

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(config_file, common);
        if (*sweep) return cmd_sweep(config_file, common);
        if (*wave)
            return cmd_wavespeed(run_dir, window.empty() ? std::nullopt : std::optional(window), field, signal);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
