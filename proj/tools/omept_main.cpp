#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "omept/serialize.hpp"

namespace {

using omept::RunConfig;

struct CommonOpts {
    std::string config_path;
    std::string out;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::optional<double> omega;
    bool no_noise = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_format) {
    cmd->add_option("config", opts.config_path, "run configuration file")->required();
    cmd->add_option("--out", opts.out, "output file path (default: $OMEPT_OUTDIR or cwd)");
    if (with_format) {
        cmd->add_option("--format", opts.format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
    }
    cmd->add_option("--seed", opts.seed, "override the master seed");
    cmd->add_option("--omega", opts.omega, "override the drive amplitude");
    cmd->add_flag("--no-noise", opts.no_noise, "disable thermal noise");
}

RunConfig load_with_overrides(const CommonOpts& opts) {
    RunConfig cfg = omept::load_config(opts.config_path);
    if (opts.seed) cfg.integrator.seed = *opts.seed;
    if (opts.omega) {
        cfg.params.omega_drive = *opts.omega;
        omept::validate(cfg.params);
    }
    if (opts.no_noise) cfg.integrator.noise_on = false;
    return cfg;
}

std::string out_path(const CommonOpts& opts, const std::string& command) {
    if (!opts.out.empty()) return opts.out;
    const char* dir = std::getenv("OMEPT_OUTDIR");
    const std::string base = dir && *dir ? std::string(dir) : std::string(".");
    return base + "/" + command + "_result." + opts.format;
}

void write_file(const std::string& path, const std::string& payload) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw omept::Error("cannot open output file: " + path);
    os << payload;
    if (!os) throw omept::Error("failed while writing: " + path);
}

int run_analyze(const CommonOpts& opts) {
    const RunConfig cfg = load_with_overrides(opts);
    const auto env = omept::envelope(cfg, "analyze", omept::analysis_document(cfg));
    const std::string text = env.dump(2) + "\n";
    std::cout << text;
    if (!opts.out.empty()) write_file(opts.out, text);
    return 0;
}

int run_simulate(const CommonOpts& opts) {
    const RunConfig cfg = load_with_overrides(opts);
    const omept::ModeState s0 = omept::make_initial_state(cfg);
    const omept::Trajectory traj = omept::integrate(cfg.params, s0, cfg.integrator);
    const std::string path = out_path(opts, "simulate");
    if (opts.format == "csv") {
        std::ostringstream os;
        omept::write_trajectory_csv(os, traj, cfg);
        write_file(path, os.str());
    } else {
        write_file(path, omept::envelope(cfg, "simulate", omept::trajectory_json(traj, cfg)).dump(2) + "\n");
    }
    std::cout << "wrote " << path << " (" << traj.size() << " samples, final i1 = "
              << omept::format_double(std::norm(traj.final_state.a1)) << ", i2 = "
              << omept::format_double(std::norm(traj.final_state.a2)) << ", ib = "
              << omept::format_double(std::norm(traj.final_state.b)) << ")\n";
    return 0;
}

int run_ensemble_cmd(const CommonOpts& opts) {
    const RunConfig cfg = load_with_overrides(opts);
    const auto res = omept::run_ensemble(omept::make_ensemble_spec(cfg));
    const std::string path = out_path(opts, "ensemble");
    if (opts.format == "csv") {
        std::ostringstream os;
        omept::write_ensemble_csv(os, res, cfg);
        write_file(path, os.str());
    } else {
        write_file(path, omept::envelope(cfg, "ensemble", omept::ensemble_json(res, cfg)).dump(2) + "\n");
    }
    std::cout << "wrote " << path << " (" << res.summaries.size() << " trajectories, "
              << res.aggregate.to_symmetric << " + " << res.aggregate.to_nonsymmetric
              << " transitions, " << res.failed_indices.size() << " failed)\n";
    return 0;
}

int run_sweep(const CommonOpts& opts) {
    const RunConfig cfg = load_with_overrides(opts);
    const auto res = omept::sweep_drive(omept::make_sweep_spec(cfg));
    const std::string path = out_path(opts, "sweep");
    if (opts.format == "csv") {
        std::ostringstream os;
        omept::write_sweep_csv(os, res, cfg);
        write_file(path, os.str());
    } else {
        write_file(path, omept::envelope(cfg, "sweep", omept::sweep_json(res, cfg)).dump(2) + "\n");
    }
    std::cout << "wrote " << path << " (" << res.up.size() << " up + " << res.down.size()
              << " down points)\n";
    return 0;
}

int run_map(const CommonOpts& opts) {
    const RunConfig cfg = load_with_overrides(opts);
    omept::AxisSpec a1{cfg.map_axis1, {}};
    omept::AxisSpec a2{cfg.map_axis2, {}};
    for (int i = 0; i < cfg.map_axis1_points; ++i) {
        a1.values.push_back(cfg.map_axis1_points == 1
                                ? cfg.map_axis1_min
                                : cfg.map_axis1_min + (cfg.map_axis1_max - cfg.map_axis1_min) *
                                                          static_cast<double>(i) /
                                                          static_cast<double>(cfg.map_axis1_points - 1));
    }
    for (int i = 0; i < cfg.map_axis2_points; ++i) {
        a2.values.push_back(cfg.map_axis2_points == 1
                                ? cfg.map_axis2_min
                                : cfg.map_axis2_min + (cfg.map_axis2_max - cfg.map_axis2_min) *
                                                          static_cast<double>(i) /
                                                          static_cast<double>(cfg.map_axis2_points - 1));
    }
    const auto res = omept::regime_map(cfg.params, a1, a2);
    const std::string path = out_path(opts, "map");
    if (opts.format == "csv") {
        std::ostringstream os;
        omept::write_map_csv(os, res, cfg);
        write_file(path, os.str());
    } else {
        write_file(path, omept::envelope(cfg, "map", omept::map_json(res, cfg)).dump(2) + "\n");
    }
    std::cout << "wrote " << path << " (" << res.cells.size() << " cells)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"three-mode optomechanical simulator and analysis toolkit"};
    app.require_subcommand(1);

    CommonOpts analyze_opts, simulate_opts, ensemble_opts, sweep_opts, map_opts;
    add_common(app.add_subcommand("analyze", "analytic thresholds, eigenpairs, steady states"),
               analyze_opts, false);
    add_common(app.add_subcommand("simulate", "single stochastic trajectory"), simulate_opts,
               true);
    add_common(app.add_subcommand("ensemble", "trajectory ensemble with pooled statistics"),
               ensemble_opts, true);
    add_common(app.add_subcommand("sweep", "drive-amplitude hysteresis scan"), sweep_opts, true);
    add_common(app.add_subcommand("map", "analytic regime map over two parameter axes"),
               map_opts, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("analyze")) return run_analyze(analyze_opts);
        if (app.got_subcommand("simulate")) return run_simulate(simulate_opts);
        if (app.got_subcommand("ensemble")) return run_ensemble_cmd(ensemble_opts);
        if (app.got_subcommand("sweep")) return run_sweep(sweep_opts);
        if (app.got_subcommand("map")) return run_map(map_opts);
    } catch (const omept::NumericalBlowup& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const omept::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
