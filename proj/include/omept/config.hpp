#pragma once

#include <complex>
#include <iosfwd>
#include <string>

#include "omept/dynamics.hpp"
#include "omept/experiments.hpp"
#include "omept/params.hpp"

namespace omept {

enum class InitKind { Zero, ZeroKick, Plus, Custom };

// Complete description of a run, loadable from a flat key-value file.
// Zeros in dt / window / settle / measure mean "derive the default from the
// parameters at load time"; load_config() returns fully resolved values.
struct RunConfig {
    int schema_version = 1;

    SystemParams params;

    IntegratorConfig integrator{.dt = 0.0, .t_end = 1e6, .scheme = Scheme::StochasticHeun,
                                .seed = 1, .sample_stride = 10, .noise_on = true};
    InitKind init = InitKind::ZeroKick;
    std::complex<double> init_a1, init_a2, init_b;  // used when init == Custom

    double window = 0.0;   // smoothing window (time units)
    double hi = 0.5;
    double lo = 0.1;

    int ensemble_trajectories = 16;
    int ensemble_threads = 0;

    double sweep_omega_min = 0.0;
    double sweep_omega_max = 0.0;
    int sweep_points = 41;
    SweepDirection sweep_direction = SweepDirection::Both;
    bool sweep_carry = true;
    double sweep_settle = 0.0;
    double sweep_measure = 0.0;
    double sweep_kick = 1e-6;

    std::string map_axis1 = "omega";
    double map_axis1_min = 0.0, map_axis1_max = 0.0;
    int map_axis1_points = 21;
    std::string map_axis2 = "dw2";
    double map_axis2_min = 0.0, map_axis2_max = 0.0;
    int map_axis2_points = 21;

    bool operator==(const RunConfig&) const = default;
};

// Parses `key = value` lines ('#' starts a comment, blank lines ignored).
// Unknown keys, malformed lines and bad enum values throw ParseError with
// the 1-based line number; semantic violations throw ValidationError naming
// the field. Defaults above apply for missing keys; dt/window/settle/measure
// left at 0 are resolved from the parsed parameters before returning.
RunConfig parse_config(std::istream& in, const std::string& name);

RunConfig load_config(const std::string& path);

// Canonical textual form: every key, fixed order, full double precision.
// parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& c);

// Builders for the experiment specs embedded in a RunConfig.
EnsembleSpec make_ensemble_spec(const RunConfig& c);
SweepSpec make_sweep_spec(const RunConfig& c);
ModeState make_initial_state(const RunConfig& c);

// Default smoothing window, 20 / min(gamma2, gammab).
double default_window(const SystemParams& p);

}  // namespace omept
