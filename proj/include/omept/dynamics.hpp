#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "omept/params.hpp"
#include "omept/rng.hpp"

namespace omept {

// Instantaneous state of the three complex mode amplitudes.
struct ModeState {
    std::complex<double> a1;
    std::complex<double> a2;
    std::complex<double> b;
    double t = 0.0;

    bool operator==(const ModeState&) const = default;
};

enum class Scheme { EulerMaruyama, StochasticHeun };

struct IntegratorConfig {
    double dt = 0.0;          // step; 0 selects default_dt(params)
    double t_end = 0.0;       // total integration time
    Scheme scheme = Scheme::StochasticHeun;
    std::uint64_t seed = 0;   // stream seed for the thermal noise
    int sample_stride = 10;   // record every sample_stride-th step
    bool noise_on = true;

    bool operator==(const IntegratorConfig&) const = default;
};

// Any |Re| or |Im| beyond this aborts the integration as a blowup.
inline constexpr double kOverflowGuard = 1e12;

// 0.01 / max(|wb|, |dw2|, |dw1|), capped at 0.05/max... and never above
// 0.05 absolute when all frequencies vanish; see implementation.
double default_dt(const SystemParams& p);

// Deterministic drift of (a1, a2, b) at the given state.
std::array<std::complex<double>, 3> drift(const ModeState& s, const SystemParams& p);

// One thermal noise increment for the phonon mode over a step dt:
// sqrt(gammab*nbar*dt) * (n1 + i n2), n1,n2 standard normal, which realizes
// <xi(t) xi*(t')> = 2*gammab*nbar*delta(t-t').
std::complex<double> noise_increment(const SystemParams& p, double dt, Xoshiro256pp& rng);

// Sampled path plus the exact final state (which may fall between samples).
struct Trajectory {
    std::vector<double> t;
    std::vector<std::complex<double>> a1;
    std::vector<std::complex<double>> a2;
    std::vector<std::complex<double>> b;
    ModeState final_state;
    SystemParams params;
    IntegratorConfig config;  // config as resolved (dt filled in)

    std::size_t size() const { return t.size(); }
    double sample_dt() const { return config.dt * config.sample_stride; }
    std::vector<double> intensity_a1() const;
    std::vector<double> intensity_a2() const;
    std::vector<double> intensity_b() const;
};

// Integrates from s0 for t_end. Samples are recorded at step 0 and every
// sample_stride-th step. Throws ValidationError for bad config (dt too
// large for the fastest frequency, non-positive t_end, ...) and
// NumericalBlowup when a component leaves the overflow guard.
Trajectory integrate(const SystemParams& p, const ModeState& s0, const IntegratorConfig& cfg);

// Default initial condition: zero-solution a1, a2 = 0, b = one thermal
// noise-increment-sized kick drawn from an auxiliary stream derived from
// cfg.seed. Deterministic given (p, cfg).
ModeState default_initial_state(const SystemParams& p, const IntegratorConfig& cfg);

}  // namespace omept
