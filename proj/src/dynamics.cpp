#include "omept/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "omept/model.hpp"

namespace omept {

namespace {

using cd = std::complex<double>;

double resolve_dt(const SystemParams& p, double requested) {
    if (requested != 0.0) return requested;
    return default_dt(p);
}

void check_config(const SystemParams& p, const IntegratorConfig& cfg, double dt) {
    if (!(dt > 0.0)) throw ValidationError("integrator.dt", "must be > 0");
    if (!(cfg.t_end > 0.0)) throw ValidationError("integrator.t_end", "must be > 0");
    if (cfg.sample_stride < 1) throw ValidationError("integrator.sample_stride", "must be >= 1");
    const double fastest = std::max({std::abs(p.wb), std::abs(p.dw2), std::abs(p.dw1),
                                     p.gamma1, p.gamma2, p.gammab});
    if (dt * fastest > 0.05) {
        throw ValidationError("integrator.dt",
                              "dt * fastest frequency = " + std::to_string(dt * fastest) +
                                  " exceeds 0.05; the scheme would not resolve the dynamics");
    }
}

inline void check_state(const cd& a1, const cd& a2, const cd& b, double t) {
    constexpr double guard2 = kOverflowGuard * kOverflowGuard;
    const double n = std::norm(a1) + std::norm(a2) + std::norm(b);
    if (!(n <= 3.0 * guard2)) {  // also catches NaN/Inf
        throw NumericalBlowup("mode amplitude left the overflow guard", t);
    }
}

}  // namespace

double default_dt(const SystemParams& p) {
    double denom = std::max({std::abs(p.wb), std::abs(p.dw2), std::abs(p.dw1)});
    if (denom == 0.0) denom = std::max({p.gamma1, p.gamma2, p.gammab});
    return 0.01 / denom;
}

std::array<cd, 3> drift(const ModeState& s, const SystemParams& p) {
    const cd i(0.0, 1.0);
    return {
        cd(-p.gamma1, -p.dw1) * s.a1 - i * p.g * s.a2 * s.b - i * p.omega_drive,
        cd(-p.gamma2, -p.dw2) * s.a2 - i * p.g * s.a1 * std::conj(s.b),
        cd(-p.gammab, -p.wb) * s.b - i * p.g * s.a1 * std::conj(s.a2),
    };
}

cd noise_increment(const SystemParams& p, double dt, Xoshiro256pp& rng) {
    const double amp = std::sqrt(p.gammab * p.nbar * dt);
    if (amp == 0.0) return cd(0.0, 0.0);
    const auto [n1, n2] = rng.normal_pair();
    return cd(amp * n1, amp * n2);
}

std::vector<double> Trajectory::intensity_a1() const {
    std::vector<double> out(a1.size());
    for (std::size_t k = 0; k < a1.size(); ++k) out[k] = std::norm(a1[k]);
    return out;
}

std::vector<double> Trajectory::intensity_a2() const {
    std::vector<double> out(a2.size());
    for (std::size_t k = 0; k < a2.size(); ++k) out[k] = std::norm(a2[k]);
    return out;
}

std::vector<double> Trajectory::intensity_b() const {
    std::vector<double> out(b.size());
    for (std::size_t k = 0; k < b.size(); ++k) out[k] = std::norm(b[k]);
    return out;
}

ModeState default_initial_state(const SystemParams& p, const IntegratorConfig& cfg) {
    validate(p);
    const double dt = resolve_dt(p, cfg.dt);
    ModeState s;
    s.a1 = zero_solution_a1(p);
    s.a2 = cd(0.0, 0.0);
    Xoshiro256pp kick_rng(mix_seed(cfg.seed, 0xA11CEULL));
    s.b = cfg.noise_on ? noise_increment(p, dt, kick_rng) : cd(0.0, 0.0);
    s.t = 0.0;
    return s;
}

Trajectory integrate(const SystemParams& p, const ModeState& s0, const IntegratorConfig& cfg) {
    validate(p);
    const double dt = resolve_dt(p, cfg.dt);
    check_config(p, cfg, dt);

    const long long steps = std::max(1LL, std::llround(cfg.t_end / dt));
    const int stride = cfg.sample_stride;

    Trajectory traj;
    traj.params = p;
    traj.config = cfg;
    traj.config.dt = dt;
    const std::size_t n_samples = static_cast<std::size_t>(steps / stride) + 1;
    traj.t.reserve(n_samples);
    traj.a1.reserve(n_samples);
    traj.a2.reserve(n_samples);
    traj.b.reserve(n_samples);

    Xoshiro256pp rng(cfg.seed);
    const bool stochastic = cfg.noise_on && p.nbar > 0.0 && p.gammab > 0.0;

    cd a1 = s0.a1, a2 = s0.a2, b = s0.b;
    check_state(a1, a2, b, s0.t);

    for (long long step = 0;; ++step) {
        if (step % stride == 0) {
            traj.t.push_back(s0.t + static_cast<double>(step) * dt);
            traj.a1.push_back(a1);
            traj.a2.push_back(a2);
            traj.b.push_back(b);
        }
        if (step == steps) break;

        const ModeState cur{a1, a2, b, s0.t + static_cast<double>(step) * dt};
        const auto k1 = drift(cur, p);
        cd xi(0.0, 0.0);
        if (stochastic) xi = noise_increment(p, dt, rng);

        if (cfg.scheme == Scheme::EulerMaruyama) {
            a1 += k1[0] * dt;
            a2 += k1[1] * dt;
            b += k1[2] * dt + xi;
        } else {
            const ModeState pred{a1 + k1[0] * dt, a2 + k1[1] * dt, b + k1[2] * dt + xi,
                                 cur.t + dt};
            const auto k2 = drift(pred, p);
            a1 += 0.5 * dt * (k1[0] + k2[0]);
            a2 += 0.5 * dt * (k1[1] + k2[1]);
            b += 0.5 * dt * (k1[2] + k2[2]) + xi;
        }
        check_state(a1, a2, b, s0.t + static_cast<double>(step + 1) * dt);
    }

    traj.final_state = ModeState{a1, a2, b, s0.t + static_cast<double>(steps) * dt};
    return traj;
}

}  // namespace omept
