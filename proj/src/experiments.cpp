#include "omept/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace omept {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double resolve_window(const SystemParams& p, double window) {
    return window != 0.0 ? window : 20.0 / std::min(p.gamma2, p.gammab);
}

void check_band(double hi, double lo) {
    if (!(lo > 0.0 && hi > lo && hi < 1.0)) {
        throw InvalidThresholds("need 0 < lo < hi < 1, got lo = " + std::to_string(lo) +
                                ", hi = " + std::to_string(hi));
    }
}

double mean_range(const std::vector<double>& v, std::size_t from) {
    if (from >= v.size()) return kNaN;
    double s = 0.0;
    for (std::size_t i = from; i < v.size(); ++i) s += v[i];
    return s / static_cast<double>(v.size() - from);
}

}  // namespace

void RatioHistogram::add(double r) {
    if (!(r >= 0.0)) return;  // NaN or negative: not a usable sample
    auto bin = static_cast<std::size_t>(r / kBinWidth);
    if (bin > kBins) bin = kBins;
    ++counts[bin];
}

std::uint64_t RatioHistogram::total() const {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

void merge(RatioHistogram& into, const RatioHistogram& other) {
    for (std::size_t i = 0; i < into.counts.size(); ++i) into.counts[i] += other.counts[i];
}

EnsembleResult run_ensemble(const EnsembleSpec& spec_in) {
    EnsembleSpec spec = spec_in;
    validate(spec.params);
    if (spec.trajectories < 1) throw ValidationError("ensemble.trajectories", "must be >= 1");
    check_band(spec.hi, spec.lo);
    spec.window = resolve_window(spec.params, spec.window);
    if (spec.threads <= 0) {
        spec.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }

    const int n = spec.trajectories;
    struct Slot {
        TrajectorySummary summary;
        TransitionStats stats;
        RatioHistogram hist;
        bool ok = false;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    std::exception_ptr fatal;
    std::mutex fatal_mutex;

    const auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            auto& slot = slots[static_cast<std::size_t>(i)];
            slot.summary.index = i;
            const std::uint64_t seed = mix_seed(spec.integrator.seed, static_cast<std::uint64_t>(i));
            slot.summary.seed = seed;
            try {
                IntegratorConfig cfg = spec.integrator;
                cfg.seed = seed;
                const ModeState s0 = default_initial_state(spec.params, cfg);
                const Trajectory traj = integrate(spec.params, s0, cfg);
                try {
                    const RatioSeries rs = symmetry_ratio(traj, spec.window);
                    const PhaseSegmentation seg =
                        segment_ratio_series(rs, spec.hi, spec.lo, spec.window);
                    slot.stats = transition_stats(seg, rs);
                    for (double r : rs.r) slot.hist.add(r);
                } catch (const DegeneratePhononIntensity&) {
                    // The record sits at the zero state (phonon intensity
                    // underflowed): all time is non-symmetric, no transitions.
                    slot.stats = TransitionStats{};
                    slot.stats.time_nonsymmetric = traj.t.back() - traj.t.front();
                }
                slot.summary.to_symmetric = slot.stats.to_symmetric;
                slot.summary.to_nonsymmetric = slot.stats.to_nonsymmetric;
                slot.summary.occ_symmetric = slot.stats.occ_symmetric();
                slot.summary.occ_nonsymmetric = slot.stats.occ_nonsymmetric();
                slot.summary.occ_undecided = slot.stats.occ_undecided();
                slot.summary.mean_ratio_symmetric = slot.stats.mean_ratio_symmetric();
                slot.summary.mean_ratio_nonsymmetric = slot.stats.mean_ratio_nonsymmetric();
                slot.summary.final_i1 = std::norm(traj.final_state.a1);
                slot.summary.final_i2 = std::norm(traj.final_state.a2);
                slot.summary.final_ib = std::norm(traj.final_state.b);
                slot.ok = true;
            } catch (const NumericalBlowup& e) {
                slot.summary.failed = true;
                slot.summary.failure_time = e.time();
            } catch (...) {
                std::lock_guard<std::mutex> lock(fatal_mutex);
                if (!fatal) fatal = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    const int n_threads = std::min(spec.threads, n);
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (fatal) std::rethrow_exception(fatal);

    EnsembleResult res;
    res.spec = spec;
    for (const auto& slot : slots) {
        res.summaries.push_back(slot.summary);
        if (slot.summary.failed) {
            res.failed_indices.push_back(slot.summary.index);
        } else if (slot.ok) {
            merge(res.aggregate, slot.stats);
            merge(res.histogram, slot.hist);
        }
    }
    if (10 * res.failed_indices.size() > static_cast<std::size_t>(n)) {
        throw NumericalBlowup("ensemble failure budget exceeded: " +
                                  std::to_string(res.failed_indices.size()) + " of " +
                                  std::to_string(n) + " trajectories blew up",
                              slots[static_cast<std::size_t>(res.failed_indices.front())]
                                  .summary.failure_time);
    }
    return res;
}

SweepResult sweep_drive(const SweepSpec& spec_in) {
    SweepSpec spec = spec_in;
    validate(spec.params);
    if (spec.omegas.empty()) throw ValidationError("sweep.omegas", "empty drive grid");
    for (std::size_t i = 1; i < spec.omegas.size(); ++i) {
        if (!(spec.omegas[i] > spec.omegas[i - 1])) {
            throw ValidationError("sweep.omegas", "grid must be strictly increasing");
        }
    }
    if (!(spec.omegas.front() >= 0.0)) throw ValidationError("sweep.omegas", "drives must be >= 0");
    if (spec.kick < 0.0) throw ValidationError("sweep.kick", "must be >= 0");
    check_band(spec.hi, spec.lo);

    const double gmin = std::min(spec.params.gamma2, spec.params.gammab);
    if (spec.settle == 0.0) spec.settle = 50.0 / gmin;
    if (spec.measure == 0.0) spec.measure = 200.0 / gmin;
    spec.window = resolve_window(spec.params, spec.window);
    if (!(spec.settle >= 10.0 / gmin)) {
        throw ValidationError("sweep.settle", "must be >= 10 / min(gamma2, gammab)");
    }
    if (!(spec.measure > 0.0)) throw ValidationError("sweep.measure", "must be > 0");
    if (!(spec.measure >= spec.window)) {
        throw ValidationError("sweep.measure", "must cover at least one smoothing window");
    }

    SweepResult res;
    res.spec = spec;
    try {
        res.thresholds = thresholds(spec.params);
    } catch (const AsymmetricRates&) {
        res.thresholds = Thresholds{kNaN, kNaN, kNaN, false, std::nullopt};
    }

    std::uint64_t stream = 0;
    ModeState carried{};
    bool have_carry = false;

    const auto run_pass = [&](const std::vector<double>& grid) {
        std::vector<SweepPoint> pass;
        pass.reserve(grid.size());
        for (const double omega : grid) {
            SystemParams p = spec.params;
            p.omega_drive = omega;

            IntegratorConfig cfg = spec.integrator;
            cfg.t_end = spec.settle + spec.measure;
            cfg.seed = mix_seed(spec.integrator.seed, stream++);

            ModeState s0;
            if (spec.carry_state && have_carry) {
                s0 = carried;
                s0.t = 0.0;
            } else {
                s0.a1 = zero_solution_a1(p);
                s0.a2 = {0.0, 0.0};
                s0.b = {0.0, 0.0};
                s0.t = 0.0;
            }
            s0.b += spec.kick;

            const Trajectory traj = integrate(p, s0, cfg);
            carried = traj.final_state;
            have_carry = true;

            // Measurement sub-record: samples at t >= settle.
            Trajectory meas;
            meas.params = traj.params;
            meas.config = traj.config;
            meas.final_state = traj.final_state;
            for (std::size_t i = 0; i < traj.t.size(); ++i) {
                if (traj.t[i] < spec.settle) continue;
                meas.t.push_back(traj.t[i]);
                meas.a1.push_back(traj.a1[i]);
                meas.a2.push_back(traj.a2[i]);
                meas.b.push_back(traj.b[i]);
            }

            SweepPoint pt;
            pt.omega = omega;
            pt.mean_i1 = mean_range(meas.intensity_a1(), 0);
            pt.mean_i2 = mean_range(meas.intensity_a2(), 0);
            pt.mean_ib = mean_range(meas.intensity_b(), 0);
            try {
                const RatioSeries rs = symmetry_ratio(meas, spec.window);
                pt.mean_ratio = mean_range(rs.r, 0);
                const PhaseSegmentation seg =
                    segment_ratio_series(rs, spec.hi, spec.lo, spec.window);
                const TransitionStats st = transition_stats(seg);
                pt.occ_symmetric = st.occ_symmetric();
                pt.occ_nonsymmetric = st.occ_nonsymmetric();
            } catch (const DegeneratePhononIntensity&) {
                // Phonon intensity underflowed: the cell sits at the zero
                // state, which belongs to the non-symmetric phase.
                pt.mean_ratio = kNaN;
                pt.occ_symmetric = 0.0;
                pt.occ_nonsymmetric = 1.0;
            }
            try {
                pt.analytic_i2_plus = nonzero_solution(p, Branch::Plus).a2_intensity;
            } catch (const Error&) {
                pt.analytic_i2_plus = kNaN;
            }
            pass.push_back(pt);
        }
        return pass;
    };

    if (spec.direction == SweepDirection::Up || spec.direction == SweepDirection::Both) {
        res.up = run_pass(spec.omegas);
    }
    if (spec.direction == SweepDirection::Down || spec.direction == SweepDirection::Both) {
        std::vector<double> rev(spec.omegas.rbegin(), spec.omegas.rend());
        res.down = run_pass(rev);
    }
    return res;
}

double& param_field(SystemParams& p, const std::string& name) {
    if (name == "gamma1") return p.gamma1;
    if (name == "gamma2") return p.gamma2;
    if (name == "gammab") return p.gammab;
    if (name == "dw1") return p.dw1;
    if (name == "dw2") return p.dw2;
    if (name == "wb") return p.wb;
    if (name == "g") return p.g;
    if (name == "omega" || name == "omega_drive") return p.omega_drive;
    if (name == "nbar") return p.nbar;
    throw ValidationError("map.axis", "unknown parameter name '" + name + "'");
}

RegimeMap regime_map(const SystemParams& base, const AxisSpec& axis1, const AxisSpec& axis2) {
    if (axis1.values.empty() || axis2.values.empty()) {
        throw ValidationError("map.axis", "empty axis grid");
    }
    {
        SystemParams probe = base;  // reject unknown axis names up front
        param_field(probe, axis1.param);
        param_field(probe, axis2.param);
    }

    RegimeMap map;
    map.axis1 = axis1;
    map.axis2 = axis2;
    map.cells.reserve(axis1.values.size() * axis2.values.size());
    for (const double v1 : axis1.values) {
        for (const double v2 : axis2.values) {
            MapCell cell;
            cell.v1 = v1;
            cell.v2 = v2;
            SystemParams p = base;
            param_field(p, axis1.param) = v1;
            param_field(p, axis2.param) = v2;
            try {
                cell.regime = classify_regime(p);
                const Thresholds th = thresholds(p);
                cell.omega_ex = th.omega_ex;
                cell.omega_ep = th.omega_ep;
                cell.omega_th = th.omega_th;
            } catch (const Error&) {
                cell.regime = std::nullopt;
                cell.omega_ex = cell.omega_ep = cell.omega_th = kNaN;
            }
            map.cells.push_back(cell);
        }
    }
    return map;
}

}  // namespace omept
