#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "omept/analysis.hpp"
#include "omept/dynamics.hpp"
#include "omept/model.hpp"

namespace omept {

// ---------------------------------------------------------------------------
// Ensembles of independent trajectories.
// ---------------------------------------------------------------------------

struct EnsembleSpec {
    SystemParams params;
    IntegratorConfig integrator;  // seed field is the MASTER seed
    int trajectories = 1;
    int threads = 0;              // 0 = hardware concurrency
    double window = 0.0;          // 0 = 20 / min(gamma2, gammab)
    double hi = 0.5;
    double lo = 0.1;
};

// Pooled histogram of the smoothed symmetry ratio r.
struct RatioHistogram {
    static constexpr std::size_t kBins = 60;     // [0, 1.5) in 0.025 steps
    static constexpr double kBinWidth = 0.025;
    std::array<std::uint64_t, kBins + 1> counts{};  // last bin: r >= 1.5

    void add(double r);
    std::uint64_t total() const;
};

void merge(RatioHistogram& into, const RatioHistogram& other);

struct TrajectorySummary {
    int index = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    double failure_time = 0.0;   // meaningful when failed
    std::uint64_t to_symmetric = 0;
    std::uint64_t to_nonsymmetric = 0;
    double occ_symmetric = 0.0;
    double occ_nonsymmetric = 0.0;
    double occ_undecided = 0.0;
    double mean_ratio_symmetric = 0.0;     // NaN when phase unvisited
    double mean_ratio_nonsymmetric = 0.0;  // NaN when phase unvisited
    double final_i1 = 0.0, final_i2 = 0.0, final_ib = 0.0;
};

struct EnsembleResult {
    EnsembleSpec spec;            // as resolved (window, threads filled in)
    TransitionStats aggregate;    // pooled over successful trajectories
    RatioHistogram histogram;     // pooled r samples
    std::vector<TrajectorySummary> summaries;  // one per trajectory, in order
    std::vector<int> failed_indices;
};

// Runs spec.trajectories independent paths with per-trajectory seeds
// mix_seed(master, index), initial state default_initial_state. Analysis
// (ratio, segmentation, stats) uses spec.window/hi/lo with min_dwell =
// window. Individual NumericalBlowup aborts only that trajectory; if more
// than 10% fail, the whole ensemble throws NumericalBlowup.
EnsembleResult run_ensemble(const EnsembleSpec& spec);

// ---------------------------------------------------------------------------
// Drive-amplitude sweeps (hysteresis scans).
// ---------------------------------------------------------------------------

enum class SweepDirection { Up, Down, Both };

struct SweepSpec {
    SystemParams params;          // omega_drive is overridden per grid point
    std::vector<double> omegas;   // strictly increasing grid
    SweepDirection direction = SweepDirection::Up;
    bool carry_state = true;      // warm-start from the previous endpoint
    double settle = 0.0;          // 0 = 50 / min(gamma2, gammab)
    double measure = 0.0;         // 0 = 200 / min(gamma2, gammab)
    double kick = 1e-6;           // deterministic |b| kick at each grid point
    IntegratorConfig integrator;  // t_end ignored; seed is the master seed
    double window = 0.0;          // 0 = 20 / min(gamma2, gammab)
    double hi = 0.5;
    double lo = 0.1;
};

struct SweepPoint {
    double omega = 0.0;
    double mean_i1 = 0.0, mean_i2 = 0.0, mean_ib = 0.0;
    double mean_ratio = 0.0;
    double occ_symmetric = 0.0;
    double occ_nonsymmetric = 0.0;
    double analytic_i2_plus = 0.0;  // NaN where the Plus branch does not exist
};

struct SweepResult {
    SweepSpec spec;               // as resolved
    std::vector<SweepPoint> up;   // empty unless direction covers it
    std::vector<SweepPoint> down; // stored in scan order (descending omega)
    Thresholds thresholds;
};

// Scans the drive grid in the requested direction(s); Both chains Up then
// Down, carrying state across the turn-around when carry_state is set.
// At each point the state (carried or cold) gets the deterministic kick,
// settles for `settle`, then statistics are taken over `measure`.
SweepResult sweep_drive(const SweepSpec& spec);

// ---------------------------------------------------------------------------
// Analytic regime maps over two parameter axes.
// ---------------------------------------------------------------------------

struct AxisSpec {
    std::string param;            // SystemParams field name, e.g. "omega"
    std::vector<double> values;
};

struct MapCell {
    double v1 = 0.0, v2 = 0.0;
    std::optional<Regime> regime;  // empty when the cell's params are invalid
    double omega_ex = 0.0, omega_ep = 0.0, omega_th = 0.0;  // NaN when invalid
};

struct RegimeMap {
    AxisSpec axis1, axis2;
    std::vector<MapCell> cells;   // axis1-major order
};

// Purely analytic: classify_regime + thresholds per cell. Cells whose
// parameter combination fails validation (or breaks rate symmetry) are
// recorded with an empty regime rather than aborting the map.
RegimeMap regime_map(const SystemParams& base, const AxisSpec& axis1, const AxisSpec& axis2);

// Writable access to a SystemParams field by config-style name
// ("gamma1", "gamma2", "gammab", "dw1", "dw2", "wb", "g", "omega", "nbar").
// Throws ValidationError for unknown names.
double& param_field(SystemParams& p, const std::string& name);

}  // namespace omept
