#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "omept/dynamics.hpp"

namespace omept {

// ---------------------------------------------------------------------------
// Smoothing and the mode-symmetry ratio.
// ---------------------------------------------------------------------------

// Centered boxcar average with half-width h samples; windows shrink at the
// edges. Deterministic summation order (prefix sums).
std::vector<double> smooth_boxcar(std::span<const double> x, std::size_t half_width);

struct SmoothedIntensities {
    std::vector<double> t;
    std::vector<double> i1, i2, ib;
    double window = 0.0;   // requested window (time units)
    std::size_t half_width = 0;  // realized half-width in samples
};

// window is in time units; throws WindowTooShort when it spans fewer than
// 10 sample intervals.
SmoothedIntensities smooth_intensities(const Trajectory& traj, double window);

struct RatioSeries {
    std::vector<double> t;
    std::vector<double> r;  // smoothed |a2|^2 / smoothed |b|^2
    double window = 0.0;
};

// Throws DegeneratePhononIntensity if any smoothed phonon intensity falls
// below 1e-300.
RatioSeries symmetry_ratio(const Trajectory& traj, double window);

// ---------------------------------------------------------------------------
// Hysteresis segmentation of the ratio series into phases.
// ---------------------------------------------------------------------------

enum class PhaseLabel { Symmetric, NonSymmetric, Undecided };

std::string to_string(PhaseLabel l);

struct PhaseSegment {
    double t_begin = 0.0;
    double t_end = 0.0;
    PhaseLabel label = PhaseLabel::Undecided;

    double duration() const { return t_end - t_begin; }
    bool operator==(const PhaseSegment&) const = default;
};

enum class TransitionDirection { ToSymmetric, ToNonSymmetric };

struct TransitionEvent {
    double time = 0.0;
    TransitionDirection direction = TransitionDirection::ToSymmetric;

    bool operator==(const TransitionEvent&) const = default;
};

struct PhaseSegmentation {
    std::vector<PhaseSegment> segments;     // tile [t.front(), t.back()]
    std::vector<TransitionEvent> transitions;  // S<->N boundaries only
    double hi = 0.0, lo = 0.0;
    double min_dwell = 0.0;
};

// Hysteresis state machine: enter Symmetric when r >= hi, enter NonSymmetric
// when r <= lo; the leading samples before the first decision are Undecided.
// Segments shorter than min_dwell are absorbed into their predecessor.
// Throws InvalidThresholds unless 0 < lo < hi < 1.
PhaseSegmentation segment_ratio_series(const RatioSeries& series, double hi, double lo,
                                       double min_dwell);

// Convenience: smooth, ratio, then segment with min_dwell = window.
PhaseSegmentation segment_phases(const Trajectory& traj, double window, double hi, double lo);

// ---------------------------------------------------------------------------
// Dwell and occupancy statistics.
// ---------------------------------------------------------------------------

struct TransitionStats {
    std::uint64_t to_symmetric = 0;
    std::uint64_t to_nonsymmetric = 0;
    std::vector<double> dwell_symmetric;     // completed-segment durations
    std::vector<double> dwell_nonsymmetric;
    double time_symmetric = 0.0;             // total time per label
    double time_nonsymmetric = 0.0;
    double time_undecided = 0.0;
    // Time integrals of r over each label (for phase-resolved means).
    double ratio_time_symmetric = 0.0;
    double ratio_time_nonsymmetric = 0.0;

    double total_time() const { return time_symmetric + time_nonsymmetric + time_undecided; }
    double occ_symmetric() const;
    double occ_nonsymmetric() const;
    double occ_undecided() const;
    double mean_dwell_symmetric() const;
    double mean_dwell_nonsymmetric() const;
    double median_dwell_symmetric() const;
    double median_dwell_nonsymmetric() const;
    // Time-weighted mean ratio inside each phase (NaN when unvisited).
    double mean_ratio_symmetric() const;
    double mean_ratio_nonsymmetric() const;
};

TransitionStats transition_stats(const PhaseSegmentation& seg);

// Also accumulates the time integral of r per phase from the series the
// segmentation was built on.
TransitionStats transition_stats(const PhaseSegmentation& seg, const RatioSeries& series);

// Order-independent pooling of per-trajectory statistics.
void merge(TransitionStats& into, const TransitionStats& other);

// ---------------------------------------------------------------------------
// Generation-frequency estimation from the phonon phase record.
// ---------------------------------------------------------------------------

// Unwraps arg b(t) over [t0, t1], fits a straight line by least squares and
// returns MINUS the slope (the phonon rotates as exp(-i * freq * t)).
// Throws ValidationError for an empty window and WindowNotCoherent when the
// fit residual exceeds pi/2 RMS or the slope aliases the sample rate.
double estimate_generation_frequency(const Trajectory& traj, double t0, double t1);

}  // namespace omept
