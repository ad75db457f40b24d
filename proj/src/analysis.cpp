#include "omept/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace omept {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double median_of(std::vector<double> v) {
    if (v.empty()) return kNaN;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return kNaN;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

std::string to_string(PhaseLabel l) {
    switch (l) {
        case PhaseLabel::Symmetric: return "Symmetric";
        case PhaseLabel::NonSymmetric: return "NonSymmetric";
        case PhaseLabel::Undecided: return "Undecided";
    }
    return "?";
}

std::vector<double> smooth_boxcar(std::span<const double> x, std::size_t half_width) {
    const std::size_t n = x.size();
    std::vector<double> out(n);
    if (n == 0) return out;
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i >= half_width ? i - half_width : 0;
        const std::size_t b = std::min(n - 1, i + half_width);
        out[i] = (prefix[b + 1] - prefix[a]) / static_cast<double>(b - a + 1);
    }
    return out;
}

SmoothedIntensities smooth_intensities(const Trajectory& traj, double window) {
    const double sdt = traj.sample_dt();
    if (!(window >= 10.0 * sdt)) {
        throw WindowTooShort("smoothing window " + std::to_string(window) +
                             " spans fewer than 10 sample intervals of " + std::to_string(sdt));
    }
    const auto half_width = static_cast<std::size_t>(std::llround(window / (2.0 * sdt)));
    SmoothedIntensities sm;
    sm.t = traj.t;
    sm.i1 = smooth_boxcar(traj.intensity_a1(), half_width);
    sm.i2 = smooth_boxcar(traj.intensity_a2(), half_width);
    sm.ib = smooth_boxcar(traj.intensity_b(), half_width);
    sm.window = window;
    sm.half_width = half_width;
    return sm;
}

RatioSeries symmetry_ratio(const Trajectory& traj, double window) {
    const auto sm = smooth_intensities(traj, window);
    RatioSeries rs;
    rs.t = sm.t;
    rs.window = window;
    rs.r.resize(sm.t.size());
    for (std::size_t i = 0; i < sm.t.size(); ++i) {
        if (sm.ib[i] < 1e-300) {
            throw DegeneratePhononIntensity("smoothed phonon intensity underflowed at t = " +
                                            std::to_string(sm.t[i]));
        }
        rs.r[i] = sm.i2[i] / sm.ib[i];
    }
    return rs;
}

PhaseSegmentation segment_ratio_series(const RatioSeries& series, double hi, double lo,
                                       double min_dwell) {
    if (!(lo > 0.0 && hi > lo && hi < 1.0)) {
        throw InvalidThresholds("need 0 < lo < hi < 1, got lo = " + std::to_string(lo) +
                                ", hi = " + std::to_string(hi));
    }
    if (series.t.empty()) throw ValidationError("series", "empty ratio series");

    // Raw hysteresis labels.
    const std::size_t n = series.t.size();
    std::vector<PhaseLabel> label(n);
    PhaseLabel state = PhaseLabel::Undecided;
    for (std::size_t i = 0; i < n; ++i) {
        if (series.r[i] >= hi) state = PhaseLabel::Symmetric;
        else if (series.r[i] <= lo) state = PhaseLabel::NonSymmetric;
        label[i] = state;
    }

    // Raw segments with midpoint boundaries, tiling [t.front(), t.back()].
    std::vector<PhaseSegment> raw;
    std::size_t start = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i == n || label[i] != label[start]) {
            PhaseSegment seg;
            seg.t_begin = start == 0 ? series.t.front()
                                     : 0.5 * (series.t[start - 1] + series.t[start]);
            seg.t_end = i == n ? series.t.back() : 0.5 * (series.t[i - 1] + series.t[i]);
            seg.label = label[start];
            raw.push_back(seg);
            start = i;
        }
    }

    // Absorb segments shorter than min_dwell into their predecessor (the
    // first segment merges forward), then coalesce equal neighbors.
    std::vector<PhaseSegment> segs;
    double pending_begin = raw.front().t_begin;
    bool pending = false;
    for (const auto& seg : raw) {
        PhaseSegment cur = seg;
        if (pending) {
            cur.t_begin = pending_begin;
            pending = false;
        }
        const bool short_seg = cur.duration() < min_dwell;
        if (segs.empty()) {
            if (short_seg && raw.size() > 1) {
                pending = true;
                pending_begin = cur.t_begin;
            } else {
                segs.push_back(cur);
            }
        } else if (short_seg) {
            segs.back().t_end = cur.t_end;
        } else if (cur.label == segs.back().label) {
            segs.back().t_end = cur.t_end;
        } else {
            segs.push_back(cur);
        }
    }
    if (segs.empty()) {
        // Everything was short; emit one segment with the longest raw label.
        const auto longest = std::max_element(
            raw.begin(), raw.end(),
            [](const PhaseSegment& a, const PhaseSegment& b) { return a.duration() < b.duration(); });
        segs.push_back({series.t.front(), series.t.back(), longest->label});
    } else {
        // Re-coalesce in case absorption created equal neighbors.
        std::vector<PhaseSegment> coalesced;
        for (const auto& seg : segs) {
            if (!coalesced.empty() && coalesced.back().label == seg.label) {
                coalesced.back().t_end = seg.t_end;
            } else {
                coalesced.push_back(seg);
            }
        }
        segs = std::move(coalesced);
    }

    PhaseSegmentation out;
    out.segments = std::move(segs);
    out.hi = hi;
    out.lo = lo;
    out.min_dwell = min_dwell;
    for (std::size_t i = 1; i < out.segments.size(); ++i) {
        const auto a = out.segments[i - 1].label;
        const auto b = out.segments[i].label;
        const bool s_to_n = a == PhaseLabel::Symmetric && b == PhaseLabel::NonSymmetric;
        const bool n_to_s = a == PhaseLabel::NonSymmetric && b == PhaseLabel::Symmetric;
        if (s_to_n || n_to_s) {
            out.transitions.push_back({out.segments[i].t_begin,
                                       n_to_s ? TransitionDirection::ToSymmetric
                                              : TransitionDirection::ToNonSymmetric});
        }
    }
    return out;
}

PhaseSegmentation segment_phases(const Trajectory& traj, double window, double hi, double lo) {
    return segment_ratio_series(symmetry_ratio(traj, window), hi, lo, window);
}

double TransitionStats::occ_symmetric() const {
    const double tot = total_time();
    return tot > 0.0 ? time_symmetric / tot : 0.0;
}

double TransitionStats::occ_nonsymmetric() const {
    const double tot = total_time();
    return tot > 0.0 ? time_nonsymmetric / tot : 0.0;
}

double TransitionStats::occ_undecided() const {
    const double tot = total_time();
    return tot > 0.0 ? time_undecided / tot : 0.0;
}

double TransitionStats::mean_dwell_symmetric() const { return mean_of(dwell_symmetric); }
double TransitionStats::mean_dwell_nonsymmetric() const { return mean_of(dwell_nonsymmetric); }
double TransitionStats::median_dwell_symmetric() const { return median_of(dwell_symmetric); }
double TransitionStats::median_dwell_nonsymmetric() const { return median_of(dwell_nonsymmetric); }

double TransitionStats::mean_ratio_symmetric() const {
    return time_symmetric > 0.0 ? ratio_time_symmetric / time_symmetric : kNaN;
}

double TransitionStats::mean_ratio_nonsymmetric() const {
    return time_nonsymmetric > 0.0 ? ratio_time_nonsymmetric / time_nonsymmetric : kNaN;
}

TransitionStats transition_stats(const PhaseSegmentation& seg) {
    TransitionStats st;
    for (const auto& ev : seg.transitions) {
        if (ev.direction == TransitionDirection::ToSymmetric) ++st.to_symmetric;
        else ++st.to_nonsymmetric;
    }
    const std::size_t n = seg.segments.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = seg.segments[i];
        switch (s.label) {
            case PhaseLabel::Symmetric: st.time_symmetric += s.duration(); break;
            case PhaseLabel::NonSymmetric: st.time_nonsymmetric += s.duration(); break;
            case PhaseLabel::Undecided: st.time_undecided += s.duration(); break;
        }
        const bool interior = i > 0 && i + 1 < n;  // both boundaries observed
        if (!interior) continue;
        if (s.label == PhaseLabel::Symmetric) st.dwell_symmetric.push_back(s.duration());
        if (s.label == PhaseLabel::NonSymmetric) st.dwell_nonsymmetric.push_back(s.duration());
    }
    return st;
}

TransitionStats transition_stats(const PhaseSegmentation& seg, const RatioSeries& series) {
    TransitionStats st = transition_stats(seg);
    const std::size_t n = series.t.size();
    const double sdt = n > 1 ? (series.t.back() - series.t.front()) / static_cast<double>(n - 1)
                             : 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k + 1 < seg.segments.size() && series.t[i] > seg.segments[k].t_end) ++k;
        const double w = sdt > 0.0 ? sdt : 1.0;
        switch (seg.segments[k].label) {
            case PhaseLabel::Symmetric: st.ratio_time_symmetric += series.r[i] * w; break;
            case PhaseLabel::NonSymmetric: st.ratio_time_nonsymmetric += series.r[i] * w; break;
            case PhaseLabel::Undecided: break;
        }
    }
    return st;
}

void merge(TransitionStats& into, const TransitionStats& other) {
    into.to_symmetric += other.to_symmetric;
    into.to_nonsymmetric += other.to_nonsymmetric;
    into.dwell_symmetric.insert(into.dwell_symmetric.end(), other.dwell_symmetric.begin(),
                                other.dwell_symmetric.end());
    into.dwell_nonsymmetric.insert(into.dwell_nonsymmetric.end(),
                                   other.dwell_nonsymmetric.begin(),
                                   other.dwell_nonsymmetric.end());
    into.time_symmetric += other.time_symmetric;
    into.time_nonsymmetric += other.time_nonsymmetric;
    into.time_undecided += other.time_undecided;
    into.ratio_time_symmetric += other.ratio_time_symmetric;
    into.ratio_time_nonsymmetric += other.ratio_time_nonsymmetric;
}

double estimate_generation_frequency(const Trajectory& traj, double t0, double t1) {
    if (!(t1 > t0)) throw ValidationError("window", "need t1 > t0");
    std::vector<double> ts, phases;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        if (traj.t[i] < t0 || traj.t[i] > t1) continue;
        ts.push_back(traj.t[i]);
        phases.push_back(std::arg(traj.b[i]));
    }
    if (ts.size() < 4) {
        throw ValidationError("window", "fewer than 4 samples in [t0, t1]");
    }

    // Unwrap: shift each step to the nearest equivalent within pi.
    for (std::size_t i = 1; i < phases.size(); ++i) {
        double d = phases[i] - phases[i - 1];
        d -= 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi));
        phases[i] = phases[i - 1] + d;
    }

    const auto n = static_cast<double>(ts.size());
    double tm = 0.0, pm = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        tm += ts[i];
        pm += phases[i];
    }
    tm /= n;
    pm /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        num += (ts[i] - tm) * (phases[i] - pm);
        den += (ts[i] - tm) * (ts[i] - tm);
    }
    if (den == 0.0) throw ValidationError("window", "degenerate time axis");
    const double slope = num / den;

    double ss = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double fit = pm + slope * (ts[i] - tm);
        ss += (phases[i] - fit) * (phases[i] - fit);
    }
    const double rms = std::sqrt(ss / n);
    if (rms > 0.5 * std::numbers::pi) {
        throw WindowNotCoherent("phase fit RMS residual " + std::to_string(rms) +
                                " rad exceeds pi/2");
    }
    const double sdt = (ts.back() - ts.front()) / (n - 1.0);
    if (std::abs(slope) * sdt >= std::numbers::pi) {
        throw WindowNotCoherent("phase advances faster than the sample rate resolves");
    }
    return -slope;
}

}  // namespace omept
