#include "omept/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <ostream>
#include <sstream>

namespace omept {

namespace {

using ojson = nlohmann::ordered_json;

ojson complex_json(const std::complex<double>& z) {
    return ojson{{"re", z.real()}, {"im", z.imag()}};
}

void write_common_header(std::ostream& os, const RunConfig& cfg) {
    os << "# " << kCodeVersion << "\n";
    os << "# rng: " << kRngDescription << "\n";
    os << "# seed: " << cfg.integrator.seed << "\n";
    os << "# units: rates and frequencies in w0; time in 1/w0; intensities in quanta\n";
    std::istringstream conf(serialize_config(cfg));
    std::string line;
    while (std::getline(conf, line)) os << "# config: " << line << "\n";
}

std::vector<double> ratio_column(const Trajectory& traj, double window) {
    try {
        return symmetry_ratio(traj, window).r;
    } catch (const Error&) {
        return std::vector<double>(traj.size(), std::numeric_limits<double>::quiet_NaN());
    }
}

ojson stats_json(const TransitionStats& st) {
    ojson j;
    j["to_symmetric"] = st.to_symmetric;
    j["to_nonsymmetric"] = st.to_nonsymmetric;
    j["dwell_symmetric"] = st.dwell_symmetric;
    j["dwell_nonsymmetric"] = st.dwell_nonsymmetric;
    j["mean_dwell_symmetric"] = st.mean_dwell_symmetric();
    j["mean_dwell_nonsymmetric"] = st.mean_dwell_nonsymmetric();
    j["median_dwell_symmetric"] = st.median_dwell_symmetric();
    j["median_dwell_nonsymmetric"] = st.median_dwell_nonsymmetric();
    j["occ_symmetric"] = st.occ_symmetric();
    j["occ_nonsymmetric"] = st.occ_nonsymmetric();
    j["occ_undecided"] = st.occ_undecided();
    j["mean_ratio_symmetric"] = st.mean_ratio_symmetric();
    j["mean_ratio_nonsymmetric"] = st.mean_ratio_nonsymmetric();
    return j;
}

ojson thresholds_json(const Thresholds& th) {
    ojson j;
    j["omega_ex"] = th.omega_ex;
    j["omega_ep"] = th.omega_ep;
    j["omega_th"] = th.omega_th;
    j["bistable"] = th.bistable;
    if (th.coexistence_window) {
        j["coexistence_window"] = ojson::array({th.coexistence_window->first,
                                                th.coexistence_window->second});
    } else {
        j["coexistence_window"] = nullptr;
    }
    return j;
}

ojson sweep_points_json(const std::vector<SweepPoint>& pts) {
    ojson arr = ojson::array();
    for (const auto& pt : pts) {
        ojson j;
        j["omega"] = pt.omega;
        j["mean_i1"] = pt.mean_i1;
        j["mean_i2"] = pt.mean_i2;
        j["mean_ib"] = pt.mean_ib;
        j["mean_ratio"] = pt.mean_ratio;
        j["occ_symmetric"] = pt.occ_symmetric;
        j["occ_nonsymmetric"] = pt.occ_nonsymmetric;
        j["analytic_i2_plus"] = pt.analytic_i2_plus;
        arr.push_back(std::move(j));
    }
    return arr;
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const RunConfig& cfg) {
    write_common_header(os, cfg);
    const auto i1 = traj.intensity_a1();
    const auto i2 = traj.intensity_a2();
    const auto ib = traj.intensity_b();
    const auto ratio = ratio_column(traj, cfg.window);
    os << "t,re_a1,im_a1,re_a2,im_a2,re_b,im_b,i1,i2,ib,ratio\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        os << format_double(traj.t[k]) << ',' << format_double(traj.a1[k].real()) << ','
           << format_double(traj.a1[k].imag()) << ',' << format_double(traj.a2[k].real()) << ','
           << format_double(traj.a2[k].imag()) << ',' << format_double(traj.b[k].real()) << ','
           << format_double(traj.b[k].imag()) << ',' << format_double(i1[k]) << ','
           << format_double(i2[k]) << ',' << format_double(ib[k]) << ','
           << format_double(ratio[k]) << "\n";
    }
}

void write_ensemble_csv(std::ostream& os, const EnsembleResult& res, const RunConfig& cfg) {
    write_common_header(os, cfg);
    const auto& agg = res.aggregate;
    os << "# aggregate: to_symmetric = " << agg.to_symmetric << "\n";
    os << "# aggregate: to_nonsymmetric = " << agg.to_nonsymmetric << "\n";
    os << "# aggregate: occ_symmetric = " << format_double(agg.occ_symmetric()) << "\n";
    os << "# aggregate: occ_nonsymmetric = " << format_double(agg.occ_nonsymmetric()) << "\n";
    os << "# aggregate: occ_undecided = " << format_double(agg.occ_undecided()) << "\n";
    os << "# aggregate: mean_dwell_symmetric = " << format_double(agg.mean_dwell_symmetric())
       << "\n";
    os << "# aggregate: mean_dwell_nonsymmetric = "
       << format_double(agg.mean_dwell_nonsymmetric()) << "\n";
    os << "# aggregate: median_dwell_symmetric = "
       << format_double(agg.median_dwell_symmetric()) << "\n";
    os << "# aggregate: median_dwell_nonsymmetric = "
       << format_double(agg.median_dwell_nonsymmetric()) << "\n";
    os << "# aggregate: mean_ratio_symmetric = " << format_double(agg.mean_ratio_symmetric())
       << "\n";
    os << "# aggregate: mean_ratio_nonsymmetric = "
       << format_double(agg.mean_ratio_nonsymmetric()) << "\n";
    for (std::size_t i = 0; i < res.histogram.counts.size(); ++i) {
        const double lo = static_cast<double>(i) * RatioHistogram::kBinWidth;
        os << "# hist: " << format_double(lo) << ' '
           << (i < RatioHistogram::kBins ? format_double(lo + RatioHistogram::kBinWidth)
                                         : std::string("inf"))
           << ' ' << res.histogram.counts[i] << "\n";
    }
    os << "index,seed,failed,to_symmetric,to_nonsymmetric,occ_symmetric,occ_nonsymmetric,"
          "occ_undecided,mean_ratio_symmetric,mean_ratio_nonsymmetric,final_i1,final_i2,"
          "final_ib\n";
    for (const auto& s : res.summaries) {
        os << s.index << ',' << s.seed << ',' << (s.failed ? 1 : 0) << ',' << s.to_symmetric
           << ',' << s.to_nonsymmetric << ',' << format_double(s.occ_symmetric) << ','
           << format_double(s.occ_nonsymmetric) << ',' << format_double(s.occ_undecided) << ','
           << format_double(s.mean_ratio_symmetric) << ','
           << format_double(s.mean_ratio_nonsymmetric) << ',' << format_double(s.final_i1)
           << ',' << format_double(s.final_i2) << ',' << format_double(s.final_ib) << "\n";
    }
}

void write_sweep_csv(std::ostream& os, const SweepResult& res, const RunConfig& cfg) {
    write_common_header(os, cfg);
    os << "omega,mean_i1,mean_i2,mean_ib,mean_ratio,occ_sym,occ_nonsym,analytic_i2_plus,"
          "omega_ex,omega_ep,omega_th\n";
    const auto write_pass = [&](const char* label, const std::vector<SweepPoint>& pts) {
        if (pts.empty()) return;
        os << "# pass: " << label << "\n";
        for (const auto& pt : pts) {
            os << format_double(pt.omega) << ',' << format_double(pt.mean_i1) << ','
               << format_double(pt.mean_i2) << ',' << format_double(pt.mean_ib) << ','
               << format_double(pt.mean_ratio) << ',' << format_double(pt.occ_symmetric) << ','
               << format_double(pt.occ_nonsymmetric) << ','
               << format_double(pt.analytic_i2_plus) << ','
               << format_double(res.thresholds.omega_ex) << ','
               << format_double(res.thresholds.omega_ep) << ','
               << format_double(res.thresholds.omega_th) << "\n";
        }
    };
    write_pass("up", res.up);
    write_pass("down", res.down);
}

void write_map_csv(std::ostream& os, const RegimeMap& map, const RunConfig& cfg) {
    write_common_header(os, cfg);
    os << "# axis1: " << map.axis1.param << "\n";
    os << "# axis2: " << map.axis2.param << "\n";
    os << "axis1,axis2,regime,omega_ex,omega_ep,omega_th\n";
    for (const auto& cell : map.cells) {
        os << format_double(cell.v1) << ',' << format_double(cell.v2) << ','
           << (cell.regime ? to_string(*cell.regime) : std::string("Invalid")) << ','
           << format_double(cell.omega_ex) << ',' << format_double(cell.omega_ep) << ','
           << format_double(cell.omega_th) << "\n";
    }
}

ojson analysis_document(const RunConfig& cfg) {
    const SystemParams& p = cfg.params;
    ojson doc;
    doc["derived"] = ojson{};
    const auto d = derived_quantities(p);
    doc["derived"]["kappa"] = complex_json(d.kappa);
    doc["derived"]["delta"] = d.delta;
    doc["derived"]["gamma_common"] =
        d.gamma_common ? ojson(*d.gamma_common) : ojson(nullptr);
    doc["generation_frequency"] = generation_frequency(p);

    if (symmetric_rates(p)) {
        doc["thresholds"] = thresholds_json(thresholds(p));
        doc["regime"] = to_string(classify_regime(p));
        const auto la = linearize_zero_solution(p);
        ojson lin;
        lin["matrix"] = ojson::array({complex_json(la.matrix[0]), complex_json(la.matrix[1]),
                                      complex_json(la.matrix[2]), complex_json(la.matrix[3])});
        lin["lambda_plus"] = complex_json(la.lambda_plus);
        lin["lambda_minus"] = complex_json(la.lambda_minus);
        lin["e_plus"] = ojson::array({complex_json(la.e_plus[0]), complex_json(la.e_plus[1])});
        lin["e_minus"] =
            ojson::array({complex_json(la.e_minus[0]), complex_json(la.e_minus[1])});
        lin["symmetry"] = to_string(la.symmetry);
        doc["linearization"] = std::move(lin);
    } else {
        doc["thresholds"] = nullptr;
        doc["regime"] = nullptr;
        doc["linearization"] = nullptr;
        doc["note"] = "gamma2 != gammab: thresholds and symmetry classification undefined";
    }

    ojson states = ojson::array();
    {
        const auto st = zero_solution(p);
        ojson j;
        j["kind"] = "zero";
        j["i1"] = st.a1_intensity;
        j["i2"] = st.a2_intensity;
        j["ib"] = st.b_intensity;
        j["generation_freq"] = st.generation_freq;
        j["stable"] = st.stable;
        states.push_back(std::move(j));
    }
    for (const auto& [branch, name] :
         {std::pair{Branch::Plus, "nonzero_plus"}, std::pair{Branch::Minus, "nonzero_minus"}}) {
        ojson j;
        j["kind"] = name;
        try {
            const auto st = nonzero_solution(p, branch);
            const auto fp = nonzero_fixed_point(p, branch);
            j["exists"] = true;
            j["i1"] = st.a1_intensity;
            j["i2"] = st.a2_intensity;
            j["ib"] = st.b_intensity;
            j["generation_freq"] = st.generation_freq;
            j["stable"] = st.stable;
            j["a1"] = complex_json(fp.a1);
            j["a2"] = complex_json(fp.a2);
            j["b"] = complex_json(fp.b);
            j["fixed_point_residual"] = fp.residual;
        } catch (const Error& e) {
            j["exists"] = false;
            j["reason"] = e.what();
        }
        states.push_back(std::move(j));
    }
    doc["steady_states"] = std::move(states);
    return doc;
}

ojson trajectory_json(const Trajectory& traj, const RunConfig& cfg) {
    ojson j;
    j["n_samples"] = traj.size();
    j["sample_dt"] = traj.sample_dt();
    j["t"] = traj.t;
    auto dump = [&](const char* re, const char* im, const std::vector<std::complex<double>>& v) {
        std::vector<double> res(v.size()), ims(v.size());
        for (std::size_t k = 0; k < v.size(); ++k) {
            res[k] = v[k].real();
            ims[k] = v[k].imag();
        }
        j[re] = std::move(res);
        j[im] = std::move(ims);
    };
    dump("re_a1", "im_a1", traj.a1);
    dump("re_a2", "im_a2", traj.a2);
    dump("re_b", "im_b", traj.b);
    j["i1"] = traj.intensity_a1();
    j["i2"] = traj.intensity_a2();
    j["ib"] = traj.intensity_b();
    j["ratio"] = ratio_column(traj, cfg.window);
    return j;
}

ojson ensemble_json(const EnsembleResult& res, const RunConfig& cfg) {
    (void)cfg;
    ojson j;
    j["trajectories"] = res.spec.trajectories;
    j["threads"] = res.spec.threads;
    j["window"] = res.spec.window;
    j["hi"] = res.spec.hi;
    j["lo"] = res.spec.lo;
    j["aggregate"] = stats_json(res.aggregate);
    ojson hist;
    hist["bin_width"] = RatioHistogram::kBinWidth;
    hist["counts"] = res.histogram.counts;
    j["ratio_histogram"] = std::move(hist);
    ojson arr = ojson::array();
    for (const auto& s : res.summaries) {
        ojson e;
        e["index"] = s.index;
        e["seed"] = s.seed;
        e["failed"] = s.failed;
        if (s.failed) e["failure_time"] = s.failure_time;
        e["to_symmetric"] = s.to_symmetric;
        e["to_nonsymmetric"] = s.to_nonsymmetric;
        e["occ_symmetric"] = s.occ_symmetric;
        e["occ_nonsymmetric"] = s.occ_nonsymmetric;
        e["occ_undecided"] = s.occ_undecided;
        e["mean_ratio_symmetric"] = s.mean_ratio_symmetric;
        e["mean_ratio_nonsymmetric"] = s.mean_ratio_nonsymmetric;
        e["final_i1"] = s.final_i1;
        e["final_i2"] = s.final_i2;
        e["final_ib"] = s.final_ib;
        arr.push_back(std::move(e));
    }
    j["summaries"] = std::move(arr);
    j["failed_indices"] = res.failed_indices;
    return j;
}

ojson sweep_json(const SweepResult& res, const RunConfig& cfg) {
    (void)cfg;
    ojson j;
    j["thresholds"] = thresholds_json(res.thresholds);
    j["up"] = sweep_points_json(res.up);
    j["down"] = sweep_points_json(res.down);
    return j;
}

ojson map_json(const RegimeMap& map, const RunConfig& cfg) {
    (void)cfg;
    ojson j;
    j["axis1"] = ojson{{"param", map.axis1.param}, {"values", map.axis1.values}};
    j["axis2"] = ojson{{"param", map.axis2.param}, {"values", map.axis2.values}};
    ojson cells = ojson::array();
    for (const auto& cell : map.cells) {
        ojson e;
        e["v1"] = cell.v1;
        e["v2"] = cell.v2;
        e["regime"] = cell.regime ? ojson(to_string(*cell.regime)) : ojson(nullptr);
        e["omega_ex"] = cell.omega_ex;
        e["omega_ep"] = cell.omega_ep;
        e["omega_th"] = cell.omega_th;
        cells.push_back(std::move(e));
    }
    j["cells"] = std::move(cells);
    return j;
}

ojson envelope(const RunConfig& cfg, const std::string& kind, ojson payload) {
    ojson env;
    env["schema_version"] = cfg.schema_version;
    env["code_version"] = kCodeVersion;
    env["rng"] = kRngDescription;
    env["master_seed"] = cfg.integrator.seed;
    env["kind"] = kind;
    env["config"] = serialize_config(cfg);
    env["created_unix"] = static_cast<std::int64_t>(std::time(nullptr));
    env["payload"] = std::move(payload);
    return env;
}

}  // namespace omept
