#include "omept/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "omept/model.hpp"

namespace omept {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, int line) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') {
        throw ParseError(line, "expected a number, got '" + v + "'");
    }
    return x;
}

long long parse_int(const std::string& v, int line) {
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') {
        throw ParseError(line, "expected an integer, got '" + v + "'");
    }
    return x;
}

std::uint64_t parse_u64(const std::string& v, int line) {
    char* end = nullptr;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0' || v.find('-') != std::string::npos) {
        throw ParseError(line, "expected an unsigned integer, got '" + v + "'");
    }
    return x;
}

bool parse_bool(const std::string& v, int line) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ParseError(line, "expected true/false, got '" + v + "'");
}

std::string fmt(double x) {
    char buf[40];
    if (std::isnan(x)) return "nan";
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

const char* scheme_name(Scheme s) {
    return s == Scheme::StochasticHeun ? "heun" : "euler";
}

const char* direction_name(SweepDirection d) {
    switch (d) {
        case SweepDirection::Up: return "up";
        case SweepDirection::Down: return "down";
        case SweepDirection::Both: return "both";
    }
    return "?";
}

const char* init_name(InitKind k) {
    switch (k) {
        case InitKind::Zero: return "zero";
        case InitKind::ZeroKick: return "zero_kick";
        case InitKind::Plus: return "plus";
        case InitKind::Custom: return "custom";
    }
    return "?";
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    if (n == 1) {
        out.push_back(lo);
        return out;
    }
    for (int i = 0; i < n; ++i) {
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return out;
}

}  // namespace

double default_window(const SystemParams& p) {
    return 20.0 / std::min(p.gamma2, p.gammab);
}

RunConfig parse_config(std::istream& in, const std::string& name) {
    RunConfig c;

    using Setter = std::function<void(const std::string&, int)>;
    const std::map<std::string, Setter> setters = {
        {"schema_version", [&](const std::string& v, int l) { c.schema_version = static_cast<int>(parse_int(v, l)); }},
        {"params.gamma1", [&](const std::string& v, int l) { c.params.gamma1 = parse_double(v, l); }},
        {"params.gamma2", [&](const std::string& v, int l) { c.params.gamma2 = parse_double(v, l); }},
        {"params.gammab", [&](const std::string& v, int l) { c.params.gammab = parse_double(v, l); }},
        {"params.dw1", [&](const std::string& v, int l) { c.params.dw1 = parse_double(v, l); }},
        {"params.dw2", [&](const std::string& v, int l) { c.params.dw2 = parse_double(v, l); }},
        {"params.wb", [&](const std::string& v, int l) { c.params.wb = parse_double(v, l); }},
        {"params.g", [&](const std::string& v, int l) { c.params.g = parse_double(v, l); }},
        {"params.omega", [&](const std::string& v, int l) { c.params.omega_drive = parse_double(v, l); }},
        {"params.nbar", [&](const std::string& v, int l) { c.params.nbar = parse_double(v, l); }},
        {"integrator.dt", [&](const std::string& v, int l) { c.integrator.dt = parse_double(v, l); }},
        {"integrator.t_end", [&](const std::string& v, int l) { c.integrator.t_end = parse_double(v, l); }},
        {"integrator.scheme", [&](const std::string& v, int l) {
             if (v == "heun") c.integrator.scheme = Scheme::StochasticHeun;
             else if (v == "euler") c.integrator.scheme = Scheme::EulerMaruyama;
             else throw ParseError(l, "unknown scheme '" + v + "' (heun|euler)");
         }},
        {"integrator.seed", [&](const std::string& v, int l) { c.integrator.seed = parse_u64(v, l); }},
        {"integrator.sample_stride", [&](const std::string& v, int l) { c.integrator.sample_stride = static_cast<int>(parse_int(v, l)); }},
        {"integrator.noise", [&](const std::string& v, int l) { c.integrator.noise_on = parse_bool(v, l); }},
        {"init.kind", [&](const std::string& v, int l) {
             if (v == "zero") c.init = InitKind::Zero;
             else if (v == "zero_kick") c.init = InitKind::ZeroKick;
             else if (v == "plus") c.init = InitKind::Plus;
             else if (v == "custom") c.init = InitKind::Custom;
             else throw ParseError(l, "unknown init kind '" + v + "' (zero|zero_kick|plus|custom)");
         }},
        {"init.a1_re", [&](const std::string& v, int l) { c.init_a1.real(parse_double(v, l)); }},
        {"init.a1_im", [&](const std::string& v, int l) { c.init_a1.imag(parse_double(v, l)); }},
        {"init.a2_re", [&](const std::string& v, int l) { c.init_a2.real(parse_double(v, l)); }},
        {"init.a2_im", [&](const std::string& v, int l) { c.init_a2.imag(parse_double(v, l)); }},
        {"init.b_re", [&](const std::string& v, int l) { c.init_b.real(parse_double(v, l)); }},
        {"init.b_im", [&](const std::string& v, int l) { c.init_b.imag(parse_double(v, l)); }},
        {"analysis.window", [&](const std::string& v, int l) { c.window = parse_double(v, l); }},
        {"analysis.hi", [&](const std::string& v, int l) { c.hi = parse_double(v, l); }},
        {"analysis.lo", [&](const std::string& v, int l) { c.lo = parse_double(v, l); }},
        {"ensemble.trajectories", [&](const std::string& v, int l) { c.ensemble_trajectories = static_cast<int>(parse_int(v, l)); }},
        {"ensemble.threads", [&](const std::string& v, int l) { c.ensemble_threads = static_cast<int>(parse_int(v, l)); }},
        {"sweep.omega_min", [&](const std::string& v, int l) { c.sweep_omega_min = parse_double(v, l); }},
        {"sweep.omega_max", [&](const std::string& v, int l) { c.sweep_omega_max = parse_double(v, l); }},
        {"sweep.points", [&](const std::string& v, int l) { c.sweep_points = static_cast<int>(parse_int(v, l)); }},
        {"sweep.direction", [&](const std::string& v, int l) {
             if (v == "up") c.sweep_direction = SweepDirection::Up;
             else if (v == "down") c.sweep_direction = SweepDirection::Down;
             else if (v == "both") c.sweep_direction = SweepDirection::Both;
             else throw ParseError(l, "unknown direction '" + v + "' (up|down|both)");
         }},
        {"sweep.carry_state", [&](const std::string& v, int l) { c.sweep_carry = parse_bool(v, l); }},
        {"sweep.settle", [&](const std::string& v, int l) { c.sweep_settle = parse_double(v, l); }},
        {"sweep.measure", [&](const std::string& v, int l) { c.sweep_measure = parse_double(v, l); }},
        {"sweep.kick", [&](const std::string& v, int l) { c.sweep_kick = parse_double(v, l); }},
        {"map.axis1", [&](const std::string& v, int) { c.map_axis1 = v; }},
        {"map.axis1_min", [&](const std::string& v, int l) { c.map_axis1_min = parse_double(v, l); }},
        {"map.axis1_max", [&](const std::string& v, int l) { c.map_axis1_max = parse_double(v, l); }},
        {"map.axis1_points", [&](const std::string& v, int l) { c.map_axis1_points = static_cast<int>(parse_int(v, l)); }},
        {"map.axis2", [&](const std::string& v, int) { c.map_axis2 = v; }},
        {"map.axis2_min", [&](const std::string& v, int l) { c.map_axis2_min = parse_double(v, l); }},
        {"map.axis2_max", [&](const std::string& v, int l) { c.map_axis2_max = parse_double(v, l); }},
        {"map.axis2_points", [&](const std::string& v, int l) { c.map_axis2_points = static_cast<int>(parse_int(v, l)); }},
    };

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(line_no, "expected 'key = value', got '" + trim(raw) + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "empty key");
        if (value.empty()) throw ParseError(line_no, "empty value for key '" + key + "'");
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw ParseError(line_no, "unknown key '" + key + "' in " + name);
        }
        it->second(value, line_no);
    }

    // Semantic validation & resolution of derived defaults.
    if (c.schema_version != 1) {
        throw ValidationError("schema_version", "unsupported version " +
                                                    std::to_string(c.schema_version));
    }
    validate(c.params);
    if (c.integrator.dt == 0.0) c.integrator.dt = default_dt(c.params);
    if (c.integrator.dt < 0.0) throw ValidationError("integrator.dt", "must be >= 0");
    if (!(c.integrator.t_end > 0.0)) throw ValidationError("integrator.t_end", "must be > 0");
    if (c.integrator.sample_stride < 1) {
        throw ValidationError("integrator.sample_stride", "must be >= 1");
    }
    const double fastest = std::max({std::abs(c.params.wb), std::abs(c.params.dw2),
                                     std::abs(c.params.dw1), c.params.gamma1, c.params.gamma2,
                                     c.params.gammab});
    if (c.integrator.dt * fastest > 0.05) {
        throw ValidationError("integrator.dt", "too large for the fastest system frequency");
    }
    if (c.window == 0.0) c.window = default_window(c.params);
    if (!(c.window > 0.0)) throw ValidationError("analysis.window", "must be > 0");
    if (!(c.lo > 0.0 && c.hi > c.lo && c.hi < 1.0)) {
        throw InvalidThresholds("analysis thresholds need 0 < lo < hi < 1, got lo = " +
                                fmt(c.lo) + ", hi = " + fmt(c.hi));
    }
    if (c.ensemble_trajectories < 1) {
        throw ValidationError("ensemble.trajectories", "must be >= 1");
    }
    if (c.ensemble_threads < 0) throw ValidationError("ensemble.threads", "must be >= 0");
    if (c.sweep_points < 1) throw ValidationError("sweep.points", "must be >= 1");
    // An all-default (0, 0) grid means "sweep not configured"; it only
    // becomes an error if a sweep is actually requested.
    const bool sweep_configured = c.sweep_omega_min != 0.0 || c.sweep_omega_max != 0.0;
    if (sweep_configured && c.sweep_points > 1 && !(c.sweep_omega_max > c.sweep_omega_min)) {
        throw ValidationError("sweep.omega_max", "must exceed sweep.omega_min");
    }
    const double gmin = std::min(c.params.gamma2, c.params.gammab);
    if (c.sweep_settle == 0.0) c.sweep_settle = 50.0 / gmin;
    if (c.sweep_measure == 0.0) c.sweep_measure = 200.0 / gmin;
    if (!(c.sweep_settle > 0.0)) throw ValidationError("sweep.settle", "must be > 0");
    if (!(c.sweep_measure > 0.0)) throw ValidationError("sweep.measure", "must be > 0");
    if (c.sweep_kick < 0.0) throw ValidationError("sweep.kick", "must be >= 0");
    if (c.map_axis1_points < 1) throw ValidationError("map.axis1_points", "must be >= 1");
    if (c.map_axis2_points < 1) throw ValidationError("map.axis2_points", "must be >= 1");
    {
        SystemParams probe = c.params;
        param_field(probe, c.map_axis1);
        param_field(probe, c.map_axis2);
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    return parse_config(in, path);
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    os << "schema_version = " << c.schema_version << "\n";
    os << "params.gamma1 = " << fmt(c.params.gamma1) << "\n";
    os << "params.gamma2 = " << fmt(c.params.gamma2) << "\n";
    os << "params.gammab = " << fmt(c.params.gammab) << "\n";
    os << "params.dw1 = " << fmt(c.params.dw1) << "\n";
    os << "params.dw2 = " << fmt(c.params.dw2) << "\n";
    os << "params.wb = " << fmt(c.params.wb) << "\n";
    os << "params.g = " << fmt(c.params.g) << "\n";
    os << "params.omega = " << fmt(c.params.omega_drive) << "\n";
    os << "params.nbar = " << fmt(c.params.nbar) << "\n";
    os << "integrator.dt = " << fmt(c.integrator.dt) << "\n";
    os << "integrator.t_end = " << fmt(c.integrator.t_end) << "\n";
    os << "integrator.scheme = " << scheme_name(c.integrator.scheme) << "\n";
    os << "integrator.seed = " << c.integrator.seed << "\n";
    os << "integrator.sample_stride = " << c.integrator.sample_stride << "\n";
    os << "integrator.noise = " << (c.integrator.noise_on ? "true" : "false") << "\n";
    os << "init.kind = " << init_name(c.init) << "\n";
    os << "init.a1_re = " << fmt(c.init_a1.real()) << "\n";
    os << "init.a1_im = " << fmt(c.init_a1.imag()) << "\n";
    os << "init.a2_re = " << fmt(c.init_a2.real()) << "\n";
    os << "init.a2_im = " << fmt(c.init_a2.imag()) << "\n";
    os << "init.b_re = " << fmt(c.init_b.real()) << "\n";
    os << "init.b_im = " << fmt(c.init_b.imag()) << "\n";
    os << "analysis.window = " << fmt(c.window) << "\n";
    os << "analysis.hi = " << fmt(c.hi) << "\n";
    os << "analysis.lo = " << fmt(c.lo) << "\n";
    os << "ensemble.trajectories = " << c.ensemble_trajectories << "\n";
    os << "ensemble.threads = " << c.ensemble_threads << "\n";
    os << "sweep.omega_min = " << fmt(c.sweep_omega_min) << "\n";
    os << "sweep.omega_max = " << fmt(c.sweep_omega_max) << "\n";
    os << "sweep.points = " << c.sweep_points << "\n";
    os << "sweep.direction = " << direction_name(c.sweep_direction) << "\n";
    os << "sweep.carry_state = " << (c.sweep_carry ? "true" : "false") << "\n";
    os << "sweep.settle = " << fmt(c.sweep_settle) << "\n";
    os << "sweep.measure = " << fmt(c.sweep_measure) << "\n";
    os << "sweep.kick = " << fmt(c.sweep_kick) << "\n";
    os << "map.axis1 = " << c.map_axis1 << "\n";
    os << "map.axis1_min = " << fmt(c.map_axis1_min) << "\n";
    os << "map.axis1_max = " << fmt(c.map_axis1_max) << "\n";
    os << "map.axis1_points = " << c.map_axis1_points << "\n";
    os << "map.axis2 = " << c.map_axis2 << "\n";
    os << "map.axis2_min = " << fmt(c.map_axis2_min) << "\n";
    os << "map.axis2_max = " << fmt(c.map_axis2_max) << "\n";
    os << "map.axis2_points = " << c.map_axis2_points << "\n";
    return os.str();
}

EnsembleSpec make_ensemble_spec(const RunConfig& c) {
    EnsembleSpec spec;
    spec.params = c.params;
    spec.integrator = c.integrator;
    spec.trajectories = c.ensemble_trajectories;
    spec.threads = c.ensemble_threads;
    spec.window = c.window;
    spec.hi = c.hi;
    spec.lo = c.lo;
    return spec;
}

SweepSpec make_sweep_spec(const RunConfig& c) {
    SweepSpec spec;
    spec.params = c.params;
    spec.omegas = linspace(c.sweep_omega_min, c.sweep_omega_max, c.sweep_points);
    spec.direction = c.sweep_direction;
    spec.carry_state = c.sweep_carry;
    spec.settle = c.sweep_settle;
    spec.measure = c.sweep_measure;
    spec.kick = c.sweep_kick;
    spec.integrator = c.integrator;
    spec.window = c.window;
    spec.hi = c.hi;
    spec.lo = c.lo;
    return spec;
}

ModeState make_initial_state(const RunConfig& c) {
    switch (c.init) {
        case InitKind::Zero: {
            ModeState s;
            s.a1 = zero_solution_a1(c.params);
            return s;
        }
        case InitKind::ZeroKick:
            return default_initial_state(c.params, c.integrator);
        case InitKind::Plus: {
            const auto fp = nonzero_fixed_point(c.params, Branch::Plus);
            ModeState s;
            s.a1 = fp.a1;
            s.a2 = fp.a2;
            s.b = fp.b;
            return s;
        }
        case InitKind::Custom: {
            ModeState s;
            s.a1 = c.init_a1;
            s.a2 = c.init_a2;
            s.b = c.init_b;
            return s;
        }
    }
    throw Error("unreachable init kind");
}

}  // namespace omept
