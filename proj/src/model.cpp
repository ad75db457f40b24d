#include "omept/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace omept {

namespace {

using cd = std::complex<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

double common_gamma(const SystemParams& p) {
    if (!symmetric_rates(p)) {
        throw AsymmetricRates("gamma2 and gammab differ beyond tolerance (" +
                              std::to_string(p.gamma2) + " vs " + std::to_string(p.gammab) + ")");
    }
    return 0.5 * (p.gamma2 + p.gammab);
}

// Splitting of the zero-state eigenvalues, s^2 = |kappa|^2 - delta^2,
// computed in the factored form that vanishes exactly at the drive equal to
// omega_ep (the naive difference keeps a sqrt-of-rounding residue there).
cd eigenvalue_split(const SystemParams& p, const Thresholds& th) {
    const double pref = p.g * p.g / (p.gamma1 * p.gamma1 + p.dw1 * p.dw1);
    double disc;
    if (!std::isfinite(th.omega_ep)) {  // g == 0: modes decoupled
        const double delta = 0.5 * (p.dw2 + p.wb);
        disc = -delta * delta;
    } else {
        disc = pref * (p.omega_drive - th.omega_ep) * (p.omega_drive + th.omega_ep);
    }
    if (disc >= 0.0) return cd(std::sqrt(disc), 0.0);
    return cd(0.0, std::sqrt(-disc));
}

// Eigenvector component ratio v1/v2 for the eigenvalue c + sign*s, picking
// whichever of the two algebraically equal forms avoids cancellation.
cd component_ratio(cd kappa, double delta, cd s, double sign) {
    const cd num = cd(0.0, delta) - sign * s;   // i*delta -+ s
    const cd den = cd(0.0, -delta) - sign * s;  // -i*delta -+ s
    const double ak = std::abs(kappa);
    if (ak == 0.0) {
        // Decoupled limit: the ratio is exactly 0 or infinite; callers
        // special-case this, so just signal with an infinity.
        return std::abs(num) == 0.0 ? cd(0.0, 0.0) : cd(kInf, 0.0);
    }
    if (std::abs(num) >= ak) return num / std::conj(kappa);
    return kappa / den;
}

std::array<cd, 2> unit_vector(cd ratio) {
    if (std::isinf(ratio.real()) || std::isinf(ratio.imag())) return {cd(1.0, 0.0), cd(0.0, 0.0)};
    const double n = std::sqrt(std::norm(ratio) + 1.0);
    return {ratio / n, cd(1.0 / n, 0.0)};
}

void cross_check_eigensystem(const LinearAnalysis& la) {
    Eigen::Matrix2cd m;
    m << la.matrix[0], la.matrix[1], la.matrix[2], la.matrix[3];
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> solver(m);
    if (solver.info() != Eigen::Success) throw Error("generic eigensolver failed");

    const double lam_scale = std::max(std::abs(la.lambda_plus), std::abs(la.lambda_minus));
    const cd g0 = solver.eigenvalues()(0);
    const cd g1 = solver.eigenvalues()(1);
    const double direct = std::max(std::abs(g0 - la.lambda_plus), std::abs(g1 - la.lambda_minus));
    const double swapped = std::max(std::abs(g1 - la.lambda_plus), std::abs(g0 - la.lambda_minus));
    if (std::min(direct, swapped) > 1e-10 * lam_scale) {
        throw Error("closed-form eigenvalues disagree with generic eigensolver");
    }

    const double m_scale = m.norm();
    for (const auto& [vec, lam] : {std::pair{la.e_plus, la.lambda_plus},
                                   std::pair{la.e_minus, la.lambda_minus}}) {
        Eigen::Vector2cd v;
        v << vec[0], vec[1];
        const double resid = (m * v - lam * v).norm();
        if (resid > 1e-10 * m_scale * v.norm()) {
            throw Error("closed-form eigenvector fails the residual check");
        }
    }
}

}  // namespace

std::string to_string(Symmetry s) {
    switch (s) {
        case Symmetry::PTSymmetric: return "PTSymmetric";
        case Symmetry::NonPTSymmetric: return "NonPTSymmetric";
        case Symmetry::ExceptionalPoint: return "ExceptionalPoint";
    }
    return "?";
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::ZeroOnly: return "ZeroOnly";
        case Regime::BistableBelowEP: return "BistableBelowEP";
        case Regime::BistableAboveEP: return "BistableAboveEP";
        case Regime::NonzeroOnly: return "NonzeroOnly";
    }
    return "?";
}

Thresholds thresholds(const SystemParams& p) {
    validate(p);
    const double gamma = common_gamma(p);
    const double delta = 0.5 * (p.dw2 + p.wb);
    const double r1 = std::hypot(p.gamma1, p.dw1);  // sqrt(gamma1^2 + dw1^2)

    Thresholds th;
    if (p.g == 0.0) {
        th.omega_ex = th.omega_ep = th.omega_th = kInf;
    } else {
        th.omega_ex = std::abs(p.dw1 * gamma + p.gamma1 * delta) / p.g;
        th.omega_ep = r1 * std::abs(delta) / p.g;
        th.omega_th = r1 * std::hypot(gamma, delta) / p.g;
    }
    th.bistable = p.dw1 * delta > p.gamma1 * gamma;
    if (th.bistable) th.coexistence_window = std::pair{th.omega_ex, th.omega_th};
    return th;
}

Symmetry pt_classify(const std::array<cd, 2>& v, double tol) {
    const double m1 = std::abs(v[0]);
    const double m2 = std::abs(v[1]);
    const double scale = std::max(m1, m2);
    if (scale == 0.0) throw ZeroVector("cannot classify the zero vector");
    return std::abs(m1 - m2) <= tol * scale ? Symmetry::PTSymmetric : Symmetry::NonPTSymmetric;
}

LinearAnalysis linearize_zero_solution(const SystemParams& p) {
    const auto th = thresholds(p);  // validates and enforces rate symmetry
    const auto d = derived_quantities(p);
    const double gamma = *d.gamma_common;
    const cd kappa = d.kappa;
    const double delta = d.delta;

    LinearAnalysis la;
    la.matrix = {cd(-gamma, -p.dw2), -kappa, -std::conj(kappa), cd(-gamma, p.wb)};

    const cd center(-gamma, -0.5 * (p.dw2 - p.wb));
    const cd s = eigenvalue_split(p, th);
    la.lambda_plus = center + s;
    la.lambda_minus = center - s;

    if (std::abs(kappa) == 0.0) {
        // Decoupled: eigenvectors are the basis vectors; order them so each
        // matches its eigenvalue (phonon-like vs optical-like).
        if (delta >= 0.0) {
            la.e_plus = {cd(0.0, 0.0), cd(1.0, 0.0)};
            la.e_minus = {cd(1.0, 0.0), cd(0.0, 0.0)};
        } else {
            la.e_plus = {cd(1.0, 0.0), cd(0.0, 0.0)};
            la.e_minus = {cd(0.0, 0.0), cd(1.0, 0.0)};
        }
    } else {
        la.e_plus = unit_vector(component_ratio(kappa, delta, s, +1.0));
        la.e_minus = unit_vector(component_ratio(kappa, delta, s, -1.0));
    }

    const bool at_ep = std::isfinite(th.omega_ep) &&
                       std::abs(p.omega_drive - th.omega_ep) <= kEpBandTol * th.omega_ep;
    if (at_ep) {
        la.symmetry = Symmetry::ExceptionalPoint;
    } else {
        la.symmetry = p.omega_drive > th.omega_ep ? Symmetry::PTSymmetric
                                                  : Symmetry::NonPTSymmetric;
        // The drive-band decision must agree with the eigenvector magnitudes.
        const Symmetry confirm_plus = pt_classify(la.e_plus, 1e-6);
        const Symmetry confirm_minus = pt_classify(la.e_minus, 1e-6);
        if (confirm_plus != la.symmetry || confirm_minus != la.symmetry) {
            throw Error("symmetry classification mismatch between drive band and eigenvectors");
        }
    }

    const bool near_ep = std::isfinite(th.omega_ep) &&
                         std::abs(p.omega_drive - th.omega_ep) <= 1e-6 * th.omega_ep;
    if (!near_ep) cross_check_eigensystem(la);
    return la;
}

cd zero_solution_a1(const SystemParams& p) {
    return cd(0.0, -p.omega_drive) / cd(p.gamma1, p.dw1);
}

SteadyState zero_solution(const SystemParams& p) {
    validate(p);
    SteadyState st;
    st.kind = SteadyKind::Zero;
    st.a1_intensity = p.omega_drive * p.omega_drive / (p.gamma1 * p.gamma1 + p.dw1 * p.dw1);
    st.a2_intensity = 0.0;
    st.b_intensity = 0.0;
    st.generation_freq = 0.0;
    if (symmetric_rates(p)) {
        st.stable = p.omega_drive < thresholds(p).omega_th;
    } else {
        const auto d = derived_quantities(p);
        Eigen::Matrix2cd m;
        m << cd(-p.gamma2, -p.dw2), -d.kappa, -std::conj(d.kappa), cd(-p.gammab, p.wb);
        Eigen::ComplexEigenSolver<Eigen::Matrix2cd> solver(m);
        if (solver.info() != Eigen::Success) throw Error("stability eigensolve failed");
        const double max_re =
            std::max(solver.eigenvalues()(0).real(), solver.eigenvalues()(1).real());
        st.stable = max_re < 0.0;
    }
    return st;
}

double generation_frequency(const SystemParams& p) {
    return (p.wb * p.gamma2 - p.dw2 * p.gammab) / (p.gamma2 + p.gammab);
}

namespace {

// Branch intensity I = |a2|^2 = |b|^2 of a nonzero solution; throws when the
// branch does not exist or is unphysical.
double branch_intensity(const SystemParams& p, const Thresholds& th, Branch branch) {
    if (p.omega_drive < th.omega_ex || !std::isfinite(th.omega_ex)) {
        throw BelowExistence("drive " + std::to_string(p.omega_drive) +
                             " below the existence threshold " + std::to_string(th.omega_ex));
    }
    const double gamma = 0.5 * (p.gamma2 + p.gammab);
    const double delta = 0.5 * (p.dw2 + p.wb);
    // Factored so the root term is exactly zero at the existence threshold.
    const double root =
        std::sqrt((p.omega_drive - th.omega_ex) * (p.omega_drive + th.omega_ex)) / p.g;
    const double offset = (p.dw1 * delta - p.gamma1 * gamma) / (p.g * p.g);
    const double intensity = (branch == Branch::Plus ? root : -root) + offset;
    if (intensity < 0.0) {
        throw NegativeIntensity("branch intensity " + std::to_string(intensity) +
                                " is negative at drive " + std::to_string(p.omega_drive));
    }
    return intensity;
}

}  // namespace

NonzeroFixedPoint nonzero_fixed_point(const SystemParams& p, Branch branch) {
    validate(p);
    const auto th = thresholds(p);
    const double intensity = branch_intensity(p, th, branch);
    const double freq = generation_frequency(p);

    const cd c1(-p.gamma1, -p.dw1);
    const cd c2(-p.gamma2, -(p.dw2 + freq));
    const cd c3(-p.gammab, -(p.wb - freq));
    const double g = p.g;
    const cd mi(0.0, -1.0);  // -i

    // Closed-form root in the u >= 0 gauge: eliminating w via the phonon
    // equation gives alpha = i*Omega / (c1 + g^2 I / c3); the remaining
    // equation is the branch-intensity condition itself, so this seed is the
    // exact fixed point up to roundoff and Gauss-Newton below only polishes.
    const double u0 = std::sqrt(intensity);
    const cd alpha = cd(0.0, p.omega_drive) / (c1 + g * g * intensity / c3);
    const cd w = cd(0.0, 1.0) * g * alpha * u0 / c3;

    // Gauss-Newton on the six real stationarity equations in the five real
    // unknowns (Re a1, Im a1, u, Re w, Im w); the U(1) gauge is fixed by
    // keeping u real.
    Eigen::Matrix<double, 5, 1> x;
    x << alpha.real(), alpha.imag(), u0, w.real(), w.imag();

    const auto residual = [&](const Eigen::Matrix<double, 5, 1>& v) {
        const cd a(v(0), v(1));
        const double u = v(2);
        const cd ww(v(3), v(4));
        const cd f1 = c1 * a + mi * g * u * ww + mi * p.omega_drive;
        const cd f2 = c2 * u + mi * g * a * std::conj(ww);
        const cd f3 = c3 * ww + mi * g * a * u;
        Eigen::Matrix<double, 6, 1> f;
        f << f1.real(), f1.imag(), f2.real(), f2.imag(), f3.real(), f3.imag();
        return f;
    };

    const double amp = std::max({std::abs(alpha), u0, 1.0});
    const double coeff = std::max({std::abs(c1), std::abs(c2), std::abs(c3)});
    const double scale = p.omega_drive + coeff * amp + g * amp * amp;

    Eigen::Matrix<double, 6, 1> f = residual(x);
    for (int iter = 0; iter < 100 && f.lpNorm<Eigen::Infinity>() > 1e-13 * scale; ++iter) {
        const cd a(x(0), x(1));
        const double u = x(2);
        const cd ww(x(3), x(4));

        // Complex partials of (f1, f2, f3) w.r.t. the five real unknowns.
        const cd j[3][5] = {
            {c1, c1 * cd(0, 1), mi * g * ww, mi * g * u, cd(g * u, 0.0)},
            {mi * g * std::conj(ww), g * std::conj(ww), c2, mi * g * a, -g * a},
            {mi * g * u, cd(g * u, 0.0), mi * g * a, c3, c3 * cd(0, 1)},
        };
        Eigen::Matrix<double, 6, 5> jac;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 5; ++c) {
                jac(2 * r, c) = j[r][c].real();
                jac(2 * r + 1, c) = j[r][c].imag();
            }
        }

        const Eigen::Matrix<double, 5, 1> step = jac.colPivHouseholderQr().solve(-f);
        double lam = 1.0;
        Eigen::Matrix<double, 5, 1> xn = x + step;
        Eigen::Matrix<double, 6, 1> fn = residual(xn);
        for (int halving = 0; halving < 30 && fn.norm() > f.norm(); ++halving) {
            lam *= 0.5;
            xn = x + lam * step;
            fn = residual(xn);
        }
        if (fn.norm() >= f.norm() && iter > 0) break;  // stalled at the floor
        x = xn;
        f = fn;
    }
    if (f.lpNorm<Eigen::Infinity>() > 1e-8 * scale) {
        throw Error("fixed-point recovery did not converge");
    }

    NonzeroFixedPoint fp;
    fp.a1 = cd(x(0), x(1));
    fp.a2 = cd(x(2), 0.0);
    fp.b = cd(x(3), x(4));
    if (x(2) < 0.0) {  // keep the gauge u >= 0
        fp.a2 = -fp.a2;
        fp.b = -fp.b;
    }
    fp.generation_freq = freq;
    fp.residual = f.lpNorm<Eigen::Infinity>();
    return fp;
}

SteadyState nonzero_solution(const SystemParams& p, Branch branch) {
    validate(p);
    const auto th = thresholds(p);
    const double intensity = branch_intensity(p, th, branch);
    const auto fp = nonzero_fixed_point(p, branch);

    SteadyState st;
    st.kind = branch == Branch::Plus ? SteadyKind::NonzeroPlus : SteadyKind::NonzeroMinus;
    if (std::abs(std::norm(fp.a2) - intensity) > 1e-6 * std::max(intensity, 1.0)) {
        throw Error("fixed-point recovery disagrees with the analytic branch intensity");
    }
    st.a1_intensity = std::norm(fp.a1);
    st.a2_intensity = intensity;
    st.b_intensity = intensity;
    st.generation_freq = fp.generation_freq;
    st.stable = branch == Branch::Plus;
    return st;
}

Regime classify_regime(const SystemParams& p) {
    const auto th = thresholds(p);
    const double w = p.omega_drive;
    if (w <= th.omega_ex) return Regime::ZeroOnly;
    if (th.bistable && w <= th.omega_th) {
        return w <= th.omega_ep ? Regime::BistableBelowEP : Regime::BistableAboveEP;
    }
    return w > th.omega_th ? Regime::NonzeroOnly : Regime::ZeroOnly;
}

}  // namespace omept
