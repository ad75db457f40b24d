#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <utility>

#include "omept/params.hpp"

namespace omept {

// ---------------------------------------------------------------------------
// Drive thresholds of the mean-field theory (symmetric rates required).
// ---------------------------------------------------------------------------

struct Thresholds {
    double omega_ex = 0.0;  // existence threshold of the nonzero branches
    double omega_ep = 0.0;  // exceptional point of the zero-state linearization
    double omega_th = 0.0;  // instability threshold of the zero state
    bool bistable = false;  // true iff dw1*delta > gamma1*gamma
    // [omega_ex, omega_th] when bistable, empty otherwise.
    std::optional<std::pair<double, double>> coexistence_window;

    bool operator==(const Thresholds&) const = default;
};

// Throws AsymmetricRates unless gamma2 == gammab (within kSymmetricRatesTol).
Thresholds thresholds(const SystemParams& p);

// ---------------------------------------------------------------------------
// Linearization of the zero solution in the (da2, conj(db)) subspace.
// ---------------------------------------------------------------------------

enum class Symmetry { PTSymmetric, NonPTSymmetric, ExceptionalPoint };

std::string to_string(Symmetry s);

struct LinearAnalysis {
    // Row-major 2x2 matrix of the linear flow d/dt (da2, conj(db)).
    std::array<std::complex<double>, 4> matrix{};
    std::complex<double> lambda_plus;   // eigenvalue with +sqrt branch
    std::complex<double> lambda_minus;  // eigenvalue with -sqrt branch
    std::array<std::complex<double>, 2> e_plus{};   // eigenvector for lambda_plus
    std::array<std::complex<double>, 2> e_minus{};  // eigenvector for lambda_minus
    Symmetry symmetry = Symmetry::PTSymmetric;

    bool operator==(const LinearAnalysis&) const = default;
};

// Closed-form eigenpairs, self-checked against a generic eigensolver outside
// a small band around the exceptional point. Throws AsymmetricRates for
// asymmetric damping (the symmetry classification needs a common rate).
LinearAnalysis linearize_zero_solution(const SystemParams& p);

// Classifies a single eigenvector by the balance of its component magnitudes:
// PTSymmetric when ||v1|-|v2|| <= tol * max(|v1|,|v2|), NonPTSymmetric
// otherwise. Throws ZeroVector on the zero vector. Never returns
// ExceptionalPoint (that label is decided by drive-band membership).
Symmetry pt_classify(const std::array<std::complex<double>, 2>& v, double tol);

// ---------------------------------------------------------------------------
// Steady states.
// ---------------------------------------------------------------------------

enum class Branch { Plus, Minus };
enum class SteadyKind { Zero, NonzeroPlus, NonzeroMinus };

struct SteadyState {
    SteadyKind kind = SteadyKind::Zero;
    double a1_intensity = 0.0;      // |a1|^2
    double a2_intensity = 0.0;      // |a2|^2
    double b_intensity = 0.0;       // |b|^2
    double generation_freq = 0.0;   // rotation rate of a2 (b rotates opposite)
    bool stable = false;

    bool operator==(const SteadyState&) const = default;
};

// Complex a1 amplitude of the zero solution, -i*Omega/(gamma1 + i*dw1).
std::complex<double> zero_solution_a1(const SystemParams& p);

// Zero solution: a2 = b = 0. Stability: Omega < omega_th for symmetric rates,
// numeric eigensolve of the linearization otherwise.
SteadyState zero_solution(const SystemParams& p);

// Generation frequency of the nonzero branches,
// (wb*gamma2 - dw2*gammab) / (gamma2 + gammab).
double generation_frequency(const SystemParams& p);

// Nonzero branch (symmetric rates required). Throws BelowExistence when
// omega_drive < omega_ex and NegativeIntensity when the branch formula
// yields a negative intensity. The a1 intensity is recovered numerically
// from the stationarity conditions.
SteadyState nonzero_solution(const SystemParams& p, Branch branch);

// Full complex amplitudes of a nonzero branch in the co-rotating frame,
// gauge-fixed so a2 is real and non-negative. residual is the max-norm of
// the stationarity equations at the returned point (absolute units).
struct NonzeroFixedPoint {
    std::complex<double> a1;
    std::complex<double> a2;
    std::complex<double> b;
    double generation_freq = 0.0;
    double residual = 0.0;
};

NonzeroFixedPoint nonzero_fixed_point(const SystemParams& p, Branch branch);

// ---------------------------------------------------------------------------
// Regime classification on the drive axis.
// ---------------------------------------------------------------------------

enum class Regime { ZeroOnly, BistableBelowEP, BistableAboveEP, NonzeroOnly };

std::string to_string(Regime r);

// Partitions the drive axis by the thresholds; ties go to the lower regime.
// Throws AsymmetricRates for asymmetric damping.
Regime classify_regime(const SystemParams& p);

}  // namespace omept
