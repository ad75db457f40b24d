#pragma once

#include <complex>
#include <optional>

#include "omept/errors.hpp"

namespace omept {

// All rates and frequencies are in units of a reference frequency w0;
// time is measured in 1/w0. Amplitudes are dimensionless, intensities are
// squared amplitudes (quanta).
struct SystemParams {
    double gamma1 = 0.0;       // relaxation rate of the driven optical mode
    double gamma2 = 0.0;       // relaxation rate of the auxiliary optical mode
    double gammab = 0.0;       // relaxation rate of the phonon mode
    double dw1 = 0.0;          // drive detuning of mode 1 (rotating frame)
    double dw2 = 0.0;          // detuning of mode 2 (rotating frame)
    double wb = 0.0;           // phonon frequency
    double g = 0.0;            // three-mode coupling rate
    double omega_drive = 0.0;  // drive amplitude (Omega)
    double nbar = 0.0;         // thermal phonon occupation

    bool operator==(const SystemParams&) const = default;
};

// Relative tolerance under which gamma2 and gammab count as equal.
inline constexpr double kSymmetricRatesTol = 1e-12;

// Relative half-width of the drive band treated as "at the exceptional point".
inline constexpr double kEpBandTol = 1e-9;

// Throws ValidationError naming the offending field.
// Requires gamma1, gamma2, gammab > 0; g, omega_drive, nbar >= 0;
// all fields finite.
void validate(const SystemParams& p);

// True when |gamma2 - gammab| <= kSymmetricRatesTol * max(gamma2, gammab).
bool symmetric_rates(const SystemParams& p);

// Quantities derived from the parameters that the linear theory is built on.
struct DerivedQuantities {
    std::complex<double> kappa;   // g*Omega / (gamma1 + i*dw1)
    double delta = 0.0;           // (dw2 + wb) / 2
    // (gamma2 + gammab)/2 when rates are symmetric, empty otherwise.
    std::optional<double> gamma_common;
};

DerivedQuantities derived_quantities(const SystemParams& p);

}  // namespace omept
