#include "omept/params.hpp"

#include <algorithm>
#include <cmath>

namespace omept {

namespace {

void require_finite(const char* field, double v) {
    if (!std::isfinite(v)) throw ValidationError(field, "must be finite");
}

void require_positive(const char* field, double v) {
    require_finite(field, v);
    if (v <= 0.0) throw ValidationError(field, "must be > 0");
}

void require_nonnegative(const char* field, double v) {
    require_finite(field, v);
    if (v < 0.0) throw ValidationError(field, "must be >= 0");
}

}  // namespace

void validate(const SystemParams& p) {
    require_positive("gamma1", p.gamma1);
    require_positive("gamma2", p.gamma2);
    require_positive("gammab", p.gammab);
    require_finite("dw1", p.dw1);
    require_finite("dw2", p.dw2);
    require_finite("wb", p.wb);
    require_nonnegative("g", p.g);
    require_nonnegative("omega", p.omega_drive);
    require_nonnegative("nbar", p.nbar);
}

bool symmetric_rates(const SystemParams& p) {
    const double scale = std::max(p.gamma2, p.gammab);
    return std::abs(p.gamma2 - p.gammab) <= kSymmetricRatesTol * scale;
}

DerivedQuantities derived_quantities(const SystemParams& p) {
    validate(p);
    DerivedQuantities d;
    d.kappa = p.g * p.omega_drive / std::complex<double>(p.gamma1, p.dw1);
    d.delta = 0.5 * (p.dw2 + p.wb);
    if (symmetric_rates(p)) d.gamma_common = 0.5 * (p.gamma2 + p.gammab);
    return d;
}

}  // namespace omept
