#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "casispec/material.hpp"

namespace casispec {

// Finite-temperature Lifshitz theory for two half-spaces across a vacuum gap,
// evaluated on the imaginary frequency axis. Sign convention throughout:
// attraction is negative, for pressures, force gradients and free energies.

struct MatsubaraSettings {
    double temperature = 300.0;          // K
    double term_tolerance = 1e-9;        // relative Matsubara-series cutoff
    double quadrature_tolerance = 1e-8;  // relative k-integral tolerance

    void validate() const;
};

// xi_n = 2 pi n k_B T / hbar
double matsubara_frequency(double temperature, std::size_t n);

// Imaginary-axis Fresnel reflection coefficients of a vacuum/material
// interface at transverse wavevector k and Matsubara frequency xi:
//   kappa0  = sqrt(k^2 + xi^2/c^2)        (vacuum decay constant)
//   kappa_m = sqrt(k^2 + eps xi^2/c^2)
//   r_TE = (kappa0 - kappa_m) / (kappa0 + kappa_m)          in [-1, 0]
//   r_TM = (eps kappa0 - kappa_m) / (eps kappa0 + kappa_m)  in [0, 1]
struct ReflectionPair {
    double r_te = 0.0;
    double r_tm = 0.0;
    double kappa0 = 0.0;  // 1/m
};

ReflectionPair fresnel(double eps, double xi, double k);

// P(d) = -(kT/pi) sum'_n \int_0^inf k dk kappa0
//             sum_p r1p r2p e^{-2 kappa0 d} / (1 - r1p r2p e^{-2 kappa0 d}),
// where the primed sum halves the n = 0 term. At n = 0, r_TE = 0 for every
// material and r_TM comes from the static response (1 when conducting),
// which makes that k-integral a polylogarithm and avoids evaluating
// eps(i xi) at xi = 0. Negative return value = attraction.
double pressure(double d, const Material& a, const Material& b, const MatsubaraSettings& settings);

// F(d) = (kT/2pi) sum'_n \int_0^inf k dk sum_p ln(1 - r1p r2p e^{-2 kappa0 d});
// satisfies pressure == -dF/dd.
double free_energy_per_area(double d, const Material& a, const Material& b,
                            const MatsubaraSettings& settings);

struct SphereGeometry {
    double radius = 0.0;  // m
};

struct PfaGradient {
    double value = 0.0;        // N/m
    bool pfa_warning = false;  // radius < 10 * separation
};

// Proximity force approximation: sphere-plate force gradient
// F'(d) = 2 pi R P(d), trustworthy only for R >> d.
PfaGradient pfa_gradient(double d, const SphereGeometry& geom, const Material& a, const Material& b,
                         const MatsubaraSettings& settings);

enum class CurveKind { pressure, gradient };

struct ForceCurve {
    std::vector<double> separations;  // m, strictly increasing, > 0
    std::vector<double> values;       // Pa (pressure) or N/m (gradient)
    CurveKind kind = CurveKind::pressure;

    void validate() const;  // structural checks only
};

// Per-separation application of pressure() or pfa_gradient(). geometry is
// required exactly when kind == gradient.
ForceCurve force_curve(const std::vector<double>& separations, const Material& a, const Material& b,
                       const MatsubaraSettings& settings, CurveKind kind,
                       std::optional<SphereGeometry> geometry = {});

std::vector<double> uniform_separations(double d_min, double d_max, std::size_t count);

}  // namespace casispec
