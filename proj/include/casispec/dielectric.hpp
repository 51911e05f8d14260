#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace casispec {

// Every frequency in this library is an angular frequency in rad/s.

struct DrudeParams {
    double plasma_frequency = 0.0;  // omega_p
    double damping = 0.0;           // gamma
};

struct LorentzOscillator {
    double strength = 0.0;   // Omega_j
    double resonance = 0.0;  // omega_j
    double damping = 0.0;    // gamma_j
};

// Free-carrier Drude term plus any number of Lorentz oscillators. At least
// one term must be present, which guarantees eps(i xi) > 1 for all xi > 0.
struct DielectricModel {
    std::optional<DrudeParams> drude;
    std::vector<LorentzOscillator> oscillators;

    bool empty() const { return !drude && oscillators.empty(); }
    void validate() const;  // throws input_error
};

// eps(w) = 1 - wp^2 / (w (w + i g)) + sum_j Oj^2 / (wj^2 - w^2 - i gj w).
// Im eps >= 0 for every valid model (passivity).
std::complex<double> eval_real(const DielectricModel& model, double omega);

// Continuation to the imaginary axis:
//   eps(i xi) = 1 + wp^2 / (xi (xi + g)) + sum_j Oj^2 / (wj^2 + xi^2 + gj xi)
// Real, > 1, strictly decreasing, -> 1 as xi -> inf. xi = 0 is rejected;
// the static Matsubara term is resolved analytically by the force solver.
double eval_imag(const DielectricModel& model, double xi);

struct FrequencyGrid {
    std::vector<double> omega;  // strictly increasing, all > 0

    static FrequencyGrid log_spaced(std::size_t points, double omega_min, double omega_max);
    static FrequencyGrid default_grid();  // 80 points over [1e11, 1e19] rad/s

    std::size_t size() const { return omega.size(); }
    void validate() const;
    bool operator==(const FrequencyGrid&) const = default;
};

struct SpectrumSample {
    FrequencyGrid grid;
    std::vector<double> eps_real;
    std::vector<double> eps_imag;  // >= 0 everywhere

    void validate() const;
};

SpectrumSample evaluate_spectrum(const DielectricModel& model, const FrequencyGrid& grid);

// Tabulated absorption spectrum for Kramers-Kronig continuation. Below the
// first tabulated frequency eps'' follows the Drude form
//   eps''(w) = wp^2 g / (w (w^2 + g^2));
// plasma_frequency = 0 means no low-frequency absorption. Above the last
// tabulated frequency eps'' is extrapolated as eps''(w_max) (w_max/w)^3.
struct TabulatedOptics {
    std::vector<double> omega;
    std::vector<double> eps_imag;
    DrudeParams low_freq_extrapolation;

    void validate() const;
};

// eps(i xi) = 1 + (2/pi) \int_0^inf w eps''(w) / (w^2 + xi^2) dw, evaluated
// as composite Gauss-Legendre panels in ln w: knot-aligned panels across the
// table, per-decade panels over the extrapolated tails, orders doubled until
// the total changes by less than rel_tol.
double kk_continuation(const TabulatedOptics& data, double xi, double rel_tol = 1e-6);

// Static limit eps(i0). Finite only without a conduction tail
// (plasma_frequency == 0); throws input_error otherwise.
double kk_static_limit(const TabulatedOptics& data, double rel_tol = 1e-6);

}  // namespace casispec
