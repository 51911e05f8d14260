#include "casispec/dielectric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "casispec/errors.hpp"
#include "casispec/io.hpp"
#include "casispec/quadrature.hpp"

namespace casispec {

void DielectricModel::validate() const {
    if (empty()) throw input_error("dielectric model needs a Drude term or at least one oscillator");
    if (drude) {
        if (!(drude->plasma_frequency > 0.0)) throw input_error("Drude plasma frequency must be > 0");
        if (!(drude->damping > 0.0)) throw input_error("Drude damping must be > 0");
    }
    for (const auto& osc : oscillators) {
        if (!(osc.strength > 0.0) || !(osc.resonance > 0.0) || !(osc.damping > 0.0))
            throw input_error("oscillator parameters must all be > 0");
    }
}

std::complex<double> eval_real(const DielectricModel& model, double omega) {
    if (!(omega > 0.0)) throw std::domain_error("eval_real: omega must be > 0");
    std::complex<double> eps = 1.0;
    if (model.drude) {
        const auto& d = *model.drude;
        eps -= d.plasma_frequency * d.plasma_frequency /
               (omega * std::complex<double>(omega, d.damping));
    }
    for (const auto& osc : model.oscillators) {
        eps += osc.strength * osc.strength /
               std::complex<double>(osc.resonance * osc.resonance - omega * omega,
                                    -osc.damping * omega);
    }
    return eps;
}

double eval_imag(const DielectricModel& model, double xi) {
    if (!(xi > 0.0)) throw std::domain_error("eval_imag: xi must be > 0");
    double eps = 1.0;
    if (model.drude) {
        const auto& d = *model.drude;
        eps += d.plasma_frequency * d.plasma_frequency / (xi * (xi + d.damping));
    }
    for (const auto& osc : model.oscillators) {
        eps += osc.strength * osc.strength /
               (osc.resonance * osc.resonance + xi * xi + osc.damping * xi);
    }
    return eps;
}

FrequencyGrid FrequencyGrid::log_spaced(std::size_t points, double omega_min, double omega_max) {
    if (points < 2) throw input_error("frequency grid needs at least 2 points");
    if (!(omega_min > 0.0) || !(omega_max > omega_min))
        throw input_error("frequency grid bounds must satisfy 0 < omega_min < omega_max");
    FrequencyGrid grid;
    grid.omega.resize(points);
    const double lo = std::log10(omega_min);
    const double hi = std::log10(omega_max);
    for (std::size_t k = 0; k < points; ++k)
        grid.omega[k] = std::pow(10.0, lo + (hi - lo) * static_cast<double>(k) /
                                               static_cast<double>(points - 1));
    return grid;
}

FrequencyGrid FrequencyGrid::default_grid() { return log_spaced(80, 1e11, 1e19); }

void FrequencyGrid::validate() const {
    if (omega.empty()) throw input_error("frequency grid is empty");
    if (!(omega.front() > 0.0)) throw input_error("frequency grid points must be > 0");
    for (std::size_t k = 1; k < omega.size(); ++k)
        if (!(omega[k] > omega[k - 1])) throw input_error("frequency grid must be strictly increasing");
}

void SpectrumSample::validate() const {
    grid.validate();
    if (eps_real.size() != grid.size() || eps_imag.size() != grid.size())
        throw input_error("spectrum arrays must match the grid length");
    for (const double v : eps_imag)
        if (!(v >= 0.0)) throw input_error("spectrum eps'' must be >= 0 (passivity)");
}

SpectrumSample evaluate_spectrum(const DielectricModel& model, const FrequencyGrid& grid) {
    SpectrumSample s;
    s.grid = grid;
    s.eps_real.resize(grid.size());
    s.eps_imag.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto eps = eval_real(model, grid.omega[k]);
        s.eps_real[k] = eps.real();
        s.eps_imag[k] = eps.imag();
    }
    return s;
}

void TabulatedOptics::validate() const {
    if (omega.empty()) throw input_error("tabulated optics: table is empty");
    if (omega.size() != eps_imag.size())
        throw input_error("tabulated optics: frequency and eps'' columns differ in length");
    if (!(omega.front() > 0.0)) throw input_error("tabulated optics: frequencies must be > 0");
    for (std::size_t k = 1; k < omega.size(); ++k)
        if (!(omega[k] > omega[k - 1]))
            throw input_error("tabulated optics: frequencies must be strictly increasing");
    for (const double v : eps_imag)
        if (!(v >= 0.0)) throw input_error("tabulated optics: eps'' must be >= 0");
    if (!(low_freq_extrapolation.plasma_frequency >= 0.0))
        throw input_error("tabulated optics: extrapolation plasma frequency must be >= 0");
    if (!(low_freq_extrapolation.damping > 0.0))
        throw input_error("tabulated optics: extrapolation damping must be > 0");
}

namespace {

constexpr double ln10 = std::numbers::ln10;

// eps'' between adjacent knots: linear in log-log (exact for power laws),
// falling back to linear in omega when an endpoint vanishes.
double interp_eps_imag(const TabulatedOptics& t, std::size_t seg, double w) {
    const double w0 = t.omega[seg], w1 = t.omega[seg + 1];
    const double e0 = t.eps_imag[seg], e1 = t.eps_imag[seg + 1];
    if (e0 > 0.0 && e1 > 0.0) {
        const double f = std::log(w / w0) / std::log(w1 / w0);
        return std::exp(std::log(e0) + f * (std::log(e1) - std::log(e0)));
    }
    const double f = (w - w0) / (w1 - w0);
    return e0 + f * (e1 - e0);
}

double drude_eps_imag(const DrudeParams& d, double w) {
    if (d.plasma_frequency == 0.0) return 0.0;
    return d.plasma_frequency * d.plasma_frequency * d.damping /
           (w * (w * w + d.damping * d.damping));
}

// One ln-w panel of (2/pi) w^2 eps''(w) / (w^2 + xi^2).
template <typename F>
double log_panel(const F& eps2, double u_lo, double u_hi, double xi, const QuadratureRule& rule) {
    return integrate_legendre(
        [&](double u) {
            const double w = std::exp(u);
            return (2.0 / std::numbers::pi) * w * w * eps2(w) / (w * w + xi * xi);
        },
        u_lo, u_hi, rule);
}

struct KkTails {
    int low_decades = 0;   // Drude tail below the table
    int high_decades = 0;  // w^-3 tail above the table
};

double kk_table_part(const TabulatedOptics& t, double xi, const QuadratureRule& rule) {
    double acc = 0.0;
    for (std::size_t seg = 0; seg + 1 < t.omega.size(); ++seg)
        acc += log_panel([&](double w) { return interp_eps_imag(t, seg, w); },
                         std::log(t.omega[seg]), std::log(t.omega[seg + 1]), xi, rule);
    return acc;
}

double kk_low_decade(const TabulatedOptics& t, double xi, int k, const QuadratureRule& rule) {
    const double u_min = std::log(t.omega.front());
    return log_panel([&](double w) { return drude_eps_imag(t.low_freq_extrapolation, w); },
                     u_min - (k + 1) * ln10, u_min - k * ln10, xi, rule);
}

double kk_high_decade(const TabulatedOptics& t, double xi, int k, const QuadratureRule& rule) {
    const double u_max = std::log(t.omega.back());
    const double e_max = t.eps_imag.back();
    const double w_max = t.omega.back();
    return log_panel([&](double w) { return e_max * (w_max / w) * (w_max / w) * (w_max / w); },
                     u_max + k * ln10, u_max + (k + 1) * ln10, xi, rule);
}

// Extend the tails decade by decade until their panels fall below a small
// fraction of the running total; the extents are then reused across
// refinement orders so that the convergence comparison is clean.
KkTails choose_tails(const TabulatedOptics& t, double xi, double rel_tol, const QuadratureRule& rule) {
    constexpr int max_low = 60, max_high = 40;
    KkTails tails;
    double acc = std::abs(kk_table_part(t, xi, rule));
    const double cut = 1e-3 * rel_tol;
    while (tails.low_decades < max_low) {
        const double panel = kk_low_decade(t, xi, tails.low_decades, rule);
        if (std::abs(panel) <= cut * acc) break;
        acc += std::abs(panel);
        ++tails.low_decades;
    }
    while (tails.high_decades < max_high) {
        const double panel = kk_high_decade(t, xi, tails.high_decades, rule);
        if (std::abs(panel) <= cut * acc) break;
        acc += std::abs(panel);
        ++tails.high_decades;
    }
    return tails;
}

double kk_total(const TabulatedOptics& t, double xi, const KkTails& tails, const QuadratureRule& rule) {
    double acc = kk_table_part(t, xi, rule);
    for (int k = 0; k < tails.low_decades; ++k) acc += kk_low_decade(t, xi, k, rule);
    for (int k = 0; k < tails.high_decades; ++k) acc += kk_high_decade(t, xi, k, rule);
    return acc;
}

double kk_eval(const TabulatedOptics& t, double xi, double rel_tol) {
    const KkTails tails = choose_tails(t, xi, rel_tol, gauss_legendre(8));
    double prev = kk_total(t, xi, tails, gauss_legendre(8));
    for (const std::size_t order : {16, 32, 64}) {
        const double cur = kk_total(t, xi, tails, gauss_legendre(order));
        if (std::abs(cur - prev) <= rel_tol * std::abs(cur)) return cur;
        prev = cur;
    }
    throw numerical_error("kk continuation did not converge at xi=" + format_double(xi));
}

}  // namespace

double kk_continuation(const TabulatedOptics& data, double xi, double rel_tol) {
    data.validate();
    if (!(xi > 0.0)) throw std::domain_error("kk_continuation: xi must be > 0");
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw input_error("kk_continuation: rel_tol must be in (0,1)");
    return 1.0 + kk_eval(data, xi, rel_tol);
}

double kk_static_limit(const TabulatedOptics& data, double rel_tol) {
    data.validate();
    if (data.low_freq_extrapolation.plasma_frequency > 0.0)
        throw input_error("static permittivity diverges for a conducting (Drude) tail");
    return 1.0 + kk_eval(data, 0.0, rel_tol);
}

}  // namespace casispec
