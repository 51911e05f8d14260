#include "casispec/lifshitz.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "casispec/constants.hpp"
#include "casispec/errors.hpp"
#include "casispec/io.hpp"
#include "casispec/quadrature.hpp"

namespace casispec {

void MatsubaraSettings::validate() const {
    if (!(temperature > 0.0)) throw std::domain_error("matsubara settings: temperature must be > 0");
    if (!(term_tolerance > 0.0 && term_tolerance < 1.0))
        throw input_error("matsubara settings: term_tolerance must be in (0,1)");
    if (!(quadrature_tolerance > 0.0 && quadrature_tolerance < 1.0))
        throw input_error("matsubara settings: quadrature_tolerance must be in (0,1)");
}

double matsubara_frequency(double temperature, std::size_t n) {
    if (!(temperature > 0.0)) throw std::domain_error("matsubara_frequency: temperature must be > 0");
    return 2.0 * std::numbers::pi * static_cast<double>(n) * constants::k_boltzmann * temperature /
           constants::hbar;
}

namespace {

void reflection_from_kappa0(double eps, double xi, double kappa0, double& r_te, double& r_tm) {
    const double xoc = xi / constants::c_light;
    const double kappa_m = std::sqrt(kappa0 * kappa0 + (eps - 1.0) * xoc * xoc);
    r_te = (kappa0 - kappa_m) / (kappa0 + kappa_m);
    r_tm = (eps * kappa0 - kappa_m) / (eps * kappa0 + kappa_m);
}

// Li_3(x) = sum_m x^m / m^3: the n = 0 k-integral in closed form. The series
// is cut at m = 6e4, keeping the absolute truncation error below 2e-10 even
// at x = 1.
double li3(double x) {
    if (x == 1.0) return 1.2020569031595943;          // zeta(3)
    if (x == 0.0) return 0.0;
    double sum = 0.0, power = x;
    for (std::size_t m = 1; m <= 60000; ++m) {
        const double md = static_cast<double>(m);
        const double term = power / (md * md * md);
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
        power *= x;
    }
    return sum;
}

double static_tm_reflection(const StaticResponse& s) {
    return s.conducting ? 1.0 : (s.eps_static - 1.0) / (s.eps_static + 1.0);
}

// Reduced k-integrals after substituting y = 2 kappa0 d (so k dk kappa0 ->
// y^2 dy / 8d^3 and k dk -> y dy / 4d^2), taken over y in [y0, inf) with
// y0 = 2 xi d / c. Both reflection coefficients are smooth functions of y.
struct KTermIntegrand {
    double d = 0.0;
    double xi = 0.0;
    double eps_a = 1.0;
    double eps_b = 1.0;

    void products(double y, double out[2]) const {
        const double kappa0 = y / (2.0 * d);
        double rte_a, rtm_a, rte_b, rtm_b;
        reflection_from_kappa0(eps_a, xi, kappa0, rte_a, rtm_a);
        reflection_from_kappa0(eps_b, xi, kappa0, rte_b, rtm_b);
        out[0] = rte_a * rte_b;
        out[1] = rtm_a * rtm_b;
    }

    // e^{+y} rescaling of y^2 sum_p R_p e^{-y} / (1 - R_p e^{-y}), as
    // consumed by Gauss-Laguerre.
    double pressure_scaled(double y) const {
        double r[2];
        products(y, r);
        const double emy = std::exp(-y);
        return y * y * (r[0] / (1.0 - r[0] * emy) + r[1] / (1.0 - r[1] * emy));
    }

    // y sum_p ln(1 - R_p e^{-y}), unscaled.
    double energy_raw(double y) const {
        double r[2];
        products(y, r);
        const double emy = std::exp(-y);
        return y * (std::log1p(-r[0] * emy) + std::log1p(-r[1] * emy));
    }

    // e^{+y} rescaling of energy_raw, valid only where R e^{-y} is tiny.
    double energy_scaled_tail(double y) const {
        double r[2];
        products(y, r);
        const double emy = std::exp(-y);
        double sum = 0.0;
        for (const double rp : {r[0], r[1]}) {
            const double x = rp * emy;
            sum += (std::abs(x) < 1e-12) ? -rp * (1.0 + 0.5 * x) : std::log1p(-x) / emy;
        }
        return y * sum;
    }
};

// Shifted Gauss-Laguerre with order doubling; relative convergence check.
std::optional<double> pressure_integral(const KTermIntegrand& g, double y0, double rel_tol) {
    const double damp = std::exp(-y0);
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (const std::size_t order : {60, 120, 240, 480, 960}) {
        const QuadratureRule& rule = gauss_laguerre(order);
        double acc = 0.0;
        for (std::size_t i = 0; i < order; ++i)
            acc += rule.weights[i] * g.pressure_scaled(y0 + rule.nodes[i]);
        acc *= damp;
        if (!std::isnan(prev) && std::abs(acc - prev) <= rel_tol * std::abs(acc)) return acc;
        prev = acc;
    }
    return std::nullopt;
}

// The energy integrand carries an integrable log singularity as y0 -> 0 with
// reflection products near 1 (almost-ideal metals at the lowest Matsubara
// frequencies), which defeats plain Gauss-Laguerre. Composite Gauss-Legendre
// panels graded geometrically toward y0 resolve it; beyond y0 + 40 the
// exponential tail is a benign Laguerre integral.
std::optional<double> energy_integral(const KTermIntegrand& g, double y0, double rel_tol) {
    constexpr double span = 40.0;
    constexpr int grading_levels = 46;

    const auto paneled = [&](const QuadratureRule& rule) {
        double acc = 0.0;
        double hi = span;
        for (int level = 0; level + 1 < grading_levels; ++level) {
            const double lo = hi * 0.5;
            acc += integrate_legendre([&](double y) { return g.energy_raw(y); }, y0 + lo, y0 + hi, rule);
            hi = lo;
        }
        acc += integrate_legendre([&](double y) { return g.energy_raw(y); }, y0, y0 + hi, rule);
        return acc;
    };

    const QuadratureRule& tail_rule = gauss_laguerre(60);
    double tail = 0.0;
    for (std::size_t i = 0; i < tail_rule.nodes.size(); ++i)
        tail += tail_rule.weights[i] * g.energy_scaled_tail(y0 + span + tail_rule.nodes[i]);
    tail *= std::exp(-(y0 + span));

    double prev = std::numeric_limits<double>::quiet_NaN();
    for (const std::size_t order : {8, 16, 32}) {
        const double acc = paneled(gauss_legendre(order)) + tail;
        if (!std::isnan(prev) && std::abs(acc - prev) <= rel_tol * std::abs(acc)) return acc;
        prev = acc;
    }
    return std::nullopt;
}

constexpr std::size_t max_matsubara_terms = 200000;

// Shared Matsubara loop for pressure and free energy. Returns the reduced
// dimensionless sum; prefactors are applied by the callers.
double matsubara_sum(double d, const Material& a, const Material& b,
                     const MatsubaraSettings& settings, bool energy) {
    if (!(d > 0.0)) throw std::domain_error("separation must be > 0");
    settings.validate();

    const double r0 = static_tm_reflection(a.static_response()) * static_tm_reflection(b.static_response());
    double sum = energy ? -0.5 * li3(r0) : li3(r0);

    std::size_t consecutive_small = 0;
    for (std::size_t n = 1; consecutive_small < 5; ++n) {
        if (n > max_matsubara_terms)
            throw numerical_error("matsubara series not converged after " +
                                  std::to_string(max_matsubara_terms) + " terms at d=" + format_double(d));
        const double xi = matsubara_frequency(settings.temperature, n);
        const KTermIntegrand g{d, xi, a.eps_imag_axis(xi), b.eps_imag_axis(xi)};
        const double y0 = 2.0 * xi * d / constants::c_light;
        const auto term = energy ? energy_integral(g, y0, settings.quadrature_tolerance)
                                 : pressure_integral(g, y0, settings.quadrature_tolerance);
        if (!term)
            throw numerical_error("k-integral not converged at matsubara n=" + std::to_string(n) +
                                  ", d=" + format_double(d));
        sum += *term;
        consecutive_small =
            (std::abs(*term) <= settings.term_tolerance * std::abs(sum)) ? consecutive_small + 1 : 0;
    }
    return sum;
}

}  // namespace

ReflectionPair fresnel(double eps, double xi, double k) {
    if (!(eps >= 1.0)) throw std::domain_error("fresnel: eps(i xi) must be >= 1");
    if (!(xi > 0.0)) throw std::domain_error("fresnel: xi must be > 0");
    if (!(k >= 0.0)) throw std::domain_error("fresnel: k must be >= 0");
    ReflectionPair rp;
    rp.kappa0 = std::hypot(k, xi / constants::c_light);
    reflection_from_kappa0(eps, xi, rp.kappa0, rp.r_te, rp.r_tm);
    return rp;
}

double pressure(double d, const Material& a, const Material& b, const MatsubaraSettings& settings) {
    const double sum = matsubara_sum(d, a, b, settings, false);
    if (sum == 0.0) return 0.0;  // vacuum: avoid a signed zero
    const double kt = constants::k_boltzmann * settings.temperature;
    return -kt / (8.0 * std::numbers::pi * d * d * d) * sum;
}

double free_energy_per_area(double d, const Material& a, const Material& b,
                            const MatsubaraSettings& settings) {
    const double sum = matsubara_sum(d, a, b, settings, true);
    if (sum == 0.0) return 0.0;
    const double kt = constants::k_boltzmann * settings.temperature;
    return kt / (8.0 * std::numbers::pi * d * d) * sum;
}

PfaGradient pfa_gradient(double d, const SphereGeometry& geom, const Material& a, const Material& b,
                         const MatsubaraSettings& settings) {
    if (!(geom.radius > 0.0)) throw std::domain_error("pfa_gradient: sphere radius must be > 0");
    PfaGradient out;
    out.value = 2.0 * std::numbers::pi * geom.radius * pressure(d, a, b, settings);
    out.pfa_warning = geom.radius < 10.0 * d;
    return out;
}

void ForceCurve::validate() const {
    if (separations.size() != values.size())
        throw input_error("force curve: separations and values differ in length");
    if (separations.empty()) throw input_error("force curve: empty");
    if (!(separations.front() > 0.0)) throw input_error("force curve: separations must be > 0");
    for (std::size_t i = 1; i < separations.size(); ++i)
        if (!(separations[i] > separations[i - 1]))
            throw input_error("force curve: separations must be strictly increasing");
}

ForceCurve force_curve(const std::vector<double>& separations, const Material& a, const Material& b,
                       const MatsubaraSettings& settings, CurveKind kind,
                       std::optional<SphereGeometry> geometry) {
    if (kind == CurveKind::gradient && !geometry)
        throw input_error("force_curve: gradient curves need a sphere geometry");
    if (kind == CurveKind::pressure && geometry)
        throw input_error("force_curve: pressure curves take no sphere geometry");

    ForceCurve curve;
    curve.kind = kind;
    curve.separations = separations;
    curve.values.resize(separations.size());
    curve.validate();

    if (kind == CurveKind::gradient && geometry->radius < 10.0 * separations.back())
        std::fprintf(stderr,
                     "warning: PFA stretched thin, sphere radius %s m < 10 x max separation %s m\n",
                     format_double(geometry->radius).c_str(),
                     format_double(separations.back()).c_str());

    for (std::size_t i = 0; i < separations.size(); ++i) {
        curve.values[i] = (kind == CurveKind::pressure)
                              ? pressure(separations[i], a, b, settings)
                              : pfa_gradient(separations[i], *geometry, a, b, settings).value;
    }
    return curve;
}

std::vector<double> uniform_separations(double d_min, double d_max, std::size_t count) {
    if (count < 1) throw input_error("uniform_separations: need at least one point");
    if (!(d_min > 0.0)) throw input_error("uniform_separations: d_min must be > 0");
    if (count == 1) {
        if (d_min != d_max) throw input_error("uniform_separations: a single point needs d_min == d_max");
        return {d_min};
    }
    if (!(d_max > d_min)) throw input_error("uniform_separations: d_max must exceed d_min");
    std::vector<double> out(count);
    const double step = (d_max - d_min) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) out[i] = d_min + step * static_cast<double>(i);
    return out;
}

}  // namespace casispec
