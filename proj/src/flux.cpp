#include "roughwave/flux.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace roughwave {

std::string_view to_string(Equation e) {
    switch (e) {
        case Equation::Burgers: return "burgers";
        case Equation::Cubic: return "cubic";
        case Equation::Linear: return "linear";
    }
    return "unknown";
}

std::string_view to_string(NumericalFluxKind k) {
    switch (k) {
        case NumericalFluxKind::Godunov: return "godunov";
        case NumericalFluxKind::Rusanov: return "rusanov";
        case NumericalFluxKind::LaxFriedrichs: return "lax_friedrichs";
        case NumericalFluxKind::EngquistOsher: return "engquist_osher";
        case NumericalFluxKind::Upwind: return "upwind";
    }
    return "unknown";
}

Equation parse_equation(std::string_view name) {
    for (auto e : {Equation::Burgers, Equation::Cubic, Equation::Linear}) {
        if (to_string(e) == name) return e;
    }
    throw std::invalid_argument("unknown equation '" + std::string(name) + "'");
}

NumericalFluxKind parse_numerical_flux(std::string_view name) {
    for (auto k : {NumericalFluxKind::Godunov, NumericalFluxKind::Rusanov,
                   NumericalFluxKind::LaxFriedrichs, NumericalFluxKind::EngquistOsher,
                   NumericalFluxKind::Upwind}) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown numerical flux '" + std::string(name) + "'");
}

double flux_value(FluxSpec spec, double u) {
    switch (spec.kind) {
        case Equation::Burgers: return 0.5 * u * u;
        case Equation::Cubic: return u * u * u / 3.0;
        case Equation::Linear: return u;
    }
    return 0.0;
}

double flux_deriv(FluxSpec spec, double u) {
    switch (spec.kind) {
        case Equation::Burgers: return u;
        case Equation::Cubic: return u * u;
        case Equation::Linear: return 1.0;
    }
    return 0.0;
}

double godunov_flux(FluxSpec spec, double a, double b) {
    if (spec.kind == Equation::Linear) {
        return a;
    }
    const double fa = flux_value(spec, a);
    const double fb = flux_value(spec, b);
    // Both built-in nonlinear fluxes have their only critical point at 0.
    const bool zero_inside = std::min(a, b) < 0.0 && 0.0 < std::max(a, b);
    if (a <= b) {
        double m = std::min(fa, fb);
        if (zero_inside) m = std::min(m, flux_value(spec, 0.0));
        return m;
    }
    double m = std::max(fa, fb);
    if (zero_inside) m = std::max(m, flux_value(spec, 0.0));
    return m;
}

double rusanov_flux(FluxSpec spec, double a, double b) {
    const double s = std::max(std::abs(flux_deriv(spec, a)), std::abs(flux_deriv(spec, b)));
    return 0.5 * (flux_value(spec, a) + flux_value(spec, b)) - 0.5 * s * (b - a);
}

double lax_friedrichs_flux(FluxSpec spec, double a, double b, double lambda) {
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("lax_friedrichs: lambda must be positive");
    }
    return 0.5 * (flux_value(spec, a) + flux_value(spec, b)) - (b - a) / (2.0 * lambda);
}

double engquist_osher_flux(FluxSpec spec, double a, double b) {
    switch (spec.kind) {
        case Equation::Burgers: {
            const double ap = std::max(a, 0.0);
            const double bm = std::min(b, 0.0);
            return 0.5 * ap * ap + 0.5 * bm * bm;
        }
        case Equation::Cubic:
            // f' = u^2 >= 0 everywhere, so f+ = f and f- = 0.
            return a * a * a / 3.0;
        case Equation::Linear:
            return a;
    }
    return 0.0;
}

double upwind_flux(FluxSpec spec, double a, double /*b*/) {
    if (spec.kind != Equation::Linear) {
        throw std::invalid_argument("upwind flux is only defined for the linear equation");
    }
    return a;
}

void validate_pairing(const NumericalFluxSpec& numflux, FluxSpec spec) {
    if (numflux.kind == NumericalFluxKind::Upwind && spec.kind != Equation::Linear) {
        throw std::invalid_argument("upwind flux requires equation = linear, got " +
                                    std::string(to_string(spec.kind)));
    }
    if (numflux.kind == NumericalFluxKind::LaxFriedrichs && numflux.lambda &&
        !(*numflux.lambda > 0.0)) {
        throw std::invalid_argument("lax_friedrichs: lambda must be positive");
    }
}

double numerical_flux(const NumericalFluxSpec& numflux, FluxSpec spec, double a, double b) {
    switch (numflux.kind) {
        case NumericalFluxKind::Godunov: return godunov_flux(spec, a, b);
        case NumericalFluxKind::Rusanov: return rusanov_flux(spec, a, b);
        case NumericalFluxKind::LaxFriedrichs:
            if (!numflux.lambda) {
                throw std::invalid_argument("lax_friedrichs: lambda (dt/dx) not set");
            }
            return lax_friedrichs_flux(spec, a, b, *numflux.lambda);
        case NumericalFluxKind::EngquistOsher: return engquist_osher_flux(spec, a, b);
        case NumericalFluxKind::Upwind: return upwind_flux(spec, a, b);
    }
    throw std::logic_error("numerical_flux: unhandled kind");
}

double max_wave_speed(FluxSpec spec, double u_min, double u_max) {
    if (u_min > u_max) {
        throw std::invalid_argument("max_wave_speed: u_min > u_max");
    }
    switch (spec.kind) {
        case Equation::Burgers: return std::max(std::abs(u_min), std::abs(u_max));
        case Equation::Cubic: return std::max(u_min * u_min, u_max * u_max);
        case Equation::Linear: return 1.0;
    }
    return 0.0;
}

MonotonicityReport check_monotone(const NumericalFluxSpec& numflux, FluxSpec spec, double u_lo,
                                  double u_hi, std::size_t samples_per_axis) {
    if (samples_per_axis < 2) {
        throw std::invalid_argument("check_monotone: need at least 2 samples per axis");
    }
    if (!(u_lo < u_hi)) {
        throw std::invalid_argument("check_monotone: empty box");
    }
    validate_pairing(numflux, spec);
    const double width = u_hi - u_lo;
    const double delta = width / static_cast<double>(samples_per_axis);
    const double spacing = width / static_cast<double>(samples_per_axis - 1);

    MonotonicityReport report;
    auto record = [&](double amount, double a, double b, int argument) {
        ++report.violations;
        report.monotone = false;
        if (amount > report.worst_violation) {
            report.worst_violation = amount;
            report.worst_a = a;
            report.worst_b = b;
            report.worst_argument = argument;
        }
    };
    for (std::size_t i = 0; i < samples_per_axis; ++i) {
        const double a = u_lo + static_cast<double>(i) * spacing;
        for (std::size_t j = 0; j < samples_per_axis; ++j) {
            const double b = u_lo + static_cast<double>(j) * spacing;
            const double f = numerical_flux(numflux, spec, a, b);
            const double fa = numerical_flux(numflux, spec, a + delta, b);
            const double fb = numerical_flux(numflux, spec, a, b + delta);
            if (fa < f - kMonotoneTolerance) record(f - fa, a, b, 0);
            if (fb > f + kMonotoneTolerance) record(fb - f, a, b, 1);
        }
    }
    return report;
}

}  // namespace roughwave
