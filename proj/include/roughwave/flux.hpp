#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace roughwave {

enum class Equation { Burgers, Cubic, Linear };

/// Physical flux: Burgers u^2/2, Cubic u^3/3, Linear u.
struct FluxSpec {
    Equation kind = Equation::Burgers;

    friend bool operator==(const FluxSpec&, const FluxSpec&) = default;
};

enum class NumericalFluxKind { Godunov, Rusanov, LaxFriedrichs, EngquistOsher, Upwind };

/// Two-point numerical flux. `lambda` (dt/dx) is only read by Lax-Friedrichs.
struct NumericalFluxSpec {
    NumericalFluxKind kind = NumericalFluxKind::Godunov;
    std::optional<double> lambda;

    friend bool operator==(const NumericalFluxSpec&, const NumericalFluxSpec&) = default;
};

std::string_view to_string(Equation e);
std::string_view to_string(NumericalFluxKind k);
/// Inverse of to_string; throws std::invalid_argument on unknown names.
Equation parse_equation(std::string_view name);
NumericalFluxKind parse_numerical_flux(std::string_view name);

double flux_value(FluxSpec spec, double u);
double flux_deriv(FluxSpec spec, double u);

/// Exact Riemann flux: min of f over [a,b] when a <= b, max over [b,a]
/// otherwise. Uses the closed form via the critical point u = 0.
double godunov_flux(FluxSpec spec, double a, double b);

/// Local Lax-Friedrichs with speed max(|f'(a)|, |f'(b)|).
double rusanov_flux(FluxSpec spec, double a, double b);

/// Classical Lax-Friedrichs; throws std::invalid_argument if lambda <= 0.
double lax_friedrichs_flux(FluxSpec spec, double a, double b, double lambda);

/// F(a,b) = f+(a) + f-(b) where f+(u) = int_0^u max(f',0) and
/// f-(u) = int_0^u min(f',0).
double engquist_osher_flux(FluxSpec spec, double a, double b);

/// Returns a; only defined for the linear flux (throws otherwise).
double upwind_flux(FluxSpec spec, double a, double b);

/// Dispatches on numflux.kind. Lax-Friedrichs requires numflux.lambda.
double numerical_flux(const NumericalFluxSpec& numflux, FluxSpec spec, double a, double b);

/// Throws std::invalid_argument for combinations the schemes do not
/// support (upwind with a nonlinear flux, Lax-Friedrichs without lambda).
void validate_pairing(const NumericalFluxSpec& numflux, FluxSpec spec);

/// max |f'| over [u_min, u_max]; throws if u_min > u_max.
double max_wave_speed(FluxSpec spec, double u_min, double u_max);

struct MonotonicityReport {
    bool monotone = true;
    std::size_t violations = 0;
    /// Largest amount by which a sampled difference had the wrong sign.
    double worst_violation = 0.0;
    double worst_a = 0.0;
    double worst_b = 0.0;
    /// 0 if the worst violation was in the first argument, 1 for the second.
    int worst_argument = -1;
};

inline constexpr double kMonotoneTolerance = 1e-10;

/// Finite-difference probe of monotonicity on [u_lo, u_hi]^2: F must be
/// nondecreasing in a and nonincreasing in b at every sampled pair, with
/// step (u_hi - u_lo) / samples_per_axis.
MonotonicityReport check_monotone(const NumericalFluxSpec& numflux, FluxSpec spec, double u_lo,
                                  double u_hi, std::size_t samples_per_axis);

}  // namespace roughwave
