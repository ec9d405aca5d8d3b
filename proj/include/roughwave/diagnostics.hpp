#pragma once

#include <span>
#include <utility>
#include <vector>

#include "roughwave/flux.hpp"
#include "roughwave/mesh.hpp"
#include "roughwave/solver.hpp"

namespace roughwave {

/// Sum of |v_{i+1} - v_i| over interior neighbours. The periodic variant
/// adds the wrap-around jump |v_0 - v_{n-1}|.
double total_variation(std::span<const double> values, Boundary convention = Boundary::Outflow);
double total_variation(const CellField& v, Boundary convention = Boundary::Outflow);

/// Discrete Lip+ seminorm max_i (v_{i+1} - v_i) / dx, signed. Needs >= 2 cells.
/// The periodic variant also includes the wrap-around pair (v_{n-1}, v_0).
double lip_plus(std::span<const double> values, double dx,
                Boundary convention = Boundary::Outflow);
double lip_plus(const CellField& v, Boundary convention = Boundary::Outflow);

/// dx_a * sum |a_i - b_i| after restricting b onto a's grid.
double l1_distance(const CellField& a, const CellField& b);

/// Sum over recorded time levels of TV(v^n) times the step that produced
/// it; the initial level is weighted by the nominal dt.
double tv_time_integral(const Trajectory& traj);

/// Inputs shared by the Lip+ / total-variation bound and the Kuznetsov-type
/// error bound.
struct BoundInputs {
    double lip_plus_0 = 0.0;
    double dt = 0.0;
    double dx = 0.0;
    double t_N = 0.0;
    double beta = 0.125;
    double M = 0.5;
    double C_F = 1.0;
    double lip_f = 1.0;
    double tv0 = 0.0;
    double eps = 1.0;
    double eps0 = 1.0;
    /// Mollifier-dependent constant; unknown in closed form, so this is a knob.
    double C = 1.0;
};

/// 2M (Lip+(v0) dt + ln(1 + beta t_N Lip+(v0)) / beta).
/// Throws std::domain_error if lip_plus_0 <= 0 or beta <= 0.
double lip_bound_rhs(const BoundInputs& b);

/// lip_bound_rhs(b) / tv_time_integral(traj); throws std::domain_error if
/// the integral is zero.
double sharpness_ratio(const Trajectory& traj, const BoundInputs& b);

/// 2 l1_init_err + tv0 (2 eps + eps0 |f|_Lip + 2 C_F max(eps0, dt))
///   + C (C_F dx / eps + |f|_Lip dt / eps0) * tv_integral.
double kuznetsov_bound(const BoundInputs& b, double tv_integral, double l1_init_err);

/// Lip+ stability constant for a (flux, scheme) pair. Only Burgers with
/// Godunov has a known value (1/8); every other pair throws.
double default_beta(FluxSpec flux, NumericalFluxKind numflux);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least-squares line through (ln h, ln e). Needs >= 2 points with distinct
/// h; throws std::invalid_argument on nonpositive h or e.
RateFit fit_rate(std::span<const std::pair<double, double>> points);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y = slope x + intercept with coefficient of
/// determination (1 when y is constant and fitted exactly).
LinearFit fit_linear(std::span<const double> x, std::span<const double> y);

}  // namespace roughwave
