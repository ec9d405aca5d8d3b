#include "roughwave/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace roughwave {

double total_variation(std::span<const double> values, Boundary convention) {
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        tv += std::abs(values[i + 1] - values[i]);
    }
    if (convention == Boundary::Periodic && values.size() > 1) {
        tv += std::abs(values.front() - values.back());
    }
    return tv;
}

double total_variation(const CellField& v, Boundary convention) {
    return total_variation(v.values(), convention);
}

double lip_plus(std::span<const double> values, double dx, Boundary convention) {
    if (values.size() < 2) {
        throw std::invalid_argument("lip_plus: need at least two cells");
    }
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        best = std::max(best, values[i + 1] - values[i]);
    }
    if (convention == Boundary::Periodic) {
        best = std::max(best, values.front() - values.back());
    }
    return best / dx;
}

double lip_plus(const CellField& v, Boundary convention) {
    return lip_plus(v.values(), v.grid().dx(), convention);
}

double l1_distance(const CellField& a, const CellField& b) {
    const CellField b_on_a = restrict_to(b, a.grid());
    const auto av = a.values();
    const auto bv = b_on_a.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) {
        sum += std::abs(av[i] - bv[i]);
    }
    return a.grid().dx() * sum;
}

double tv_time_integral(const Trajectory& traj) {
    const auto& tv = traj.per_step_tv;
    if (tv.empty()) return 0.0;
    double sum = tv[0] * traj.dt_used;
    for (std::size_t n = 1; n < tv.size(); ++n) {
        sum += tv[n] * (traj.times[n] - traj.times[n - 1]);
    }
    return sum;
}

double lip_bound_rhs(const BoundInputs& b) {
    if (!(b.lip_plus_0 > 0.0)) {
        throw std::domain_error("lip_bound_rhs: Lip+ of the initial data must be positive");
    }
    if (!(b.beta > 0.0)) {
        throw std::domain_error("lip_bound_rhs: beta must be positive");
    }
    return 2.0 * b.M *
           (b.lip_plus_0 * b.dt + std::log1p(b.beta * b.t_N * b.lip_plus_0) / b.beta);
}

double sharpness_ratio(const Trajectory& traj, const BoundInputs& b) {
    const double integral = tv_time_integral(traj);
    if (!(integral > 0.0)) {
        throw std::domain_error("sharpness_ratio: time-integrated total variation is zero");
    }
    return lip_bound_rhs(b) / integral;
}

double kuznetsov_bound(const BoundInputs& b, double tv_integral, double l1_init_err) {
    if (!(b.eps > 0.0) || !(b.eps0 > 0.0)) {
        throw std::domain_error("kuznetsov_bound: eps and eps0 must be positive");
    }
    return 2.0 * l1_init_err +
           b.tv0 * (2.0 * b.eps + b.eps0 * b.lip_f + 2.0 * b.C_F * std::max(b.eps0, b.dt)) +
           b.C * (b.C_F * b.dx / b.eps + b.lip_f * b.dt / b.eps0) * tv_integral;
}

double default_beta(FluxSpec flux, NumericalFluxKind numflux) {
    if (flux.kind == Equation::Burgers && numflux == NumericalFluxKind::Godunov) {
        return 0.5 * 0.25;
    }
    throw std::invalid_argument("no known Lip+ stability constant for " +
                                std::string(to_string(flux.kind)) + " with " +
                                std::string(to_string(numflux)) + "; pass beta explicitly");
}

RateFit fit_rate(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) {
        throw std::invalid_argument("fit_rate: need at least two points");
    }
    std::vector<double> x;
    std::vector<double> y;
    std::set<double> distinct;
    for (const auto& [h, e] : points) {
        if (!(h > 0.0) || !(e > 0.0)) {
            throw std::invalid_argument("fit_rate: h and e must be positive");
        }
        x.push_back(std::log(h));
        y.push_back(std::log(e));
        distinct.insert(h);
    }
    if (distinct.size() < 2) {
        throw std::invalid_argument("fit_rate: need at least two distinct h");
    }
    const LinearFit f = fit_linear(x, y);
    return {f.slope, f.intercept};
}

LinearFit fit_linear(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("fit_linear: need matching inputs with at least two points");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) {
        throw std::invalid_argument("fit_linear: x values are all equal");
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

}  // namespace roughwave
