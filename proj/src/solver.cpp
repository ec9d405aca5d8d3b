#include "roughwave/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "roughwave/diagnostics.hpp"

namespace roughwave {

std::string_view to_string(Boundary b) {
    return b == Boundary::Periodic ? "periodic" : "outflow";
}

Boundary parse_boundary(std::string_view name) {
    if (name == "outflow") return Boundary::Outflow;
    if (name == "periodic") return Boundary::Periodic;
    throw std::invalid_argument("unknown boundary '" + std::string(name) + "'");
}

void validate(const SchemeConfig& config) {
    if (!(config.cfl > 0.0 && config.cfl <= 1.0)) {
        throw std::invalid_argument("scheme: cfl must lie in (0,1]");
    }
    if (!(config.t_final >= 0.0) || !std::isfinite(config.t_final)) {
        throw std::invalid_argument("scheme: t_final must be finite and nonnegative");
    }
    validate_pairing(config.numflux, config.flux);
}

double cfl_timestep(const Grid& grid, FluxSpec spec, double u_min, double u_max, double cfl) {
    if (!(cfl > 0.0 && cfl <= 1.0)) {
        throw std::invalid_argument("cfl_timestep: cfl must lie in (0,1]");
    }
    const double speed = max_wave_speed(spec, u_min, u_max);
    return speed > 0.0 ? cfl * grid.dx() / speed : cfl * grid.dx();
}

namespace {

template <class Flux>
void conservative_update(std::span<const double> in, std::span<double> out, double ratio,
                         Boundary boundary, Flux&& flux) {
    const std::size_t n = in.size();
    const double left_ghost = boundary == Boundary::Periodic ? in[n - 1] : in[0];
    const double right_ghost = boundary == Boundary::Periodic ? in[0] : in[n - 1];
    // Flux through the left face of cell i, carried across iterations.
    double f_left = flux(left_ghost, in[0]);
    for (std::size_t i = 0; i < n; ++i) {
        const double right = i + 1 < n ? in[i + 1] : right_ghost;
        const double f_right = flux(in[i], right);
        out[i] = in[i] - ratio * (f_right - f_left);
        f_left = f_right;
    }
}

}  // namespace

void step_into(std::span<const double> in, std::span<double> out, double dx,
               const SchemeConfig& config, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("step: dt must be positive");
    }
    if (in.size() != out.size() || in.empty()) {
        throw std::invalid_argument("step: buffer size mismatch");
    }
    const double ratio = dt / dx;
    const FluxSpec spec = config.flux;
    const Boundary bc = config.boundary;
    switch (config.numflux.kind) {
        case NumericalFluxKind::Godunov:
            conservative_update(in, out, ratio, bc,
                                [spec](double a, double b) { return godunov_flux(spec, a, b); });
            break;
        case NumericalFluxKind::Rusanov:
            conservative_update(in, out, ratio, bc,
                                [spec](double a, double b) { return rusanov_flux(spec, a, b); });
            break;
        case NumericalFluxKind::LaxFriedrichs:
            conservative_update(in, out, ratio, bc, [spec, ratio](double a, double b) {
                return lax_friedrichs_flux(spec, a, b, ratio);
            });
            break;
        case NumericalFluxKind::EngquistOsher:
            conservative_update(in, out, ratio, bc, [spec](double a, double b) {
                return engquist_osher_flux(spec, a, b);
            });
            break;
        case NumericalFluxKind::Upwind:
            validate_pairing(config.numflux, spec);
            conservative_update(in, out, ratio, bc, [](double a, double) { return a; });
            break;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!std::isfinite(out[i])) {
            throw std::runtime_error("step: non-finite value in cell " + std::to_string(i) +
                                     " (CFL violation or flux failure)");
        }
    }
}

CellField step(const CellField& state, const SchemeConfig& config, double dt) {
    std::vector<double> out(state.size());
    step_into(state.values(), out, state.grid().dx(), config, dt);
    return CellField(state.grid(), std::move(out));
}

Trajectory evolve(const CellField& initial, const SchemeConfig& config,
                  const EvolveOptions& options) {
    validate(config);
    const double t_final = config.t_final;
    double previous = 0.0;
    for (double s : options.snapshot_times) {
        if (!(s >= 0.0 && s <= t_final)) {
            throw std::invalid_argument("evolve: snapshot time " + std::to_string(s) +
                                        " outside [0, t_final]");
        }
        if (s < previous) {
            throw std::invalid_argument("evolve: snapshot times must be sorted");
        }
        previous = s;
    }

    const Grid& grid = initial.grid();
    const double dt = cfl_timestep(grid, config.flux, initial.min(), initial.max(), config.cfl);
    const bool track_lip = grid.n_cells() >= 2;

    Trajectory traj{grid, config.boundary, {}, {}, {}, {}, dt, initial};

    std::vector<double> current(initial.values().begin(), initial.values().end());
    std::vector<double> next(current.size());
    std::size_t next_snapshot = 0;
    const double time_tol = 1e-12 * dt;

    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.per_step_tv.push_back(total_variation(current, config.boundary));
        if (track_lip) traj.per_step_lip_plus.push_back(lip_plus(current, grid.dx(), config.boundary));
        const bool take_all = options.store_every_step;
        bool created = false;
        while (next_snapshot < options.snapshot_times.size() &&
               options.snapshot_times[next_snapshot] <= t + time_tol) {
            traj.snapshots.push_back({options.snapshot_times[next_snapshot], t,
                                      CellField(grid, current)});
            ++next_snapshot;
            created = true;
        }
        if (take_all && !created) {
            traj.snapshots.push_back({t, t, CellField(grid, current)});
        }
    };

    record(0.0);
    std::size_t n = 0;
    double t = 0.0;
    while (t_final - t > time_tol) {
        const double nominal = static_cast<double>(n + 1) * dt;
        const bool last = t_final - nominal <= time_tol;
        const double t_next = last ? t_final : nominal;
        step_into(current, next, grid.dx(), config, t_next - t);
        current.swap(next);
        t = t_next;
        ++n;
        record(t);
    }

    traj.final_state = CellField(grid, std::move(current));
    return traj;
}

}  // namespace roughwave
