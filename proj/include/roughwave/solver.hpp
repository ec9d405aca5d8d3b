#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "roughwave/flux.hpp"
#include "roughwave/mesh.hpp"

namespace roughwave {

enum class Boundary { Outflow, Periodic };

std::string_view to_string(Boundary b);
Boundary parse_boundary(std::string_view name);

inline constexpr double kDefaultCfl = 0.5;

struct SchemeConfig {
    FluxSpec flux;
    NumericalFluxSpec numflux;
    double cfl = kDefaultCfl;
    Boundary boundary = Boundary::Outflow;
    double t_final = 1.0;
};

/// Throws std::invalid_argument unless cfl is in (0,1], t_final >= 0 and the
/// flux pairing is supported.
void validate(const SchemeConfig& config);

struct Snapshot {
    double requested_time = 0.0;
    double time = 0.0;
    CellField field;
};

/// Time history of one run. times[0] = 0 and times.back() = t_final;
/// per_step_tv[n] and per_step_lip_plus[n] are measured at times[n].
struct Trajectory {
    Grid grid;
    Boundary boundary = Boundary::Outflow;
    std::vector<double> times;
    std::vector<Snapshot> snapshots;
    std::vector<double> per_step_tv;
    std::vector<double> per_step_lip_plus;
    double dt_used = 0.0;
    CellField final_state;
};

/// dt = cfl * dx / max_wave_speed(spec, u_min, u_max); falls back to
/// cfl * dx when the speed is zero.
double cfl_timestep(const Grid& grid, FluxSpec spec, double u_min, double u_max, double cfl);

/// One explicit conservative update
///   v_i <- v_i - dt/dx (F(v_i, v_{i+1}) - F(v_{i-1}, v_i))
/// with ghost cells from the boundary rule. Lax-Friedrichs uses lambda = dt/dx.
///
/// Throws std::invalid_argument if dt <= 0 and std::runtime_error naming the
/// first cell if the update produces a non-finite value.
CellField step(const CellField& state, const SchemeConfig& config, double dt);

/// Buffer form of step(); `out` must not alias `in`.
void step_into(std::span<const double> in, std::span<double> out, double dx,
               const SchemeConfig& config, double dt);

struct EvolveOptions {
    /// Sorted times in [0, t_final]; each is recorded at the first time
    /// point at or after it.
    std::vector<double> snapshot_times;
    /// Record a snapshot after every step (debugging and oracles).
    bool store_every_step = false;
};

/// Fixed-dt evolution to config.t_final. dt comes from cfl_timestep over
/// [min v0, max v0]; the last step is shortened to land on t_final.
Trajectory evolve(const CellField& initial, const SchemeConfig& config,
                  const EvolveOptions& options = {});

}  // namespace roughwave
