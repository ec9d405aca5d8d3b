#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "roughwave/mesh.hpp"

namespace roughwave {

/// One splitmix64 step: returns (next state, output).
std::pair<std::uint64_t, std::uint64_t> splitmix64_next(std::uint64_t state);

/// Box-Muller transform of u1, u2 in (0,1]: returns (r cos(2 pi u2), r sin(2 pi u2))
/// with r = sqrt(-2 ln u1).
std::pair<double, double> box_muller(double u1, double u2);

/// Explicit-state generator: splitmix64 for the integer stream, Box-Muller
/// for normals. The sine partner of each Box-Muller pair is cached and
/// returned by the next standard_normal() call.
///
/// The bit recipe is fixed so that other implementations seeded the same way
/// produce the same stream:
///   uniform = (next_u64() >> 11) * 2^-53, with 0 replaced by 2^-53
///   normal  = box_muller(uniform(), uniform())
class RngState {
public:
    explicit RngState(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64();
    /// Uniform on (0,1].
    double next_uniform();
    double standard_normal();

    std::uint64_t state() const { return state_; }

    friend bool operator==(const RngState&, const RngState&) = default;

private:
    std::uint64_t state_;
    std::optional<double> spare_;
};

/// Seed for sample `index` of an ensemble:
/// base_seed XOR (0x9E3779B97F4A7C15 * (index + 1)) mod 2^64.
std::uint64_t derive_sample_seed(std::uint64_t base_seed, std::uint64_t index);

inline constexpr int kMaxFbmLevel = 26;

/// Fractional Brownian motion sampled at x_j = j * 2^-level, j = 0..2^level.
struct FbmPath {
    double hurst = 0.5;
    int level = 0;
    std::vector<double> points;
};

/// Standard deviation of the displacement added at bisection level l:
/// sqrt((1 - 2^(2H-2)) / 2^(2lH)).
double midpoint_displacement_scale(double hurst, int level);

using GaussianSource = std::function<double()>;

/// Random midpoint displacement. points[0] = 0, points[2^k] = first draw;
/// then for l = 0..k-1 and j = 0..2^l-1 (in that order) the midpoint of
/// interval j at level l is the neighbour average plus scale(l) * draw.
/// Consumes exactly 2^k draws in total.
///
/// Throws std::invalid_argument unless 0 < hurst < 1 and 1 <= level <= 26.
FbmPath fbm_midpoint(double hurst, int level, const GaussianSource& gaussian);
FbmPath fbm_midpoint(double hurst, int level, RngState& rng);

/// Divides by max |points|; a zero path is returned unchanged.
FbmPath normalize_to_unit(FbmPath path);

/// Normalized fBm on a [0,1] grid with 2^k cells: cell i takes the path
/// value at its left edge x = i * 2^-k (the final point is dropped).
CellField fbm_initial_field(double hurst, const Grid& grid, std::uint64_t seed);

/// Same, with an explicit Gaussian source (e.g. all zeros for debugging).
CellField fbm_initial_field(double hurst, const Grid& grid, const GaussianSource& gaussian);

/// Deterministic compactly supported C^alpha bump:
/// max(0, (1/4)^alpha - |x - 1/2|^alpha).
double holder_cap(double alpha, double x);

/// Log2 of n if n is a power of two, otherwise nullopt.
std::optional<int> exact_log2(std::size_t n);

}  // namespace roughwave
