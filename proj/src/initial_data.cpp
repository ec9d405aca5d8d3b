#include "roughwave/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace roughwave {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;
constexpr double kTwoPowMinus53 = 1.0 / 9007199254740992.0;

}  // namespace

std::pair<std::uint64_t, std::uint64_t> splitmix64_next(std::uint64_t state) {
    state += kGoldenGamma;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return {state, z ^ (z >> 31)};
}

std::pair<double, double> box_muller(double u1, double u2) {
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

std::uint64_t RngState::next_u64() {
    auto [next, out] = splitmix64_next(state_);
    state_ = next;
    return out;
}

double RngState::next_uniform() {
    const double u = static_cast<double>(next_u64() >> 11) * kTwoPowMinus53;
    return u == 0.0 ? kTwoPowMinus53 : u;
}

double RngState::standard_normal() {
    if (spare_) {
        const double z = *spare_;
        spare_.reset();
        return z;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    auto [z0, z1] = box_muller(u1, u2);
    spare_ = z1;
    return z0;
}

std::uint64_t derive_sample_seed(std::uint64_t base_seed, std::uint64_t index) {
    return base_seed ^ (kGoldenGamma * (index + 1));
}

double midpoint_displacement_scale(double hurst, int level) {
    return std::sqrt((1.0 - std::exp2(2.0 * hurst - 2.0)) /
                     std::exp2(2.0 * static_cast<double>(level) * hurst));
}

FbmPath fbm_midpoint(double hurst, int level, const GaussianSource& gaussian) {
    if (!(hurst > 0.0 && hurst < 1.0)) {
        throw std::invalid_argument("fbm: hurst index must lie in (0,1), got " +
                                    std::to_string(hurst));
    }
    if (level < 1 || level > kMaxFbmLevel) {
        throw std::invalid_argument("fbm: level must lie in [1, 26], got " +
                                    std::to_string(level));
    }
    const std::size_t n = std::size_t{1} << level;
    FbmPath path{hurst, level, std::vector<double>(n + 1, 0.0)};
    auto& p = path.points;
    p[0] = 0.0;
    p[n] = gaussian();
    for (int l = 0; l < level; ++l) {
        const double scale = midpoint_displacement_scale(hurst, l);
        const std::size_t stride = n >> l;  // 2^(k-l)
        const std::size_t half = stride / 2;
        const std::size_t intervals = std::size_t{1} << l;
        for (std::size_t j = 0; j < intervals; ++j) {
            const std::size_t left = j * stride;
            p[left + half] = 0.5 * (p[left] + p[left + stride]) + scale * gaussian();
        }
    }
    return path;
}

FbmPath fbm_midpoint(double hurst, int level, RngState& rng) {
    return fbm_midpoint(hurst, level, [&rng] { return rng.standard_normal(); });
}

FbmPath normalize_to_unit(FbmPath path) {
    double peak = 0.0;
    for (double v : path.points) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return path;
    for (double& v : path.points) v /= peak;
    return path;
}

std::optional<int> exact_log2(std::size_t n) {
    if (n == 0 || (n & (n - 1)) != 0) return std::nullopt;
    int k = 0;
    while ((std::size_t{1} << k) < n) ++k;
    return k;
}

CellField fbm_initial_field(double hurst, const Grid& grid, const GaussianSource& gaussian) {
    const auto level = exact_log2(grid.n_cells());
    if (!level) {
        throw std::invalid_argument("fbm field: cell count " + std::to_string(grid.n_cells()) +
                                    " is not a power of two");
    }
    if (grid.x_left() != 0.0 || grid.x_right() != 1.0) {
        throw std::invalid_argument("fbm field: grid must cover [0,1]");
    }
    FbmPath path = normalize_to_unit(fbm_midpoint(hurst, *level, gaussian));
    path.points.pop_back();
    return CellField(grid, std::move(path.points));
}

CellField fbm_initial_field(double hurst, const Grid& grid, std::uint64_t seed) {
    RngState rng(seed);
    return fbm_initial_field(hurst, grid, [&rng] { return rng.standard_normal(); });
}

double holder_cap(double alpha, double x) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("holder_cap: alpha must lie in (0,1]");
    }
    return std::max(0.0, std::pow(0.25, alpha) - std::pow(std::abs(x - 0.5), alpha));
}

}  // namespace roughwave
