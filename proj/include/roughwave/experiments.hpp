#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "roughwave/flux.hpp"
#include "roughwave/initial_data.hpp"
#include "roughwave/mesh.hpp"
#include "roughwave/solver.hpp"

namespace roughwave {

inline constexpr std::string_view kVersion = "0.1.0";

/// Parameters for an ensemble study over fBm initial data on [0,1].
///
/// Every sample is generated once at 2^reference_exponent cells and
/// restricted onto each 2^k grid in `resolutions`, so all resolutions see
/// the same realization.
struct StudyConfig {
    FluxSpec equation;
    NumericalFluxSpec numflux;
    std::vector<double> hurst_list;
    std::vector<int> resolutions;
    int reference_exponent = 11;
    double t_final = 1.0;
    std::size_t n_samples = 1;
    std::uint64_t base_seed = 0;
    double cfl = kDefaultCfl;
    Boundary boundary = Boundary::Outflow;
    std::vector<double> snapshot_times;
    /// Lip+ stability constant for the sharpness study; defaults from
    /// default_beta() when unset.
    std::optional<double> beta;
    /// Debug mode: every Gaussian draw is zero, so all data is constant.
    bool zero_noise = false;

    SchemeConfig scheme() const;

    friend bool operator==(const StudyConfig&, const StudyConfig&) = default;
};

/// Throws std::invalid_argument on any inconsistent field.
void validate(const StudyConfig& cfg);

/// A CSV cell: empty, integer, real or text.
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;
using Row = std::vector<Cell>;

struct StudyMetadata {
    StudyConfig config;
    std::string version{kVersion};
    /// Seed of sample i, shared by every Hurst index.
    std::vector<std::uint64_t> sample_seeds;
};

/// Tabular study output. Rows are ordered by (hurst, sample, k or time),
/// followed by ensemble summary rows (sample = MEAN / STD / MEDIAN).
struct StudyResult {
    std::string study;
    std::vector<std::string> columns;
    std::vector<Row> rows;
    StudyMetadata metadata;

    /// Index of a named column; throws std::out_of_range if absent.
    std::size_t column(std::string_view name) const;
};

enum class StudyKind { Solve, Fbm, Converge, TvScale, LipScale, TvDecay, Sharpness };

std::string_view to_string(StudyKind kind);
std::optional<StudyKind> parse_study_kind(std::string_view name);

struct SampleTask {
    double hurst = 0.5;
    std::size_t hurst_index = 0;
    std::size_t sample = 0;
    std::uint64_t seed = 0;
};

/// Raised when a sample fails; carries the failing sample's identity.
class SampleError : public std::runtime_error {
public:
    SampleError(const SampleTask& task, const std::string& what);
    const SampleTask& task() const { return task_; }

private:
    SampleTask task_;
};

std::vector<SampleTask> make_sample_tasks(const StudyConfig& cfg);

/// Runs `work` for every (hurst, sample) pair on up to `workers` threads.
/// Results come back in task order regardless of scheduling. If any task
/// throws, the earliest failing task (in task order) is rethrown as a
/// SampleError.
template <class Outcome>
std::vector<Outcome> parallel_map_samples(const std::vector<SampleTask>& tasks, unsigned workers,
                                          const std::function<Outcome(const SampleTask&)>& work) {
    std::vector<std::optional<Outcome>> slots(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto drain = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                slots[i].emplace(work(tasks[i]));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n_threads =
        static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), tasks.size()));
    if (n_threads <= 1) {
        drain();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(drain);
    }
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw SampleError(tasks[i], e.what());
        } catch (...) {
            throw SampleError(tasks[i], "unknown error");
        }
    }
    std::vector<Outcome> out;
    out.reserve(tasks.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

/// The normalized fBm realization of one sample at 2^reference_exponent cells.
CellField reference_initial_field(const StudyConfig& cfg, double hurst, std::uint64_t seed);

/// Final states (and requested snapshots) at resolution resolutions[0].
StudyResult solve_study(const StudyConfig& cfg, unsigned workers = 1);
/// Raw normalized fBm path points at level resolutions[0].
StudyResult fbm_study(const StudyConfig& cfg, unsigned workers = 1);
/// L1 error against the reference-resolution solution, per-pair and
/// fitted rates, and ensemble mean/std of the fitted rate.
StudyResult convergence_study(const StudyConfig& cfg, unsigned workers = 1);
/// TV of the restricted initial field versus dx, with fitted slopes.
StudyResult tv_scaling_study(const StudyConfig& cfg, unsigned workers = 1);
/// Lip+ of the restricted initial field versus dx, with fitted slopes.
StudyResult lip_scaling_study(const StudyConfig& cfg, unsigned workers = 1);
/// TV(t) and 1/TV(t) at the snapshot times, with a linear fit of 1/TV
/// against t.
StudyResult tv_decay_study(const StudyConfig& cfg, unsigned workers = 1);
/// Ratio of the Lip+ bound to the time-integrated TV versus dx.
StudyResult bound_sharpness_study(const StudyConfig& cfg, unsigned workers = 1);

/// Dispatches to the study for `kind`. Output rows do not depend on the
/// worker count.
StudyResult run_samples_parallel(StudyKind kind, const StudyConfig& cfg, unsigned workers = 1);

}  // namespace roughwave
