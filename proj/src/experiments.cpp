#include "roughwave/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include "roughwave/diagnostics.hpp"

namespace roughwave {

SchemeConfig StudyConfig::scheme() const {
    SchemeConfig s;
    s.flux = equation;
    s.numflux = numflux;
    s.cfl = cfl;
    s.boundary = boundary;
    s.t_final = t_final;
    return s;
}

void validate(const StudyConfig& cfg) {
    validate(cfg.scheme());
    if (cfg.hurst_list.empty()) {
        throw std::invalid_argument("study: hurst list is empty");
    }
    for (double h : cfg.hurst_list) {
        if (!(h > 0.0 && h < 1.0)) {
            throw std::invalid_argument("study: hurst index " + std::to_string(h) +
                                        " outside (0,1)");
        }
    }
    if (cfg.resolutions.empty()) {
        throw std::invalid_argument("study: resolutions list is empty");
    }
    if (cfg.reference_exponent < 1 || cfg.reference_exponent > kMaxFbmLevel) {
        throw std::invalid_argument("study: reference_exponent must lie in [1, 26]");
    }
    for (int k : cfg.resolutions) {
        if (k < 1) {
            throw std::invalid_argument("study: resolution exponents must be >= 1");
        }
        if (k >= cfg.reference_exponent) {
            throw std::invalid_argument("study: resolution exponent " + std::to_string(k) +
                                        " is not below reference_exponent " +
                                        std::to_string(cfg.reference_exponent));
        }
    }
    if (cfg.n_samples == 0) {
        throw std::invalid_argument("study: n_samples must be at least 1");
    }
    double previous = 0.0;
    for (double t : cfg.snapshot_times) {
        if (!(t >= 0.0 && t <= cfg.t_final) || t < previous) {
            throw std::invalid_argument(
                "study: snapshot times must be sorted and lie in [0, t_final]");
        }
        previous = t;
    }
    if (cfg.beta && !(*cfg.beta > 0.0)) {
        throw std::invalid_argument("study: beta must be positive");
    }
}

std::size_t StudyResult::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    throw std::out_of_range("study result has no column '" + std::string(name) + "'");
}

std::string_view to_string(StudyKind kind) {
    switch (kind) {
        case StudyKind::Solve: return "solve";
        case StudyKind::Fbm: return "fbm";
        case StudyKind::Converge: return "converge";
        case StudyKind::TvScale: return "tvscale";
        case StudyKind::LipScale: return "lipscale";
        case StudyKind::TvDecay: return "tvdecay";
        case StudyKind::Sharpness: return "sharpness";
    }
    return "unknown";
}

std::optional<StudyKind> parse_study_kind(std::string_view name) {
    for (auto k : {StudyKind::Solve, StudyKind::Fbm, StudyKind::Converge, StudyKind::TvScale,
                   StudyKind::LipScale, StudyKind::TvDecay, StudyKind::Sharpness}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

namespace {

std::string describe(const SampleTask& t, const std::string& what) {
    std::ostringstream msg;
    msg << "sample " << t.sample << " (hurst " << t.hurst << ", seed " << t.seed << "): " << what;
    return msg.str();
}

}  // namespace

SampleError::SampleError(const SampleTask& task, const std::string& what)
    : std::runtime_error(describe(task, what)), task_(task) {}

std::vector<SampleTask> make_sample_tasks(const StudyConfig& cfg) {
    std::vector<SampleTask> tasks;
    tasks.reserve(cfg.hurst_list.size() * cfg.n_samples);
    for (std::size_t h = 0; h < cfg.hurst_list.size(); ++h) {
        for (std::size_t s = 0; s < cfg.n_samples; ++s) {
            tasks.push_back({cfg.hurst_list[h], h, s, derive_sample_seed(cfg.base_seed, s)});
        }
    }
    return tasks;
}

CellField reference_initial_field(const StudyConfig& cfg, double hurst, std::uint64_t seed) {
    const Grid grid(0.0, 1.0, std::size_t{1} << cfg.reference_exponent);
    if (cfg.zero_noise) {
        return fbm_initial_field(hurst, grid, [] { return 0.0; });
    }
    return fbm_initial_field(hurst, grid, seed);
}

namespace {

using SampleRows = std::vector<Row>;

Grid unit_grid(int k) { return Grid(0.0, 1.0, std::size_t{1} << k); }

double dx_of(int k) { return std::ldexp(1.0, -k); }

struct Ensemble {
    std::size_t count = 0;
    double mean = 0.0;
    std::optional<double> std_dev;
};

Ensemble summarize(const std::vector<double>& xs) {
    Ensemble e;
    e.count = xs.size();
    if (xs.empty()) return e;
    e.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() >= 2) {
        double ss = 0.0;
        for (double x : xs) ss += (x - e.mean) * (x - e.mean);
        e.std_dev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return e;
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

Cell opt(const std::optional<double>& v) {
    if (v) return *v;
    return std::monostate{};
}

StudyMetadata make_metadata(const StudyConfig& cfg) {
    StudyMetadata meta{cfg, std::string(kVersion), {}};
    for (std::size_t s = 0; s < cfg.n_samples; ++s) {
        meta.sample_seeds.push_back(derive_sample_seed(cfg.base_seed, s));
    }
    return meta;
}

/// Runs one study: `per_sample` emits the rows of one (hurst, sample) plus a
/// summary value; `summary` turns the per-hurst collection of values into
/// trailing rows.
template <class Value>
StudyResult run_ensemble(
    std::string study, std::vector<std::string> columns, const StudyConfig& cfg, unsigned workers,
    const std::function<std::pair<SampleRows, Value>(const SampleTask&)>& per_sample,
    const std::function<SampleRows(double hurst, const std::vector<Value>&)>& summary) {
    validate(cfg);
    StudyResult result{std::move(study), std::move(columns), {}, make_metadata(cfg)};
    const auto tasks = make_sample_tasks(cfg);
    auto outcomes = parallel_map_samples<std::pair<SampleRows, Value>>(tasks, workers, per_sample);
    std::size_t idx = 0;
    for (double hurst : cfg.hurst_list) {
        std::vector<Value> values;
        for (std::size_t s = 0; s < cfg.n_samples; ++s, ++idx) {
            auto& [rows, value] = outcomes[idx];
            for (auto& r : rows) result.rows.push_back(std::move(r));
            values.push_back(std::move(value));
        }
        for (auto& r : summary(hurst, values)) result.rows.push_back(std::move(r));
    }
    return result;
}

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

/// Fitted log-log slope of (dx, value) over the strictly positive values.
std::optional<double> positive_slope(const std::vector<std::pair<double, double>>& pts) {
    std::vector<std::pair<double, double>> keep;
    for (const auto& p : pts) {
        if (p.second > 0.0) keep.push_back(p);
    }
    if (keep.size() < 2) return std::nullopt;
    return fit_rate(keep).slope;
}

/// Shared by the TV and Lip+ scaling studies.
StudyResult scaling_study(const std::string& study, const std::string& quantity,
                          const StudyConfig& cfg, unsigned workers,
                          const std::function<double(const CellField&)>& measure) {
    using Value = std::optional<double>;
    auto per_sample = [&](const SampleTask& t) -> std::pair<SampleRows, Value> {
        const CellField reference = reference_initial_field(cfg, t.hurst, t.seed);
        SampleRows rows;
        std::vector<std::pair<double, double>> pts;
        for (int k : cfg.resolutions) {
            const CellField v = restrict_to(reference, unit_grid(k));
            const double q = measure(v);
            pts.emplace_back(dx_of(k), q);
            Cell flag = std::monostate{};
            if (q <= 0.0) flag = std::string(q == 0.0 ? "zero_" : "nonpositive_") + quantity;
            rows.push_back({study, t.hurst, as_int(t.sample), std::int64_t{k}, dx_of(k), q,
                            std::monostate{}, flag});
        }
        const Value slope = positive_slope(pts);
        rows.push_back({study, t.hurst, as_int(t.sample), std::string("ALL"), std::monostate{},
                        std::monostate{}, opt(slope),
                        slope ? Cell{std::monostate{}} : Cell{std::string("undefined_slope")}});
        return {std::move(rows), slope};
    };
    auto summary = [&](double hurst, const std::vector<Value>& slopes) -> SampleRows {
        std::vector<double> defined;
        for (const auto& s : slopes) {
            if (s) defined.push_back(*s);
        }
        const Ensemble e = summarize(defined);
        const Cell flag =
            defined.empty() ? Cell{std::string("undefined_slope")} : Cell{std::monostate{}};
        return {{study, hurst, std::string("MEAN"), std::string("ALL"), std::monostate{},
                 std::monostate{}, defined.empty() ? Cell{std::monostate{}} : Cell{e.mean}, flag},
                {study, hurst, std::string("STD"), std::string("ALL"), std::monostate{},
                 std::monostate{}, opt(e.std_dev), flag}};
    };
    return run_ensemble<Value>(study, {"study", "hurst", "sample", "k", "dx", quantity, "slope", "flag"},
                               cfg, workers, per_sample, summary);
}

}  // namespace

StudyResult solve_study(const StudyConfig& cfg, unsigned workers) {
    validate(cfg);
    const int k = cfg.resolutions.front();
    auto per_sample = [&](const SampleTask& t) -> std::pair<SampleRows, int> {
        const CellField initial = restrict_to(reference_initial_field(cfg, t.hurst, t.seed), unit_grid(k));
        EvolveOptions options{cfg.snapshot_times, false};
        const Trajectory traj = evolve(initial, cfg.scheme(), options);
        SampleRows rows;
        auto emit = [&](double t_req, double t_act, const CellField& f) {
            for (std::size_t i = 0; i < f.size(); ++i) {
                rows.push_back({std::string("solve"), t.hurst, as_int(t.sample), t_req, t_act,
                                as_int(i), f.grid().midpoint(i), f[i]});
            }
        };
        for (const auto& snap : traj.snapshots) emit(snap.requested_time, snap.time, snap.field);
        emit(cfg.t_final, traj.times.back(), traj.final_state);
        return {std::move(rows), 0};
    };
    auto summary = [](double, const std::vector<int>&) { return SampleRows{}; };
    return run_ensemble<int>("solve", {"study", "hurst", "sample", "t_requested", "t", "i", "x", "value"},
                             cfg, workers, per_sample, summary);
}

StudyResult fbm_study(const StudyConfig& cfg, unsigned workers) {
    validate(cfg);
    const int k = cfg.resolutions.front();
    auto per_sample = [&](const SampleTask& t) -> std::pair<SampleRows, int> {
        FbmPath path;
        if (cfg.zero_noise) {
            path = fbm_midpoint(t.hurst, k, [] { return 0.0; });
        } else {
            RngState rng(t.seed);
            path = fbm_midpoint(t.hurst, k, rng);
        }
        path = normalize_to_unit(std::move(path));
        SampleRows rows;
        const double h = dx_of(k);
        for (std::size_t j = 0; j < path.points.size(); ++j) {
            rows.push_back({std::string("fbm"), t.hurst, as_int(t.sample), as_int(j),
                            static_cast<double>(j) * h, path.points[j]});
        }
        return {std::move(rows), 0};
    };
    auto summary = [](double, const std::vector<int>&) { return SampleRows{}; };
    return run_ensemble<int>("fbm", {"study", "hurst", "sample", "j", "x", "value"}, cfg, workers,
                             per_sample, summary);
}

StudyResult convergence_study(const StudyConfig& cfg, unsigned workers) {
    struct Value {
        std::optional<double> rate;
        std::vector<double> errors;
    };
    const std::string study = "converge";
    auto per_sample = [&](const SampleTask& t) -> std::pair<SampleRows, Value> {
        const SchemeConfig scheme = cfg.scheme();
        const CellField reference = reference_initial_field(cfg, t.hurst, t.seed);
        const CellField ref_final = evolve(reference, scheme).final_state;
        SampleRows rows;
        Value value;
        std::vector<std::pair<double, double>> pts;
        for (std::size_t r = 0; r < cfg.resolutions.size(); ++r) {
            const int k = cfg.resolutions[r];
            const CellField coarse = restrict_to(reference, unit_grid(k));
            const CellField final_state = evolve(coarse, scheme).final_state;
            const double e = l1_distance(final_state, ref_final);
            value.errors.push_back(e);
            pts.emplace_back(dx_of(k), e);
            Cell pairwise = std::monostate{};
            if (r > 0 && e > 0.0 && value.errors[r - 1] > 0.0) {
                const double e_prev = value.errors[r - 1];
                pairwise = std::log(e_prev / e) / std::log(dx_of(cfg.resolutions[r - 1]) / dx_of(k));
            }
            rows.push_back({study, t.hurst, as_int(t.sample), std::int64_t{k}, dx_of(k), e, pairwise,
                            std::monostate{}, e == 0.0 ? Cell{std::string("zero_error")} : Cell{}});
        }
        value.rate = positive_slope(pts);
        rows.push_back({study, t.hurst, as_int(t.sample), std::string("ALL"), std::monostate{},
                        std::monostate{}, std::monostate{}, opt(value.rate),
                        value.rate ? Cell{} : Cell{std::string("undefined_rate")}});
        return {std::move(rows), std::move(value)};
    };
    auto summary = [&](double hurst, const std::vector<Value>& values) -> SampleRows {
        SampleRows rows;
        for (std::size_t r = 0; r < cfg.resolutions.size(); ++r) {
            std::vector<double> errs;
            for (const auto& v : values) errs.push_back(v.errors[r]);
            const Ensemble e = summarize(errs);
            const int k = cfg.resolutions[r];
            rows.push_back({study, hurst, std::string("MEAN"), std::int64_t{k}, dx_of(k), e.mean,
                            std::monostate{}, std::monostate{}, Cell{}});
            rows.push_back({study, hurst, std::string("STD"), std::int64_t{k}, dx_of(k),
                            opt(e.std_dev), std::monostate{}, std::monostate{}, Cell{}});
        }
        std::vector<double> rates;
        for (const auto& v : values) {
            if (v.rate) rates.push_back(*v.rate);
        }
        const Ensemble e = summarize(rates);
        const Cell flag = rates.empty() ? Cell{std::string("undefined_rate")} : Cell{};
        rows.push_back({study, hurst, std::string("MEAN"), std::string("ALL"), std::monostate{},
                        std::monostate{}, std::monostate{},
                        rates.empty() ? Cell{} : Cell{e.mean}, flag});
        rows.push_back({study, hurst, std::string("STD"), std::string("ALL"), std::monostate{},
                        std::monostate{}, std::monostate{}, opt(e.std_dev), flag});
        return rows;
    };
    return run_ensemble<Value>(
        study, {"study", "hurst", "sample", "k", "dx", "l1_error", "rate_pairwise", "rate_fit", "flag"},
        cfg, workers, per_sample, summary);
}

StudyResult tv_scaling_study(const StudyConfig& cfg, unsigned workers) {
    return scaling_study("tvscale", "tv", cfg, workers,
                         [](const CellField& v) { return total_variation(v); });
}

StudyResult lip_scaling_study(const StudyConfig& cfg, unsigned workers) {
    return scaling_study("lipscale", "lip_plus", cfg, workers,
                         [](const CellField& v) { return lip_plus(v); });
}

StudyResult tv_decay_study(const StudyConfig& cfg, unsigned workers) {
    if (cfg.snapshot_times.empty()) {
        throw std::invalid_argument("tvdecay: snapshot_times must not be empty");
    }
    for (double t : cfg.snapshot_times) {
        if (!(t > 0.0)) throw std::invalid_argument("tvdecay: snapshot times must be positive");
    }
    // One fit value per resolution.
    using Value = std::vector<std::optional<LinearFit>>;
    const std::string study = "tvdecay";
    auto per_sample = [&](const SampleTask& t) -> std::pair<SampleRows, Value> {
        const CellField reference = reference_initial_field(cfg, t.hurst, t.seed);
        SampleRows rows;
        Value fits;
        for (int k : cfg.resolutions) {
            const CellField initial = restrict_to(reference, unit_grid(k));
            const Trajectory traj = evolve(initial, cfg.scheme(), {cfg.snapshot_times, false});
            std::vector<double> ts;
            std::vector<double> inv;
            for (const auto& snap : traj.snapshots) {
                const double tv = total_variation(snap.field, cfg.boundary);
                Cell inv_cell = std::monostate{};
                if (tv > 0.0) {
                    inv_cell = 1.0 / tv;
                    ts.push_back(snap.time);
                    inv.push_back(1.0 / tv);
                }
                rows.push_back({study, t.hurst, as_int(t.sample), std::int64_t{k}, snap.time, tv,
                                inv_cell, std::monostate{}, std::monostate{}, std::monostate{},
                                tv > 0.0 ? Cell{} : Cell{std::string("zero_tv")}});
            }
            double max_increase = 0.0;
            for (std::size_t n = 1; n < traj.per_step_tv.size(); ++n) {
                max_increase = std::max(max_increase, traj.per_step_tv[n] - traj.per_step_tv[n - 1]);
            }
            std::optional<LinearFit> fit;
            bool distinct = ts.size() >= 2 && ts.front() != ts.back();
            if (distinct) fit = fit_linear(ts, inv);
            fits.push_back(fit);
            rows.push_back({study, t.hurst, as_int(t.sample), std::int64_t{k}, std::string("ALL"),
                            std::monostate{}, std::monostate{},
                            fit ? Cell{fit->slope} : Cell{}, fit ? Cell{fit->r_squared} : Cell{},
                            max_increase, fit ? Cell{} : Cell{std::string("undefined_fit")}});
        }
        return {std::move(rows), std::move(fits)};
    };
    auto summary = [&](double hurst, const std::vector<Value>& values) -> SampleRows {
        SampleRows rows;
        for (std::size_t r = 0; r < cfg.resolutions.size(); ++r) {
            std::vector<double> slopes;
            std::vector<double> r2;
            for (const auto& v : values) {
                if (v[r]) {
                    slopes.push_back(v[r]->slope);
                    r2.push_back(v[r]->r_squared);
                }
            }
            const std::int64_t k = cfg.resolutions[r];
            const Cell flag = r2.empty() ? Cell{std::string("undefined_fit")} : Cell{};
            const Ensemble e = summarize(slopes);
            rows.push_back({study, hurst, std::string("MEAN"), k, std::string("ALL"),
                            std::monostate{}, std::monostate{}, r2.empty() ? Cell{} : Cell{e.mean},
                            r2.empty() ? Cell{} : Cell{summarize(r2).mean}, std::monostate{}, flag});
            rows.push_back({study, hurst, std::string("MEDIAN"), k, std::string("ALL"),
                            std::monostate{}, std::monostate{},
                            r2.empty() ? Cell{} : Cell{median(slopes)},
                            r2.empty() ? Cell{} : Cell{median(r2)}, std::monostate{}, flag});
        }
        return rows;
    };
    return run_ensemble<Value>(study,
                               {"study", "hurst", "sample", "k", "t", "tv", "inv_tv", "fit_slope",
                                "r_squared", "max_tv_increase", "flag"},
                               cfg, workers, per_sample, summary);
}

StudyResult bound_sharpness_study(const StudyConfig& cfg, unsigned workers) {
    const double beta = cfg.beta ? *cfg.beta : default_beta(cfg.equation, cfg.numflux.kind);
    // Support radius bound for data on [0,1].
    constexpr double kHalfWidth = 0.5;
    using Value = std::optional<double>;
    const std::string study = "sharpness";
    auto per_sample = [&](const SampleTask& t) -> std::pair<SampleRows, Value> {
        const CellField reference = reference_initial_field(cfg, t.hurst, t.seed);
        SampleRows rows;
        std::vector<std::pair<double, double>> pts;
        for (int k : cfg.resolutions) {
            const CellField initial = restrict_to(reference, unit_grid(k));
            const Trajectory traj = evolve(initial, cfg.scheme());
            const double integral = tv_time_integral(traj);
            BoundInputs b;
            b.lip_plus_0 = lip_plus(initial);
            b.dt = traj.dt_used;
            b.dx = dx_of(k);
            b.t_N = traj.times.back();
            b.beta = beta;
            b.M = kHalfWidth;
            b.tv0 = total_variation(initial, cfg.boundary);
            Cell bound = std::monostate{};
            Cell ratio = std::monostate{};
            Cell flag = std::monostate{};
            if (b.lip_plus_0 <= 0.0) {
                flag = std::string("nonpositive_lip_plus");
            } else if (integral <= 0.0) {
                flag = std::string("zero_tv_integral");
            } else {
                const double rhs = lip_bound_rhs(b);
                bound = rhs;
                ratio = rhs / integral;
                pts.emplace_back(b.dx, rhs / integral);
            }
            rows.push_back({study, t.hurst, as_int(t.sample), std::int64_t{k}, b.dx, b.dt,
                            b.lip_plus_0, integral, bound, ratio, std::monostate{}, flag});
        }
        const Value slope = positive_slope(pts);
        rows.push_back({study, t.hurst, as_int(t.sample), std::string("ALL"), std::monostate{},
                        std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                        std::monostate{}, opt(slope),
                        slope ? Cell{} : Cell{std::string("undefined_slope")}});
        return {std::move(rows), slope};
    };
    auto summary = [&](double hurst, const std::vector<Value>& slopes) -> SampleRows {
        std::vector<double> defined;
        for (const auto& s : slopes) {
            if (s) defined.push_back(*s);
        }
        const Ensemble e = summarize(defined);
        const Cell flag = defined.empty() ? Cell{std::string("undefined_slope")} : Cell{};
        SampleRows rows;
        for (const char* label : {"MEAN", "STD"}) {
            const bool is_mean = std::string_view(label) == "MEAN";
            Cell v = is_mean ? (defined.empty() ? Cell{} : Cell{e.mean}) : opt(e.std_dev);
            rows.push_back({study, hurst, std::string(label), std::string("ALL"), std::monostate{},
                            std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                            std::monostate{}, v, flag});
        }
        return rows;
    };
    return run_ensemble<Value>(study,
                               {"study", "hurst", "sample", "k", "dx", "dt", "lip_plus_0",
                                "tv_integral", "bound", "ratio", "slope", "flag"},
                               cfg, workers, per_sample, summary);
}

StudyResult run_samples_parallel(StudyKind kind, const StudyConfig& cfg, unsigned workers) {
    switch (kind) {
        case StudyKind::Solve: return solve_study(cfg, workers);
        case StudyKind::Fbm: return fbm_study(cfg, workers);
        case StudyKind::Converge: return convergence_study(cfg, workers);
        case StudyKind::TvScale: return tv_scaling_study(cfg, workers);
        case StudyKind::LipScale: return lip_scaling_study(cfg, workers);
        case StudyKind::TvDecay: return tv_decay_study(cfg, workers);
        case StudyKind::Sharpness: return bound_sharpness_study(cfg, workers);
    }
    throw std::logic_error("run_samples_parallel: unhandled study kind");
}

}  // namespace roughwave
