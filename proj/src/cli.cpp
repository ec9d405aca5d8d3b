#include "roughwave/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <system_error>
#include <thread>

#include "roughwave/diagnostics.hpp"
#include "roughwave/flux.hpp"
#include "roughwave/initial_data.hpp"

namespace roughwave {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto end = comma == std::string_view::npos ? s.size() : comma;
        items.push_back(trim(s.substr(start, end - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return items;
}

template <class T>
T parse_number(const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    int base = 10;
    if constexpr (std::is_integral_v<T>) {
        if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
            first += 2;
            base = 16;
        }
    }
    std::from_chars_result res{};
    if constexpr (std::is_integral_v<T>) {
        res = std::from_chars(first, last, value, base);
    } else {
        res = std::from_chars(first, last, value);
    }
    if (text.empty() || res.ec != std::errc{} || res.ptr != last) {
        throw std::invalid_argument("'" + text + "' is not a valid number");
    }
    return value;
}

template <class T>
std::vector<T> parse_list(const std::string& text) {
    std::vector<T> out;
    for (const auto& item : split_list(text)) out.push_back(parse_number<T>(item));
    return out;
}

const std::vector<std::string_view>& known_keys() {
    static const std::vector<std::string_view> keys = {
        "equation", "numflux", "hurst",    "resolutions", "reference_exponent", "t_final",
        "samples",  "base_seed", "cfl",    "boundary",    "snapshot_times",     "beta"};
    return keys;
}

const std::vector<std::string_view>& required_keys() {
    static const std::vector<std::string_view> keys = {
        "equation", "numflux", "hurst", "resolutions", "reference_exponent", "samples",
        "base_seed"};
    return keys;
}

}  // namespace

StudyConfig parse_config_text(std::string_view text, std::string_view source) {
    struct Entry {
        std::string value;
        std::size_t line;
    };
    std::map<std::string, Entry, std::less<>> entries;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    const std::string where(source);
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(std::string_view(raw).substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
            throw ConfigError(where + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (auto it = entries.find(key); it != entries.end()) {
            throw ConfigError(where + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                              "' (first set on line " + std::to_string(it->second.line) + ")");
        }
        entries.emplace(key, Entry{value, line_no});
    }
    for (auto key : required_keys()) {
        if (entries.find(key) == entries.end()) {
            throw ConfigError(where + ": missing required key '" + std::string(key) + "'");
        }
    }

    StudyConfig cfg;
    auto with = [&](std::string_view key, auto&& apply) {
        auto it = entries.find(key);
        if (it == entries.end()) return;
        try {
            apply(it->second.value);
        } catch (const std::exception& e) {
            throw ConfigError(where + ":" + std::to_string(it->second.line) + ": key '" +
                              std::string(key) + "': " + e.what());
        }
    };
    with("equation", [&](const std::string& v) { cfg.equation.kind = parse_equation(v); });
    with("numflux", [&](const std::string& v) { cfg.numflux.kind = parse_numerical_flux(v); });
    with("hurst", [&](const std::string& v) { cfg.hurst_list = parse_list<double>(v); });
    with("resolutions", [&](const std::string& v) { cfg.resolutions = parse_list<int>(v); });
    with("reference_exponent",
         [&](const std::string& v) { cfg.reference_exponent = parse_number<int>(v); });
    with("t_final", [&](const std::string& v) { cfg.t_final = parse_number<double>(v); });
    with("samples", [&](const std::string& v) { cfg.n_samples = parse_number<std::size_t>(v); });
    with("base_seed", [&](const std::string& v) { cfg.base_seed = parse_number<std::uint64_t>(v); });
    with("cfl", [&](const std::string& v) { cfg.cfl = parse_number<double>(v); });
    with("boundary", [&](const std::string& v) { cfg.boundary = parse_boundary(v); });
    with("snapshot_times", [&](const std::string& v) {
        cfg.snapshot_times = v.empty() ? std::vector<double>{} : parse_list<double>(v);
    });
    with("beta", [&](const std::string& v) { cfg.beta = parse_number<double>(v); });

    try {
        validate(cfg);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return cfg;
}

StudyConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.string());
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string to_config_text(const StudyConfig& cfg) {
    auto join = [](const auto& xs) {
        std::string s;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) s += ", ";
            if constexpr (std::is_same_v<std::decay_t<decltype(xs[i])>, double>) {
                s += format_number(xs[i]);
            } else {
                s += std::to_string(xs[i]);
            }
        }
        return s;
    };
    std::ostringstream out;
    out << "equation = " << to_string(cfg.equation.kind) << "\n"
        << "numflux = " << to_string(cfg.numflux.kind) << "\n"
        << "hurst = " << join(cfg.hurst_list) << "\n"
        << "resolutions = " << join(cfg.resolutions) << "\n"
        << "reference_exponent = " << cfg.reference_exponent << "\n"
        << "t_final = " << format_number(cfg.t_final) << "\n"
        << "samples = " << cfg.n_samples << "\n"
        << "base_seed = " << cfg.base_seed << "\n"
        << "cfl = " << format_number(cfg.cfl) << "\n"
        << "boundary = " << to_string(cfg.boundary) << "\n"
        << "snapshot_times = " << join(cfg.snapshot_times) << "\n";
    if (cfg.beta) out << "beta = " << format_number(*cfg.beta) << "\n";
    return out.str();
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_cell(const Cell& cell) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return {};
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, double>) {
                return format_number(v);
            } else {
                return csv_escape(v);
            }
        },
        cell);
}

void write_atomically(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out << contents;
        out.flush();
        if (!out) {
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                                 ec.message());
    }
}

}  // namespace

std::string format_csv(const StudyResult& result) {
    std::string out;
    for (std::size_t i = 0; i < result.columns.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(result.columns[i]);
    }
    out += '\n';
    for (const auto& row : result.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_cell(row[i]);
        }
        out += '\n';
    }
    return out;
}

void write_csv(const StudyResult& result, const std::filesystem::path& path) {
    write_atomically(path, format_csv(result));
}

std::string manifest_json(const RunManifest& m) {
    using nlohmann::ordered_json;
    const StudyConfig& c = m.config;
    ordered_json cfg;
    cfg["equation"] = to_string(c.equation.kind);
    cfg["numflux"] = to_string(c.numflux.kind);
    cfg["hurst"] = c.hurst_list;
    cfg["resolutions"] = c.resolutions;
    cfg["reference_exponent"] = c.reference_exponent;
    cfg["t_final"] = c.t_final;
    cfg["samples"] = c.n_samples;
    cfg["base_seed"] = c.base_seed;
    cfg["cfl"] = c.cfl;
    cfg["boundary"] = to_string(c.boundary);
    cfg["snapshot_times"] = c.snapshot_times;
    if (c.beta) cfg["beta"] = *c.beta;

    std::vector<std::uint64_t> seeds;
    for (std::size_t s = 0; s < c.n_samples; ++s) seeds.push_back(derive_sample_seed(c.base_seed, s));

    ordered_json j;
    j["command"] = m.command;
    j["config_path"] = m.config_path;
    j["config"] = cfg;
    j["config_text"] = to_config_text(c);
    j["base_seed"] = c.base_seed;
    j["sample_seeds"] = seeds;
    j["seed_rule"] = "base_seed XOR (0x9E3779B97F4A7C15 * (sample + 1))";
    j["initial_data"] =
        "normalized fBm by midpoint displacement at 2^reference_exponent cells "
        "(cell i = path value at x = i*2^-k), restricted by averaging to each 2^k grid";
    j["version"] = kVersion;
    j["workers"] = m.workers;
    j["outputs"] = m.outputs;
    j["wall_seconds"] = m.wall_seconds;
    return j.dump(2) + "\n";
}

bool selfcheck(std::ostream& out) {
    bool all_ok = true;
    auto report = [&](bool ok, const std::string& what) {
        out << (ok ? "[PASS] " : "[FAIL] ") << what << "\n";
        all_ok = all_ok && ok;
    };

    {
        auto [s1, x1] = splitmix64_next(0);
        auto [s2, x2] = splitmix64_next(s1);
        (void)s2;
        std::ostringstream msg;
        msg << std::hex << std::uppercase << "splitmix64 seed 0: 0x" << x1 << " 0x" << x2;
        report(x1 == 0xE220A8397B1DCDAFULL && x2 == 0x6E789E6AA1B965F4ULL, msg.str());
    }
    report(box_muller(1.0, 0.3).first == 0.0, "box-muller with u1 = 1 gives 0");
    {
        RngState a(42);
        RngState b(42);
        bool same = true;
        for (int i = 0; i < 1000; ++i) same = same && a.standard_normal() == b.standard_normal();
        report(same, "equal seeds give equal normal streams");
    }

    struct Case {
        NumericalFluxSpec numflux;
        FluxSpec flux;
    };
    std::vector<Case> cases;
    for (auto eq : {Equation::Burgers, Equation::Cubic, Equation::Linear}) {
        for (auto kind : {NumericalFluxKind::Godunov, NumericalFluxKind::Rusanov,
                          NumericalFluxKind::LaxFriedrichs, NumericalFluxKind::EngquistOsher}) {
            NumericalFluxSpec nf{kind, std::nullopt};
            if (kind == NumericalFluxKind::LaxFriedrichs) nf.lambda = 0.5;
            cases.push_back({nf, {eq}});
        }
    }
    cases.push_back({{NumericalFluxKind::Upwind, std::nullopt}, {Equation::Linear}});
    for (const auto& c : cases) {
        double worst = 0.0;
        RngState rng(7);
        for (int i = 0; i < 10000; ++i) {
            const double a = 2.0 * rng.next_uniform() - 1.0;
            worst = std::max(worst,
                             std::abs(numerical_flux(c.numflux, c.flux, a, a) - flux_value(c.flux, a)));
        }
        const auto probe = check_monotone(c.numflux, c.flux, -1.0, 1.0, 64);
        std::ostringstream msg;
        msg << to_string(c.numflux.kind) << " / " << to_string(c.flux.kind)
            << ": consistency error " << worst << ", monotone on [-1,1]^2 "
            << (probe.monotone ? "yes" : "no");
        report(worst <= 1e-12 && probe.monotone, msg.str());
    }
    return all_ok;
}

namespace {

unsigned resolve_workers(std::optional<unsigned> flag) {
    if (flag) return std::max(1u, *flag);
    if (const char* env = std::getenv("ROUGHWAVE_WORKERS"); env && *env) {
        try {
            return std::max(1u, parse_number<unsigned>(env));
        } catch (const std::exception&) {
            throw ConfigError(std::string("ROUGHWAVE_WORKERS='") + env + "' is not a count");
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"roughwave: monotone finite-volume schemes on rough initial data", "roughwave"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::size_t> samples;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;

    const std::vector<std::pair<std::string, std::string>> studies = {
        {"solve", "evolve fBm data and write the solution at snapshot and final times"},
        {"fbm", "write normalized fBm paths"},
        {"converge", "L1 convergence rates against a fine reference solution"},
        {"tvscale", "total variation of initial data versus dx"},
        {"lipscale", "Lip+ seminorm of initial data versus dx"},
        {"tvdecay", "total variation versus time"},
        {"sharpness", "ratio of the Lip+ bound to the time-integrated TV"},
    };
    for (const auto& [name, help] : studies) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "config file (key = value lines)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--samples", samples, "override the sample count");
        sub->add_option("--seed", seed, "override base_seed");
        sub->add_option("--workers", workers, "worker threads (env ROUGHWAVE_WORKERS)");
    }
    app.add_subcommand("selfcheck", "PRNG known answers and flux monotonicity probes");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "roughwave: " << e.what() << "\n";
        return kExitValidation;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    if (command == "selfcheck") {
        return selfcheck(out) ? kExitOk : kExitRuntime;
    }

    StudyConfig cfg;
    unsigned n_workers = 1;
    try {
        cfg = parse_config(config_path);
        if (samples) cfg.n_samples = *samples;
        if (seed) cfg.base_seed = *seed;
        validate(cfg);
        n_workers = resolve_workers(workers);
        if (command == "sharpness" && !cfg.beta) {
            (void)default_beta(cfg.equation, cfg.numflux.kind);
        }
        if (command == "tvdecay" && cfg.snapshot_times.empty()) {
            throw ConfigError("tvdecay needs snapshot_times");
        }
    } catch (const std::invalid_argument& e) {
        err << "roughwave: " << e.what() << "\n";
        return kExitValidation;
    }

    const auto kind = parse_study_kind(command);
    try {
        const auto start = std::chrono::steady_clock::now();
        const StudyResult result = run_samples_parallel(*kind, cfg, n_workers);
        const std::filesystem::path dir(out_dir);
        std::filesystem::create_directories(dir);
        const auto csv_path = dir / (command + ".csv");
        write_csv(result, csv_path);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        RunManifest manifest{command, config_path, cfg, n_workers, {csv_path.string()}, seconds};
        write_atomically(dir / (command + ".manifest.json"), manifest_json(manifest));
        out << "wrote " << csv_path.string() << " (" << result.rows.size() << " rows, "
            << format_number(seconds) << " s)\n";
    } catch (const std::exception& e) {
        err << "roughwave: " << command << " failed: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace roughwave
