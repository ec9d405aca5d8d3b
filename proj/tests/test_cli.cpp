#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "roughwave/cli.hpp"

using namespace roughwave;
namespace fs = std::filesystem;

namespace {

const char* kMinimal =
    "equation = burgers\n"
    "numflux = godunov\n"
    "hurst = 0.5\n"
    "resolutions = 4, 5\n"
    "reference_exponent = 7\n"
    "samples = 2\n"
    "base_seed = 42\n";

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) {
        path = fs::temp_directory_path() / ("roughwave_test_" + name);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string error_of(const std::string& text) {
    try {
        parse_config_text(text, "cfg");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

int run(const std::vector<std::string>& args, std::string* out = nullptr, std::string* err = nullptr) {
    std::ostringstream o;
    std::ostringstream e;
    const int code = run_cli(args, o, e);
    if (out) *out = o.str();
    if (err) *err = e.str();
    return code;
}

}  // namespace

TEST_CASE("minimal config gets documented defaults") {
    const StudyConfig c = parse_config_text(kMinimal);
    CHECK(c.equation.kind == Equation::Burgers);
    CHECK(c.numflux.kind == NumericalFluxKind::Godunov);
    CHECK(c.hurst_list == std::vector<double>{0.5});
    CHECK(c.resolutions == std::vector<int>{4, 5});
    CHECK(c.reference_exponent == 7);
    CHECK(c.n_samples == 2);
    CHECK(c.base_seed == 42);
    CHECK(c.cfl == 0.5);
    CHECK(c.boundary == Boundary::Outflow);
    CHECK(c.t_final == 1.0);
    CHECK(c.snapshot_times.empty());
    CHECK_FALSE(c.beta.has_value());
}

TEST_CASE("comments, blank lines and hex seeds") {
    const std::string text = std::string("# header\n\n") + kMinimal + "cfl = 0.25  # trailing\n";
    CHECK(parse_config_text(text).cfl == 0.25);
    std::string hex = kMinimal;
    hex.replace(hex.find("base_seed = 42"), 14, "base_seed = 0x2A");
    CHECK(parse_config_text(hex).base_seed == 42);
}

TEST_CASE("config errors name the line and key") {
    CHECK(error_of(std::string(kMinimal) + "colour = red\n").find("cfg:8") != std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "colour = red\n").find("colour") != std::string::npos);

    const std::string dup = error_of(std::string(kMinimal) + "hurst = 0.7\n");
    CHECK(dup.find("cfg:8") != std::string::npos);
    CHECK(dup.find("line 3") != std::string::npos);
    CHECK(dup.find("hurst") != std::string::npos);

    std::string upwind = kMinimal;
    upwind.replace(upwind.find("godunov"), 7, "upwind");
    CHECK_THROWS_AS(parse_config_text(upwind), ConfigError);

    std::string missing = kMinimal;
    missing.erase(missing.find("samples"), std::string("samples = 2\n").size());
    CHECK(error_of(missing).find("samples") != std::string::npos);

    const std::string bad = error_of(std::string(kMinimal) + "cfl = fast\n");
    CHECK(bad.find("cfg:8") != std::string::npos);
    CHECK(bad.find("cfl") != std::string::npos);

    CHECK(error_of(std::string(kMinimal) + "just words\n").find("cfg:8") != std::string::npos);
    CHECK_THROWS_AS(parse_config("/nonexistent/roughwave.cfg"), ConfigError);
}

TEST_CASE("to_config_text round-trips") {
    StudyConfig c = parse_config_text(kMinimal);
    c.hurst_list = {0.1, 0.30000000000000004, 0.9};
    c.t_final = 0.75;
    c.cfl = 0.3;
    c.boundary = Boundary::Periodic;
    c.snapshot_times = {0.25, 0.5};
    c.beta = 0.2;
    c.base_seed = 0xFFFFFFFFFFFFFFFFull;
    c.numflux = {NumericalFluxKind::LaxFriedrichs, std::nullopt};
    CHECK(parse_config_text(to_config_text(c)) == c);
    const StudyConfig m = parse_config_text(kMinimal);
    CHECK(parse_config_text(to_config_text(m)) == m);
}

TEST_CASE("number formatting and CSV layout") {
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1e-300) == "1e-300");
    CHECK(std::stod(format_number(0.1 + 0.2)) == 0.1 + 0.2);

    StudyResult empty;
    empty.columns = {"a", "b"};
    CHECK(format_csv(empty) == "a,b\n");

    StudyResult r;
    r.columns = {"name", "x", "n", "blank"};
    r.rows.push_back({std::string("a,b"), 0.5, std::int64_t{-3}, std::monostate{}});
    r.rows.push_back({std::string("say \"hi\""), 2.0, std::int64_t{0}, std::monostate{}});
    CHECK(format_csv(r) == "name,x,n,blank\n\"a,b\",0.5,-3,\n\"say \"\"hi\"\"\",2,0,\n");
}

TEST_CASE("write_csv is atomic and leaves no temporary file") {
    TempDir dir("csv");
    StudyResult r;
    r.columns = {"x"};
    r.rows.push_back({0.25});
    write_csv(r, dir.path / "out.csv");
    CHECK(read_file(dir.path / "out.csv") == "x\n0.25\n");
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir.path)) {
        (void)e;
        ++files;
    }
    CHECK(files == 1);
    CHECK_THROWS(write_csv(r, dir.path / "missing" / "out.csv"));
}

TEST_CASE("selfcheck exits 0 and prints known answers") {
    std::string out;
    CHECK(run({"selfcheck"}, &out) == kExitOk);
    CHECK(out.find("E220A8397B1DCDAF") != std::string::npos);
    std::ostringstream sink;
    CHECK(selfcheck(sink));
}

TEST_CASE("fbm twice gives identical CSV bytes and a manifest") {
    TempDir dir("fbm");
    write_file(dir.path / "fbm.cfg",
               "equation = burgers\nnumflux = godunov\nhurst = 0.5\nresolutions = 8\n"
               "reference_exponent = 9\nsamples = 3\nbase_seed = 42\n");
    const std::string cfg = (dir.path / "fbm.cfg").string();
    REQUIRE(run({"fbm", "--config", cfg, "--out", (dir.path / "a").string(), "--workers", "1"}) == kExitOk);
    REQUIRE(run({"fbm", "--config", cfg, "--out", (dir.path / "b").string(), "--workers", "3"}) == kExitOk);
    const std::string a = read_file(dir.path / "a" / "fbm.csv");
    CHECK(a == read_file(dir.path / "b" / "fbm.csv"));
    CHECK(a.rfind("study,hurst,sample,j,x,value\n", 0) == 0);

    const auto manifest = nlohmann::json::parse(read_file(dir.path / "a" / "fbm.manifest.json"));
    CHECK(manifest["command"] == "fbm");
    CHECK(manifest["base_seed"] == 42);
    CHECK(manifest["sample_seeds"].size() == 3);
    CHECK(manifest["workers"] == 1);
    CHECK(parse_config_text(manifest["config_text"].get<std::string>()) == parse_config(cfg));
}

TEST_CASE("converge writes one rate row per sample plus summaries") {
    TempDir dir("conv");
    write_file(dir.path / "c.cfg", kMinimal);
    REQUIRE(run({"converge", "--config", (dir.path / "c.cfg").string(), "--out", dir.path.string(),
                 "--samples", "3", "--workers", "2"}) == kExitOk);
    std::istringstream csv(read_file(dir.path / "converge.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "study,hurst,sample,k,dx,l1_error,rate_pairwise,rate_fit,flag");
    int all_rows = 0;
    int summary = 0;
    while (std::getline(csv, line)) {
        if (line.find(",ALL,") != std::string::npos && line.find("MEAN") == std::string::npos &&
            line.find("STD") == std::string::npos) {
            ++all_rows;
        }
        if (line.find(",MEAN,") != std::string::npos || line.find(",STD,") != std::string::npos) ++summary;
    }
    CHECK(all_rows == 3);
    CHECK(summary == 2 * 2 + 2);
}

TEST_CASE("validation failures exit 1 and write nothing") {
    TempDir dir("invalid");
    std::string upwind = kMinimal;
    upwind.replace(upwind.find("godunov"), 7, "upwind");
    write_file(dir.path / "bad.cfg", upwind);
    write_file(dir.path / "good.cfg", kMinimal);
    const fs::path out = dir.path / "out";
    std::string err;
    CHECK(run({"converge", "--config", (dir.path / "bad.cfg").string(), "--out", out.string()}, nullptr,
              &err) == kExitValidation);
    CHECK(err.find("upwind") != std::string::npos);
    CHECK(run({"tvdecay", "--config", (dir.path / "good.cfg").string(), "--out", out.string()}) ==
          kExitValidation);
    CHECK(run({"converge", "--config", (dir.path / "good.cfg").string(), "--samples", "0", "--out",
               out.string()}) == kExitValidation);
    CHECK(run({"converge", "--config", (dir.path / "missing.cfg").string(), "--out", out.string()}) ==
          kExitValidation);
    CHECK(run({"converge", "--out", out.string()}) == kExitValidation);
    CHECK(run({"bogus"}) == kExitValidation);
    CHECK(run({}) == kExitValidation);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("runtime failures exit 2") {
    TempDir dir("runtime");
    write_file(dir.path / "good.cfg", kMinimal);
    write_file(dir.path / "blocker", "not a directory");
    std::string err;
    CHECK(run({"tvscale", "--config", (dir.path / "good.cfg").string(), "--out",
               (dir.path / "blocker").string()}, nullptr, &err) == kExitRuntime);
    CHECK(err.find("tvscale") != std::string::npos);
}

TEST_CASE("worker count falls back to the environment") {
    TempDir dir("env");
    write_file(dir.path / "good.cfg", kMinimal);
    ::setenv("ROUGHWAVE_WORKERS", "3", 1);
    REQUIRE(run({"tvscale", "--config", (dir.path / "good.cfg").string(), "--out", dir.path.string()}) ==
            kExitOk);
    const auto manifest = nlohmann::json::parse(read_file(dir.path / "tvscale.manifest.json"));
    CHECK(manifest["workers"] == 3);
    ::setenv("ROUGHWAVE_WORKERS", "many", 1);
    CHECK(run({"tvscale", "--config", (dir.path / "good.cfg").string(), "--out", dir.path.string()}) ==
          kExitValidation);
    ::unsetenv("ROUGHWAVE_WORKERS");
}
