#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <set>
#include <sys/wait.h>
#include <unistd.h>

#include "robust_interp/cli.hpp"

using namespace robust_interp;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = ROBUST_INTERP_CONFIG_DIR;

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("robust_interp_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::initializer_list<std::string> args) {
    std::vector<std::string> storage{"robust-interp"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : storage) argv.push_back(s.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string cfg(const char* name) { return (kConfigs / name).string(); }

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("synthesize on the delay plant") {
    TempDir dir;
    const Run r = run({"synthesize", "--config", cfg("box_delay.json"), "--out-dir", dir.path.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("PASSED") != std::string::npos);
    const auto report = nlohmann::json::parse(slurp(dir.path / "report.json"));
    CHECK(report["status"] == "passed");
    CHECK(report["feasibility"]["positive_definite"] == true);
    CHECK(report["feasibility"]["pick_min_eigenvalue"].get<double>() > 0.0);
    CHECK(report["provenance"]["tool"] == "robust-interp");
    CHECK(report["provenance"]["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
    CHECK(report["verification"]["winding"] == 1);
    CHECK(fs::exists(dir.path / "controller.json"));
    CHECK(fs::exists(dir.path / "regions.csv"));

    // the Nyquist CSV carries the same open loop as the controller file
    const auto k = nlohmann::json::parse(slurp(dir.path / "controller.json"));
    CHECK(k["num"] == report["controller"]["num"]);
    const auto rows = read_csv(dir.path / "nyquist.csv");
    REQUIRE(rows.size() > 100);
    CHECK(rows[0] == std::vector<std::string>{"omega", "re_pk", "im_pk"});
    CHECK(report["verification"]["grid_points"].get<std::size_t>() == rows.size() - 1);
}

TEST_CASE("exit-code matrix") {
    TempDir dir;
    const std::string out = dir.path.string();
    CHECK(run({"synthesize", "--config", cfg("box_large_gain.json"), "--out-dir", out}).code == 2);
    const auto infeasible = nlohmann::json::parse(slurp(dir.path / "report.json"));
    CHECK(infeasible["status"] == "infeasible");
    CHECK(infeasible["feasibility"]["positive_definite"] == false);

    CHECK(run({"synthesize", "--config", cfg("stable_identity.json"), "--out-dir", out, "--quiet"}).code == 0);
    CHECK(run({"verify", "--config", cfg("box_delay.json"), "--controller", cfg("published_controller.json"),
               "--out-dir", out})
              .code == 0);
    CHECK(run({"verify", "--config", cfg("box_delay.json"), "--controller", cfg("zero_controller.json"), "--out-dir",
               out})
              .code == 1);
    CHECK(run({"verify", "--config", cfg("unstable_identity.json"), "--controller", cfg("gain_two_controller.json"),
               "--out-dir", out})
              .code == 0);
}

TEST_CASE("errors and usage") {
    TempDir dir;
    const Run missing = run({"synthesize", "--config", "/nonexistent.json", "--out-dir", dir.path.string()});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("error:") != std::string::npos);
    CHECK(run({"verify", "--config", cfg("box_delay.json")}).code == 1);  // --controller required
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({}).code == 1);
    CHECK(run({"--help"}).code == 0);

    const Run quiet = run({"synthesize", "--config", cfg("stable_identity.json"), "--out-dir", dir.path.string(),
                           "--quiet"});
    CHECK(quiet.out.empty());
}

TEST_CASE("regions traces") {
    TempDir dir;
    SUBCASE("uncertain zero at w = 0") {
        CHECK(run({"regions", "--config", cfg("uncertain_zero.json"), "--out-dir", dir.path.string()}).code == 0);
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& row : read_csv(dir.path / "regions.csv")) {
            if (row[1] != "lambda") continue;
            CHECK(std::stod(row[0]) == 0.0);
            CHECK(std::abs(std::stod(row[3])) < 1e-12);
            lo = std::min(lo, std::stod(row[2]));
            hi = std::max(hi, std::stod(row[2]));
        }
        CHECK(lo == doctest::Approx(2.0));
        CHECK(hi == doctest::Approx(4.0));
    }
    SUBCASE("trivial family") {
        CHECK(run({"regions", "--config", cfg("stable_identity.json"), "--out-dir", dir.path.string()}).code == 0);
        int gamma_rows = 0;
        for (const auto& row : read_csv(dir.path / "regions.csv")) {
            if (row[1] == "gamma") {
                ++gamma_rows;
                CHECK(std::stod(row[2]) == -1.0);
                CHECK(std::stod(row[3]) == 0.0);
            }
            CHECK(row[1] != "lambda");
        }
        CHECK(gamma_rows > 0);
    }
    SUBCASE("delay plant at the plotted frequencies") {
        CHECK(run({"regions", "--config", cfg("box_delay.json"), "--controller", cfg("published_controller.json"),
                   "--out-dir", dir.path.string()})
                  .code == 0);
        std::set<std::string> freqs;
        const auto rows = read_csv(dir.path / "regions.csv");
        CHECK(rows[0] == std::vector<std::string>{"omega", "region", "re", "im", "segment_id"});
        for (std::size_t i = 1; i < rows.size(); ++i) freqs.insert(rows[i][0]);
        CHECK(freqs.size() == 3);
        CHECK(fs::exists(dir.path / "nyquist.csv"));
    }
}

TEST_CASE("reports are deterministic apart from the timestamp") {
    TempDir a, b;
    REQUIRE(run({"synthesize", "--config", cfg("box_delay.json"), "--out-dir", a.path.string(), "--quiet"}).code == 0);
    REQUIRE(run({"synthesize", "--config", cfg("box_delay.json"), "--out-dir", b.path.string(), "--quiet"}).code == 0);
    auto ra = nlohmann::json::parse(slurp(a.path / "report.json"));
    auto rb = nlohmann::json::parse(slurp(b.path / "report.json"));
    ra["provenance"].erase("timestamp");
    rb["provenance"].erase("timestamp");
    // output paths differ only by directory
    ra.erase("outputs");
    rb.erase("outputs");
    CHECK(ra.dump() == rb.dump());
    for (const char* f : {"controller.json", "nyquist.csv", "regions.csv"}) CHECK(slurp(a.path / f) == slurp(b.path / f));
}

TEST_CASE("the installed binary honours the thread cap") {
    TempDir dir;
    const std::string cmd = std::string("ROBUST_INTERP_THREADS=1 '") + ROBUST_INTERP_CLI + "' verify --config '" +
                            cfg("unstable_identity.json") + "' --controller '" + cfg("gain_two_controller.json") +
                            "' --out-dir '" + dir.path.string() + "' --quiet";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(fs::exists(dir.path / "report.json"));
}
