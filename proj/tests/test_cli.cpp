#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string binary() {
    const char* bin = std::getenv("CCFV_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "CCFV_BIN must point at the ccfv binary");
    return bin;
}

int run(const std::string& args) {
    const std::string cmd = binary() + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("ccfv_cli_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int counter;
};
int TempDir::counter = 0;

std::string write_file(const fs::path& dir, const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    std::ofstream out(p);
    out << text;
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        if (line.size() && line.back() == ',')
            cells.push_back("");
        rows.push_back(cells);
    }
    return rows;
}

const char* kSmokeConfig = R"(# gamma = 0 smoke run
[domain]
kind = interval
length_x = 1
cells_x = 32

[params]
gamma = 0
g = 1

[init]
profile = gaussian-bump
amplitude = 1
width = 0.1
baseline = 0.5
center_x = 0.4

[time]
t_end = 1
output_every = 0.25
)";

} // namespace

TEST_CASE("simulate smoke run: exit 0, positive density, conserved mass") {
    TempDir tmp;
    const std::string cfg = write_file(tmp.path, "smoke.cfg", kSmokeConfig);
    const std::string out = (tmp.path / "out").string();
    CHECK(run("simulate " + cfg + " --out " + out + " --quiet") == 0);

    const auto rows = read_csv(fs::path(out) / "timeseries.csv");
    REQUIRE(rows.size() >= 2);
    CHECK(rows[0] == std::vector<std::string>{"t", "mass", "min_n", "max_n", "min_c", "max_c",
                                              "max_drift", "E_n", "E_grad_c", "E_c", "rhs36",
                                              "cum_En", "dt"});
    const double mass0 = std::stod(rows[1][1]);
    const double mass_end = std::stod(rows.back()[1]);
    const double min_n_end = std::stod(rows.back()[2]);
    CHECK(min_n_end > 0.0);
    CHECK(std::abs(mass_end - mass0) <= 1e-12 * mass0);

    // snapshots exist with the 1D header
    CHECK(fs::exists(fs::path(out) / "snapshot_000000.csv"));
    const auto snap = read_csv(fs::path(out) / "snapshot_000000.csv");
    CHECK(snap[0] == std::vector<std::string>{"x", "n", "c"});
    CHECK(snap.size() == 33); // header + 32 cells

    // manifest carries the resolved config and version
    const auto manifest = nlohmann::json::parse(slurp(fs::path(out) / "run-manifest.json"));
    CHECK(manifest["config"]["domain"]["cells_x"] == 32);
    CHECK(manifest["seed"] == 42);
    CHECK(manifest.contains("version"));
}

TEST_CASE("2D smoke run writes rectangle snapshots and stationary state") {
    TempDir tmp;
    const std::string cfg = write_file(tmp.path, "rect.cfg", R"(
[domain]
kind = rectangle
length_x = 1
length_y = 1
cells_x = 12
cells_y = 12

[params]
gamma = 0.3
g = 1

[init]
profile = gaussian-bump
amplitude = 1.5
width = 0.15
baseline = 0.5
center_x = 0.4
center_y = 0.6
mass = 1

[time]
t_end = 0.1
output_every = 0.05
)");
    const std::string out = (tmp.path / "out").string();
    CHECK(run("simulate " + cfg + " --out " + out + " --quiet") == 0);
    const auto snap = read_csv(fs::path(out) / "snapshot_000000.csv");
    CHECK(snap[0] == std::vector<std::string>{"x", "y", "n", "c"});
    CHECK(snap.size() == 145); // header + 144 cells

    const std::string sout = (tmp.path / "sout").string();
    CHECK(run("stationary " + cfg + " --out " + sout + " --quiet") == 0);
    const auto rows = read_csv(fs::path(sout) / "stationary.csv");
    CHECK(rows[0] == std::vector<std::string>{"x", "y", "n_inf", "c_inf"});
}

TEST_CASE("two identical runs produce byte-identical timeseries.csv") {
    TempDir tmp;
    const std::string cfg = write_file(tmp.path, "smoke.cfg", kSmokeConfig);
    const std::string out_a = (tmp.path / "a").string();
    const std::string out_b = (tmp.path / "b").string();
    REQUIRE(run("simulate " + cfg + " --out " + out_a + " --quiet") == 0);
    REQUIRE(run("simulate " + cfg + " --out " + out_b + " --quiet") == 0);
    CHECK(slurp(fs::path(out_a) / "timeseries.csv") == slurp(fs::path(out_b) / "timeseries.csv"));
}

TEST_CASE("energy columns are empty when no stationary state is attached") {
    TempDir tmp;
    const std::string cfg = write_file(tmp.path, "noattach.cfg",
                                       std::string(kSmokeConfig) +
                                           "\n[analysis]\nattach_stationary = false\n");
    const std::string out = (tmp.path / "out").string();
    REQUIRE(run("simulate " + cfg + " --out " + out + " --quiet") == 0);
    const auto rows = read_csv(fs::path(out) / "timeseries.csv");
    REQUIRE(rows.size() >= 2);
    for (size_t col = 7; col <= 11; ++col) // E_n .. cum_En
        CHECK(rows[1][col] == "");
    CHECK(rows[1][12] != ""); // dt still present
}

TEST_CASE("exit codes: config, numerical-surface, and i/o failures") {
    TempDir tmp;
    // validation error -> 1
    const std::string bad = write_file(tmp.path, "bad.cfg", "[init]\nbaseline = 0\n");
    CHECK(run("simulate " + bad + " --quiet") == 1);
    // unreadable config -> 1
    CHECK(run("simulate " + (tmp.path / "missing.cfg").string() + " --quiet") == 1);
    // unknown key -> 1
    const std::string unk = write_file(tmp.path, "unk.cfg", "[domain]\nbogus = 1\n");
    CHECK(run("verify " + unk + " --quiet") == 1);
    // unwritable output path -> 3
    const std::string ok = write_file(tmp.path, "ok.cfg", kSmokeConfig);
    CHECK(run("simulate " + ok + " --out /dev/null/nope --quiet") == 3);
}

TEST_CASE("stationary command writes the state and an in-bracket alpha") {
    TempDir tmp;
    const std::string cfg = write_file(tmp.path, "st.cfg", R"(
[domain]
kind = interval
cells_x = 48

[params]
gamma = 0.5
g = 1

[init]
profile = constant
baseline = 1
mass = 1
)");
    const std::string out = (tmp.path / "out").string();
    CHECK(run("stationary " + cfg + " --out " + out + " --quiet") == 0);

    const auto manifest = nlohmann::json::parse(slurp(fs::path(out) / "stationary-manifest.json"));
    const double alpha = manifest["alpha_inf"];
    const double lo = manifest["alpha_bracket"][0];
    const double hi = manifest["alpha_bracket"][1];
    CHECK(alpha >= lo);
    CHECK(alpha <= hi);
    CHECK(double(manifest["max_n_inf"]) > double(manifest["min_n_inf"])); // nonconstant

    const auto rows = read_csv(fs::path(out) / "stationary.csv");
    CHECK(rows[0] == std::vector<std::string>{"x", "n_inf", "c_inf"});
    CHECK(rows.size() == 49);
}

TEST_CASE("stationary with gamma = 0 is the flat state") {
    TempDir tmp;
    const std::string cfg = write_file(tmp.path, "flat.cfg", R"(
[domain]
kind = interval
length_x = 2
cells_x = 32

[params]
gamma = 0
g = 1

[init]
baseline = 1
mass = 3
)");
    const std::string out = (tmp.path / "out").string();
    CHECK(run("stationary " + cfg + " --out " + out + " --quiet") == 0);
    const auto rows = read_csv(fs::path(out) / "stationary.csv");
    for (size_t i = 1; i < rows.size(); ++i)
        CHECK(std::stod(rows[i][1]) == doctest::Approx(1.5).epsilon(1e-11));
}

TEST_CASE("verify passes on a small healthy config") {
    TempDir tmp;
    const std::string cfg = write_file(tmp.path, "verify.cfg", R"(
[domain]
kind = interval
cells_x = 32

[params]
gamma = 0.2
g = 1

[init]
profile = gaussian-bump
amplitude = 2
width = 0.08
baseline = 0.4
center_x = 0.35
mass = 1

[time]
t_end = 0.5
output_every = 0.05
)");
    const std::string out = (tmp.path / "out").string();
    CHECK(run("verify " + cfg + " --out " + out + " --quiet") == 0);
    const auto report = nlohmann::json::parse(slurp(fs::path(out) / "verify-report.json"));
    CHECK(report["passed"] == true);
    CHECK(report["checks"].size() >= 15);
}

TEST_CASE("verify surfaces a dt_cap above the stability bound, exit 2") {
    TempDir tmp;
    const std::string cfg = write_file(tmp.path, "unstable.cfg", R"(
[domain]
kind = interval
cells_x = 32

[params]
gamma = 0.2
g = 1

[init]
baseline = 1

[time]
t_end = 0.2
dt_cap = 0.5
output_every = 0.05
)");
    const std::string out = (tmp.path / "out").string();
    CHECK(run("verify " + cfg + " --out " + out + " --quiet") == 2);
    const auto report = nlohmann::json::parse(slurp(fs::path(out) / "verify-report.json"));
    bool found = false;
    for (const auto& chk : report["checks"])
        if (chk["name"] == "transport.dt-cap-stability") {
            found = true;
            CHECK(chk["passed"] == false);
        }
    CHECK(found);
}

TEST_CASE("sweep maps gamma rows; K > 0 rows converged") {
    TempDir tmp;
    // 128 cells: the first-order advection floor of E_n scales with (gamma h)^2
    // and must sit below the convergence threshold for the gamma = 0.2 point
    const std::string cfg = write_file(tmp.path, "sweep.cfg", R"(
[domain]
kind = interval
cells_x = 128

[params]
g = 1

[init]
profile = gaussian-bump
amplitude = 4
width = 0.06
baseline = 0.3
center_x = 0.35
mass = 1

[time]
t_end = 25
output_every = 0.05

[sweep]
gamma_list = 0.05, 0.1, 0.2
m_list = 1
g_list = 1
)");
    const std::string out = (tmp.path / "out").string();
    CHECK(run("sweep " + cfg + " --out " + out + " --quiet") == 0);
    const auto rows = read_csv(fs::path(out) / "sweep.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[0][0] == "m");
    for (size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][6] == ""); // no per-point error
        const double K = std::stod(rows[i][3]);
        if (K > 0.0)
            CHECK(rows[i][4] == "true");
    }
}

TEST_CASE("sweep without a gamma list is a config error") {
    TempDir tmp;
    const std::string cfg = write_file(tmp.path, "sweep0.cfg", "[sweep]\nm_list = 1\n");
    CHECK(run("sweep " + cfg + " --quiet") == 1);
    const std::string cfg2 = write_file(tmp.path, "nosweep.cfg", "[domain]\ncells_x = 16\n");
    CHECK(run("sweep " + cfg2 + " --quiet") == 1);
}

TEST_CASE("trace-constant command reports a validated estimate") {
    TempDir tmp;
    const std::string cfg = write_file(tmp.path, "trace.cfg", "[domain]\ncells_x = 48\n");
    const std::string out = (tmp.path / "out").string();
    CHECK(run("trace-constant " + cfg + " --out " + out + " --quiet") == 0);
    const auto j = nlohmann::json::parse(slurp(fs::path(out) / "trace-constant.json"));
    CHECK(double(j["C_hat"]) >= 1.41421356);
    CHECK(j["validation_holds"] == true);
}

TEST_CASE("environment variable overrides the configured output directory") {
    TempDir tmp;
    const std::string cfg = write_file(tmp.path, "env.cfg", kSmokeConfig);
    const std::string out = (tmp.path / "envout").string();
    const std::string cmd = "CCFV_OUT_DIR=" + out + " " + binary() + " simulate " + cfg +
                            " --quiet > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(fs::path(out) / "timeseries.csv"));
}

TEST_CASE("seed flag is recorded in the manifest") {
    TempDir tmp;
    const std::string cfg = write_file(tmp.path, "seed.cfg", kSmokeConfig);
    const std::string out = (tmp.path / "out").string();
    CHECK(run("simulate " + cfg + " --out " + out + " --seed 7 --quiet") == 0);
    const auto manifest = nlohmann::json::parse(slurp(fs::path(out) / "run-manifest.json"));
    CHECK(manifest["seed"] == 7);
}
