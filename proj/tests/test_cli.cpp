#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "heco/config.hpp"

namespace fs = std::filesystem;
using namespace heco;

namespace {

std::string cli_path() {
    const char* p = std::getenv("HECO_CLI");
    REQUIRE_MESSAGE(p != nullptr, "HECO_CLI must point at the executable");
    return p;
}

int run_cli(const std::string& args, std::string* output = nullptr) {
    std::string cmd = cli_path() + " " + args + " > cli_stdout.txt 2>&1";
    int rc = std::system(cmd.c_str());
    if (output) {
        std::ifstream in("cli_stdout.txt");
        std::ostringstream ss;
        ss << in.rdbuf();
        *output = ss.str();
    }
    return WEXITSTATUS(rc);
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() /
                     ("heco_cli_test_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config round-trips losslessly through serialize/parse") {
    std::string text =
        "[run]\nkind = bound-states\nseed = 7\n"
        "[incidence]\nE_i_meV = 12.5\ntheta_i_deg = 5.0\n"
        "[potential]\nD_meV = 4.5\n";
    RunConfig a = RunConfig::parse(text);
    RunConfig b = RunConfig::parse(a.serialize());
    CHECK(a.serialize() == b.serialize());
    CHECK(b.kind == "bound-states");
    CHECK(b.E_i_meV == 12.5);
    CHECK(b.D_meV == 4.5);
    CHECK(b.seed == 7);
}

TEST_CASE("unknown keys are rejected and every violation is listed") {
    std::string text =
        "[run]\nkind = bound-states\nbogus = 1\n"
        "[incidence]\nE_i_meV = ten\n";
    try {
        RunConfig::parse(text);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.violations.size() == 2);
        CHECK(e.violations[0].find("bogus") != std::string::npos);
        CHECK(e.violations[1].find("E_i_meV") != std::string::npos);
    }
}

TEST_CASE("missing beam energy is a validation error naming the key") {
    try {
        RunConfig::parse("[run]\nkind = bound-states\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(!e.violations.empty());
        CHECK(e.violations[0].find("E_i_meV") != std::string::npos);
    }
}

TEST_CASE("cli: valid run writes artifacts and a manifest") {
    TempDir tmp;
    fs::path cfg = tmp.path / "bs.cfg";
    write_file(cfg, "[run]\nkind = bound-states\n[incidence]\nE_i_meV = 10.0\n");
    fs::path out = tmp.path / "out";
    int rc = run_cli("run --config " + cfg.string() + " --out " + out.string());
    CHECK(rc == 0);
    CHECK(fs::exists(out / "bound_states.csv"));
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(fs::exists(out / "config_used.cfg"));
    std::string manifest = slurp(out / "manifest.json");
    CHECK(manifest.find("bound-states") != std::string::npos);
    CHECK(manifest.find("config_hash") != std::string::npos);
}

TEST_CASE("cli: reruns are byte-identical") {
    TempDir tmp;
    fs::path cfg = tmp.path / "scan.cfg";
    write_file(cfg,
               "[run]\nkind = hardwall-intensity\n[incidence]\nE_i_meV = 10.0\n"
               "[hardwall]\nn_angles = 201\n");
    fs::path out1 = tmp.path / "a", out2 = tmp.path / "b";
    CHECK(run_cli("run --config " + cfg.string() + " --out " + out1.string()) == 0);
    CHECK(run_cli("run --config " + cfg.string() + " --out " + out2.string()) == 0);
    CHECK(slurp(out1 / "hardwall_intensity.csv") == slurp(out2 / "hardwall_intensity.csv"));
}

TEST_CASE("cli: validation failures exit 2 and name the offender") {
    TempDir tmp;
    fs::path cfg = tmp.path / "bad.cfg";
    write_file(cfg, "[run]\nkind = bound-states\n");
    std::string msg;
    CHECK(run_cli("run --config " + cfg.string(), &msg) == 2);
    CHECK(msg.find("E_i_meV") != std::string::npos);

    write_file(cfg, "[run]\nkind = bound-states\nmystery = 3\n[incidence]\nE_i_meV = 10\n");
    CHECK(run_cli("run --config " + cfg.string(), &msg) == 2);
    CHECK(msg.find("mystery") != std::string::npos);
}

TEST_CASE("cli: runtime failures exit 3") {
    TempDir tmp;
    fs::path cfg = tmp.path / "rt.cfg";
    // the hard wall has no finite potential to tabulate
    write_file(cfg,
               "[run]\nkind = potential-scan\n[incidence]\nE_i_meV = 10.0\n"
               "[potential]\nvariant = hard-wall\n");
    CHECK(run_cli("run --config " + cfg.string() + " --out " + (tmp.path / "o").string()) == 3);
}

TEST_CASE("cli: unknown figure id lists the available ones") {
    std::string msg;
    CHECK(run_cli("reproduce fig99", &msg) == 2);
    CHECK(msg.find("fig2a") != std::string::npos);
    CHECK(msg.find("fig10") != std::string::npos);
}

TEST_CASE("cli: HECO_OUT environment override") {
    TempDir tmp;
    fs::path cfg = tmp.path / "bs.cfg";
    write_file(cfg, "[run]\nkind = bound-states\n[incidence]\nE_i_meV = 10.0\n");
    fs::path out = tmp.path / "env_out";
    std::string cmd = "HECO_OUT=" + out.string() + " " + cli_path() + " run --config " +
                      cfg.string() + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(rc) == 0);
    CHECK(fs::exists(out / "bound_states.csv"));
}

TEST_CASE("cli: fermat figure recipe produces separatrices and rays") {
    TempDir tmp;
    int rc = run_cli("reproduce fig5 --out " + (tmp.path / "figs").string());
    CHECK(rc == 0);
    CHECK(fs::exists(tmp.path / "figs" / "fig5" / "separatrices.csv"));
    CHECK(fs::exists(tmp.path / "figs" / "fig5" / "separatrix_rays.csv"));
}
