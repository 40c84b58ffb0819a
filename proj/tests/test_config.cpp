/// @file test_config.cpp
/// @brief Configuration parsing and the command-line tool's contract: exit
/// codes, flag precedence, output files and determinism.

#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "baropc/config.hpp"

using namespace baropc;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test.cfg");
}

std::string error_of(const std::string& text) {
    try {
        (void)parse(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("baropc_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(BAROPC_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t line_count(const fs::path& p) {
    const std::string s = slurp(p);
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

} // namespace

TEST_CASE("minimal file fills defaults") {
    const RunConfig c = parse("# comment\nmesh = 20x20\n\ndt = 0.025  # trailing\n");
    CHECK(c.mesh.nx == 20);
    CHECK(c.mesh.ny == 20);
    CHECK(c.dt == 0.025);
    CHECK(c.relaxation == 1.0);
    CHECK(c.proj_tol == 1e-8);
    CHECK(c.convection == ConvectionMode::Centered);
    CHECK(c.linearization == InnerLinearization::Picard);
    const SchemeConfig s = scheme_config(c);
    CHECK(s.dt == 0.025);
    CHECK(s.eos.kind() == EosKind::Affine);
}

TEST_CASE("every key is accepted") {
    const RunConfig c = parse(
        "mesh = 8x4\ndomain = 0, 2, -1, 1\ndt = 0.1\nt_end = 1\nmu = 0\neos = power\ngamma = 2\nmach = 0.3\n"
        "convection = upwind\nproj_tol = 1e-9\nrelaxation = 0.5\nproj_maxit = 20\nlin_tol = 1e-12\nlin_maxit = 500\n"
        "renorm = average\nlinearization = newton\nproblem = perturbed\nseed = 42\nsteps = 7\nrho_amp = 0.1\n"
        "u_amp = 0.2\nmeshes = 4x4, 8x8\ndts = 0.2,0.1\noutput = \"out dir\"\n");
    CHECK(c.domain.x_max == 2.0);
    CHECK(c.convection == ConvectionMode::Upwind);
    CHECK(c.renorm == RenormWeight::EdgeAverage);
    CHECK(c.linearization == InnerLinearization::Newton);
    CHECK(c.problem == Problem::Perturbed);
    CHECK(c.seed == 42);
    CHECK(c.meshes.size() == 2);
    CHECK(c.meshes[1].nx == 8);
    CHECK(c.dts.size() == 2);
    CHECK(c.output == "out dir");
    CHECK(make_eos(c).kind() == EosKind::Power);
    CHECK(config_keys().size() == 24);
}

TEST_CASE("invalid values name the key and the line") {
    const std::string e = error_of("mesh = 4x4\ndt = -1\n");
    CHECK(e.find("dt") != std::string::npos);
    CHECK(e.find("test.cfg:2") != std::string::npos);
    CHECK(error_of("colour = blue\n").find("unknown key") != std::string::npos);
    CHECK(error_of("mesh = 4\n").find("mesh") != std::string::npos);
    CHECK(error_of("relaxation = 1.5\n").find("relaxation") != std::string::npos);
    CHECK(error_of("eos = ideal\n").find("eos") != std::string::npos);
    CHECK(error_of("just some words\n").find("key = value") != std::string::npos);
    CHECK(error_of("dt = nan\n").find("dt") != std::string::npos);
    RunConfig c;
    c.eos = "power";
    c.gamma = 0.5;
    CHECK_THROWS_AS(make_eos(c), ConfigError);
    CHECK_THROWS_AS(parse_config_file("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("command line exit codes") {
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("simulate --dt -1") == 2);
    CHECK(run_cli("simulate --config /nonexistent/file.cfg") == 2);
    CHECK(run_cli("stability --mesh 4x4 --dt 0.1 --steps 2 --proj_maxit 1 --output " +
                  scratch("fail").string()) == 1);
}

TEST_CASE("flags override the configuration file") {
    const fs::path dir = scratch("precedence");
    const fs::path cfg = dir / "run.cfg";
    std::ofstream(cfg) << "mesh = 4x4\ndt = 0.1\nproblem = perturbed\nsteps = 5\noutput = " << dir.string() << "\n";
    REQUIRE(run_cli("stability --config " + cfg.string()) == 0);
    CHECK(line_count(dir / "ledger.csv") == 1 + 6);
    REQUIRE(run_cli("stability --config " + cfg.string() + " --steps 2") == 0);
    CHECK(line_count(dir / "ledger.csv") == 1 + 3);
}

TEST_CASE("stability run of an equilibrium state succeeds") {
    const fs::path dir = scratch("equilibrium");
    CHECK(run_cli("stability --mesh 5x5 --rho_amp 0 --u_amp 0 --steps 3 --output " + dir.string()) == 0);
    const std::string ledger = slurp(dir / "ledger.csv");
    CHECK(ledger.rfind("step,time,kinetic,elastic,viscous_cum,psem,total_mass,min_density,stab_margin\n", 0) == 0);
}

TEST_CASE("simulate writes fields and ledgers deterministically") {
    const fs::path a = scratch("det_a");
    const fs::path b = scratch("det_b");
    const std::string args = "simulate --mesh 5x5 --dt 0.1 --t_end 0.3 --output ";
    REQUIRE(run_cli(args + a.string()) == 0);
    REQUIRE(run_cli(args + b.string()) == 0);
    CHECK(slurp(a / "ledger.csv") == slurp(b / "ledger.csv"));
    CHECK(slurp(a / "fields.csv") == slurp(b / "fields.csv"));
    CHECK(line_count(a / "ledger.csv") == 1 + 4);
    // Header, 25 cells and 60 edges.
    CHECK(line_count(a / "fields.csv") == 1 + 25 + 60);
    CHECK(slurp(a / "fields.csv").rfind("kind,id,x,y,rho,p,u1,u2\n", 0) == 0);
    REQUIRE(run_cli("simulate --problem perturbed --mesh 4x4 --dt 0.1 --t_end 0.2 --output " + a.string()) == 0);
    CHECK(line_count(a / "ledger.csv") == 1 + 3);
}

TEST_CASE("convergence run writes its table") {
    const fs::path dir = scratch("convergence");
    REQUIRE(run_cli("convergence --meshes 4x4,6x6 --dts 0.25,0.125 --output " + dir.string()) == 0);
    const std::string csv = slurp(dir / "convergence.csv");
    CHECK(csv.rfind("mesh,dt,err_v_L2,err_p_L2,inner_iter_mean,wall_seconds\n", 0) == 0);
    CHECK(line_count(dir / "convergence.csv") == 1 + 4);
    CHECK(csv.find("6x6,0.125,") != std::string::npos);
}
