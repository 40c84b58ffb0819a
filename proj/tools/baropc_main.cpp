/// @file baropc_main.cpp
/// @brief Command-line front end: simulate, convergence and stability runs.
///
/// Exit codes: 0 success, 1 numerical failure, 2 usage or configuration error.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>

#include "baropc/config.hpp"
#include "baropc/diagnostics.hpp"
#include "baropc/linsolve.hpp"
#include "baropc/scheme.hpp"
#include "baropc/verification.hpp"

namespace {

using namespace baropc;

std::ofstream open_csv(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.output);
    const std::filesystem::path path = std::filesystem::path(cfg.output) / name;
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write '" + path.string() + "'");
    }
    out << std::setprecision(17);
    return out;
}

void write_ledger(const RunConfig& cfg, const EnergyLedger& ledger) {
    std::ofstream out = open_csv(cfg, "ledger.csv");
    out << "step,time,kinetic,elastic,viscous_cum,psem,total_mass,min_density,stab_margin\n";
    const std::vector<double> margins = ledger.margins();
    for (std::size_t n = 0; n < ledger.rows().size(); ++n) {
        const LedgerRow& r = ledger.rows()[n];
        out << r.step << ',' << r.time << ',' << r.kinetic << ',' << r.elastic << ',' << r.viscous_cum << ','
            << r.psem << ',' << r.total_mass << ',' << r.min_density << ',' << margins[n] << '\n';
    }
}

void write_fields(const RunConfig& cfg, const Mesh& mesh, const SchemeState& s) {
    std::ofstream out = open_csv(cfg, "fields.csv");
    out << "kind,id,x,y,rho,p,u1,u2\n";
    for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
        const Vec2 x = mesh.cell(k).centroid;
        out << "cell," << k << ',' << x.x << ',' << x.y << ',' << s.rho[k] << ',' << s.p[k] << ",,\n";
    }
    for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
        const Vec2 x = mesh.edge(e).midpoint;
        out << "edge," << e << ',' << x.x << ',' << x.y << ",,," << s.u(e, 0) << ',' << s.u(e, 1) << '\n';
    }
}

ManufacturedCase manufactured_case(const RunConfig& cfg) {
    ManufacturedCase c;
    c.mu = cfg.mu;
    c.eos = make_eos(cfg);
    c.domain = cfg.domain;
    return c;
}

struct Run {
    Mesh mesh;
    PressureCorrectionScheme scheme;
    SchemeState initial;
};

Run perturbed_run(const RunConfig& cfg) {
    Mesh mesh = build_rect_mesh(cfg.mesh.nx, cfg.mesh.ny, cfg.domain);
    PressureCorrectionScheme scheme(mesh, scheme_config(cfg));
    const InitialCondition ic = perturbed_initial_condition(cfg.domain, cfg.seed, cfg.rho_amp, cfg.u_amp);
    SchemeState init = scheme.initial_state(ic.rho, ic.u);
    return {std::move(mesh), std::move(scheme), std::move(init)};
}

int run_simulate(const RunConfig& cfg) {
    if (cfg.problem == Problem::Perturbed) {
        Run run = perturbed_run(cfg);
        const SimulationResult res = simulate(run.scheme, run.initial, -1, cfg.t_end);
        write_ledger(cfg, res.ledger);
        write_fields(cfg, run.mesh, res.final_state);
        return 0;
    }
    const ManufacturedCase c = manufactured_case(cfg);
    const Mesh mesh = build_rect_mesh(cfg.mesh.nx, cfg.mesh.ny, cfg.domain);
    const PressureCorrectionScheme scheme(mesh, manufactured_config(c, mesh, cfg.dt, scheme_config(cfg)));
    const SchemeState init = scheme.initial_state([&](Vec2 x) { return c.density(x, 0.0); },
                                                  [&](Vec2 x) { return c.velocity(x, 0.0); });
    const SimulationResult res = simulate(scheme, init, -1, cfg.t_end);
    write_ledger(cfg, res.ledger);
    write_fields(cfg, mesh, res.final_state);
    const ErrorNorms err = error_norms(c, mesh, res.final_state);
    std::cout << std::setprecision(6) << "t = " << res.final_state.t << "  velocity L2 error " << err.velocity_l2
              << "  pressure L2 error " << err.pressure_l2 << '\n';
    return 0;
}

int run_convergence(const RunConfig& cfg) {
    const ManufacturedCase c = manufactured_case(cfg);
    const ConvergenceTable table = convergence_study(c, cfg.meshes, cfg.dts, cfg.t_end, scheme_config(cfg));
    std::ofstream out = open_csv(cfg, "convergence.csv");
    out << "mesh,dt,err_v_L2,err_p_L2,inner_iter_mean,wall_seconds\n";
    for (const ConvergenceRow& r : table.rows) {
        out << r.nx << 'x' << r.ny << ',' << r.dt << ',' << r.errors.velocity_l2 << ',' << r.errors.pressure_l2
            << ',' << r.inner_iter_mean << ',' << r.wall_seconds << '\n';
    }
    std::cout << std::setprecision(4);
    for (std::size_t m = 0; m < cfg.meshes.size(); ++m) {
        std::cout << "temporal order " << cfg.meshes[m].nx << 'x' << cfg.meshes[m].ny << ": velocity "
                  << table.temporal_order_v[m] << ", pressure " << table.temporal_order_p[m] << '\n';
    }
    for (std::size_t m = 0; m < table.spatial_order_v.size(); ++m) {
        std::cout << "spatial order " << cfg.meshes[m].nx << 'x' << cfg.meshes[m].ny << " -> "
                  << cfg.meshes[m + 1].nx << 'x' << cfg.meshes[m + 1].ny << ": velocity "
                  << table.spatial_order_v[m] << ", pressure " << table.spatial_order_p[m] << '\n';
    }
    return 0;
}

int run_stability(const RunConfig& cfg) {
    Run run = perturbed_run(cfg);
    const SimulationResult res = simulate(run.scheme, run.initial, cfg.steps);
    write_ledger(cfg, res.ledger);
    const StabCheck check = check_stab_bound(res.ledger);
    std::cout << std::setprecision(6) << "energy bound " << (check.pass ? "holds" : "violated")
              << "; worst relative margin " << check.worst_margin << " at step " << check.worst_step << '\n';
    return check.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pressure-correction solver for barotropic compressible Navier-Stokes flows"};
    app.require_subcommand(1);

    std::string help_keys = "Configuration keys (file 'key = value' or flag '--key value'):\n";
    for (const ConfigKey& k : config_keys()) {
        help_keys += "  " + k.name + ": " + k.help + "\n";
    }
    app.footer(help_keys);

    struct Sub {
        CLI::App* app;
        std::string config_file;
        std::map<std::string, std::string> flags;
    };
    std::vector<Sub> subs;
    subs.reserve(3);
    const std::vector<std::pair<std::string, std::string>> commands{
        {"simulate", "run to t_end; writes ledger.csv and fields.csv"},
        {"convergence", "manufactured-solution study; writes convergence.csv"},
        {"stability", "zero-forcing perturbed run; exit 0 iff the energy bound holds"},
    };
    for (const auto& [name, desc] : commands) {
        subs.push_back({app.add_subcommand(name, desc), {}, {}});
        Sub& s = subs.back();
        s.app->add_option("--config", s.config_file, "key = value configuration file");
        for (const ConfigKey& k : config_keys()) {
            s.app->add_option("--" + k.name, s.flags[k.name], k.help);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        for (Sub& s : subs) {
            if (!s.app->parsed()) {
                continue;
            }
            RunConfig cfg;
            if (!s.config_file.empty()) {
                cfg = parse_config_file(s.config_file, cfg);
            }
            for (const ConfigKey& k : config_keys()) {
                if (s.app->count("--" + k.name) > 0) {
                    set_config_value(cfg, k.name, s.flags[k.name], "--" + k.name);
                }
            }
            const std::string name = s.app->get_name();
            if (name == "simulate") {
                return run_simulate(cfg);
            }
            if (name == "convergence") {
                return run_convergence(cfg);
            }
            return run_stability(cfg);
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
