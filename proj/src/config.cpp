#include "baropc/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace baropc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    std::string out = s.substr(b, e - b + 1);
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') {
        out = out.substr(1, out.size() - 2);
    }
    return out;
}

[[noreturn]] void fail(const std::string& key, const std::string& where, const std::string& why) {
    throw ConfigError(where + ": invalid value for '" + key + "': " + why);
}

double to_double(const std::string& key, const std::string& v, const std::string& where) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x)) {
        fail(key, where, "expected a finite number, got '" + v + "'");
    }
    return x;
}

double positive(const std::string& key, const std::string& v, const std::string& where) {
    const double x = to_double(key, v, where);
    if (!(x > 0.0)) {
        fail(key, where, "must be positive");
    }
    return x;
}

long long to_integer(const std::string& key, const std::string& v, const std::string& where, long long min) {
    long long x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        fail(key, where, "expected an integer, got '" + v + "'");
    }
    if (x < min) {
        fail(key, where, "must be at least " + std::to_string(min));
    }
    return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        out.push_back(trim(item));
    }
    return out;
}

MeshSize to_mesh(const std::string& key, const std::string& v, const std::string& where) {
    const auto x = v.find('x');
    if (x == std::string::npos) {
        fail(key, where, "expected NXxNY, got '" + v + "'");
    }
    return {static_cast<int>(to_integer(key, trim(v.substr(0, x)), where, 1)),
            static_cast<int>(to_integer(key, trim(v.substr(x + 1)), where, 1))};
}

} // namespace

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys{
        {"mesh", "cells per direction, NXxNY (default 20x20)"},
        {"domain", "xmin,xmax,ymin,ymax (default 0,1,-0.5,0.5)"},
        {"dt", "time step (default 0.025)"},
        {"t_end", "final time of simulate runs and studies (default 0.5)"},
        {"mu", "viscosity (default 0.01)"},
        {"eos", "affine | power | linear (default affine)"},
        {"gamma", "adiabatic exponent (default 1.4)"},
        {"mach", "Mach number of the affine law (default 0.5)"},
        {"convection", "centered | upwind (default centered)"},
        {"proj_tol", "projection inner-iteration tolerance (default 1e-8)"},
        {"relaxation", "pressure relaxation in (0,1] (default 1)"},
        {"proj_maxit", "maximum inner iterations (default 100)"},
        {"lin_tol", "relative tolerance of the linear solvers (default 1e-10)"},
        {"lin_maxit", "linear iteration cap, 0 = 10 x unknowns (default 0)"},
        {"renorm", "previous-pressure weight of the renormalization: average | predicted (default predicted)"},
        {"linearization", "inner projection iteration: picard | newton (default picard)"},
        {"problem", "simulate problem: manufactured | perturbed (default manufactured)"},
        {"seed", "seed of the perturbed initial state (default 1)"},
        {"steps", "time steps of the stability run (default 50)"},
        {"rho_amp", "density perturbation amplitude (default 0.3)"},
        {"u_amp", "velocity perturbation amplitude (default 0.5)"},
        {"meshes", "study meshes, comma separated (default 20x20,40x40)"},
        {"dts", "study time steps, comma separated (default 0.1,0.05,0.025,0.0125)"},
        {"output", "output directory (default .)"},
    };
    return keys;
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& raw, const std::string& where) {
    const std::string v = trim(raw);
    if (key == "mesh") {
        c.mesh = to_mesh(key, v, where);
    } else if (key == "domain") {
        const auto parts = split(v, ',');
        if (parts.size() != 4) {
            fail(key, where, "expected four comma-separated numbers");
        }
        Rect r{to_double(key, parts[0], where), to_double(key, parts[1], where), to_double(key, parts[2], where),
               to_double(key, parts[3], where)};
        if (!(r.x_max > r.x_min) || !(r.y_max > r.y_min)) {
            fail(key, where, "empty rectangle");
        }
        c.domain = r;
    } else if (key == "dt") {
        c.dt = positive(key, v, where);
    } else if (key == "t_end") {
        c.t_end = positive(key, v, where);
    } else if (key == "mu") {
        c.mu = to_double(key, v, where);
        if (c.mu < 0.0) {
            fail(key, where, "must be non-negative");
        }
    } else if (key == "eos") {
        if (v != "affine" && v != "power" && v != "linear") {
            fail(key, where, "expected affine, power or linear");
        }
        c.eos = v;
    } else if (key == "gamma") {
        c.gamma = positive(key, v, where);
    } else if (key == "mach") {
        c.mach = positive(key, v, where);
    } else if (key == "convection") {
        if (v == "centered") {
            c.convection = ConvectionMode::Centered;
        } else if (v == "upwind") {
            c.convection = ConvectionMode::Upwind;
        } else {
            fail(key, where, "expected centered or upwind");
        }
    } else if (key == "proj_tol") {
        c.proj_tol = positive(key, v, where);
    } else if (key == "relaxation") {
        c.relaxation = positive(key, v, where);
        if (c.relaxation > 1.0) {
            fail(key, where, "must lie in (0, 1]");
        }
    } else if (key == "proj_maxit") {
        c.proj_maxit = static_cast<int>(to_integer(key, v, where, 1));
    } else if (key == "lin_tol") {
        c.lin_tol = positive(key, v, where);
    } else if (key == "lin_maxit") {
        c.lin_maxit = static_cast<std::size_t>(to_integer(key, v, where, 0));
    } else if (key == "renorm") {
        if (v == "average") {
            c.renorm = RenormWeight::EdgeAverage;
        } else if (v == "predicted") {
            c.renorm = RenormWeight::Predicted;
        } else {
            fail(key, where, "expected average or predicted");
        }
    } else if (key == "linearization") {
        if (v == "picard") {
            c.linearization = InnerLinearization::Picard;
        } else if (v == "newton") {
            c.linearization = InnerLinearization::Newton;
        } else {
            fail(key, where, "expected picard or newton");
        }
    } else if (key == "problem") {
        if (v == "manufactured") {
            c.problem = Problem::Manufactured;
        } else if (v == "perturbed") {
            c.problem = Problem::Perturbed;
        } else {
            fail(key, where, "expected manufactured or perturbed");
        }
    } else if (key == "seed") {
        c.seed = static_cast<std::uint64_t>(to_integer(key, v, where, 0));
    } else if (key == "steps") {
        c.steps = static_cast<int>(to_integer(key, v, where, 0));
    } else if (key == "rho_amp") {
        c.rho_amp = to_double(key, v, where);
        if (!(c.rho_amp >= 0.0 && c.rho_amp < 1.0)) {
            fail(key, where, "must lie in [0, 1)");
        }
    } else if (key == "u_amp") {
        c.u_amp = to_double(key, v, where);
        if (c.u_amp < 0.0) {
            fail(key, where, "must be non-negative");
        }
    } else if (key == "meshes") {
        std::vector<MeshSize> m;
        for (const std::string& item : split(v, ',')) {
            m.push_back(to_mesh(key, item, where));
        }
        if (m.empty()) {
            fail(key, where, "empty list");
        }
        c.meshes = m;
    } else if (key == "dts") {
        std::vector<double> d;
        for (const std::string& item : split(v, ',')) {
            d.push_back(positive(key, item, where));
        }
        if (d.empty()) {
            fail(key, where, "empty list");
        }
        c.dts = d;
    } else if (key == "output") {
        if (v.empty()) {
            fail(key, where, "empty path");
        }
        c.output = v;
    } else {
        throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

RunConfig parse_config(std::istream& in, const std::string& source, RunConfig base) {
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        const std::string where = source + ":" + std::to_string(number);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where + ": expected 'key = value'");
        }
        set_config_value(base, trim(line.substr(0, eq)), line.substr(eq + 1), where);
    }
    return base;
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    return parse_config(in, path, std::move(base));
}

EquationOfState make_eos(const RunConfig& c) {
    try {
        if (c.eos == "affine") {
            return EquationOfState::affine(c.gamma, c.mach);
        }
        if (c.eos == "power") {
            return EquationOfState::power(c.gamma);
        }
        return EquationOfState::linear();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid equation of state: ") + e.what());
    }
}

SchemeConfig scheme_config(const RunConfig& c) {
    SchemeConfig s;
    s.dt = c.dt;
    s.mu = c.mu;
    s.convection = c.convection;
    s.proj_tol = c.proj_tol;
    s.proj_max_iter = c.proj_maxit;
    s.relaxation = c.relaxation;
    s.eos = make_eos(c);
    s.linear.rel_tol = c.lin_tol;
    s.linear.max_iter = c.lin_maxit;
    s.renorm_weight = c.renorm;
    s.linearization = c.linearization;
    return s;
}

} // namespace baropc
