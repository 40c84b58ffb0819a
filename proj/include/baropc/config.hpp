/// @file config.hpp
/// @brief Flat key = value run configuration shared by the command-line tool.
#pragma once

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "baropc/eos.hpp"
#include "baropc/mesh.hpp"
#include "baropc/scheme.hpp"
#include "baropc/verification.hpp"

namespace baropc {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Problem { Manufactured, Perturbed };

struct RunConfig {
    MeshSize mesh{20, 20};
    Rect domain{0.0, 1.0, -0.5, 0.5};
    double dt = 0.025;
    double t_end = 0.5;
    double mu = 1e-2;
    std::string eos = "affine";
    double gamma = 1.4;
    double mach = 0.5;
    ConvectionMode convection = ConvectionMode::Centered;
    double proj_tol = 1e-8;
    double relaxation = 1.0;
    int proj_maxit = 100;
    double lin_tol = 1e-10;
    std::size_t lin_maxit = 0;
    RenormWeight renorm = RenormWeight::Predicted;
    InnerLinearization linearization = InnerLinearization::Picard;
    Problem problem = Problem::Manufactured;
    std::uint64_t seed = 1;
    int steps = 50;
    double rho_amp = 0.3;
    double u_amp = 0.5;
    std::vector<MeshSize> meshes{{20, 20}, {40, 40}};
    std::vector<double> dts{0.1, 0.05, 0.025, 0.0125};
    std::string output = ".";
};

struct ConfigKey {
    std::string name;
    std::string help;
};

/// Every accepted key with a one-line description and its default.
const std::vector<ConfigKey>& config_keys();

/// Parses and validates one value. `where` names the origin (file:line or
/// flag) in error messages. Unknown keys are rejected.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value,
                      const std::string& where);

/// Reads `key = value` lines; '#' starts a comment, blank lines are skipped.
RunConfig parse_config(std::istream& in, const std::string& source, RunConfig base = {});
RunConfig parse_config_file(const std::string& path, RunConfig base = {});

EquationOfState make_eos(const RunConfig& config);
/// Scheme settings (without boundary data or forcing).
SchemeConfig scheme_config(const RunConfig& config);

} // namespace baropc
