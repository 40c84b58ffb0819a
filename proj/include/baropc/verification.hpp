/// @file verification.hpp
/// @brief Manufactured solution, forcing assembly, error norms and the
/// convergence-study driver.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "baropc/eos.hpp"
#include "baropc/fields.hpp"
#include "baropc/mesh.hpp"
#include "baropc/scheme.hpp"
#include "baropc/state.hpp"

namespace baropc {

/// Smooth solution on (0,1) x (-1/2,1/2):
///   rho    = 1 + 1/4 sin(pi t) (cos(pi x) - sin(pi y)),
///   rho u  = -1/4 cos(pi t) (sin(pi x), cos(pi y)),
///   p      = wp(rho),
/// with the momentum source f = f_grad + f_rest, f_grad = grad p.
struct ManufacturedCase {
    double mu = 1e-2;
    EquationOfState eos = EquationOfState::affine(1.4, 0.5);
    Rect domain{0.0, 1.0, -0.5, 0.5};

    double density(Vec2 x, double t) const;
    Vec2 momentum(Vec2 x, double t) const;
    Vec2 velocity(Vec2 x, double t) const;
    double pressure(Vec2 x, double t) const;
    Vec2 pressure_gradient(Vec2 x, double t) const;
    /// f - grad p: time derivative, convection and viscous terms.
    Vec2 forcing_rest(Vec2 x, double t) const;
    Vec2 forcing(Vec2 x, double t) const;
    /// d rho / dt + div(rho u), from the closed-form derivatives.
    double mass_residual(Vec2 x, double t) const;
    /// Mean of u over a boundary or interior edge, 3-point Gauss.
    Vec2 edge_mean_velocity(const Edge& edge, double t) const;
};

struct ExactFields {
    CellField rho;
    CellField p;
    VelocityField u;
};

/// rho at centroids, p = wp(rho), u as 3-point edge means.
ExactFields exact_fields(const ManufacturedCase& c, const Mesh& mesh, double t);

/// 3x3 Gauss quadrature of f_rest against the shape functions plus G applied
/// to the cell means (3x3 Gauss) of p; full velocity space.
std::vector<double> assemble_forcing(const ManufacturedCase& c, const Mesh& mesh, double t);
/// Same split with an arbitrary Gauss order per direction (reference checks).
std::vector<double> assemble_forcing(const ManufacturedCase& c, const Mesh& mesh, double t, int gauss_points);

struct ErrorNorms {
    double velocity_l2 = 0.0; ///< 3x3 Gauss L2 error of the Rannacher-Turek expansion
    double pressure_l2 = 0.0; ///< (sum |K| (p_K - p(x_K))^2)^(1/2)
};

ErrorNorms error_norms(const ManufacturedCase& c, const Mesh& mesh, const SchemeState& state);

/// Scheme configuration for the manufactured run: exact Dirichlet edge means
/// and the assembled forcing at each time.
SchemeConfig manufactured_config(const ManufacturedCase& c, const Mesh& mesh, double dt,
                                 SchemeConfig base = {});

struct ConvergenceRow {
    int nx = 0;
    int ny = 0;
    double dt = 0.0;
    ErrorNorms errors;
    double inner_iter_mean = 0.0;
    int inner_iter_max = 0;
    double wall_seconds = 0.0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows; ///< mesh-major, dt in the given order
    /// Per mesh: least-squares slope of log error against log dt over the
    /// leading run of successive ratios above 1.5 (NaN if fewer than 2 points).
    std::vector<double> temporal_order_v;
    std::vector<double> temporal_order_p;
    /// Between consecutive meshes at the smallest dt: log(e_h / e_h') / log(h / h').
    std::vector<double> spatial_order_v;
    std::vector<double> spatial_order_p;
};

struct MeshSize {
    int nx = 0;
    int ny = 0;
};

/// Slope over the pre-plateau range; `steps` strictly decreasing.
double fitted_order(const std::vector<double>& steps, const std::vector<double>& errors);

/// Worker count: BAROPC_THREADS if set (>= 1), else the hardware concurrency.
std::size_t study_threads();

/// Runs every (mesh, dt) pair to `t_end` and fits orders. `base` supplies the
/// solver settings (tolerances, convection mode, relaxation).
ConvergenceTable convergence_study(const ManufacturedCase& c, const std::vector<MeshSize>& meshes,
                                   const std::vector<double>& dts, double t_end = 0.5, SchemeConfig base = {},
                                   std::size_t threads = 0);

/// Smooth seeded initial data for zero-forcing runs.
struct InitialCondition {
    std::function<double(Vec2)> rho;
    std::function<Vec2(Vec2)> u;
};

/// rho = 1 + rho_amp * w(x) with max |w| <= 1; u is a Fourier sum under a
/// sin-sin envelope vanishing on the boundary, with max |u_i| <= u_amp.
/// Both are trigonometric sums of modes 1..3 with seeded coefficients.
InitialCondition perturbed_initial_condition(const Rect& domain, std::uint64_t seed, double rho_amp = 0.3,
                                             double u_amp = 0.5);

} // namespace baropc
