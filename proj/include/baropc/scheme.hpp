/// @file scheme.hpp
/// @brief Five-step pressure-correction time stepper: density prediction on
/// the diamonds, pressure renormalization, velocity prediction, nonlinear
/// projection with inner iteration, velocity renormalization.
#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "baropc/diagnostics.hpp"
#include "baropc/eos.hpp"
#include "baropc/fields.hpp"
#include "baropc/linsolve.hpp"
#include "baropc/mesh.hpp"
#include "baropc/operators.hpp"
#include "baropc/sparse.hpp"
#include "baropc/state.hpp"

namespace baropc {

/// Prescribed velocity on a boundary edge at time t.
using BoundaryProvider = std::function<Vec2(const Edge& edge, double t)>;
/// Momentum source at time t, integrated against the velocity shape
/// functions; full velocity space (2 n_edges), boundary rows ignored.
using ForcingProvider = std::function<std::vector<double>(double t)>;

/// Edge weight of the previous pressure in the renormalization step.
enum class RenormWeight {
    EdgeAverage, ///< half-diamond average of the cell densities rho^n
    Predicted,   ///< predicted edge density of the previous step
};

/// Treatment of the upwind face density in the inner projection iteration.
enum class InnerLinearization {
    Picard, ///< face density frozen at the previous iterate
    Newton, ///< face density linearized together with the equation of state
};

struct SchemeConfig {
    double dt = 0.025;
    double mu = 1e-2;
    ConvectionMode convection = ConvectionMode::Centered;
    double proj_tol = 1e-8;
    int proj_max_iter = 100;
    double relaxation = 1.0;
    EquationOfState eos = EquationOfState::affine(1.4, 0.5);
    BoundaryProvider boundary; ///< empty: homogeneous data
    ForcingProvider forcing;   ///< empty: no source
    SolverConfig linear;
    RenormWeight renorm_weight = RenormWeight::Predicted;
    InnerLinearization linearization = InnerLinearization::Picard;

    /// Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

/// Inner iteration failure or loss of positivity; carries the update history.
class SchemeError : public std::runtime_error {
public:
    SchemeError(const std::string& what, std::vector<double> history = {})
        : std::runtime_error(what), history_(std::move(history)) {}
    const std::vector<double>& history() const { return history_; }

private:
    std::vector<double> history_;
};

struct ProjectionResult {
    VelocityField u_bar;
    CellField p;
    CellField rho;
    int iterations = 0;
    std::vector<double> history; ///< relative update per inner iteration
    double mass_residual = 0.0;  ///< relative cell mass balance residual
};

struct StepReport {
    int inner_iterations = 0;
    double mass_residual = 0.0;
    double density_residual = 0.0;  ///< linear residual of the density prediction
    double momentum_residual = 0.0; ///< linear residual of the velocity prediction
    double viscous_increment = 0.0; ///< dt a(u_tilde, u_tilde)
    LedgerRow ledger;
};

class PressureCorrectionScheme {
public:
    PressureCorrectionScheme(Mesh mesh, SchemeConfig config);

    const Mesh& mesh() const { return mesh_; }
    const SchemeConfig& config() const { return config_; }
    const SparseMatrix& viscous_operator() const { return stiffness_; }

    /// rho^0 from centroid values, u^0 from 3-point edge means (boundary edges
    /// included), p^0 = wp(rho^0), predicted edge density = edge average.
    SchemeState initial_state(const std::function<double(Vec2)>& rho0, const std::function<Vec2(Vec2)>& u0,
                              double t0 = 0.0) const;

    /// Sub-edge volume fluxes |eps| u_eps . n_eps of a velocity field.
    DiamondFluxes diamond_volume_fluxes(const VelocityField& u) const;
    /// Mass fluxes: volume fluxes times the upwind diamond density.
    DiamondFluxes diamond_mass_fluxes(const VelocityField& u, const EdgeScalarField& rho_diamond) const;

    /// Step 1: upwind mass balance on every diamond.
    EdgeScalarField predict_density(const SchemeState& state, double* residual = nullptr) const;
    /// Step 2.
    CellField renormalize_pressure(const SchemeState& state, const EdgeScalarField& rho_tilde_next) const;
    /// Step 3: implicit momentum balance on the diamonds.
    VelocityField predict_velocity(const SchemeState& state, const EdgeScalarField& rho_tilde_next,
                                   const CellField& p_tilde, double* residual = nullptr) const;
    /// Step 4: pressure/velocity correction with the inner Newton iteration.
    ProjectionResult projection_step(const SchemeState& state, const EdgeScalarField& rho_tilde_next,
                                     const CellField& p_tilde, const VelocityField& u_tilde) const;
    /// Step 5; boundary entries are reset to the data at `t_next`.
    VelocityField renormalize_velocity(const VelocityField& u_bar, const CellField& rho_next,
                                       const EdgeScalarField& rho_tilde_next, double t_next) const;

    std::pair<SchemeState, StepReport> advance(const SchemeState& state) const;

    /// Writes the boundary data at time t into `u`.
    void apply_boundary(VelocityField& u, double t) const;

private:
    Mesh mesh_;
    SchemeConfig config_;
    VelocitySplit split_;
    SparseMatrix div_;       // cells x full velocity
    SparseMatrix div_int_;   // cells x interior velocity
    SparseMatrix grad_;      // full velocity x cells
    SparseMatrix stiffness_; // full velocity
    std::vector<double> cell_measure_;
};

/// Ledger of a run: initial state plus one row per step.
struct SimulationResult {
    SchemeState final_state;
    EnergyLedger ledger;
    std::vector<int> inner_iterations;
};

/// Advances `initial` by `steps` steps, or until t_end when steps < 0.
SimulationResult simulate(const PressureCorrectionScheme& scheme, const SchemeState& initial, int steps,
                          double t_end = 0.0);

} // namespace baropc
