/// @file diagnostics.hpp
/// @brief Energy bookkeeping and executable checks of the discrete stability
/// inequalities (advection stability, pressure-work bound, global energy bound).
///
/// Every checker returns a margin (left side minus right side of the
/// inequality, so a valid inequality gives margin >= 0) together with a scale
/// equal to the larger of the two sides' absolute magnitudes. Checkers refuse
/// to evaluate when their hypotheses are violated (HypothesisError).
#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "baropc/eos.hpp"
#include "baropc/mesh.hpp"
#include "baropc/operators.hpp"
#include "baropc/state.hpp"

namespace baropc {

class HypothesisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InequalityMargin {
    double margin = 0.0;
    double scale = 0.0;

    double relative() const { return scale > 0.0 ? margin / scale : 0.0; }
    bool holds(double rel_tol) const { return margin >= -rel_tol * scale; }
};

// --- energy ledger ----------------------------------------------------------

struct LedgerRow {
    int step = 0;
    double time = 0.0;
    double kinetic = 0.0;           ///< 1/2 ||u||^2_{rho,disc}
    double elastic = 0.0;           ///< sum |K| rho_K P(rho_K)
    double viscous_increment = 0.0; ///< dt a(u_tilde, u_tilde) of this step
    double viscous_cum = 0.0;       ///< running sum of the increments
    double psem = 0.0;              ///< dt^2/2 |p|^2_{1,rho_tilde}
    double total_mass = 0.0;
    double min_density = 0.0;       ///< over cells and predicted edge densities

    double energy() const { return kinetic + elastic + viscous_cum + psem; }
};

class EnergyLedger {
public:
    /// Appends `row`, accumulating viscous_cum from the previous row.
    void record(LedgerRow row);

    const std::vector<LedgerRow>& rows() const { return rows_; }
    bool empty() const { return rows_.empty(); }
    /// Relative margin (E(0) - E(n)) / |E(0)| of every row.
    std::vector<double> margins() const;

    /// Direct access, used to inject faults in checker tests.
    std::vector<LedgerRow>& mutable_rows() { return rows_; }

private:
    std::vector<LedgerRow> rows_;
};

/// a(u, u) for the assembled viscous operator.
double viscous_energy(const SparseMatrix& stiffness, const VelocityField& u);

/// Ledger quantities of `state`; `viscous_increment` is dt a(u_tilde, u_tilde)
/// of the step that produced it (0 for the initial state).
LedgerRow ledger_entry(const Mesh& mesh, const SchemeState& state, double viscous_increment, double dt,
                       const EquationOfState& eos, int step);

struct StabCheck {
    bool pass = true;
    double worst_margin = 0.0; ///< smallest relative margin
    int worst_step = 0;
    int first_failure = -1;    ///< step of the first violation, -1 when none
};

/// E(n) <= E(0) (1 + rel_slack) for every recorded step.
StabCheck check_stab_bound(const EnergyLedger& ledger, double rel_slack = 1e-10);

// --- advection stability ----------------------------------------------------

/// Finite volume connectivity: control volumes and the conservative fluxes
/// through their shared faces. `flux` is F_{sigma,K}, leaving volume `k`.
struct FluxGraph {
    struct Face {
        int k = -1;
        int l = -1;
        double flux = 0.0;
    };
    std::vector<double> volume;
    std::vector<Face> faces;
};

/// Primal cells and internal edges, with zero fluxes.
FluxGraph cell_flux_graph(const Mesh& mesh);
/// Diamonds and sub-edges, with the given conservative sub-edge fluxes.
FluxGraph diamond_flux_graph(const Mesh& mesh, const DiamondFluxes& fluxes);

/// Margin of the advection stability inequality
///   sum_K z_K [|K|/dt (rho_K z_K - rho*_K z*_K) + sum_sigma F_{sigma,K} z_sigma]
///     >= 1/2 sum_K |K|/dt (rho_K z_K^2 - rho*_K z*_K^2),
/// given that |K|/dt (rho_K - rho*_K) + sum_sigma F_{sigma,K} = 0 to `tol`.
InequalityMargin check_vf1(const FluxGraph& graph, std::span<const double> rho_star, std::span<const double> rho,
                           std::span<const double> z_star, std::span<const double> z, ConvectionMode mode,
                           double dt, double tol = 1e-10);

// --- pressure work ----------------------------------------------------------

/// Residual of the upwind cell mass balance |K| (rho_K - rho*_K)/dt +
/// sum (v+ rho_K - v- rho_L), rho = varrho(p), relative to its largest term.
double mass_balance_residual(const Mesh& mesh, const CellField& rho, const CellField& rho_star,
                             const VelocityField& u_bar, double dt);

/// Margin of
///   -sum_K p_K sum_sigma v_{sigma,K} >= 1/dt sum_K |K| [rho_K P(rho_K) - rho*_K P(rho*_K)]
/// with rho = varrho(p); requires the upwind mass balance to hold to `tol`.
InequalityMargin check_vf2(const Mesh& mesh, const CellField& p, const CellField& rho_star,
                           const VelocityField& u_bar, const EquationOfState& eos, double dt, double tol = 1e-10);

} // namespace baropc
