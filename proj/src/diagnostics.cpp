#include "baropc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace baropc {

void EnergyLedger::record(LedgerRow row) {
    row.viscous_cum = (rows_.empty() ? 0.0 : rows_.back().viscous_cum) + row.viscous_increment;
    rows_.push_back(row);
}

namespace {

double relative_margin(double e0, double en) {
    const double scale = std::max({std::abs(e0), std::abs(en), std::numeric_limits<double>::min()});
    return (e0 - en) / scale;
}

} // namespace

std::vector<double> EnergyLedger::margins() const {
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const LedgerRow& r : rows_) {
        out.push_back(relative_margin(rows_.front().energy(), r.energy()));
    }
    return out;
}

double viscous_energy(const SparseMatrix& stiffness, const VelocityField& u) {
    const std::vector<double> au = stiffness * std::span<const double>(u.values());
    return dot(au, u.values());
}

LedgerRow ledger_entry(const Mesh& mesh, const SchemeState& state, double viscous_increment, double dt,
                       const EquationOfState& eos, int step) {
    LedgerRow row;
    row.step = step;
    row.time = state.t;
    const EdgeScalarField rho_sigma = edge_density(mesh, state.rho);
    row.kinetic = 0.5 * kinetic_norm_sq(mesh, state.u, rho_sigma);
    double min_rho = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
        const double measure = mesh.cell(k).measure;
        row.elastic += measure * eos.energy(state.rho[k]);
        row.total_mass += measure * state.rho[k];
        min_rho = std::min(min_rho, state.rho[k]);
    }
    for (double r : state.rho_tilde) {
        min_rho = std::min(min_rho, r);
    }
    row.min_density = min_rho;
    row.viscous_increment = viscous_increment;
    row.psem = 0.5 * dt * dt * pressure_seminorm_sq(mesh, state.p, state.rho_tilde);
    return row;
}

StabCheck check_stab_bound(const EnergyLedger& ledger, double rel_slack) {
    StabCheck out;
    if (ledger.empty()) {
        return out;
    }
    const std::vector<double> m = ledger.margins();
    out.worst_margin = m.front();
    out.worst_step = ledger.rows().front().step;
    for (std::size_t n = 0; n < m.size(); ++n) {
        const int step = ledger.rows()[n].step;
        if (m[n] < out.worst_margin) {
            out.worst_margin = m[n];
            out.worst_step = step;
        }
        if (!(m[n] >= -rel_slack) && out.first_failure < 0) {
            out.pass = false;
            out.first_failure = step;
        }
    }
    return out;
}

FluxGraph cell_flux_graph(const Mesh& mesh) {
    FluxGraph g;
    for (const Cell& c : mesh.cells()) {
        g.volume.push_back(c.measure);
    }
    for (int e : mesh.internal_edges()) {
        const Edge& ed = mesh.edge(e);
        g.faces.push_back({ed.cell_k, ed.cell_l, 0.0});
    }
    return g;
}

FluxGraph diamond_flux_graph(const Mesh& mesh, const DiamondFluxes& fluxes) {
    FluxGraph g;
    for (const Edge& ed : mesh.edges()) {
        g.volume.push_back(ed.diamond);
    }
    const auto& subs = mesh.subedges();
    for (std::size_t s = 0; s < subs.size(); ++s) {
        g.faces.push_back({subs[s].sigma, subs[s].sigma_prime, fluxes.out_of_sigma[s]});
    }
    return g;
}

InequalityMargin check_vf1(const FluxGraph& graph, std::span<const double> rho_star, std::span<const double> rho,
                           std::span<const double> z_star, std::span<const double> z, ConvectionMode mode,
                           double dt, double tol) {
    const std::size_t n = graph.volume.size();
    if (rho_star.size() != n || rho.size() != n || z_star.size() != n || z.size() != n) {
        throw std::invalid_argument("check_vf1: size mismatch");
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("check_vf1: dt must be positive");
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (!(rho[k] > 0.0) || !(rho_star[k] > 0.0)) {
            throw HypothesisError("check_vf1: densities must be positive");
        }
    }
    // Mass balance hypothesis.
    std::vector<double> res(n), mag(n);
    for (std::size_t k = 0; k < n; ++k) {
        res[k] = graph.volume[k] / dt * (rho[k] - rho_star[k]);
        mag[k] = graph.volume[k] / dt * (rho[k] + rho_star[k]);
    }
    for (const FluxGraph::Face& f : graph.faces) {
        res[f.k] += f.flux;
        res[f.l] -= f.flux;
        mag[f.k] += std::abs(f.flux);
        mag[f.l] += std::abs(f.flux);
    }
    const double mag_max = *std::max_element(mag.begin(), mag.end());
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(res[k]) > tol * mag_max) {
            throw HypothesisError("check_vf1: mass balance violated at volume " + std::to_string(k) +
                                  " (residual " + std::to_string(res[k]) + ")");
        }
    }

    double lhs = 0.0, lhs_abs = 0.0, rhs = 0.0, rhs_abs = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double w = graph.volume[k] / dt;
        const double a = w * rho[k] * z[k] * z[k];
        const double b = w * rho_star[k] * z_star[k] * z[k];
        lhs += a - b;
        lhs_abs += std::abs(a) + std::abs(b);
        const double c = 0.5 * w * rho[k] * z[k] * z[k];
        const double d = 0.5 * w * rho_star[k] * z_star[k] * z_star[k];
        rhs += c - d;
        rhs_abs += c + d;
    }
    for (const FluxGraph::Face& f : graph.faces) {
        double zf = 0.0;
        if (mode == ConvectionMode::Centered) {
            zf = 0.5 * (z[f.k] + z[f.l]);
        } else {
            zf = f.flux >= 0.0 ? z[f.k] : z[f.l];
        }
        const double tk = f.flux * zf * z[f.k];
        const double tl = -f.flux * zf * z[f.l];
        lhs += tk + tl;
        lhs_abs += std::abs(tk) + std::abs(tl);
    }
    return {lhs - rhs, std::max(lhs_abs, rhs_abs)};
}

namespace {

struct CellBalance {
    std::vector<double> residual;
    std::vector<double> magnitude;
    std::vector<double> net_out; // sum_sigma v_{sigma,K}
    std::vector<double> abs_out; // sum_sigma |v_{sigma,K}|
};

CellBalance cell_balance(const Mesh& mesh, const CellField& rho, const CellField& rho_star,
                         const VelocityField& u_bar, double dt) {
    const std::size_t m = mesh.n_cells();
    if (rho.size() != m || rho_star.size() != m || u_bar.n_edges() != mesh.n_edges()) {
        throw std::invalid_argument("mass balance: size mismatch");
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("mass balance: dt must be positive");
    }
    CellBalance b;
    b.residual.assign(m, 0.0);
    b.magnitude.assign(m, 0.0);
    b.net_out.assign(m, 0.0);
    b.abs_out.assign(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        const double w = mesh.cell(k).measure / dt;
        b.residual[k] = w * (rho[k] - rho_star[k]);
        b.magnitude[k] = w * (std::abs(rho[k]) + std::abs(rho_star[k]));
    }
    for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
        const Edge& ed = mesh.edge(e);
        const double v = ed.measure * dot(u_bar.at(e), ed.normal); // leaving cell_k
        const std::size_t k = ed.cell_k;
        b.net_out[k] += v;
        b.abs_out[k] += std::abs(v);
        if (!ed.is_internal()) {
            b.residual[k] += v * rho[k];
            b.magnitude[k] += std::abs(v * rho[k]);
            continue;
        }
        const std::size_t l = ed.cell_l;
        const double flux = v >= 0.0 ? v * rho[k] : v * rho[l];
        b.residual[k] += flux;
        b.residual[l] -= flux;
        b.magnitude[k] += std::abs(flux);
        b.magnitude[l] += std::abs(flux);
        b.net_out[l] -= v;
        b.abs_out[l] += std::abs(v);
    }
    return b;
}

} // namespace

double mass_balance_residual(const Mesh& mesh, const CellField& rho, const CellField& rho_star,
                             const VelocityField& u_bar, double dt) {
    const CellBalance b = cell_balance(mesh, rho, rho_star, u_bar, dt);
    const double scale = *std::max_element(b.magnitude.begin(), b.magnitude.end());
    double worst = 0.0;
    for (double r : b.residual) {
        worst = std::max(worst, std::abs(r));
    }
    return scale > 0.0 ? worst / scale : worst;
}

InequalityMargin check_vf2(const Mesh& mesh, const CellField& p, const CellField& rho_star,
                           const VelocityField& u_bar, const EquationOfState& eos, double dt, double tol) {
    CellField rho(mesh.n_cells());
    for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
        rho[k] = eos.density(p[k]);
        if (!(rho_star[k] > 0.0)) {
            throw HypothesisError("check_vf2: predicted densities must be positive");
        }
    }
    const double res = mass_balance_residual(mesh, rho, rho_star, u_bar, dt);
    if (res > tol) {
        throw HypothesisError("check_vf2: mass balance residual " + std::to_string(res) + " above tolerance");
    }
    const CellBalance b = cell_balance(mesh, rho, rho_star, u_bar, dt);
    double lhs = 0.0, lhs_abs = 0.0, rhs = 0.0, rhs_abs = 0.0;
    for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
        lhs -= p[k] * b.net_out[k];
        lhs_abs += std::abs(p[k]) * b.abs_out[k];
        const double w = mesh.cell(k).measure / dt;
        const double en = eos.energy(rho[k]);
        const double es = eos.energy(rho_star[k]);
        rhs += w * (en - es);
        rhs_abs += w * (std::abs(en) + std::abs(es));
    }
    return {lhs - rhs, std::max(lhs_abs, rhs_abs)};
}

} // namespace baropc
