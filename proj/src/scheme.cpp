#include "baropc/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace baropc {

void SchemeConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("dt must be positive");
    }
    if (!(mu >= 0.0) || !std::isfinite(mu)) {
        throw std::invalid_argument("mu must be non-negative");
    }
    if (!(proj_tol > 0.0)) {
        throw std::invalid_argument("proj_tol must be positive");
    }
    if (proj_max_iter < 1) {
        throw std::invalid_argument("proj_maxit must be at least 1");
    }
    if (!(relaxation > 0.0 && relaxation <= 1.0)) {
        throw std::invalid_argument("relaxation must lie in (0, 1]");
    }
    linear.validate();
}

namespace {

std::vector<std::size_t> iota_indices(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

double max_abs_on(const std::vector<double>& v, const std::vector<std::size_t>& idx) {
    double m = 0.0;
    for (std::size_t i : idx) {
        m = std::max(m, std::abs(v[i]));
    }
    return m;
}

void require_positive(const EdgeScalarField& w, const char* what) {
    for (double v : w) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw SchemeError(std::string(what) + ": non-positive density");
        }
    }
}

} // namespace

PressureCorrectionScheme::PressureCorrectionScheme(Mesh mesh, SchemeConfig config)
    : mesh_(std::move(mesh)), config_(std::move(config)) {
    config_.validate();
    split_ = velocity_split(mesh_);
    div_ = divergence_matrix(mesh_);
    div_int_ = div_.restrict_to(iota_indices(mesh_.n_cells()), split_.interior);
    grad_ = gradient_matrix(mesh_);
    stiffness_ = viscous_stiffness(mesh_, config_.mu);
    for (const Cell& c : mesh_.cells()) {
        cell_measure_.push_back(c.measure);
    }
}

void PressureCorrectionScheme::apply_boundary(VelocityField& u, double t) const {
    for (std::size_t e = 0; e < mesh_.n_edges(); ++e) {
        const Edge& ed = mesh_.edge(e);
        if (!ed.is_internal()) {
            u.set(e, config_.boundary ? config_.boundary(ed, t) : Vec2{});
        }
    }
}

SchemeState PressureCorrectionScheme::initial_state(const std::function<double(Vec2)>& rho0,
                                                    const std::function<Vec2(Vec2)>& u0, double t0) const {
    SchemeState s;
    s.t = t0;
    s.rho = CellField(mesh_.n_cells());
    s.p = CellField(mesh_.n_cells());
    for (std::size_t k = 0; k < mesh_.n_cells(); ++k) {
        s.rho[k] = rho0(mesh_.cell(k).centroid);
        s.p[k] = config_.eos.pressure(s.rho[k]);
    }
    s.u = VelocityField(mesh_.n_edges());
    const double g = std::sqrt(0.6);
    for (std::size_t e = 0; e < mesh_.n_edges(); ++e) {
        const Edge& ed = mesh_.edge(e);
        const Vec2 half = 0.5 * (ed.end - ed.start);
        const Vec2 mean = (5.0 / 18.0) * u0(ed.midpoint - g * half) + (8.0 / 18.0) * u0(ed.midpoint) +
                          (5.0 / 18.0) * u0(ed.midpoint + g * half);
        s.u.set(e, mean);
    }
    s.rho_tilde = edge_density(mesh_, s.rho);
    return s;
}

DiamondFluxes PressureCorrectionScheme::diamond_volume_fluxes(const VelocityField& u) const {
    const auto& subs = mesh_.subedges();
    DiamondFluxes f(subs.size());
    for (std::size_t s = 0; s < subs.size(); ++s) {
        const DiamondSubEdge& se = subs[s];
        // The Rannacher-Turek expansion at the sub-edge midpoint averages the
        // two edges whose cones share the sub-edge.
        const Vec2 ue = 0.5 * (u.at(se.sigma) + u.at(se.sigma_prime));
        const double v = se.measure * dot(ue, se.normal);
        f.out_of_sigma[s] = v;
        f.out_of_sigma_prime[s] = -v;
    }
    return f;
}

DiamondFluxes PressureCorrectionScheme::diamond_mass_fluxes(const VelocityField& u,
                                                            const EdgeScalarField& rho_diamond) const {
    DiamondFluxes f = diamond_volume_fluxes(u);
    const auto& subs = mesh_.subedges();
    for (std::size_t s = 0; s < subs.size(); ++s) {
        const double v = f.out_of_sigma[s];
        const double rho_up = v >= 0.0 ? rho_diamond[subs[s].sigma] : rho_diamond[subs[s].sigma_prime];
        f.out_of_sigma[s] = v * rho_up;
        f.out_of_sigma_prime[s] = -v * rho_up;
    }
    return f;
}

EdgeScalarField PressureCorrectionScheme::predict_density(const SchemeState& state, double* residual) const {
    const std::size_t ne = mesh_.n_edges();
    const double dt = config_.dt;
    const EdgeScalarField rho_sigma = edge_density(mesh_, state.rho);
    const DiamondFluxes vol = diamond_volume_fluxes(state.u);
    std::vector<Triplet> t;
    t.reserve(5 * ne);
    std::vector<double> b(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        const Edge& ed = mesh_.edge(e);
        t.push_back({e, e, ed.diamond / dt});
        b[e] = ed.diamond / dt * rho_sigma[e];
        for (const DiamondFace& f : mesh_.diamond_faces(e)) {
            const double v = vol.outgoing(f);
            if (v >= 0.0) {
                t.push_back({e, e, v});
            } else {
                t.push_back({e, static_cast<std::size_t>(f.neighbor), v});
            }
        }
        if (!ed.is_internal()) {
            t.push_back({e, e, ed.measure * dot(state.u.at(e), ed.normal)});
        }
    }
    const SparseMatrix a = SparseMatrix::from_triplets(ne, ne, std::move(t));
    const SolveResult r = bicgstab_solve(a, b, config_.linear, rho_sigma.values());
    if (residual != nullptr) {
        *residual = r.report.residual;
    }
    EdgeScalarField out(r.x);
    require_positive(out, "predict_density");
    return out;
}

CellField PressureCorrectionScheme::renormalize_pressure(const SchemeState& state,
                                                         const EdgeScalarField& rho_tilde_next) const {
    require_positive(rho_tilde_next, "renormalize_pressure");
    const EdgeScalarField prev = config_.renorm_weight == RenormWeight::EdgeAverage
                                     ? edge_density(mesh_, state.rho)
                                     : state.rho_tilde;
    EdgeScalarField mixed(mesh_.n_edges());
    for (std::size_t e = 0; e < mesh_.n_edges(); ++e) {
        mixed[e] = std::sqrt(rho_tilde_next[e] * prev[e]);
    }
    const SparseMatrix lhs = pressure_laplacian_closed_form(mesh_, rho_tilde_next);
    const SparseMatrix rhs_op = pressure_laplacian_closed_form(mesh_, mixed);
    const std::vector<double> b = rhs_op * state.p.span();
    SolveResult r = neumann_solve(lhs, b, cell_measure_, config_.linear);
    const double target = dot(state.p.span(), cell_measure_) / std::accumulate(cell_measure_.begin(),
                                                                               cell_measure_.end(), 0.0);
    // neumann_solve returns a zero weighted mean.
    for (double& x : r.x) {
        x += target;
    }
    return CellField(std::move(r.x));
}

VelocityField PressureCorrectionScheme::predict_velocity(const SchemeState& state,
                                                         const EdgeScalarField& rho_tilde_next,
                                                         const CellField& p_tilde, double* residual) const {
    require_positive(rho_tilde_next, "predict_velocity");
    const std::size_t ne = mesh_.n_edges();
    const double dt = config_.dt;
    const double t_next = state.t + dt;
    const EdgeScalarField rho_sigma = edge_density(mesh_, state.rho);
    const DiamondFluxes fluxes = diamond_mass_fluxes(state.u, rho_tilde_next);

    SparseMatrix a = lumped_mass(mesh_, rho_tilde_next) * (1.0 / dt) +
                     convection_matrix(mesh_, fluxes, config_.convection) + stiffness_;

    VelocityField u_tilde(ne);
    apply_boundary(u_tilde, t_next);

    std::vector<double> rhs(2 * ne, 0.0);
    const std::vector<double> gp = grad_ * p_tilde.span();
    std::vector<double> forcing;
    if (config_.forcing) {
        forcing = config_.forcing(t_next);
        if (forcing.size() != 2 * ne) {
            throw std::invalid_argument("forcing provider returned a vector of the wrong size");
        }
    }
    for (std::size_t e = 0; e < ne; ++e) {
        const double m = mesh_.edge(e).diamond * rho_sigma[e] / dt;
        for (int i = 0; i < 2; ++i) {
            const std::size_t idx = velocity_index(ne, e, i);
            rhs[idx] = m * state.u(e, i) - gp[idx] + (forcing.empty() ? 0.0 : forcing[idx]);
        }
    }
    const SparseMatrix a_ii = a.restrict_to(split_.interior, split_.interior);
    const SparseMatrix a_ib = a.restrict_to(split_.interior, split_.boundary);
    std::vector<double> ub(split_.boundary.size());
    for (std::size_t r = 0; r < ub.size(); ++r) {
        ub[r] = u_tilde.values()[split_.boundary[r]];
    }
    const std::vector<double> lift = a_ib * std::span<const double>(ub);
    std::vector<double> b(split_.interior.size());
    std::vector<double> x0(split_.interior.size());
    for (std::size_t r = 0; r < b.size(); ++r) {
        b[r] = rhs[split_.interior[r]] - lift[r];
        x0[r] = state.u.values()[split_.interior[r]];
    }
    const SolveResult sol = bicgstab_solve(a_ii, b, config_.linear, x0);
    if (residual != nullptr) {
        *residual = sol.report.residual;
    }
    for (std::size_t r = 0; r < b.size(); ++r) {
        u_tilde.values()[split_.interior[r]] = sol.x[r];
    }
    return u_tilde;
}

ProjectionResult PressureCorrectionScheme::projection_step(const SchemeState& state,
                                                           const EdgeScalarField& rho_tilde_next,
                                                           const CellField& p_tilde,
                                                           const VelocityField& u_tilde) const {
    require_positive(rho_tilde_next, "projection_step");
    const EquationOfState& eos = config_.eos;
    const std::size_t m = mesh_.n_cells();
    const std::size_t ne = mesh_.n_edges();
    const double dt = config_.dt;
    const double eps = config_.proj_tol;

    // Linearization point: p_tilde where admissible, wp(rho^n) elsewhere.
    CellField p_k = p_tilde;
    for (std::size_t k = 0; k < m; ++k) {
        if (!eos.admissible_pressure(p_k[k])) {
            p_k[k] = eos.pressure(state.rho[k]);
        }
    }
    VelocityField u_k = u_tilde;
    const std::vector<double> inv_mass = [&] {
        std::vector<double> v(2 * ne, 0.0);
        for (std::size_t e = 0; e < ne; ++e) {
            v[e] = v[ne + e] = 1.0 / (mesh_.edge(e).diamond * rho_tilde_next[e]);
        }
        return v;
    }();

    ProjectionResult out;
    for (int it = 1; it <= config_.proj_max_iter; ++it) {
        CellField rho_k(m);
        for (std::size_t k = 0; k < m; ++k) {
            rho_k[k] = eos.density(p_k[k]);
        }
        // Face density upwinded with respect to the current corrected velocity.
        EdgeScalarField q(ne);
        std::vector<double> dqu(m, 0.0);
        for (std::size_t e = 0; e < ne; ++e) {
            const Edge& ed = mesh_.edge(e);
            if (ed.is_internal()) {
                const double vk = dot(u_k.at(e), ed.normal);
                q[e] = vk >= 0.0 ? rho_k[ed.cell_k] : rho_k[ed.cell_l];
                const double flux = ed.measure * q[e] * dot(u_tilde.at(e), ed.normal);
                dqu[ed.cell_k] += flux;
                dqu[ed.cell_l] -= flux;
            } else {
                q[e] = rho_k[ed.cell_k];
                dqu[ed.cell_k] += ed.measure * q[e] * dot(u_tilde.at(e), ed.normal);
            }
        }
        const SparseMatrix lap = pressure_laplacian_closed_form(mesh_, rho_tilde_next, q);
        std::vector<double> diag(m);
        std::vector<double> rhs = lap * p_tilde.span();
        for (std::size_t k = 0; k < m; ++k) {
            const double dr = eos.density_derivative(p_k[k]);
            const double r = cell_measure_[k] / (dt * dt);
            diag[k] = dr * r;
            rhs[k] += r * (state.rho[k] - rho_k[k] + dr * p_k[k]) - dqu[k] / dt;
        }
        SparseMatrix a = lap + SparseMatrix::diagonal(diag);
        SolveResult sol;
        if (config_.linearization == InnerLinearization::Picard) {
            sol = cg_solve(a, rhs, config_.linear, p_k.span());
        } else {
            // Derivative of the upwind mass flux with respect to the upwind pressure.
            std::vector<Triplet> t;
            for (std::size_t e = 0; e < ne; ++e) {
                const Edge& ed = mesh_.edge(e);
                const double vk = ed.measure * dot(u_k.at(e), ed.normal);
                if (ed.is_internal()) {
                    const auto up = static_cast<std::size_t>(vk >= 0.0 ? ed.cell_k : ed.cell_l);
                    const double c = vk * eos.density_derivative(p_k[up]) / dt;
                    t.push_back({static_cast<std::size_t>(ed.cell_k), up, c});
                    t.push_back({static_cast<std::size_t>(ed.cell_l), up, -c});
                } else {
                    const auto k = static_cast<std::size_t>(ed.cell_k);
                    t.push_back({k, k, vk * eos.density_derivative(p_k[k]) / dt});
                }
            }
            const SparseMatrix c = SparseMatrix::from_triplets(m, m, std::move(t));
            const std::vector<double> cp = c * p_k.span();
            for (std::size_t k = 0; k < m; ++k) {
                rhs[k] += cp[k];
            }
            a = a + c;
            sol = bicgstab_solve(a, rhs, config_.linear, p_k.span());
        }

        // Relaxation, then backtracking until the pressure is admissible.
        double step = config_.relaxation;
        CellField p_next(m);
        for (int halvings = 0;; ++halvings) {
            bool ok = true;
            for (std::size_t k = 0; k < m; ++k) {
                p_next[k] = p_k[k] + step * (sol.x[k] - p_k[k]);
                ok = ok && eos.admissible_pressure(p_next[k]);
            }
            if (ok) {
                break;
            }
            if (halvings > 60) {
                throw SchemeError("projection_step: no admissible pressure along the Newton direction",
                                  out.history);
            }
            step *= 0.5;
        }

        std::vector<double> dp(m);
        for (std::size_t k = 0; k < m; ++k) {
            dp[k] = p_next[k] - p_tilde[k];
        }
        const std::vector<double> gdp = grad_ * std::span<const double>(dp);
        VelocityField u_next = u_tilde;
        for (std::size_t idx : split_.interior) {
            u_next.values()[idx] = u_tilde.values()[idx] - dt * inv_mass[idx] * gdp[idx];
        }

        std::vector<double> diff_p(m), diff_u(2 * ne, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            diff_p[k] = p_next[k] - p_k[k];
        }
        for (std::size_t idx : split_.interior) {
            diff_u[idx] = u_next.values()[idx] - u_k.values()[idx];
        }
        const double rel_p = norm_inf(diff_p) / std::max(norm_inf(p_next.span()), 1e-12);
        const double rel_u = max_abs_on(diff_u, split_.interior) /
                             std::max(max_abs_on(u_next.values(), split_.interior), 1e-12);
        const double update = std::max(rel_p, rel_u);
        out.history.push_back(update);
        p_k = std::move(p_next);
        u_k = std::move(u_next);

        if (update < eps) {
            CellField rho_next(m);
            for (std::size_t k = 0; k < m; ++k) {
                rho_next[k] = eos.density(p_k[k]);
            }
            const double res = mass_balance_residual(mesh_, rho_next, state.rho, u_k, dt);
            if (res <= eps) {
                out.u_bar = std::move(u_k);
                out.p = std::move(p_k);
                out.rho = std::move(rho_next);
                out.iterations = it;
                out.mass_residual = res;
                for (double r : out.rho) {
                    if (!(r > 0.0)) {
                        throw SchemeError("projection_step: non-positive density", out.history);
                    }
                }
                return out;
            }
            if (update == 0.0) {
                // A fixed point of the iteration that misses the tolerance
                // cannot improve; the linear solves limit the accuracy.
                throw SchemeError("projection_step: stagnated with mass balance residual " +
                                      std::to_string(res) + " above proj_tol",
                                  out.history);
            }
        }
    }
    throw SchemeError("projection_step: inner iteration did not converge in " +
                          std::to_string(config_.proj_max_iter) + " iterations",
                      out.history);
}

VelocityField PressureCorrectionScheme::renormalize_velocity(const VelocityField& u_bar, const CellField& rho_next,
                                                             const EdgeScalarField& rho_tilde_next,
                                                             double t_next) const {
    require_positive(rho_tilde_next, "renormalize_velocity");
    const EdgeScalarField rho_sigma = edge_density(mesh_, rho_next);
    VelocityField u = u_bar;
    for (int e : mesh_.internal_edges()) {
        const double s = std::sqrt(rho_tilde_next[e] / rho_sigma[e]);
        u(e, 0) *= s;
        u(e, 1) *= s;
    }
    apply_boundary(u, t_next);
    return u;
}

std::pair<SchemeState, StepReport> PressureCorrectionScheme::advance(const SchemeState& state) const {
    StepReport report;
    const double t_next = state.t + config_.dt;
    EdgeScalarField rho_tilde = predict_density(state, &report.density_residual);
    const CellField p_tilde = renormalize_pressure(state, rho_tilde);
    const VelocityField u_tilde = predict_velocity(state, rho_tilde, p_tilde, &report.momentum_residual);
    ProjectionResult proj = projection_step(state, rho_tilde, p_tilde, u_tilde);

    SchemeState next;
    next.t = t_next;
    next.u = renormalize_velocity(proj.u_bar, proj.rho, rho_tilde, t_next);
    next.p = std::move(proj.p);
    next.rho = std::move(proj.rho);
    next.rho_tilde = std::move(rho_tilde);

    report.inner_iterations = proj.iterations;
    report.mass_residual = proj.mass_residual;
    report.viscous_increment = config_.dt * viscous_energy(stiffness_, u_tilde);
    report.ledger = ledger_entry(mesh_, next, report.viscous_increment, config_.dt, config_.eos, 0);
    return {std::move(next), report};
}

SimulationResult simulate(const PressureCorrectionScheme& scheme, const SchemeState& initial, int steps,
                          double t_end) {
    const double dt = scheme.config().dt;
    if (steps < 0) {
        steps = static_cast<int>(std::llround((t_end - initial.t) / dt));
    }
    SimulationResult out;
    out.final_state = initial;
    out.ledger.record(ledger_entry(scheme.mesh(), initial, 0.0, dt, scheme.config().eos, 0));
    for (int n = 1; n <= steps; ++n) {
        auto [next, report] = scheme.advance(out.final_state);
        report.ledger.step = n;
        out.ledger.record(report.ledger);
        out.inner_iterations.push_back(report.inner_iterations);
        out.final_state = std::move(next);
    }
    return out;
}

} // namespace baropc
