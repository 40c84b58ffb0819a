/// @file test_diagnostics.cpp
/// @brief Energy ledger, global energy bound detector and the advection and
/// pressure-work inequality checkers.

#include <doctest.h>

#include <cmath>

#include "baropc/diagnostics.hpp"
#include "baropc/scheme.hpp"
#include "baropc/verification.hpp"
#include "support.hpp"

using namespace baropc;
using namespace baropc::test;

namespace {

/// Random conservative fluxes on `graph`, densities closing the mass balance.
struct Vf1Instance {
    FluxGraph graph;
    std::vector<double> rho_star, rho, z_star, z;
    double dt = 0.1;
};

Vf1Instance random_instance(FluxGraph graph, Random& rng, double flux_scale) {
    Vf1Instance in;
    in.graph = std::move(graph);
    const std::size_t n = in.graph.volume.size();
    in.rho_star = rng.vector(n, 0.5, 2.0);
    for (FluxGraph::Face& f : in.graph.faces) {
        f.flux = rng.uniform(-flux_scale, flux_scale);
    }
    std::vector<double> net(n, 0.0);
    for (const FluxGraph::Face& f : in.graph.faces) {
        net[static_cast<std::size_t>(f.k)] += f.flux;
        net[static_cast<std::size_t>(f.l)] -= f.flux;
    }
    in.rho.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        in.rho[k] = in.rho_star[k] - in.dt / in.graph.volume[k] * net[k];
    }
    in.z_star = rng.vector(n, -1.0, 1.0);
    in.z = rng.vector(n, -1.0, 1.0);
    return in;
}

InequalityMargin evaluate(const Vf1Instance& in, ConvectionMode mode) {
    return check_vf1(in.graph, in.rho_star, in.rho, in.z_star, in.z, mode, in.dt);
}

SchemeConfig tight_config(double dt, EquationOfState eos) {
    SchemeConfig c;
    c.dt = dt;
    c.eos = eos;
    c.linear.rel_tol = 1e-12;
    return c;
}

} // namespace

TEST_CASE("ledger entries") {
    const Mesh m = build_rect_mesh(4, 4, kChannel);
    const PressureCorrectionScheme s(m, tight_config(0.1, EquationOfState::power(1.4)));
    SUBCASE("rest state with unit density") {
        const SchemeState st = s.initial_state([](Vec2) { return 1.0; }, [](Vec2) { return Vec2{}; });
        const LedgerRow r = ledger_entry(m, st, 0.0, 0.1, s.config().eos, 0);
        CHECK(r.kinetic == 0.0);
        CHECK(r.elastic == doctest::Approx(2.5 * m.domain().area()));
        CHECK(r.psem == 0.0);
        CHECK(r.total_mass == doctest::Approx(m.domain().area()));
        CHECK(r.min_density == doctest::Approx(1.0));
    }
    SUBCASE("kinetic and pressure terms") {
        Random rng(81);
        SchemeState st = s.initial_state([](Vec2 x) { return 1.0 + 0.2 * x.y; }, [](Vec2) { return Vec2{}; });
        st.u = rng.interior_velocity(m, 1.0);
        st.p = rng.cells(m, 0.5, 1.0);
        const LedgerRow r = ledger_entry(m, st, 0.25, 0.1, s.config().eos, 2);
        CHECK(r.step == 2);
        CHECK(r.kinetic == doctest::Approx(0.5 * kinetic_norm_sq(m, st.u, edge_density(m, st.rho))));
        CHECK(r.psem == doctest::Approx(0.5 * 0.01 * pressure_seminorm_sq(m, st.p, st.rho_tilde)));
        CHECK(r.viscous_increment == 0.25);
    }
}

TEST_CASE("ledger accumulates viscous dissipation") {
    EnergyLedger l;
    LedgerRow r;
    r.kinetic = 1.0;
    l.record(r);
    r.viscous_increment = 0.1;
    r.kinetic = 0.9;
    l.record(r);
    r.viscous_increment = 0.05;
    r.kinetic = 0.8;
    l.record(r);
    CHECK(l.rows()[2].viscous_cum == doctest::Approx(0.15));
    CHECK(l.rows()[2].energy() == doctest::Approx(0.95));
    CHECK(l.margins()[2] == doctest::Approx(0.05));
}

TEST_CASE("energy bound detector") {
    const Mesh m = build_rect_mesh(10, 10, kChannel);
    SUBCASE("equilibrium run") {
        const PressureCorrectionScheme s(m, tight_config(0.1, EquationOfState::affine(1.4, 0.5)));
        const SchemeState st = s.initial_state([](Vec2) { return 1.0; }, [](Vec2) { return Vec2{}; });
        const StabCheck c = check_stab_bound(simulate(s, st, 5).ledger);
        CHECK(c.pass);
        CHECK(std::abs(c.worst_margin) < 1e-12);
    }
    SUBCASE("perturbed run and a corrupted copy") {
        const PressureCorrectionScheme s(m, tight_config(0.1, EquationOfState::affine(1.4, 0.5)));
        // Uniform density: the kinetic energy carries the bound.
        const InitialCondition ic = perturbed_initial_condition(m.domain(), 1, 0.0, 0.5);
        const SimulationResult res = simulate(s, s.initial_state(ic.rho, ic.u), 50);
        const StabCheck c = check_stab_bound(res.ledger);
        CHECK(c.pass);
        CHECK(c.first_failure == -1);
        EnergyLedger bad = res.ledger;
        bad.mutable_rows()[3].kinetic *= 2.0;
        const StabCheck f = check_stab_bound(bad);
        CHECK_FALSE(f.pass);
        CHECK(f.first_failure == 3);
        CHECK(f.worst_step == 3);
    }
}

TEST_CASE("advection stability checker") {
    Random rng(82);
    const Mesh m = build_rect_mesh(4, 3, kUnitSquare);
    SUBCASE("constant z gives a zero margin") {
        Vf1Instance in = random_instance(cell_flux_graph(m), rng, 0.01);
        std::fill(in.z.begin(), in.z.end(), 0.7);
        std::fill(in.z_star.begin(), in.z_star.end(), 0.7);
        for (ConvectionMode mode : {ConvectionMode::Centered, ConvectionMode::Upwind}) {
            const InequalityMargin r = evaluate(in, mode);
            CHECK(std::abs(r.margin) <= 1e-12 * r.scale);
        }
    }
    SUBCASE("no fluxes reduces to the time dissipation") {
        Vf1Instance in = random_instance(cell_flux_graph(m), rng, 0.0);
        double expect = 0.0;
        for (std::size_t k = 0; k < in.z.size(); ++k) {
            expect += 0.5 * in.graph.volume[k] / in.dt * in.rho_star[k] * std::pow(in.z[k] - in.z_star[k], 2);
        }
        CHECK(evaluate(in, ConvectionMode::Centered).margin == doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("random instances on cells and diamonds") {
        for (int n = 0; n < 50; ++n) {
            for (ConvectionMode mode : {ConvectionMode::Centered, ConvectionMode::Upwind}) {
                const Vf1Instance a = random_instance(cell_flux_graph(m), rng, 0.05);
                const InequalityMargin ra = evaluate(a, mode);
                CHECK(ra.margin >= -1e-12 * ra.scale);
                const Vf1Instance b = random_instance(diamond_flux_graph(m, DiamondFluxes(m.subedges().size())), rng, 0.02);
                const InequalityMargin rb = evaluate(b, mode);
                CHECK(rb.margin >= -1e-12 * rb.scale);
            }
        }
    }
    SUBCASE("violated hypotheses are refused") {
        Vf1Instance in = random_instance(cell_flux_graph(m), rng, 0.05);
        in.rho[2] *= 1.01;
        CHECK_THROWS_AS(evaluate(in, ConvectionMode::Centered), HypothesisError);
        in = random_instance(cell_flux_graph(m), rng, 0.05);
        in.rho_star[0] = -1.0;
        CHECK_THROWS_AS(evaluate(in, ConvectionMode::Upwind), HypothesisError);
    }
}

TEST_CASE("pressure work checker") {
    const Mesh m = build_rect_mesh(6, 5, kChannel);
    const double dt = 0.1;
    SUBCASE("rest state") {
        const EquationOfState eos = EquationOfState::power(1.4);
        Random rng(83);
        const CellField rho = rng.cells(m, 0.5, 2.0);
        CellField p(m.n_cells());
        for (std::size_t k = 0; k < p.size(); ++k) {
            p[k] = eos.pressure(rho[k]);
        }
        const InequalityMargin r = check_vf2(m, p, rho, VelocityField(m.n_edges()), eos, dt);
        CHECK(std::abs(r.margin) <= 1e-14 * r.scale);
    }
    SUBCASE("discretely divergence-free velocity with uniform density") {
        // Fluxes from a vertex stream function vanishing on the boundary.
        Random rng(84);
        const std::size_t nvx = static_cast<std::size_t>(m.nx()) + 1;
        std::vector<double> psi(nvx * (static_cast<std::size_t>(m.ny()) + 1), 0.0);
        auto vertex = [&](Vec2 x) {
            const auto i = static_cast<std::size_t>(std::lround((x.x - m.domain().x_min) / m.hx()));
            const auto j = static_cast<std::size_t>(std::lround((x.y - m.domain().y_min) / m.hy()));
            return j * nvx + i;
        };
        for (int j = 1; j < m.ny(); ++j) {
            for (int i = 1; i < m.nx(); ++i) {
                psi[static_cast<std::size_t>(j) * nvx + static_cast<std::size_t>(i)] = rng.uniform(-1, 1);
            }
        }
        VelocityField u(m.n_edges());
        for (int e : m.internal_edges()) {
            const Edge& ed = m.edge(static_cast<std::size_t>(e));
            // Tangent obtained by rotating the normal a quarter turn.
            const Vec2 t{-ed.normal.y, ed.normal.x};
            const bool forward = dot(ed.end - ed.start, t) > 0;
            const Vec2 a = forward ? ed.start : ed.end;
            const Vec2 b = forward ? ed.end : ed.start;
            const double flux = psi[vertex(b)] - psi[vertex(a)];
            u.set(static_cast<std::size_t>(e), (flux / ed.measure) * ed.normal);
        }
        for (double d : divergence(m, u)) {
            CHECK(std::abs(d) < 1e-14);
        }
        const EquationOfState eos = EquationOfState::linear();
        const CellField rho(m.n_cells(), 1.3);
        const CellField p(m.n_cells(), eos.pressure(1.3));
        const InequalityMargin r = check_vf2(m, p, rho, u, eos, dt);
        CHECK(std::abs(r.margin) <= 1e-13 * r.scale);
        CHECK(mass_balance_residual(m, rho, rho, u, dt) < 1e-14);
    }
    SUBCASE("projection outputs") {
        for (double gamma : {1.0, 1.4, 2.0}) {
            const EquationOfState eos = EquationOfState::power(gamma);
            SchemeConfig cfg = tight_config(0.2, eos);
            cfg.proj_tol = 1e-10;
            cfg.linear.rel_tol = 1e-13;
            const PressureCorrectionScheme s(m, cfg);
            for (std::uint64_t seed = 1; seed <= 3; ++seed) {
                const InitialCondition ic = perturbed_initial_condition(m.domain(), seed);
                const SchemeState st = s.initial_state(ic.rho, ic.u);
                const EdgeScalarField r = s.predict_density(st);
                const CellField p_tilde = s.renormalize_pressure(st, r);
                const VelocityField u = s.predict_velocity(st, r, p_tilde);
                const ProjectionResult out = s.projection_step(st, r, p_tilde, u);
                const InequalityMargin mg = check_vf2(m, out.p, st.rho, out.u_bar, eos, cfg.dt);
                CHECK(mg.margin >= -1e-12 * mg.scale);
            }
        }
    }
    SUBCASE("unbalanced input is refused") {
        const EquationOfState eos = EquationOfState::linear();
        const CellField rho(m.n_cells(), 1.0);
        const CellField p(m.n_cells(), 1.1);
        CHECK_THROWS_AS(check_vf2(m, p, rho, VelocityField(m.n_edges()), eos, dt), HypothesisError);
    }
}
