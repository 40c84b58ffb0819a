/// @file test_verification.cpp
/// @brief Manufactured solution, forcing assembly, error norms, order fits
/// and seeded initial data.

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "baropc/verification.hpp"
#include "support.hpp"

using namespace baropc;
using namespace baropc::test;

namespace {

constexpr double kPi = std::numbers::pi;

/// Independent n x n Gauss quadrature of f_rest against the velocity basis.
std::vector<double> rest_quadrature(const ManufacturedCase& c, const Mesh& m, double t) {
    const double g[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    const double w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const std::size_t ne = m.n_edges();
    std::vector<double> out(2 * ne, 0.0);
    for (std::size_t k = 0; k < m.n_cells(); ++k) {
        const Cell& cell = m.cell(k);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                const Vec2 x{cell.centroid.x + 0.5 * cell.hx * g[a], cell.centroid.y + 0.5 * cell.hy * g[b]};
                const double wq = w[a] * w[b] * 0.25 * cell.measure;
                const Vec2 f = c.forcing_rest(x, t);
                for (int l = 0; l < 4; ++l) {
                    const double phi = shape_value(m, k, l, x);
                    const auto e = static_cast<std::size_t>(cell.edges[l]);
                    out[e] += wq * phi * f.x;
                    out[ne + e] += wq * phi * f.y;
                }
            }
        }
    }
    return out;
}

} // namespace

TEST_CASE("closed-form fields") {
    const ManufacturedCase c;
    SUBCASE("initial time") {
        for (double x : {0.1, 0.5, 0.93}) {
            for (double y : {-0.4, 0.0, 0.3}) {
                CHECK(c.density({x, y}, 0.0) == doctest::Approx(1.0));
                CHECK(c.momentum({x, y}, 0.0).x == doctest::Approx(-0.25 * std::sin(kPi * x)));
                CHECK(c.momentum({x, y}, 0.0).y == doctest::Approx(-0.25 * std::cos(kPi * y)));
                CHECK(c.pressure({x, y}, 0.0) == doctest::Approx(0.0).scale(1.0));
            }
        }
    }
    SUBCASE("mass balance holds identically") {
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            for (int j = 0; j < 10; ++j) {
                for (int n = 0; n < 5; ++n) {
                    const Vec2 x{(i + 0.5) / 10.0, -0.5 + (j + 0.5) / 10.0};
                    worst = std::max(worst, std::abs(c.mass_residual(x, 0.1 * n + 0.03)));
                }
            }
        }
        CHECK(worst <= 1e-12);
    }
    SUBCASE("momentum residual against finite differences") {
        // f = d(rho u)/dt + div(rho u x u) + grad p - mu lap u - mu/3 grad div u.
        const Vec2 x{0.37, 0.21};
        const double t = 0.3;
        const double h = 1e-4;
        auto mom = [&](Vec2 y, double s) { return c.momentum(y, s); };
        auto vel = [&](Vec2 y) { return c.velocity(y, t); };
        const Vec2 ex{h, 0.0}, ey{0.0, h};
        const Vec2 dt_m = (1.0 / (2 * h)) * (mom(x, t + h) - mom(x, t - h));
        auto flux = [&](Vec2 y, int j) { // (rho u u_j)
            const Vec2 m = mom(y, t);
            return c.velocity(y, t)[j] * m;
        };
        const Vec2 div_flux = (1.0 / (2 * h)) * (flux(x + ex, 0) - flux(x - ex, 0)) +
                              (1.0 / (2 * h)) * (flux(x + ey, 1) - flux(x - ey, 1));
        const Vec2 lap = (1.0 / (h * h)) * (vel(x + ex) + vel(x - ex) + vel(x + ey) + vel(x - ey) - 4.0 * vel(x));
        auto div = [&](Vec2 y) {
            return (c.velocity(y + ex, t).x - c.velocity(y - ex, t).x + c.velocity(y + ey, t).y -
                    c.velocity(y - ey, t).y) / (2 * h);
        };
        const Vec2 grad_div{(div(x + ex) - div(x - ex)) / (2 * h), (div(x + ey) - div(x - ey)) / (2 * h)};
        const Vec2 expect = dt_m + div_flux + c.pressure_gradient(x, t) - c.mu * lap - (c.mu / 3.0) * grad_div;
        const Vec2 f = c.forcing(x, t);
        CHECK(f.x == doctest::Approx(expect.x).epsilon(1e-5));
        CHECK(f.y == doctest::Approx(expect.y).epsilon(1e-5));
        const double dp = (c.pressure(x + ex, t) - c.pressure(x - ex, t)) / (2 * h);
        CHECK(c.pressure_gradient(x, t).x == doctest::Approx(dp).epsilon(1e-7));
    }
}

TEST_CASE("exact discrete fields") {
    const ManufacturedCase c;
    const Mesh m = build_rect_mesh(8, 8, c.domain);
    SUBCASE("initial density is one") {
        const ExactFields f = exact_fields(c, m, 0.0);
        for (double r : f.rho) {
            CHECK(r == doctest::Approx(1.0));
        }
    }
    SUBCASE("velocity vanishes at t = 1/2") {
        const ExactFields f = exact_fields(c, m, 0.5);
        CHECK(norm_inf(f.u.values()) < 1e-15);
        for (std::size_t k = 0; k < m.n_cells(); ++k) {
            const Vec2 x = m.cell(k).centroid;
            CHECK(f.rho[k] == doctest::Approx(1.0 + 0.25 * (std::cos(kPi * x.x) - std::sin(kPi * x.y))));
            CHECK(f.p[k] == doctest::Approx(c.eos.pressure(f.rho[k])));
        }
    }
    SUBCASE("velocity degrees of freedom are edge means") {
        const ExactFields f = exact_fields(c, m, 0.2);
        for (std::size_t e = 0; e < m.n_edges(); e += 7) {
            const Edge& ed = m.edge(e);
            Vec2 mean{};
            const int n = 2000;
            for (int q = 0; q < n; ++q) {
                mean = mean + (1.0 / n) * c.velocity(ed.start + ((q + 0.5) / n) * (ed.end - ed.start), 0.2);
            }
            CHECK(f.u(e, 0) == doctest::Approx(mean.x).epsilon(1e-6).scale(1e-6));
            CHECK(f.u(e, 1) == doctest::Approx(mean.y).epsilon(1e-6).scale(1e-6));
        }
    }
}

TEST_CASE("forcing assembly") {
    const ManufacturedCase c;
    const Mesh m = build_rect_mesh(10, 10, c.domain);
    SUBCASE("agrees with a refined quadrature on the 20x20 mesh") {
        const Mesh fine = build_rect_mesh(20, 20, c.domain);
        for (double t : {0.0, 0.3}) {
            const std::vector<double> f3 = assemble_forcing(c, fine, t);
            const std::vector<double> f6 = assemble_forcing(c, fine, t, 6);
            double diff = 0.0;
            for (std::size_t i = 0; i < f3.size(); ++i) {
                diff = std::max(diff, std::abs(f3[i] - f6[i]));
            }
            CHECK(diff <= 1e-8 * std::max(1.0, norm_inf(f6)));
        }
    }
    SUBCASE("pressure part lies in the range of the discrete gradient") {
        const std::vector<double> f = assemble_forcing(c, m, 0.3);
        const std::vector<double> rest = rest_quadrature(c, m, 0.3);
        const VelocitySplit split = velocity_split(m);
        Eigen::VectorXd r(static_cast<Eigen::Index>(split.interior.size()));
        for (std::size_t i = 0; i < split.interior.size(); ++i) {
            r(static_cast<Eigen::Index>(i)) = f[split.interior[i]] - rest[split.interior[i]];
        }
        std::vector<std::size_t> cells(m.n_cells());
        for (std::size_t k = 0; k < cells.size(); ++k) {
            cells[k] = k;
        }
        const Eigen::MatrixXd g = dense(gradient_matrix(m).restrict_to(split.interior, cells));
        const Eigen::VectorXd q = g.completeOrthogonalDecomposition().solve(r);
        CHECK((g * q - r).norm() <= 1e-10 * std::max(1.0, r.norm()));
        CHECK(r.norm() > 1e-3);
    }
    SUBCASE("gradient of a linear pressure") {
        CellField q(m.n_cells());
        for (std::size_t k = 0; k < q.size(); ++k) {
            q[k] = m.cell(k).centroid.x;
        }
        const VelocityField g = gradient(m, q);
        for (int e : m.internal_edges()) {
            const auto s = static_cast<std::size_t>(e);
            CHECK(g(s, 1) == 0.0);
            if (m.edge(s).orientation == 0) {
                CHECK(g(s, 0) == doctest::Approx(m.hy() * m.hx()));
            }
        }
    }
}

TEST_CASE("error norms") {
    const ManufacturedCase c;
    SUBCASE("exact pressure gives zero pressure error") {
        const Mesh m = build_rect_mesh(6, 6, c.domain);
        SchemeState s;
        const ExactFields f = exact_fields(c, m, 0.2);
        s.t = 0.2;
        s.p = f.p;
        s.rho = f.rho;
        s.u = f.u;
        CHECK(error_norms(c, m, s).pressure_l2 == 0.0);
    }
    SUBCASE("zero velocity measures the exact field") {
        const Mesh m = build_rect_mesh(6, 6, c.domain);
        SchemeState s;
        s.p = exact_fields(c, m, 0.0).p;
        s.u = VelocityField(m.n_edges());
        // ||u(., 0)||^2 = 1/16 int sin^2(pi x) + cos^2(pi y) = 1/16.
        CHECK(error_norms(c, m, s).velocity_l2 == doctest::Approx(0.25).epsilon(1e-3));
    }
    SUBCASE("interpolation error is second order") {
        double prev = 0.0;
        for (int n : {8, 16, 32}) {
            const Mesh m = build_rect_mesh(n, n, c.domain);
            SchemeState s;
            const ExactFields f = exact_fields(c, m, 0.2);
            s.t = 0.2;
            s.p = f.p;
            s.u = f.u;
            const double e = error_norms(c, m, s).velocity_l2;
            CHECK(e > 0.0);
            if (prev > 0.0) {
                CHECK(std::log2(prev / e) == doctest::Approx(2.0).epsilon(0.1));
            }
            prev = e;
        }
    }
}

TEST_CASE("order fitting") {
    const std::vector<double> dts{0.1, 0.05, 0.025, 0.0125};
    CHECK(fitted_order(dts, {0.8, 0.4, 0.2, 0.1}) == doctest::Approx(1.0));
    // The plateau at the end is excluded.
    CHECK(fitted_order(dts, {0.8, 0.2, 0.05, 0.049}) == doctest::Approx(2.0));
    CHECK(std::isnan(fitted_order({0.1}, {0.3})));
    CHECK(std::isnan(fitted_order(dts, {0.1, 0.1, 0.1, 0.1})));
}

TEST_CASE("study driver") {
    const ManufacturedCase c;
    SUBCASE("a single run gives one row") {
        const ConvergenceTable t = convergence_study(c, {{4, 4}}, {0.25}, 0.5, {}, 1);
        REQUIRE(t.rows.size() == 1);
        CHECK(t.rows[0].nx == 4);
        CHECK(t.rows[0].dt == 0.25);
        CHECK(t.rows[0].errors.velocity_l2 > 0.0);
        CHECK(t.rows[0].inner_iter_max >= 1);
        CHECK(std::isnan(t.temporal_order_v[0]));
        CHECK(t.spatial_order_v.empty());
    }
    SUBCASE("parallel and serial studies agree") {
        const ConvergenceTable a = convergence_study(c, {{4, 4}, {6, 6}}, {0.25, 0.125}, 0.5, {}, 1);
        const ConvergenceTable b = convergence_study(c, {{4, 4}, {6, 6}}, {0.25, 0.125}, 0.5, {}, 3);
        REQUIRE(a.rows.size() == 4);
        for (std::size_t i = 0; i < a.rows.size(); ++i) {
            CHECK(a.rows[i].errors.velocity_l2 == b.rows[i].errors.velocity_l2);
            CHECK(a.rows[i].nx == b.rows[i].nx);
        }
        CHECK(a.spatial_order_v.size() == 1);
    }
    SUBCASE("thread cap from the environment") {
        setenv("BAROPC_THREADS", "2", 1);
        CHECK(study_threads() == 2);
        unsetenv("BAROPC_THREADS");
        CHECK(study_threads() >= 1);
    }
}

TEST_CASE("seeded initial data") {
    const Rect d = kChannel;
    const InitialCondition a = perturbed_initial_condition(d, 5, 0.3, 0.5);
    const InitialCondition b = perturbed_initial_condition(d, 5, 0.3, 0.5);
    const InitialCondition other = perturbed_initial_condition(d, 6, 0.3, 0.5);
    bool differs = false;
    for (int i = 0; i <= 40; ++i) {
        for (int j = 0; j <= 40; ++j) {
            const Vec2 x{d.x_min + d.width() * i / 40.0, d.y_min + d.height() * j / 40.0};
            const double r = a.rho(x);
            CHECK(r >= 0.7 - 1e-14);
            CHECK(r <= 1.3 + 1e-14);
            CHECK(std::abs(a.u(x).x) <= 0.5 + 1e-14);
            CHECK(std::abs(a.u(x).y) <= 0.5 + 1e-14);
            CHECK(r == b.rho(x));
            differs = differs || other.rho(x) != r;
            if (i == 0 || j == 0 || i == 40 || j == 40) {
                CHECK(norm(a.u(x)) < 1e-14);
            }
        }
    }
    CHECK(differs);
}
