#include "baropc/verification.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "baropc/operators.hpp"

namespace baropc {

namespace {

constexpr double kPi = std::numbers::pi;

struct GaussRule {
    std::vector<double> x; // on [-1, 1]
    std::vector<double> w;
};

// Gauss-Legendre nodes by Newton iteration on P_n.
GaussRule gauss_legendre(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) {
                break;
            }
        }
        r.x[i] = z;
        r.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return r;
}

// Value, gradient and Hessian of a scalar at a point.
struct Jet {
    double v = 0.0;
    Vec2 d;
    double dxx = 0.0, dxy = 0.0, dyy = 0.0;
};

struct Fields {
    Jet rho;
    Jet m[2];
    Jet u[2];
};

Fields evaluate(Vec2 x, double t) {
    const double s = std::sin(kPi * t);
    const double c = -0.25 * std::cos(kPi * t);
    const double sx = std::sin(kPi * x.x), cx = std::cos(kPi * x.x);
    const double sy = std::sin(kPi * x.y), cy = std::cos(kPi * x.y);
    const double pi2 = kPi * kPi;
    Fields f;
    f.rho.v = 1.0 + 0.25 * s * (cx - sy);
    f.rho.d = {-0.25 * s * kPi * sx, -0.25 * s * kPi * cy};
    f.rho.dxx = -0.25 * s * pi2 * cx;
    f.rho.dyy = 0.25 * s * pi2 * sy;

    f.m[0].v = c * sx;
    f.m[0].d = {c * kPi * cx, 0.0};
    f.m[0].dxx = -c * pi2 * sx;
    f.m[1].v = c * cy;
    f.m[1].d = {0.0, -c * kPi * sy};
    f.m[1].dyy = -c * pi2 * cy;

    // u = m / rho by the quotient rule.
    const Jet& r = f.rho;
    for (int i = 0; i < 2; ++i) {
        const Jet& m = f.m[i];
        Jet& u = f.u[i];
        u.v = m.v / r.v;
        u.d = {(m.d.x - u.v * r.d.x) / r.v, (m.d.y - u.v * r.d.y) / r.v};
        u.dxx = (m.dxx - 2.0 * u.d.x * r.d.x - u.v * r.dxx) / r.v;
        u.dyy = (m.dyy - 2.0 * u.d.y * r.d.y - u.v * r.dyy) / r.v;
        u.dxy = (m.dxy - u.d.x * r.d.y - u.d.y * r.d.x - u.v * r.dxy) / r.v;
    }
    return f;
}

std::vector<std::pair<Vec2, double>> cell_quadrature(const Cell& cell, const GaussRule& g) {
    std::vector<std::pair<Vec2, double>> q;
    const double jac = 0.25 * cell.hx * cell.hy;
    for (std::size_t a = 0; a < g.x.size(); ++a) {
        for (std::size_t b = 0; b < g.x.size(); ++b) {
            const Vec2 x{cell.centroid.x + 0.5 * cell.hx * g.x[a], cell.centroid.y + 0.5 * cell.hy * g.x[b]};
            q.emplace_back(x, g.w[a] * g.w[b] * jac);
        }
    }
    return q;
}

} // namespace

double ManufacturedCase::density(Vec2 x, double t) const { return evaluate(x, t).rho.v; }

Vec2 ManufacturedCase::momentum(Vec2 x, double t) const {
    const Fields f = evaluate(x, t);
    return {f.m[0].v, f.m[1].v};
}

Vec2 ManufacturedCase::velocity(Vec2 x, double t) const {
    const Fields f = evaluate(x, t);
    return {f.u[0].v, f.u[1].v};
}

double ManufacturedCase::pressure(Vec2 x, double t) const { return eos.pressure(density(x, t)); }

Vec2 ManufacturedCase::pressure_gradient(Vec2 x, double t) const {
    const Fields f = evaluate(x, t);
    // dp/dx = wp'(rho) drho/dx and wp'(rho) = 1 / varrho'(p).
    const double dp = 1.0 / eos.density_derivative(eos.pressure(f.rho.v));
    return dp * f.rho.d;
}

Vec2 ManufacturedCase::forcing_rest(Vec2 x, double t) const {
    const Fields f = evaluate(x, t);
    const double dmdt_scale = 0.25 * kPi * std::sin(kPi * t);
    const Vec2 dmdt{dmdt_scale * std::sin(kPi * x.x), dmdt_scale * std::cos(kPi * x.y)};
    const double div_u = f.u[0].d.x + f.u[1].d.y;
    const Vec2 grad_div{f.u[0].dxx + f.u[1].dxy, f.u[0].dxy + f.u[1].dyy};
    Vec2 out;
    for (int i = 0; i < 2; ++i) {
        // div(m_i u) = grad m_i . u + m_i div u
        const double conv = f.m[i].d.x * f.u[0].v + f.m[i].d.y * f.u[1].v + f.m[i].v * div_u;
        const double lap = f.u[i].dxx + f.u[i].dyy;
        out[i] = dmdt[i] + conv - mu * lap - (mu / 3.0) * grad_div[i];
    }
    return out;
}

Vec2 ManufacturedCase::forcing(Vec2 x, double t) const { return forcing_rest(x, t) + pressure_gradient(x, t); }

double ManufacturedCase::mass_residual(Vec2 x, double t) const {
    const Fields f = evaluate(x, t);
    const double drho_dt = 0.25 * kPi * std::cos(kPi * t) * (std::cos(kPi * x.x) - std::sin(kPi * x.y));
    return drho_dt + f.m[0].d.x + f.m[1].d.y;
}

Vec2 ManufacturedCase::edge_mean_velocity(const Edge& edge, double t) const {
    const double g = std::sqrt(0.6);
    const Vec2 half = 0.5 * (edge.end - edge.start);
    return (5.0 / 18.0) * velocity(edge.midpoint - g * half, t) + (8.0 / 18.0) * velocity(edge.midpoint, t) +
           (5.0 / 18.0) * velocity(edge.midpoint + g * half, t);
}

ExactFields exact_fields(const ManufacturedCase& c, const Mesh& mesh, double t) {
    ExactFields out{CellField(mesh.n_cells()), CellField(mesh.n_cells()), VelocityField(mesh.n_edges())};
    for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
        out.rho[k] = c.density(mesh.cell(k).centroid, t);
        out.p[k] = c.eos.pressure(out.rho[k]);
    }
    for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
        out.u.set(e, c.edge_mean_velocity(mesh.edge(e), t));
    }
    return out;
}

std::vector<double> assemble_forcing(const ManufacturedCase& c, const Mesh& mesh, double t, int gauss_points) {
    const GaussRule g = gauss_legendre(gauss_points);
    const std::size_t ne = mesh.n_edges();
    std::vector<double> rhs(2 * ne, 0.0);
    CellField p_mean(mesh.n_cells());
    for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
        const Cell& cell = mesh.cell(k);
        double pm = 0.0;
        for (const auto& [x, w] : cell_quadrature(cell, g)) {
            const Vec2 f = c.forcing_rest(x, t);
            for (int l = 0; l < 4; ++l) {
                const double phi = shape_value(mesh, k, l, x);
                const auto e = static_cast<std::size_t>(cell.edges[l]);
                rhs[velocity_index(ne, e, 0)] += w * f.x * phi;
                rhs[velocity_index(ne, e, 1)] += w * f.y * phi;
            }
            pm += w * c.pressure(x, t);
        }
        p_mean[k] = pm / cell.measure;
    }
    const VelocityField gp = gradient(mesh, p_mean);
    for (std::size_t i = 0; i < rhs.size(); ++i) {
        rhs[i] += gp.values()[i];
    }
    return rhs;
}

std::vector<double> assemble_forcing(const ManufacturedCase& c, const Mesh& mesh, double t) {
    return assemble_forcing(c, mesh, t, 3);
}

ErrorNorms error_norms(const ManufacturedCase& c, const Mesh& mesh, const SchemeState& state) {
    const GaussRule g = gauss_legendre(3);
    double ev = 0.0, ep = 0.0;
    for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
        const Cell& cell = mesh.cell(k);
        for (const auto& [x, w] : cell_quadrature(cell, g)) {
            const Vec2 d = interpolate_velocity(mesh, state.u, k, x) - c.velocity(x, state.t);
            ev += w * dot(d, d);
        }
        const double dp = state.p[k] - c.pressure(cell.centroid, state.t);
        ep += cell.measure * dp * dp;
    }
    return {std::sqrt(ev), std::sqrt(ep)};
}

SchemeConfig manufactured_config(const ManufacturedCase& c, const Mesh& mesh, double dt, SchemeConfig base) {
    base.dt = dt;
    base.mu = c.mu;
    base.eos = c.eos;
    base.boundary = [c](const Edge& edge, double t) { return c.edge_mean_velocity(edge, t); };
    auto shared = std::make_shared<const Mesh>(mesh);
    base.forcing = [c, shared](double t) { return assemble_forcing(c, *shared, t); };
    return base;
}

double fitted_order(const std::vector<double>& steps, const std::vector<double>& errors) {
    if (steps.size() != errors.size()) {
        throw std::invalid_argument("fitted_order: size mismatch");
    }
    std::size_t n = 1;
    while (n < errors.size() && errors[n] > 0.0 && errors[n - 1] / errors[n] > 1.5) {
        ++n;
    }
    if (n < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(steps[i]);
        const double y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double dn = static_cast<double>(n);
    return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

std::size_t study_threads() {
    if (const char* env = std::getenv("BAROPC_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) {
            return static_cast<std::size_t>(v);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

ConvergenceTable convergence_study(const ManufacturedCase& c, const std::vector<MeshSize>& meshes,
                                   const std::vector<double>& dts, double t_end, SchemeConfig base,
                                   std::size_t threads) {
    if (meshes.empty() || dts.empty()) {
        throw std::invalid_argument("convergence_study: mesh and time step lists must be non-empty");
    }
    ConvergenceTable table;
    table.rows.resize(meshes.size() * dts.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;

    auto worker = [&] {
        while (true) {
            const std::size_t job = next.fetch_add(1);
            if (job >= table.rows.size()) {
                return;
            }
            {
                std::lock_guard lock(error_mutex);
                if (error) {
                    return;
                }
            }
            try {
                const MeshSize ms = meshes[job / dts.size()];
                const double dt = dts[job % dts.size()];
                const auto start = std::chrono::steady_clock::now();
                const Mesh mesh = build_rect_mesh(ms.nx, ms.ny, c.domain);
                const PressureCorrectionScheme scheme(mesh, manufactured_config(c, mesh, dt, base));
                const SchemeState init = scheme.initial_state([&](Vec2 x) { return c.density(x, 0.0); },
                                                              [&](Vec2 x) { return c.velocity(x, 0.0); });
                const SimulationResult run = simulate(scheme, init, -1, t_end);
                ConvergenceRow row;
                row.nx = ms.nx;
                row.ny = ms.ny;
                row.dt = dt;
                row.errors = error_norms(c, mesh, run.final_state);
                double sum = 0.0;
                for (int it : run.inner_iterations) {
                    sum += it;
                    row.inner_iter_max = std::max(row.inner_iter_max, it);
                }
                row.inner_iter_mean = run.inner_iterations.empty() ? 0.0 : sum / run.inner_iterations.size();
                row.wall_seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                table.rows[job] = row;
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
            }
        }
    };

    if (threads == 0) {
        threads = study_threads();
    }
    threads = std::min(threads, table.rows.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }

    for (std::size_t m = 0; m < meshes.size(); ++m) {
        std::vector<double> ev, ep;
        for (std::size_t d = 0; d < dts.size(); ++d) {
            ev.push_back(table.rows[m * dts.size() + d].errors.velocity_l2);
            ep.push_back(table.rows[m * dts.size() + d].errors.pressure_l2);
        }
        table.temporal_order_v.push_back(fitted_order(dts, ev));
        table.temporal_order_p.push_back(fitted_order(dts, ep));
    }
    const std::size_t finest = static_cast<std::size_t>(std::min_element(dts.begin(), dts.end()) - dts.begin());
    for (std::size_t m = 0; m + 1 < meshes.size(); ++m) {
        const ConvergenceRow& a = table.rows[m * dts.size() + finest];
        const ConvergenceRow& b = table.rows[(m + 1) * dts.size() + finest];
        const double ratio = std::log(static_cast<double>(meshes[m + 1].nx) / meshes[m].nx);
        table.spatial_order_v.push_back(std::log(a.errors.velocity_l2 / b.errors.velocity_l2) / ratio);
        table.spatial_order_p.push_back(std::log(a.errors.pressure_l2 / b.errors.pressure_l2) / ratio);
    }
    return table;
}

InitialCondition perturbed_initial_condition(const Rect& domain, std::uint64_t seed, double rho_amp,
                                             double u_amp) {
    struct Mode {
        int a, b;
        double c, phase_x, phase_y;
    };
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    auto draw = [&] {
        std::vector<Mode> modes;
        double total = 0.0;
        for (int a = 1; a <= 3; ++a) {
            for (int b = 1; b <= 3; ++b) {
                Mode m{a, b, coef(gen), phase(gen), phase(gen)};
                total += std::abs(m.c);
                modes.push_back(m);
            }
        }
        for (Mode& m : modes) {
            m.c /= total;
        }
        return modes;
    };
    const auto rho_modes = draw();
    const auto u1_modes = draw();
    const auto u2_modes = draw();
    auto sum = [domain](const std::vector<Mode>& modes, Vec2 x) {
        const double X = (x.x - domain.x_min) / domain.width();
        const double Y = (x.y - domain.y_min) / domain.height();
        double s = 0.0;
        for (const Mode& m : modes) {
            s += m.c * std::cos(m.a * kPi * X + m.phase_x) * std::cos(m.b * kPi * Y + m.phase_y);
        }
        return s;
    };
    InitialCondition ic;
    ic.rho = [=](Vec2 x) { return 1.0 + rho_amp * sum(rho_modes, x); };
    ic.u = [=](Vec2 x) {
        const double X = (x.x - domain.x_min) / domain.width();
        const double Y = (x.y - domain.y_min) / domain.height();
        const double env = std::sin(kPi * X) * std::sin(kPi * Y);
        return Vec2{u_amp * env * sum(u1_modes, x), u_amp * env * sum(u2_modes, x)};
    };
    return ic;
}

} // namespace baropc
