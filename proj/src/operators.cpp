#include "baropc/operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace baropc {

namespace {

// Reference coordinates of x in cell K: (xi, eta) in [-1, 1]^2.
Vec2 to_reference(const Cell& c, Vec2 x) {
    return {(x.x - c.centroid.x) / (0.5 * c.hx), (x.y - c.centroid.y) / (0.5 * c.hy)};
}

void require_inside(const Cell& c, Vec2 ref) {
    constexpr double slack = 1.0 + 1e-12;
    if (!(std::abs(ref.x) <= slack && std::abs(ref.y) <= slack)) {
        throw DomainError("shape function evaluated outside its cell");
    }
    (void)c;
}

// Rannacher-Turek basis on [-1,1]^2 with edge-mean degrees of freedom:
//   left/right  1/4 -+ xi/2  + 3/8 (xi^2 - eta^2)
//   bottom/top  1/4 -+ eta/2 - 3/8 (xi^2 - eta^2)
double ref_value(int local, Vec2 r) {
    const double q = 0.375 * (r.x * r.x - r.y * r.y);
    switch (local) {
    case kLeft: return 0.25 - 0.5 * r.x + q;
    case kRight: return 0.25 + 0.5 * r.x + q;
    case kBottom: return 0.25 - 0.5 * r.y - q;
    default: return 0.25 + 0.5 * r.y - q;
    }
}

Vec2 ref_gradient(int local, Vec2 r) {
    const Vec2 dq{0.75 * r.x, -0.75 * r.y};
    switch (local) {
    case kLeft: return {-0.5 + dq.x, dq.y};
    case kRight: return {0.5 + dq.x, dq.y};
    case kBottom: return {-dq.x, -0.5 - dq.y};
    default: return {-dq.x, 0.5 - dq.y};
    }
}

std::vector<double> checked_positive(const EdgeScalarField& w, const char* what) {
    for (double v : w) {
        if (!(v > 0.0)) {
            throw DomainError(std::string(what) + ": weights must be strictly positive");
        }
    }
    return w.values();
}

} // namespace

double shape_value(const Mesh& mesh, std::size_t cell, int local_edge, Vec2 x) {
    const Cell& c = mesh.cell(cell);
    const Vec2 r = to_reference(c, x);
    require_inside(c, r);
    return ref_value(local_edge, r);
}

Vec2 shape_gradient(const Mesh& mesh, std::size_t cell, int local_edge, Vec2 x) {
    const Cell& c = mesh.cell(cell);
    const Vec2 r = to_reference(c, x);
    require_inside(c, r);
    const Vec2 g = ref_gradient(local_edge, r);
    return {g.x / (0.5 * c.hx), g.y / (0.5 * c.hy)};
}

Vec2 interpolate_velocity(const Mesh& mesh, const VelocityField& u, std::size_t cell, Vec2 x) {
    const Cell& c = mesh.cell(cell);
    const Vec2 r = to_reference(c, x);
    require_inside(c, r);
    Vec2 v;
    for (int l = 0; l < 4; ++l) {
        const double phi = ref_value(l, r);
        v = v + phi * u.at(static_cast<std::size_t>(c.edges[l]));
    }
    return v;
}

EdgeScalarField edge_density(const Mesh& mesh, const CellField& rho) {
    for (double r : rho) {
        if (!(r > 0.0)) {
            throw DomainError("edge_density: cell density must be strictly positive");
        }
    }
    EdgeScalarField out(mesh.n_edges());
    for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
        const Edge& ed = mesh.edge(e);
        if (ed.is_internal()) {
            out[e] = (ed.half_diamond_k * rho[ed.cell_k] + ed.half_diamond_l * rho[ed.cell_l]) / ed.diamond;
        } else {
            out[e] = rho[ed.cell_k];
        }
    }
    return out;
}

CellField divergence(const Mesh& mesh, const VelocityField& u) {
    CellField out(mesh.n_cells());
    for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
        const Cell& c = mesh.cell(k);
        double s = 0.0;
        for (int l = 0; l < 4; ++l) {
            const auto e = static_cast<std::size_t>(c.edges[l]);
            s += mesh.edge(e).measure * dot(u.at(e), c.outward_normal[l]);
        }
        out[k] = s;
    }
    return out;
}

VelocityField gradient(const Mesh& mesh, const CellField& q) {
    VelocityField out(mesh.n_edges());
    for (int e : mesh.internal_edges()) {
        const Edge& ed = mesh.edge(e);
        out.set(e, (ed.measure * (q[ed.cell_l] - q[ed.cell_k])) * ed.normal);
    }
    return out;
}

SparseOperator divergence_matrix(const Mesh& mesh) {
    const std::size_t ne = mesh.n_edges();
    std::vector<Triplet> t;
    t.reserve(8 * mesh.n_cells());
    for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
        const Cell& c = mesh.cell(k);
        for (int l = 0; l < 4; ++l) {
            const auto e = static_cast<std::size_t>(c.edges[l]);
            const double m = mesh.edge(e).measure;
            for (int i = 0; i < 2; ++i) {
                if (c.outward_normal[l][i] != 0.0) {
                    t.push_back({k, velocity_index(ne, e, i), m * c.outward_normal[l][i]});
                }
            }
        }
    }
    return SparseMatrix::from_triplets(mesh.n_cells(), 2 * ne, std::move(t));
}

SparseOperator gradient_matrix(const Mesh& mesh) {
    const std::size_t ne = mesh.n_edges();
    std::vector<Triplet> t;
    for (int e : mesh.internal_edges()) {
        const Edge& ed = mesh.edge(e);
        for (int i = 0; i < 2; ++i) {
            const double n = ed.normal[i];
            if (n != 0.0) {
                const std::size_t row = velocity_index(ne, e, i);
                t.push_back({row, static_cast<std::size_t>(ed.cell_l), ed.measure * n});
                t.push_back({row, static_cast<std::size_t>(ed.cell_k), -ed.measure * n});
            }
        }
    }
    return SparseMatrix::from_triplets(2 * ne, mesh.n_cells(), std::move(t));
}

SparseOperator lumped_mass(const Mesh& mesh, const EdgeScalarField& w) {
    const std::vector<double> wv = checked_positive(w, "lumped_mass");
    const std::size_t ne = mesh.n_edges();
    std::vector<double> diag(2 * ne);
    for (std::size_t e = 0; e < ne; ++e) {
        diag[e] = diag[ne + e] = mesh.edge(e).diamond * wv[e];
    }
    return SparseMatrix::diagonal(diag);
}

SparseOperator viscous_stiffness(const Mesh& mesh, double mu) {
    const std::size_t ne = mesh.n_edges();
    const double g = 1.0 / std::sqrt(3.0);
    const std::array<Vec2, 4> gauss{Vec2{-g, -g}, Vec2{g, -g}, Vec2{-g, g}, Vec2{g, g}};
    std::vector<Triplet> t;
    t.reserve(64 * mesh.n_cells());
    for (std::size_t k = 0; k < mesh.n_cells(); ++k) {
        const Cell& c = mesh.cell(k);
        const double a = 0.5 * c.hx;
        const double b = 0.5 * c.hy;
        const double jac = a * b;
        std::array<std::array<double, 8>, 8> local{};
        for (const Vec2& r : gauss) {
            std::array<Vec2, 4> grad;
            for (int l = 0; l < 4; ++l) {
                const Vec2 gr = ref_gradient(l, r);
                grad[l] = {gr.x / a, gr.y / b};
            }
            for (int l = 0; l < 4; ++l) {
                for (int m = 0; m < 4; ++m) {
                    const double gg = dot(grad[l], grad[m]);
                    for (int i = 0; i < 2; ++i) {
                        for (int j = 0; j < 2; ++j) {
                            double v = (mu / 3.0) * grad[l][i] * grad[m][j];
                            if (i == j) {
                                v += mu * gg;
                            }
                            local[2 * l + i][2 * m + j] += jac * v;
                        }
                    }
                }
            }
        }
        for (int l = 0; l < 4; ++l) {
            for (int i = 0; i < 2; ++i) {
                const std::size_t row = velocity_index(ne, c.edges[l], i);
                for (int m = 0; m < 4; ++m) {
                    for (int j = 0; j < 2; ++j) {
                        t.push_back({row, velocity_index(ne, c.edges[m], j), local[2 * l + i][2 * m + j]});
                    }
                }
            }
        }
    }
    return SparseMatrix::from_triplets(2 * ne, 2 * ne, std::move(t));
}

SparseOperator convection_matrix(const Mesh& mesh, const DiamondFluxes& fluxes, ConvectionMode mode, double tol) {
    const std::size_t ne = mesh.n_edges();
    if (fluxes.out_of_sigma.size() != mesh.subedges().size() ||
        fluxes.out_of_sigma_prime.size() != mesh.subedges().size()) {
        throw DomainError("convection_matrix: flux count does not match the sub-edge count");
    }
    const double scale = std::max(norm_inf(fluxes.out_of_sigma), norm_inf(fluxes.out_of_sigma_prime));
    for (std::size_t s = 0; s < mesh.subedges().size(); ++s) {
        if (std::abs(fluxes.out_of_sigma[s] + fluxes.out_of_sigma_prime[s]) > tol * scale) {
            throw DomainError("convection_matrix: fluxes are not antisymmetric across sub-edge " +
                              std::to_string(s));
        }
    }
    std::vector<Triplet> t;
    t.reserve(16 * ne);
    for (std::size_t e = 0; e < ne; ++e) {
        for (const DiamondFace& f : mesh.diamond_faces(e)) {
            const double flux = fluxes.outgoing(f);
            const auto nb = static_cast<std::size_t>(f.neighbor);
            for (int i = 0; i < 2; ++i) {
                const std::size_t row = velocity_index(ne, e, i);
                if (mode == ConvectionMode::Centered) {
                    t.push_back({row, row, 0.5 * flux});
                    t.push_back({row, velocity_index(ne, nb, i), 0.5 * flux});
                } else if (flux >= 0.0) {
                    t.push_back({row, row, flux});
                } else {
                    t.push_back({row, velocity_index(ne, nb, i), flux});
                }
            }
        }
    }
    return SparseMatrix::from_triplets(2 * ne, 2 * ne, std::move(t));
}

VelocitySplit velocity_split(const Mesh& mesh) {
    const std::size_t ne = mesh.n_edges();
    VelocitySplit s;
    for (int i = 0; i < 2; ++i) {
        for (int e : mesh.internal_edges()) {
            s.interior.push_back(velocity_index(ne, e, i));
        }
        for (std::size_t e = 0; e < ne; ++e) {
            if (!mesh.edge(e).is_internal()) {
                s.boundary.push_back(velocity_index(ne, e, i));
            }
        }
    }
    return s;
}

SparseOperator pressure_laplacian(const Mesh& mesh, const EdgeScalarField& w, const EdgeScalarField& q_up) {
    const std::vector<double> wv = checked_positive(w, "pressure_laplacian");
    const VelocitySplit split = velocity_split(mesh);
    std::vector<std::size_t> cells(mesh.n_cells());
    for (std::size_t k = 0; k < cells.size(); ++k) {
        cells[k] = k;
    }
    const SparseMatrix d_int = divergence_matrix(mesh).restrict_to(cells, split.interior);
    const SparseMatrix g_int = gradient_matrix(mesh).restrict_to(split.interior, cells);

    const std::size_t ne = mesh.n_edges();
    std::vector<double> q_minv(split.interior.size());
    for (std::size_t r = 0; r < split.interior.size(); ++r) {
        const std::size_t e = split.interior[r] % ne;
        const double q = q_up.size() == 0 ? 1.0 : q_up[e];
        q_minv[r] = -q / (wv[e] * mesh.edge(e).diamond);
    }
    return d_int * g_int.scaled_rows(q_minv);
}

SparseOperator pressure_laplacian_closed_form(const Mesh& mesh, const EdgeScalarField& w,
                                              const EdgeScalarField& q_up) {
    const std::vector<double> wv = checked_positive(w, "pressure_laplacian_closed_form");
    std::vector<Triplet> t;
    t.reserve(4 * mesh.n_internal_edges());
    for (int e : mesh.internal_edges()) {
        const Edge& ed = mesh.edge(e);
        const double q = q_up.size() == 0 ? 1.0 : q_up[e];
        const double c = (q / wv[e]) * ed.measure * ed.measure / ed.diamond;
        const auto k = static_cast<std::size_t>(ed.cell_k);
        const auto l = static_cast<std::size_t>(ed.cell_l);
        t.push_back({k, k, c});
        t.push_back({l, l, c});
        t.push_back({k, l, -c});
        t.push_back({l, k, -c});
    }
    return SparseMatrix::from_triplets(mesh.n_cells(), mesh.n_cells(), std::move(t));
}

double pressure_seminorm_sq(const Mesh& mesh, const CellField& q, const EdgeScalarField& w) {
    double s = 0.0;
    for (int e : mesh.internal_edges()) {
        const Edge& ed = mesh.edge(e);
        const double jump = q[ed.cell_k] - q[ed.cell_l];
        s += (1.0 / w[e]) * ed.measure * ed.measure / ed.diamond * jump * jump;
    }
    return s;
}

double kinetic_norm_sq(const Mesh& mesh, const VelocityField& v, const EdgeScalarField& w) {
    double s = 0.0;
    for (int e : mesh.internal_edges()) {
        const Vec2 ve = v.at(e);
        s += mesh.edge(e).diamond * w[e] * dot(ve, ve);
    }
    return s;
}

} // namespace baropc
