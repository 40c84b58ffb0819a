/// @file operators.hpp
/// @brief Rannacher-Turek shape functions and the discrete operators of the
/// mixed FE/FV discretization.
///
/// Unknown numbering:
///   - cell unknowns: K in [0, n_cells);
///   - velocity (full space): i * n_edges + e, all edges, boundary included;
///   - velocity (interior space): i * n_internal + internal_index(e).
///
/// Sign conventions: (D u)_K = sum_{sigma in E(K)} |sigma| u_sigma . n_{K,sigma}
/// and G = -D^T restricted to internal edges, so that (G q)_sigma =
/// |sigma| (q_L - q_K) n_KL points from low to high pressure.
#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "baropc/fields.hpp"
#include "baropc/mesh.hpp"
#include "baropc/sparse.hpp"

namespace baropc {

class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- shape functions -------------------------------------------------------

/// phi_sigma(x) for the edge in slot `local_edge` of `cell`; normalized so
/// that its mean over its own edge is 1 and over the other three is 0.
double shape_value(const Mesh& mesh, std::size_t cell, int local_edge, Vec2 x);
Vec2 shape_gradient(const Mesh& mesh, std::size_t cell, int local_edge, Vec2 x);

/// Finite element expansion sum_sigma u_sigma phi_sigma(x) inside `cell`.
Vec2 interpolate_velocity(const Mesh& mesh, const VelocityField& u, std::size_t cell, Vec2 x);

// --- fields ----------------------------------------------------------------

/// Half-diamond weighted face density; boundary edges copy the inner cell.
EdgeScalarField edge_density(const Mesh& mesh, const CellField& rho);

CellField divergence(const Mesh& mesh, const VelocityField& u);
VelocityField gradient(const Mesh& mesh, const CellField& q);

/// n_cells x (2 n_edges), boundary columns included.
SparseOperator divergence_matrix(const Mesh& mesh);
/// (2 n_edges) x n_cells, boundary rows empty.
SparseOperator gradient_matrix(const Mesh& mesh);

/// Lumped mass, diagonal entry |D_sigma| w_sigma for each (sigma, i), full space.
SparseOperator lumped_mass(const Mesh& mesh, const EdgeScalarField& w);

/// mu int grad u : grad v + (mu / 3) int div u div v, cellwise, 2x2 Gauss.
/// Full velocity space.
SparseOperator viscous_stiffness(const Mesh& mesh, double mu);

// --- convection ------------------------------------------------------------

enum class ConvectionMode { Centered, Upwind };

/// Mass fluxes through the diamond sub-edges: out_of_sigma[s] leaves
/// D_sigma through sub-edge s, out_of_sigma_prime[s] leaves D_sigma'.
/// Conservative fluxes satisfy out_of_sigma = -out_of_sigma_prime.
struct DiamondFluxes {
    std::vector<double> out_of_sigma;
    std::vector<double> out_of_sigma_prime;

    explicit DiamondFluxes(std::size_t n = 0) : out_of_sigma(n, 0.0), out_of_sigma_prime(n, 0.0) {}
    /// Flux leaving the diamond of `face` (as listed in Mesh::diamond_faces).
    double outgoing(const DiamondFace& face) const {
        return face.sign > 0 ? out_of_sigma[face.subedge] : out_of_sigma_prime[face.subedge];
    }
};

/// Per-component scalar stencil sum_eps F_eps z_eps over the faces of each
/// diamond, on the full velocity space. Throws DomainError when the fluxes
/// are not antisymmetric to `tol` (relative to the largest flux).
SparseOperator convection_matrix(const Mesh& mesh, const DiamondFluxes& fluxes, ConvectionMode mode,
                                 double tol = 1e-12);

// --- pressure operators ----------------------------------------------------

/// L = D_I Q M_w^{-1} D_I^T = -D_I Q M_w^{-1} G_I on cell unknowns, composed
/// from the sparse factors. `q_up` may be empty (taken as 1).
SparseOperator pressure_laplacian(const Mesh& mesh, const EdgeScalarField& w, const EdgeScalarField& q_up = {});

/// Same operator assembled from the finite-volume closed form
/// sum_sigma (q_sigma / w_sigma) (|sigma|^2 / |D_sigma|) (p_K - p_L).
SparseOperator pressure_laplacian_closed_form(const Mesh& mesh, const EdgeScalarField& w,
                                              const EdgeScalarField& q_up = {});

/// |q|^2_{1,w} = sum_{sigma internal} (1 / w_sigma) (|sigma|^2 / |D_sigma|) (q_K - q_L)^2.
double pressure_seminorm_sq(const Mesh& mesh, const CellField& q, const EdgeScalarField& w);

/// ||v||^2_{w,disc} = sum_{sigma internal} |D_sigma| w_sigma |v_sigma|^2.
double kinetic_norm_sq(const Mesh& mesh, const VelocityField& v, const EdgeScalarField& w);

// --- interior/boundary splitting --------------------------------------------

/// Index maps between the full velocity space and interior unknowns.
struct VelocitySplit {
    std::vector<std::size_t> interior; // full indices of interior unknowns
    std::vector<std::size_t> boundary; // full indices of boundary unknowns
};

VelocitySplit velocity_split(const Mesh& mesh);

} // namespace baropc
