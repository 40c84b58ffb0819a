/// @file mesh.hpp
/// @brief Structured axis-aligned quadrilateral meshes with diamond-cell geometry.
///
/// Numbering is deterministic:
///   - cells are row-major, K = j * nx + i;
///   - vertical edges (normal +e1) come first, indexed j * (nx + 1) + i;
///   - horizontal edges (normal +e2) follow, indexed n_vertical + j * nx + i.
///
/// Every cell owns four cones D_{K,sigma} (apex at the centroid, basis sigma)
/// separated by the four vertex-to-centroid segments ("sub-edges"). A diamond
/// D_sigma is the union of the cones of sigma; boundary edges only have one.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace baropc {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    double operator[](int i) const { return i == 0 ? x : y; }
    double& operator[](int i) { return i == 0 ? x : y; }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct Rect {
    double x_min = 0.0;
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 1.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
};

class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Local edge slots of a cell.
enum LocalEdge : int { kLeft = 0, kRight = 1, kBottom = 2, kTop = 3 };

struct Cell {
    int i = 0;
    int j = 0;
    double measure = 0.0;
    Vec2 centroid;
    double hx = 0.0;
    double hy = 0.0;
    std::array<int, 4> edges{};          // indexed by LocalEdge
    std::array<Vec2, 4> outward_normal{}; // n_{K,sigma}
};

enum class EdgeKind { Internal, Boundary };

struct Edge {
    EdgeKind kind = EdgeKind::Internal;
    int orientation = 0; // 0: vertical (normal e1), 1: horizontal (normal e2)
    double measure = 0.0;
    Vec2 midpoint;
    Vec2 start;
    Vec2 end;
    /// Internal: points from cell_k to cell_l. Boundary: outward from cell_k.
    Vec2 normal;
    int cell_k = -1;
    int cell_l = -1; // -1 on the boundary
    double half_diamond_k = 0.0; // |D_{K,sigma}|
    double half_diamond_l = 0.0; // |D_{L,sigma}|, 0 on the boundary
    double diamond = 0.0;        // |D_sigma|

    bool is_internal() const { return kind == EdgeKind::Internal; }
};

/// Vertex-to-centroid segment separating the cones of `sigma` and
/// `sigma_prime` inside `cell`. `sigma` is always the vertical edge of the pair.
struct DiamondSubEdge {
    int cell = -1;
    int sigma = -1;
    int sigma_prime = -1;
    Vec2 vertex;
    Vec2 centroid;
    Vec2 midpoint;
    double measure = 0.0;
    Vec2 normal; // n_{eps,sigma}: unit, outward of D_sigma
};

/// One face of a diamond cell seen from edge `sigma`.
struct DiamondFace {
    int subedge = -1;
    int neighbor = -1;   // sigma' across the face
    double sign = 1.0;   // +1 if the stored normal is outward of this diamond
};

class Mesh {
public:
    /// Uniform nx-by-ny mesh of `domain`.
    static Mesh build_rect(int nx, int ny, Rect domain);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    const Rect& domain() const { return domain_; }
    double hx() const { return domain_.width() / nx_; }
    double hy() const { return domain_.height() / ny_; }

    std::size_t n_cells() const { return cells_.size(); }
    std::size_t n_edges() const { return edges_.size(); }
    std::size_t n_internal_edges() const { return internal_edges_.size(); }

    const Cell& cell(std::size_t k) const { return cells_[k]; }
    const Edge& edge(std::size_t e) const { return edges_[e]; }
    const std::vector<Cell>& cells() const { return cells_; }
    const std::vector<Edge>& edges() const { return edges_; }

    /// Global edge ids of internal edges, in increasing order.
    const std::vector<int>& internal_edges() const { return internal_edges_; }
    /// Position of edge `e` in internal_edges(), or -1 for boundary edges.
    int internal_index(std::size_t e) const { return internal_index_[e]; }

    const std::vector<DiamondSubEdge>& subedges() const { return subedges_; }
    /// Faces of D_sigma that are sub-edges (4 for internal, 2 for boundary edges).
    const std::vector<DiamondFace>& diamond_faces(std::size_t e) const { return diamond_faces_[e]; }

    /// Index of the cell containing `x` (closed cells, ties go to the lower index).
    int locate(Vec2 x) const;

    bool operator==(const Mesh& other) const;

private:
    int nx_ = 0;
    int ny_ = 0;
    Rect domain_;
    std::vector<Cell> cells_;
    std::vector<Edge> edges_;
    std::vector<int> internal_edges_;
    std::vector<int> internal_index_;
    std::vector<DiamondSubEdge> subedges_;
    std::vector<std::vector<DiamondFace>> diamond_faces_;
};

inline Mesh build_rect_mesh(int nx, int ny, Rect domain) { return Mesh::build_rect(nx, ny, domain); }

struct DiamondMeasures {
    std::vector<double> half_k;  // |D_{K,sigma}|
    std::vector<double> half_l;  // |D_{L,sigma}| (0 on the boundary)
    std::vector<double> diamond; // |D_sigma|
};

DiamondMeasures diamond_measures(const Mesh& mesh);

inline const std::vector<DiamondSubEdge>& diamond_subedges(const Mesh& mesh) { return mesh.subedges(); }

} // namespace baropc
