#include "baropc/mesh.hpp"

#include <algorithm>

namespace baropc {

namespace {

bool same(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

} // namespace

Mesh Mesh::build_rect(int nx, int ny, Rect domain) {
    if (nx < 1 || ny < 1) {
        throw MeshError("build_rect: cell counts must be >= 1 (got " + std::to_string(nx) + "x" +
                        std::to_string(ny) + ")");
    }
    if (!(domain.x_max > domain.x_min) || !(domain.y_max > domain.y_min) ||
        !std::isfinite(domain.area())) {
        throw MeshError("build_rect: degenerate or inverted domain");
    }

    Mesh m;
    m.nx_ = nx;
    m.ny_ = ny;
    m.domain_ = domain;
    const double hx = domain.width() / nx;
    const double hy = domain.height() / ny;
    const auto xv = [&](int i) { return i == nx ? domain.x_max : domain.x_min + i * hx; };
    const auto yv = [&](int j) { return j == ny ? domain.y_max : domain.y_min + j * hy; };

    const int n_vert = (nx + 1) * ny;
    const int n_horz = nx * (ny + 1);
    const auto vert_id = [&](int i, int j) { return j * (nx + 1) + i; };
    const auto horz_id = [&](int i, int j) { return n_vert + j * nx + i; };
    const auto cell_id = [&](int i, int j) { return j * nx + i; };

    m.cells_.resize(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            Cell& c = m.cells_[cell_id(i, j)];
            c.i = i;
            c.j = j;
            c.hx = xv(i + 1) - xv(i);
            c.hy = yv(j + 1) - yv(j);
            c.measure = c.hx * c.hy;
            c.centroid = {0.5 * (xv(i) + xv(i + 1)), 0.5 * (yv(j) + yv(j + 1))};
            c.edges = {vert_id(i, j), vert_id(i + 1, j), horz_id(i, j), horz_id(i, j + 1)};
            c.outward_normal = {Vec2{-1.0, 0.0}, Vec2{1.0, 0.0}, Vec2{0.0, -1.0}, Vec2{0.0, 1.0}};
        }
    }

    m.edges_.resize(static_cast<std::size_t>(n_vert + n_horz));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            Edge& e = m.edges_[vert_id(i, j)];
            e.orientation = 0;
            e.start = {xv(i), yv(j)};
            e.end = {xv(i), yv(j + 1)};
            e.measure = e.end.y - e.start.y;
            e.midpoint = {xv(i), 0.5 * (yv(j) + yv(j + 1))};
            if (i == 0) {
                e.kind = EdgeKind::Boundary;
                e.cell_k = cell_id(0, j);
                e.normal = {-1.0, 0.0};
            } else if (i == nx) {
                e.kind = EdgeKind::Boundary;
                e.cell_k = cell_id(nx - 1, j);
                e.normal = {1.0, 0.0};
            } else {
                e.cell_k = cell_id(i - 1, j);
                e.cell_l = cell_id(i, j);
                e.normal = {1.0, 0.0};
            }
        }
    }
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            Edge& e = m.edges_[horz_id(i, j)];
            e.orientation = 1;
            e.start = {xv(i), yv(j)};
            e.end = {xv(i + 1), yv(j)};
            e.measure = e.end.x - e.start.x;
            e.midpoint = {0.5 * (xv(i) + xv(i + 1)), yv(j)};
            if (j == 0) {
                e.kind = EdgeKind::Boundary;
                e.cell_k = cell_id(i, 0);
                e.normal = {0.0, -1.0};
            } else if (j == ny) {
                e.kind = EdgeKind::Boundary;
                e.cell_k = cell_id(i, ny - 1);
                e.normal = {0.0, 1.0};
            } else {
                e.cell_k = cell_id(i, j - 1);
                e.cell_l = cell_id(i, j);
                e.normal = {0.0, 1.0};
            }
        }
    }

    // Cones are triangles (basis sigma, apex centroid): |K|/4 on rectangles.
    m.internal_index_.assign(m.edges_.size(), -1);
    for (std::size_t e = 0; e < m.edges_.size(); ++e) {
        Edge& ed = m.edges_[e];
        ed.half_diamond_k = 0.25 * m.cells_[ed.cell_k].measure;
        if (ed.is_internal()) {
            ed.half_diamond_l = 0.25 * m.cells_[ed.cell_l].measure;
            m.internal_index_[e] = static_cast<int>(m.internal_edges_.size());
            m.internal_edges_.push_back(static_cast<int>(e));
        }
        ed.diamond = ed.half_diamond_k + ed.half_diamond_l;
    }

    // Sub-edges: per cell, one per vertex, ordered bottom-left, bottom-right,
    // top-left, top-right. sigma is the vertical edge at the vertex.
    m.diamond_faces_.assign(m.edges_.size(), {});
    m.subedges_.reserve(4 * m.cells_.size());
    for (std::size_t k = 0; k < m.cells_.size(); ++k) {
        const Cell& c = m.cells_[k];
        const double a = 0.5 * c.hx;
        const double b = 0.5 * c.hy;
        for (int sy : {-1, 1}) {
            for (int sx : {-1, 1}) {
                DiamondSubEdge s;
                s.cell = static_cast<int>(k);
                s.sigma = c.edges[sx < 0 ? kLeft : kRight];
                s.sigma_prime = c.edges[sy < 0 ? kBottom : kTop];
                s.centroid = c.centroid;
                s.vertex = {c.centroid.x + sx * a, c.centroid.y + sy * b};
                s.midpoint = 0.5 * (s.vertex + s.centroid);
                s.measure = std::hypot(a, b);
                s.normal = (1.0 / s.measure) * Vec2{-sx * b, sy * a};
                const int id = static_cast<int>(m.subedges_.size());
                m.subedges_.push_back(s);
                m.diamond_faces_[s.sigma].push_back({id, s.sigma_prime, 1.0});
                m.diamond_faces_[s.sigma_prime].push_back({id, s.sigma, -1.0});
            }
        }
    }
    return m;
}

int Mesh::locate(Vec2 x) const {
    const double fx = (x.x - domain_.x_min) / hx();
    const double fy = (x.y - domain_.y_min) / hy();
    if (fx < 0.0 || fy < 0.0 || fx > nx_ || fy > ny_) {
        return -1;
    }
    const int i = std::min(static_cast<int>(fx), nx_ - 1);
    const int j = std::min(static_cast<int>(fy), ny_ - 1);
    return j * nx_ + i;
}

bool Mesh::operator==(const Mesh& o) const {
    if (nx_ != o.nx_ || ny_ != o.ny_ || cells_.size() != o.cells_.size() ||
        edges_.size() != o.edges_.size() || subedges_.size() != o.subedges_.size()) {
        return false;
    }
    for (std::size_t k = 0; k < cells_.size(); ++k) {
        const Cell& a = cells_[k];
        const Cell& b = o.cells_[k];
        if (a.measure != b.measure || !same(a.centroid, b.centroid) || a.edges != b.edges) {
            return false;
        }
    }
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const Edge& a = edges_[e];
        const Edge& b = o.edges_[e];
        if (a.kind != b.kind || a.measure != b.measure || !same(a.midpoint, b.midpoint) ||
            !same(a.normal, b.normal) || a.cell_k != b.cell_k || a.cell_l != b.cell_l ||
            a.diamond != b.diamond) {
            return false;
        }
    }
    for (std::size_t s = 0; s < subedges_.size(); ++s) {
        const DiamondSubEdge& a = subedges_[s];
        const DiamondSubEdge& b = o.subedges_[s];
        if (a.sigma != b.sigma || a.sigma_prime != b.sigma_prime || a.measure != b.measure ||
            !same(a.normal, b.normal) || !same(a.midpoint, b.midpoint)) {
            return false;
        }
    }
    return true;
}

DiamondMeasures diamond_measures(const Mesh& mesh) {
    DiamondMeasures d;
    d.half_k.reserve(mesh.n_edges());
    d.half_l.reserve(mesh.n_edges());
    d.diamond.reserve(mesh.n_edges());
    for (const Edge& e : mesh.edges()) {
        d.half_k.push_back(e.half_diamond_k);
        d.half_l.push_back(e.half_diamond_l);
        d.diamond.push_back(e.diamond);
    }
    return d;
}

} // namespace baropc
