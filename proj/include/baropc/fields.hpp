/// @file fields.hpp
/// @brief Discrete fields living on cells and edges.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "baropc/mesh.hpp"

namespace baropc {

/// One real per mesh entity. The tag keeps cell and edge fields apart.
template <class Tag>
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(std::size_t n, double value = 0.0) : data_(n, value) {}
    explicit ScalarField(std::vector<double> values) : data_(std::move(values)) {}

    std::size_t size() const { return data_.size(); }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }
    std::span<double> span() { return data_; }
    std::span<const double> span() const { return data_; }

    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

    bool operator==(const ScalarField&) const = default;

private:
    std::vector<double> data_;
};

struct CellTag {};
struct EdgeTag {};

/// Piecewise constant field: pressure p_K, density rho_K.
using CellField = ScalarField<CellTag>;
/// One value per edge: rho_sigma, predicted density, upwind density.
using EdgeScalarField = ScalarField<EdgeTag>;

/// Edge-mean velocity degrees of freedom u_{sigma,i} for every edge, boundary
/// edges included (those hold prescribed data). Storage is component-major:
/// index(e, i) = i * n_edges + e.
class VelocityField {
public:
    VelocityField() = default;
    explicit VelocityField(std::size_t n_edges) : n_edges_(n_edges), data_(2 * n_edges, 0.0) {}
    VelocityField(std::size_t n_edges, std::vector<double> values)
        : n_edges_(n_edges), data_(std::move(values)) {}

    std::size_t n_edges() const { return n_edges_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t e, int i) { return data_[i * n_edges_ + e]; }
    double operator()(std::size_t e, int i) const { return data_[i * n_edges_ + e]; }
    Vec2 at(std::size_t e) const { return {data_[e], data_[n_edges_ + e]}; }
    void set(std::size_t e, Vec2 v) {
        data_[e] = v.x;
        data_[n_edges_ + e] = v.y;
    }

    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    bool operator==(const VelocityField&) const = default;

private:
    std::size_t n_edges_ = 0;
    std::vector<double> data_;
};

inline std::size_t velocity_index(std::size_t n_edges, std::size_t e, int i) { return i * n_edges + e; }

} // namespace baropc
