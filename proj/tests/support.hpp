/// @file support.hpp
/// @brief Shared helpers for the unit tests: seeded random fields and dense
/// Eigen copies of sparse operators.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

#include "baropc/fields.hpp"
#include "baropc/mesh.hpp"
#include "baropc/sparse.hpp"

namespace baropc::test {

inline Eigen::MatrixXd dense(const SparseMatrix& a) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a.col_idx()[p])) += a.values()[p];
        }
    }
    return m;
}

inline Eigen::VectorXd vec(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> stdvec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

class Random {
public:
    explicit Random(std::uint64_t seed) : gen_(seed) {}

    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen_); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen_); }

    std::vector<double> vector(std::size_t n, double a, double b) {
        std::vector<double> v(n);
        for (double& x : v) {
            x = uniform(a, b);
        }
        return v;
    }

    CellField cells(const Mesh& mesh, double a, double b) { return CellField(vector(mesh.n_cells(), a, b)); }
    EdgeScalarField edges(const Mesh& mesh, double a, double b) {
        return EdgeScalarField(vector(mesh.n_edges(), a, b));
    }
    /// Random velocity vanishing on boundary edges.
    VelocityField interior_velocity(const Mesh& mesh, double amp) {
        VelocityField u(mesh.n_edges());
        for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
            if (mesh.edge(e).is_internal()) {
                u.set(e, {uniform(-amp, amp), uniform(-amp, amp)});
            }
        }
        return u;
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

inline const Rect kUnitSquare{0.0, 1.0, 0.0, 1.0};
inline const Rect kChannel{0.0, 1.0, -0.5, 0.5};

} // namespace baropc::test
