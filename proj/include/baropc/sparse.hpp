/// @file sparse.hpp
/// @brief Compressed sparse row matrices and the handful of kernels the
/// discretization needs (products, transposes, restriction to index sets).
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace baropc {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

    /// Duplicate entries are summed; columns are sorted within each row.
    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);
    static SparseMatrix diagonal(std::span<const double> diag);
    static SparseMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
    const std::vector<std::size_t>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }

    /// Entry (i, j), zero when not stored.
    double coeff(std::size_t i, std::size_t j) const;
    std::vector<double> diagonal_entries() const;

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> operator*(std::span<const double> x) const;

    SparseMatrix transpose() const;
    SparseMatrix scaled_rows(std::span<const double> s) const;
    SparseMatrix scaled_cols(std::span<const double> s) const;
    /// Rows `row_map`, columns `col_map` of this matrix, renumbered 0..n-1.
    SparseMatrix restrict_to(std::span<const std::size_t> row_map, std::span<const std::size_t> col_map) const;

    friend SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b);
    friend SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b);
    SparseMatrix operator*(double s) const;

    /// max |A - A^T| over stored entries.
    double asymmetry() const;
    double max_abs() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
};

/// Sparse operator with explicit meaning of rows and columns, per the
/// discretization's unknown numbering. Kept as an alias: the numbering
/// conventions live with the functions that build each operator.
using SparseOperator = SparseMatrix;

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

} // namespace baropc
