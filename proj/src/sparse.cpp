#include "baropc/sparse.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace baropc {

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> t) {
    std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseMatrix m(rows, cols);
    m.col_idx_.reserve(t.size());
    m.values_.reserve(t.size());
    std::size_t k = 0;
    for (std::size_t r = 0; r < rows; ++r) {
        while (k < t.size() && t[k].row == r) {
            if (t[k].col >= cols) {
                throw std::out_of_range("SparseMatrix: column index out of range");
            }
            if (!m.col_idx_.empty() && m.row_ptr_[r] < m.col_idx_.size() && m.col_idx_.back() == t[k].col) {
                m.values_.back() += t[k].value;
            } else {
                m.col_idx_.push_back(t[k].col);
                m.values_.push_back(t[k].value);
            }
            ++k;
        }
        m.row_ptr_[r + 1] = m.col_idx_.size();
    }
    if (k != t.size()) {
        throw std::out_of_range("SparseMatrix: row index out of range");
    }
    return m;
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> diag) {
    SparseMatrix m(diag.size(), diag.size());
    m.col_idx_.resize(diag.size());
    m.values_.assign(diag.begin(), diag.end());
    for (std::size_t i = 0; i < diag.size(); ++i) {
        m.col_idx_[i] = i;
        m.row_ptr_[i + 1] = i + 1;
    }
    return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
    std::vector<double> ones(n, 1.0);
    return diagonal(ones);
}

double SparseMatrix::coeff(std::size_t i, std::size_t j) const {
    const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it != last && *it == j) {
        return values_[static_cast<std::size_t>(it - col_idx_.begin())];
    }
    return 0.0;
}

std::vector<double> SparseMatrix::diagonal_entries() const {
    std::vector<double> d(std::min(rows_, cols_), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = coeff(i, i);
    }
    return d;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    assert(x.size() == cols_ && y.size() == rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            s += values_[k] * x[col_idx_[k]];
        }
        y[r] = s;
    }
}

std::vector<double> SparseMatrix::operator*(std::span<const double> x) const {
    std::vector<double> y(rows_, 0.0);
    multiply(x, y);
    return y;
}

SparseMatrix SparseMatrix::transpose() const {
    SparseMatrix t(cols_, rows_);
    std::vector<std::size_t> count(cols_ + 1, 0);
    for (std::size_t c : col_idx_) {
        ++count[c + 1];
    }
    for (std::size_t c = 0; c < cols_; ++c) {
        count[c + 1] += count[c];
    }
    t.row_ptr_ = count;
    t.col_idx_.resize(nnz());
    t.values_.resize(nnz());
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const std::size_t dst = count[col_idx_[k]]++;
            t.col_idx_[dst] = r;
            t.values_[dst] = values_[k];
        }
    }
    return t;
}

SparseMatrix SparseMatrix::scaled_rows(std::span<const double> s) const {
    SparseMatrix m = *this;
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            m.values_[k] *= s[r];
        }
    }
    return m;
}

SparseMatrix SparseMatrix::scaled_cols(std::span<const double> s) const {
    SparseMatrix m = *this;
    for (std::size_t k = 0; k < values_.size(); ++k) {
        m.values_[k] *= s[col_idx_[k]];
    }
    return m;
}

SparseMatrix SparseMatrix::restrict_to(std::span<const std::size_t> row_map,
                                       std::span<const std::size_t> col_map) const {
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::vector<std::size_t> new_col(cols_, npos);
    for (std::size_t j = 0; j < col_map.size(); ++j) {
        new_col[col_map[j]] = j;
    }
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < row_map.size(); ++i) {
        const std::size_t r = row_map[i];
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            if (new_col[col_idx_[k]] != npos) {
                t.push_back({i, new_col[col_idx_[k]], values_[k]});
            }
        }
    }
    return from_triplets(row_map.size(), col_map.size(), std::move(t));
}

SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) {
        throw std::invalid_argument("SparseMatrix +: dimension mismatch");
    }
    std::vector<Triplet> t;
    t.reserve(a.nnz() + b.nnz());
    for (const SparseMatrix* m : {&a, &b}) {
        for (std::size_t r = 0; r < m->rows_; ++r) {
            for (std::size_t k = m->row_ptr_[r]; k < m->row_ptr_[r + 1]; ++k) {
                t.push_back({r, m->col_idx_[k], m->values_[k]});
            }
        }
    }
    return SparseMatrix::from_triplets(a.rows_, a.cols_, std::move(t));
}

SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.cols_ != b.rows_) {
        throw std::invalid_argument("SparseMatrix *: dimension mismatch");
    }
    SparseMatrix c(a.rows_, b.cols_);
    std::vector<double> acc(b.cols_, 0.0);
    std::vector<char> used(b.cols_, 0);
    std::vector<std::size_t> pattern;
    for (std::size_t r = 0; r < a.rows_; ++r) {
        pattern.clear();
        for (std::size_t ka = a.row_ptr_[r]; ka < a.row_ptr_[r + 1]; ++ka) {
            const std::size_t mid = a.col_idx_[ka];
            for (std::size_t kb = b.row_ptr_[mid]; kb < b.row_ptr_[mid + 1]; ++kb) {
                const std::size_t col = b.col_idx_[kb];
                if (!used[col]) {
                    used[col] = 1;
                    pattern.push_back(col);
                }
                acc[col] += a.values_[ka] * b.values_[kb];
            }
        }
        std::sort(pattern.begin(), pattern.end());
        for (std::size_t col : pattern) {
            c.col_idx_.push_back(col);
            c.values_.push_back(acc[col]);
            acc[col] = 0.0;
            used[col] = 0;
        }
        c.row_ptr_[r + 1] = c.col_idx_.size();
    }
    return c;
}

SparseMatrix SparseMatrix::operator*(double s) const {
    SparseMatrix m = *this;
    for (double& v : m.values_) {
        v *= s;
    }
    return m;
}

double SparseMatrix::asymmetry() const {
    double worst = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const std::size_t c = col_idx_[k];
            const double other = c < rows_ && r < cols_ ? coeff(c, r) : 0.0;
            worst = std::max(worst, std::abs(values_[k] - other));
        }
    }
    return worst;
}

double SparseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

} // namespace baropc
