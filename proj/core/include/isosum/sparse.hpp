#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "isosum/tensorspace.hpp"

namespace isosum {

/// Row-major dense matrix; used by the Kronecker oracle and in tests.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::int64_t rows, std::int64_t cols, double fill = 0.0);

    [[nodiscard]] std::int64_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::int64_t cols() const noexcept { return cols_; }
    [[nodiscard]] double& operator()(std::int64_t r, std::int64_t c) {
        return data_[static_cast<std::size_t>(r * cols_ + c)];
    }
    [[nodiscard]] double operator()(std::int64_t r, std::int64_t c) const {
        return data_[static_cast<std::size_t>(r * cols_ + c)];
    }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

    [[nodiscard]] DenseMatrix transpose() const;
    DenseMatrix& operator+=(const DenseMatrix& o);

    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

private:
    std::int64_t rows_ = 0;
    std::int64_t cols_ = 0;
    std::vector<double> data_;
};

/// Kronecker product; the second factor's index runs fastest.
[[nodiscard]] DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b);
[[nodiscard]] DenseMatrix identity_matrix(std::int64_t n);
[[nodiscard]] double max_abs_difference(const DenseMatrix& a, const DenseMatrix& b);

/// CSR matrix on a shared sparsity pattern; rows are test functions and
/// columns trial functions.
class SparseMatrix {
public:
    SparseMatrix() = default;
    explicit SparseMatrix(std::shared_ptr<const SparsityPattern> pattern);
    SparseMatrix(std::shared_ptr<const SparsityPattern> pattern, std::vector<double> values);

    [[nodiscard]] std::int64_t rows() const noexcept { return pattern_ ? pattern_->rows() : 0; }
    [[nodiscard]] std::int64_t cols() const noexcept { return pattern_ ? pattern_->cols() : 0; }
    [[nodiscard]] std::int64_t nnz() const noexcept { return static_cast<std::int64_t>(values_.size()); }
    [[nodiscard]] const SparsityPattern& pattern() const { return *pattern_; }
    [[nodiscard]] const std::shared_ptr<const SparsityPattern>& shared_pattern() const noexcept { return pattern_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<double> values() noexcept { return values_; }

    /// Entry (row, col); zero outside the pattern.
    [[nodiscard]] double at(std::int64_t row, std::int64_t col) const;
    [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;
    [[nodiscard]] double frobenius_norm() const;
    [[nodiscard]] DenseMatrix to_dense() const;

    /// Entry-wise sum; both operands must share the same pattern object.
    SparseMatrix& operator+=(const SparseMatrix& o);

private:
    std::shared_ptr<const SparsityPattern> pattern_;
    std::vector<double> values_;
};

/// ||a - b||_F / ||b||_F over the union of both patterns (absolute if b = 0).
[[nodiscard]] double relative_frobenius_distance(const SparseMatrix& a, const SparseMatrix& b);
[[nodiscard]] double relative_frobenius_distance(const SparseMatrix& a, const DenseMatrix& b);
/// ||A - A^T||_F / ||A||_F.
[[nodiscard]] double symmetry_defect(const SparseMatrix& a);

/// ||a - b||_2 / ||b||_2 (absolute if b = 0).
[[nodiscard]] double relative_l2_distance(std::span<const double> a, std::span<const double> b);

}  // namespace isosum
