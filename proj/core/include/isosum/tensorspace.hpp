#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "isosum/bspline.hpp"
#include "isosum/quadrature.hpp"

namespace isosum {

/// Lexicographic bijection between flat indices and multi-indices; the
/// first direction runs fastest. Indices are 0-based.
class LexOrdering {
public:
    LexOrdering() = default;
    explicit LexOrdering(std::vector<int> dims);

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(dims_.size()); }
    [[nodiscard]] std::span<const int> dims() const noexcept { return dims_; }
    [[nodiscard]] std::int64_t size() const noexcept { return prefix_.back(); }
    /// Product of the first `count` extents.
    [[nodiscard]] std::int64_t prefix(int count) const { return prefix_[static_cast<std::size_t>(count)]; }

    [[nodiscard]] std::int64_t flatten(std::span<const int> multi) const;
    [[nodiscard]] std::vector<int> split(std::int64_t flat) const;
    /// Component `dir` of the multi-index of `flat`.
    [[nodiscard]] int component(std::int64_t flat, int dir) const;

private:
    std::vector<int> dims_;
    std::vector<std::int64_t> prefix_{1};
};

/// One-dimensional interaction pattern: (trial n, test m) pairs stored row by
/// row in the test index, columns ascending.
class PairList1D {
public:
    PairList1D() = default;
    PairList1D(int num_trial, int num_test, std::vector<std::pair<int, int>> pairs);

    [[nodiscard]] int num_trial() const noexcept { return num_trial_; }
    [[nodiscard]] int num_test() const noexcept { return num_test_; }
    [[nodiscard]] int size() const noexcept { return static_cast<int>(trial_.size()); }
    [[nodiscard]] int row_begin(int m) const { return row_ptr_[static_cast<std::size_t>(m)]; }
    [[nodiscard]] int row_end(int m) const { return row_ptr_[static_cast<std::size_t>(m) + 1]; }
    [[nodiscard]] int trial(int k) const { return trial_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] int test(int k) const { return test_[static_cast<std::size_t>(k)]; }
    /// Index of pair (n, m) or -1.
    [[nodiscard]] int find(int n, int m) const;
    /// All pairs as (trial n, test m).
    [[nodiscard]] std::vector<std::pair<int, int>> pairs() const;

private:
    int num_trial_ = 0;
    int num_test_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> trial_;
    std::vector<int> test_;
};

/// {(n, m) : X ∩ csupp(trial n) ∩ csupp(test m) != ∅}, built from the
/// leftmost quadrature point inside each convex support: a pair interacts iff
/// the leftmost point of one support lies in the other.
[[nodiscard]] PairList1D nnz_pattern_1d(std::span<const Interval> trial_supports,
                                        std::span<const Interval> test_supports, std::span<const double> points);
[[nodiscard]] PairList1D nnz_pattern_1d(const UnivariateBasis& trial, const UnivariateBasis& test,
                                        const QuadratureRule1D& rule);

/// Closed-form pattern size q*N + p*M - sum_{xi != b} mu_trial(xi) mu_test(xi)
/// for open knot vectors on a common interval, valid when every knot span of
/// the merged knot set contains a quadrature point.
[[nodiscard]] std::int64_t nnz_count_exact(const UnivariateBasis& trial, const UnivariateBasis& test);

/// d-variate generating system: per-direction tables at a fixed derivative level.
class TensorGeneratingSystem {
public:
    TensorGeneratingSystem(std::vector<BasisEvalTable> factors, std::vector<int> derivs);

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(factors_.size()); }
    [[nodiscard]] const BasisEvalTable& factor(int dir) const { return factors_[static_cast<std::size_t>(dir)]; }
    [[nodiscard]] std::span<const BasisEvalTable> factors() const noexcept { return factors_; }
    [[nodiscard]] int deriv(int dir) const { return derivs_[static_cast<std::size_t>(dir)]; }
    [[nodiscard]] std::span<const int> derivs() const noexcept { return derivs_; }
    [[nodiscard]] const LexOrdering& ordering() const noexcept { return functions_; }
    [[nodiscard]] const LexOrdering& points() const noexcept { return points_; }
    [[nodiscard]] std::int64_t size() const noexcept { return functions_.size(); }

    /// d^theta phi_n at a flat point index of the tensor point grid.
    [[nodiscard]] double value(std::int64_t n, std::int64_t point) const;

private:
    std::vector<BasisEvalTable> factors_;
    std::vector<int> derivs_;
    LexOrdering functions_;
    LexOrdering points_;
};

/// Product of per-direction pair counts; throws CapacityError if the tensor
/// pattern would not be addressable.
[[nodiscard]] std::int64_t tensor_pattern_size(std::span<const std::int64_t> counts);

/// CSR sparsity pattern (rows = test functions, columns = trial functions).
///
/// Tensor patterns additionally keep the per-direction pair lists and the map
/// between CSR slots and Kronecker positions k_0 + P_0 (k_1 + P_1 (...)),
/// where k_δ indexes the pair list of direction δ and P_δ is its length.
class SparsityPattern {
public:
    SparsityPattern() = default;
    SparsityPattern(std::int64_t rows, std::int64_t cols, std::vector<std::int64_t> row_ptr,
                    std::vector<std::int64_t> col_idx);

    [[nodiscard]] static SparsityPattern kronecker(std::vector<PairList1D> directions);

    [[nodiscard]] std::int64_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::int64_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::int64_t nnz() const noexcept { return static_cast<std::int64_t>(col_idx_.size()); }
    [[nodiscard]] std::span<const std::int64_t> row_ptr() const noexcept { return row_ptr_; }
    [[nodiscard]] std::span<const std::int64_t> col_idx() const noexcept { return col_idx_; }
    /// Slot of entry (row, col) or -1.
    [[nodiscard]] std::int64_t find(std::int64_t row, std::int64_t col) const;

    [[nodiscard]] bool is_kronecker() const noexcept { return !directions_.empty(); }
    [[nodiscard]] std::span<const PairList1D> directions() const noexcept { return directions_; }
    [[nodiscard]] std::span<const std::int64_t> kron_of_slot() const noexcept { return kron_of_slot_; }
    [[nodiscard]] std::span<const std::int64_t> slot_of_kron() const noexcept { return slot_of_kron_; }

private:
    std::int64_t rows_ = 0;
    std::int64_t cols_ = 0;
    std::vector<std::int64_t> row_ptr_{0};
    std::vector<std::int64_t> col_idx_;
    std::vector<PairList1D> directions_;
    std::vector<std::int64_t> kron_of_slot_;
    std::vector<std::int64_t> slot_of_kron_;
};

/// Tensor pattern of a trial/test pair on a tensor quadrature. Derivative
/// levels do not matter: the pattern depends only on the convex supports.
[[nodiscard]] SparsityPattern tensor_pattern(const TensorGeneratingSystem& trial, const TensorGeneratingSystem& test,
                                             const TensorQuadrature& quad);

}  // namespace isosum
