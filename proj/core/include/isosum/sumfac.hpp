#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "isosum/bspline.hpp"
#include "isosum/coefficient_field.hpp"
#include "isosum/discretization.hpp"
#include "isosum/flops.hpp"
#include "isosum/quadrature.hpp"
#include "isosum/sparse.hpp"

namespace isosum {

/// a(u, v) = sum_x w(x) sum_{theta, eta} F_{theta,eta}(x) d^theta u(x) d^eta v(x)
/// on tensor-product trial and test spaces. The derivative sets are those of
/// the coefficient field.
struct AssemblyProblem {
    std::vector<UnivariateBasis> trial;
    std::vector<UnivariateBasis> test;
    TensorQuadrature quad;
    CoefficientField coeff;

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(trial.size()); }
    /// Throws ArgumentError on inconsistent dimensions or grids and
    /// UnsupportedDerivativeError on derivative levels >= order.
    void validate() const;
    [[nodiscard]] std::vector<int> trial_max_deriv() const;
    [[nodiscard]] std::vector<int> test_max_deriv() const;
    [[nodiscard]] Discretization discretize() const;
};

/// Values of block A_{theta,eta} (coefficient entry (s, r)) on the
/// discretization's pattern, in CSR slot order. `order` lists directions in
/// processing order (innermost first); empty means 0..d-1.
[[nodiscard]] std::vector<double> assemble_block_values(const Discretization& disc, const CoefficientField& coeff,
                                                        int s, int r, std::span<const int> order,
                                                        FlopCounter& counter);

/// Sum of all blocks with a nonzero coefficient slice, in CSR slot order.
[[nodiscard]] std::vector<double> assemble_values(const Discretization& disc, const CoefficientField& coeff,
                                                  std::span<const int> order, FlopCounter& counter);

[[nodiscard]] SparseMatrix assemble_block(const AssemblyProblem& problem, const MultiIndex& theta,
                                          const MultiIndex& eta, FlopCounter& counter, std::span<const int> order = {});
[[nodiscard]] SparseMatrix assemble(const AssemblyProblem& problem, FlopCounter& counter,
                                    std::span<const int> order = {});

inline constexpr std::int64_t default_naive_budget = 2'000'000'000;
inline constexpr std::int64_t default_dense_budget = 200'000'000;

/// Direct quadrature sum per pattern entry; the reference oracle.
[[nodiscard]] SparseMatrix assemble_naive(const AssemblyProblem& problem, FlopCounter& counter,
                                          std::int64_t op_budget = default_naive_budget);

/// Q_test^T diag(F) Q_trial with explicit Kronecker factors, summed over blocks.
[[nodiscard]] DenseMatrix assemble_kronecker_dense(const AssemblyProblem& problem,
                                                   std::int64_t budget = default_dense_budget);

/// Block-update multiply-adds of one block: sum over processing levels i of
/// (prod_{later} #X) * p_i q_i #X_i * (prod_{earlier} nnz).
[[nodiscard]] std::uint64_t predicted_block_flops(const Discretization& disc, std::span<const int> order = {});

}  // namespace isosum
