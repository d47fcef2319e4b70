#pragma once

#include <span>
#include <vector>

#include "isosum/coefficient_field.hpp"
#include "isosum/discretization.hpp"
#include "isosum/flops.hpp"
#include "isosum/sumfac.hpp"
#include "isosum/tensorspace.hpp"

namespace isosum {

/// sum_n u_n d^theta phi_n(x) on the tensor point grid of the tables (direction
/// 0 fastest), computed one direction at a time. `derivs[i]` selects the
/// derivative row of table i; `order` is the contraction order (empty = 0..d-1).
[[nodiscard]] std::vector<double> eval_field(std::span<const double> coeffs, std::span<const BasisEvalTable> tables,
                                             std::span<const int> derivs, FlopCounter* counter = nullptr,
                                             std::span<const int> order = {});
[[nodiscard]] std::vector<double> eval_field(std::span<const double> coeffs, const TensorGeneratingSystem& trial,
                                             FlopCounter* counter = nullptr);

/// d^theta u at every point, one grid per trial multi-index.
struct FieldSamples {
    std::vector<int> shape;
    std::vector<MultiIndex> derivs;
    std::vector<std::vector<double>> grids;
};

[[nodiscard]] FieldSamples eval_fields(std::span<const double> coeffs, const Discretization& disc,
                                       std::span<const MultiIndex> derivs, FlopCounter* counter = nullptr);

/// v_m = sum_x w(x) d^eta psi_m(x) h(x), accumulated into v; the transpose of
/// eval_field with weights folded in.
void contract_test(std::span<const double> h, const Discretization& disc, const MultiIndex& eta,
                   std::span<const int> order, std::span<double> v, FlopCounter& counter);

/// v = A u without forming A.
class MatrixFreeOperator {
public:
    explicit MatrixFreeOperator(const AssemblyProblem& problem, std::vector<int> order = {});
    MatrixFreeOperator(Discretization disc, CoefficientField coeff, std::vector<int> order = {});

    [[nodiscard]] std::int64_t rows() const noexcept { return disc_.num_test(); }
    [[nodiscard]] std::int64_t cols() const noexcept { return disc_.num_trial(); }
    [[nodiscard]] const Discretization& discretization() const noexcept { return disc_; }
    [[nodiscard]] const CoefficientField& coefficients() const noexcept { return coeff_; }
    [[nodiscard]] std::span<const int> order() const noexcept { return order_; }

    /// Fields d^theta u are recomputed on every call.
    [[nodiscard]] std::vector<double> apply(std::span<const double> u, FlopCounter& counter) const;

private:
    Discretization disc_;
    CoefficientField coeff_;
    std::vector<int> order_;
    std::vector<char> trial_used_;
    std::vector<char> test_used_;
    std::vector<char> block_used_;
};

[[nodiscard]] inline std::vector<double> apply(const MatrixFreeOperator& op, std::span<const double> u,
                                               FlopCounter& counter) {
    return op.apply(u, counter);
}

}  // namespace isosum
