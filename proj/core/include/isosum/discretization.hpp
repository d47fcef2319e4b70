#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "isosum/bspline.hpp"
#include "isosum/quadrature.hpp"
#include "isosum/sparse.hpp"
#include "isosum/tensorspace.hpp"

namespace isosum {

/// Everything the kernels need about one direction.
struct DirectionData {
    BasisEvalTable trial;
    BasisEvalTable test;
    std::vector<double> weights;
    PairList1D pairs;
    /// active_pairs[j * p * q + a * q + b]: pair index of (active trial a,
    /// active test b) at point j.
    std::vector<int> active_pairs;

    [[nodiscard]] int num_points() const noexcept { return trial.num_points(); }
    [[nodiscard]] std::span<const int> active_at(int point) const {
        const std::size_t pq = static_cast<std::size_t>(trial.order() * test.order());
        return {active_pairs.data() + static_cast<std::size_t>(point) * pq, pq};
    }
};

/// Tabulated trial/test factors, weights, and the shared tensor sparsity
/// pattern for one tensor point grid (global, or a box of a partition).
class Discretization {
public:
    Discretization() = default;
    Discretization(std::vector<BasisEvalTable> trial, std::vector<BasisEvalTable> test,
                   std::vector<std::vector<double>> weights);

    /// Tables with derivatives up to the given per-direction levels.
    [[nodiscard]] static Discretization build(std::span<const UnivariateBasis> trial,
                                              std::span<const UnivariateBasis> test, const TensorQuadrature& quad,
                                              std::span<const int> trial_max_deriv, std::span<const int> test_max_deriv);

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(dirs_.size()); }
    [[nodiscard]] const DirectionData& direction(int i) const { return dirs_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] const std::shared_ptr<const SparsityPattern>& pattern() const noexcept { return pattern_; }
    [[nodiscard]] std::vector<int> point_shape() const;
    [[nodiscard]] std::int64_t num_points() const noexcept;
    [[nodiscard]] std::int64_t num_trial() const noexcept;
    [[nodiscard]] std::int64_t num_test() const noexcept;

private:
    std::vector<DirectionData> dirs_;
    std::shared_ptr<const SparsityPattern> pattern_;
};

/// Identity order 0..dim-1, or a validated copy of `order`.
[[nodiscard]] std::vector<int> resolve_order(int dim, std::span<const int> order);

}  // namespace isosum
