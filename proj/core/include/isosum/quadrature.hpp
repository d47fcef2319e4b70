#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace isosum {

/// Gauss-Legendre rule on [-1, 1].
struct ReferenceGaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    [[nodiscard]] int size() const noexcept { return static_cast<int>(nodes.size()); }
};

/// k-point Gauss-Legendre rule, 1 <= k <= 64. Exact to degree 2k-1.
[[nodiscard]] ReferenceGaussRule gauss_legendre(int k);

/// One-dimensional quadrature: ascending points with aligned weights.
class QuadratureRule1D {
public:
    QuadratureRule1D() = default;
    QuadratureRule1D(std::vector<double> points, std::vector<double> weights);

    [[nodiscard]] int size() const noexcept { return static_cast<int>(points_.size()); }
    [[nodiscard]] bool empty() const noexcept { return points_.empty(); }
    [[nodiscard]] std::span<const double> points() const noexcept { return points_; }
    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }

    /// Points and weights with indices in [begin, end).
    [[nodiscard]] QuadratureRule1D slice(int begin, int end) const;

private:
    std::vector<double> points_;
    std::vector<double> weights_;
};

/// Reference rule mapped affinely into every element of the breakpoint list.
/// Repeated breakpoints collapse; fewer than two distinct values is an error.
[[nodiscard]] QuadratureRule1D per_element_rule(std::span<const double> breakpoints, int k);

/// Wraps user-supplied nodes and weights (e.g. weighted-quadrature rules).
[[nodiscard]] QuadratureRule1D custom_rule(std::vector<double> points, std::vector<double> weights);

/// Tensor product of per-direction rules; points are ordered lexicographically
/// with direction 0 running fastest.
class TensorQuadrature {
public:
    TensorQuadrature() = default;
    explicit TensorQuadrature(std::vector<QuadratureRule1D> rules);

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(rules_.size()); }
    [[nodiscard]] const QuadratureRule1D& rule(int dir) const { return rules_[static_cast<std::size_t>(dir)]; }
    [[nodiscard]] std::span<const QuadratureRule1D> rules() const noexcept { return rules_; }
    [[nodiscard]] std::vector<int> shape() const;
    [[nodiscard]] std::int64_t size() const noexcept;

    /// Per-direction point indices of a flat point index.
    [[nodiscard]] std::vector<int> split(std::int64_t flat) const;
    [[nodiscard]] std::vector<double> point(std::int64_t flat) const;
    [[nodiscard]] double weight(std::int64_t flat) const;

private:
    std::vector<QuadratureRule1D> rules_;
};

}  // namespace isosum
