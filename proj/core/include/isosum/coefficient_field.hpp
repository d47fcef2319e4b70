#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace isosum {

/// Derivative multi-index theta: one derivative level per direction.
using MultiIndex = std::vector<int>;

/// {0} in `dim` directions.
[[nodiscard]] std::vector<MultiIndex> value_derivs(int dim);
/// {0, e_0, ..., e_{dim-1}}: value and first partial derivatives.
[[nodiscard]] std::vector<MultiIndex> gradient_derivs(int dim);

/// Matrix-valued coefficient F at every point of a tensor point grid.
///
/// At each point a dense (#test derivs) x (#trial derivs) matrix; entry
/// (s, r) multiplies d^{trial r} phi * d^{test s} psi. Points are ordered
/// lexicographically with direction 0 fastest.
class CoefficientField {
public:
    CoefficientField() = default;
    CoefficientField(std::vector<MultiIndex> trial_derivs, std::vector<MultiIndex> test_derivs, std::vector<int> shape,
                     std::vector<double> values);

    /// Zero field of the given layout.
    CoefficientField(std::vector<MultiIndex> trial_derivs, std::vector<MultiIndex> test_derivs, std::vector<int> shape);

    /// Same (test x trial, row-major) matrix at every point.
    [[nodiscard]] static CoefficientField constant(std::vector<MultiIndex> trial_derivs,
                                                   std::vector<MultiIndex> test_derivs, std::vector<int> shape,
                                                   std::span<const double> matrix);

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(shape_.size()); }
    [[nodiscard]] std::span<const int> shape() const noexcept { return shape_; }
    [[nodiscard]] std::int64_t num_points() const noexcept { return num_points_; }
    [[nodiscard]] int num_trial() const noexcept { return static_cast<int>(trial_.size()); }
    [[nodiscard]] int num_test() const noexcept { return static_cast<int>(test_.size()); }
    [[nodiscard]] std::span<const MultiIndex> trial_derivs() const noexcept { return trial_; }
    [[nodiscard]] std::span<const MultiIndex> test_derivs() const noexcept { return test_; }
    [[nodiscard]] const MultiIndex& trial_deriv(int r) const { return trial_[static_cast<std::size_t>(r)]; }
    [[nodiscard]] const MultiIndex& test_deriv(int s) const { return test_[static_cast<std::size_t>(s)]; }

    [[nodiscard]] std::size_t index(std::int64_t point, int s, int r) const noexcept {
        return static_cast<std::size_t>(point) * block_ + static_cast<std::size_t>(s * num_trial() + r);
    }
    [[nodiscard]] double operator()(std::int64_t point, int s, int r) const { return values_[index(point, s, r)]; }
    [[nodiscard]] double& at(std::int64_t point, int s, int r) { return values_[index(point, s, r)]; }
    /// The (test x trial) matrix at a point.
    [[nodiscard]] std::span<const double> matrix(std::int64_t point) const {
        return {values_.data() + static_cast<std::size_t>(point) * block_, block_};
    }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<double> values() noexcept { return values_; }

    /// True iff entry (s, r) is exactly zero at every point.
    [[nodiscard]] bool slice_is_zero(int s, int r) const;

    /// Sub-grid with per-direction point ranges [first, second).
    [[nodiscard]] CoefficientField restrict(std::span<const std::pair<int, int>> ranges) const;

private:
    std::vector<MultiIndex> trial_;
    std::vector<MultiIndex> test_;
    std::vector<int> shape_;
    std::int64_t num_points_ = 0;
    std::size_t block_ = 0;
    std::vector<double> values_;
};

}  // namespace isosum
