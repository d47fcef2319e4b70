#include "isosum/coefficient_field.hpp"

#include <algorithm>
#include <string>

#include "isosum/errors.hpp"

namespace isosum {

namespace {

void check_derivs(const std::vector<MultiIndex>& derivs, std::size_t dim, const char* what) {
    if (derivs.empty()) {
        throw ArgumentError(std::string("CoefficientField: empty ") + what + " derivative set");
    }
    for (const auto& t : derivs) {
        if (t.size() != dim) {
            throw ArgumentError(std::string("CoefficientField: ") + what + " multi-index has wrong dimension");
        }
        for (const int l : t) {
            if (l < 0) {
                throw ArgumentError(std::string("CoefficientField: negative ") + what + " derivative level");
            }
        }
    }
}

}  // namespace

std::vector<MultiIndex> value_derivs(int dim) {
    return {MultiIndex(static_cast<std::size_t>(dim), 0)};
}

std::vector<MultiIndex> gradient_derivs(int dim) {
    std::vector<MultiIndex> out = value_derivs(dim);
    for (int j = 0; j < dim; ++j) {
        MultiIndex e(static_cast<std::size_t>(dim), 0);
        e[static_cast<std::size_t>(j)] = 1;
        out.push_back(std::move(e));
    }
    return out;
}

CoefficientField::CoefficientField(std::vector<MultiIndex> trial_derivs, std::vector<MultiIndex> test_derivs,
                                   std::vector<int> shape)
    : trial_(std::move(trial_derivs)), test_(std::move(test_derivs)), shape_(std::move(shape)) {
    if (shape_.empty()) {
        throw ArgumentError("CoefficientField: dimension must be positive");
    }
    check_derivs(trial_, shape_.size(), "trial");
    check_derivs(test_, shape_.size(), "test");
    num_points_ = 1;
    for (const int n : shape_) {
        if (n < 0) {
            throw ArgumentError("CoefficientField: negative grid extent");
        }
        num_points_ *= n;
    }
    block_ = trial_.size() * test_.size();
    values_.assign(static_cast<std::size_t>(num_points_) * block_, 0.0);
}

CoefficientField::CoefficientField(std::vector<MultiIndex> trial_derivs, std::vector<MultiIndex> test_derivs,
                                   std::vector<int> shape, std::vector<double> values)
    : CoefficientField(std::move(trial_derivs), std::move(test_derivs), std::move(shape)) {
    if (values.size() != values_.size()) {
        throw ArgumentError("CoefficientField: value count does not match layout");
    }
    values_ = std::move(values);
}

CoefficientField CoefficientField::constant(std::vector<MultiIndex> trial_derivs, std::vector<MultiIndex> test_derivs,
                                            std::vector<int> shape, std::span<const double> matrix) {
    CoefficientField f(std::move(trial_derivs), std::move(test_derivs), std::move(shape));
    if (matrix.size() != f.block_) {
        throw ArgumentError("CoefficientField::constant: matrix size mismatch");
    }
    for (std::int64_t x = 0; x < f.num_points_; ++x) {
        std::copy(matrix.begin(), matrix.end(), f.values_.begin() + static_cast<std::ptrdiff_t>(f.index(x, 0, 0)));
    }
    return f;
}

bool CoefficientField::slice_is_zero(int s, int r) const {
    for (std::int64_t x = 0; x < num_points_; ++x) {
        if ((*this)(x, s, r) != 0.0) {
            return false;
        }
    }
    return true;
}

CoefficientField CoefficientField::restrict(std::span<const std::pair<int, int>> ranges) const {
    if (static_cast<int>(ranges.size()) != dim()) {
        throw ArgumentError("CoefficientField::restrict: range count mismatch");
    }
    std::vector<int> sub(ranges.size());
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        if (ranges[i].first < 0 || ranges[i].second > shape_[i] || ranges[i].first > ranges[i].second) {
            throw ArgumentError("CoefficientField::restrict: range out of bounds");
        }
        sub[i] = ranges[i].second - ranges[i].first;
    }
    CoefficientField out(trial_, test_, sub);
    std::vector<int> t(ranges.size(), 0);
    for (std::int64_t k = 0; k < out.num_points_; ++k) {
        std::int64_t src = 0;
        std::int64_t stride = 1;
        for (std::size_t i = 0; i < ranges.size(); ++i) {
            src += (ranges[i].first + t[i]) * stride;
            stride *= shape_[i];
        }
        const auto m = matrix(src);
        std::copy(m.begin(), m.end(), out.values_.begin() + static_cast<std::ptrdiff_t>(out.index(k, 0, 0)));
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (++t[i] < sub[i]) {
                break;
            }
            t[i] = 0;
        }
    }
    return out;
}

}  // namespace isosum
