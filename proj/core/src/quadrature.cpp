#include "isosum/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "isosum/errors.hpp"

namespace isosum {

namespace {

constexpr double kNewtonTol = 1e-15;
constexpr int kNewtonMaxIter = 100;

// Legendre P_k(x) and P_k'(x) by the three-term recurrence.
void legendre(int k, double x, double& value, double& deriv) {
    double p0 = 1.0;
    double p1 = x;
    if (k == 0) {
        value = 1.0;
        deriv = 0.0;
        return;
    }
    for (int n = 2; n <= k; ++n) {
        const double pn = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / static_cast<double>(n);
        p0 = p1;
        p1 = pn;
    }
    value = p1;
    deriv = static_cast<double>(k) * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

ReferenceGaussRule gauss_legendre(int k) {
    if (k < 1 || k > 64) {
        throw ArgumentError("gauss_legendre: k must be in [1, 64], got " + std::to_string(k));
    }
    ReferenceGaussRule rule;
    rule.nodes.assign(static_cast<std::size_t>(k), 0.0);
    rule.weights.assign(static_cast<std::size_t>(k), 0.0);
    const int half = (k + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // i-th largest root
        double x = std::cos(std::numbers::pi * (i + 0.75) / (k + 0.5));
        double value = 0.0;
        double deriv = 0.0;
        for (int it = 0; it < kNewtonMaxIter; ++it) {
            legendre(k, x, value, deriv);
            const double dx = value / deriv;
            x -= dx;
            if (std::abs(dx) <= kNewtonTol) {
                break;
            }
        }
        legendre(k, x, value, deriv);
        const double w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        const auto hi = static_cast<std::size_t>(k - 1 - i);
        const auto lo = static_cast<std::size_t>(i);
        rule.nodes[hi] = x;
        rule.nodes[lo] = -x;
        rule.weights[hi] = w;
        rule.weights[lo] = w;
    }
    if (k % 2 == 1) {
        rule.nodes[static_cast<std::size_t>(k / 2)] = 0.0;
    }
    return rule;
}

QuadratureRule1D::QuadratureRule1D(std::vector<double> points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.size() != weights_.size()) {
        throw ArgumentError("QuadratureRule1D: points and weights differ in length");
    }
    if (!std::is_sorted(points_.begin(), points_.end())) {
        throw ArgumentError("QuadratureRule1D: points must be sorted ascending");
    }
}

QuadratureRule1D QuadratureRule1D::slice(int begin, int end) const {
    if (begin < 0 || end > size() || begin > end) {
        throw ArgumentError("QuadratureRule1D::slice: range out of bounds");
    }
    return {std::vector<double>(points_.begin() + begin, points_.begin() + end),
            std::vector<double>(weights_.begin() + begin, weights_.begin() + end)};
}

QuadratureRule1D per_element_rule(std::span<const double> breakpoints, int k) {
    if (k < 1) {
        throw ArgumentError("per_element_rule: need k >= 1");
    }
    if (!std::is_sorted(breakpoints.begin(), breakpoints.end())) {
        throw ArgumentError("per_element_rule: breakpoints must be sorted");
    }
    std::vector<double> bp;
    std::unique_copy(breakpoints.begin(), breakpoints.end(), std::back_inserter(bp));
    if (bp.size() < 2) {
        throw ArgumentError("per_element_rule: need at least two distinct breakpoints");
    }
    const ReferenceGaussRule ref = gauss_legendre(k);
    std::vector<double> pts;
    std::vector<double> wts;
    pts.reserve((bp.size() - 1) * static_cast<std::size_t>(k));
    wts.reserve(pts.capacity());
    for (std::size_t e = 0; e + 1 < bp.size(); ++e) {
        const double half = 0.5 * (bp[e + 1] - bp[e]);
        const double mid = 0.5 * (bp[e + 1] + bp[e]);
        for (int i = 0; i < k; ++i) {
            pts.push_back(mid + half * ref.nodes[static_cast<std::size_t>(i)]);
            wts.push_back(half * ref.weights[static_cast<std::size_t>(i)]);
        }
    }
    return {std::move(pts), std::move(wts)};
}

QuadratureRule1D custom_rule(std::vector<double> points, std::vector<double> weights) {
    return {std::move(points), std::move(weights)};
}

TensorQuadrature::TensorQuadrature(std::vector<QuadratureRule1D> rules) : rules_(std::move(rules)) {}

std::vector<int> TensorQuadrature::shape() const {
    std::vector<int> s;
    s.reserve(rules_.size());
    for (const auto& r : rules_) {
        s.push_back(r.size());
    }
    return s;
}

std::int64_t TensorQuadrature::size() const noexcept {
    if (rules_.empty()) {
        return 0;
    }
    std::int64_t n = 1;
    for (const auto& r : rules_) {
        n *= r.size();
    }
    return n;
}

std::vector<int> TensorQuadrature::split(std::int64_t flat) const {
    std::vector<int> idx(rules_.size());
    for (std::size_t d = 0; d < rules_.size(); ++d) {
        const std::int64_t n = rules_[d].size();
        idx[d] = static_cast<int>(flat % n);
        flat /= n;
    }
    return idx;
}

std::vector<double> TensorQuadrature::point(std::int64_t flat) const {
    const auto idx = split(flat);
    std::vector<double> x(rules_.size());
    for (std::size_t d = 0; d < rules_.size(); ++d) {
        x[d] = rules_[d].points()[static_cast<std::size_t>(idx[d])];
    }
    return x;
}

double TensorQuadrature::weight(std::int64_t flat) const {
    const auto idx = split(flat);
    double w = 1.0;
    for (std::size_t d = 0; d < rules_.size(); ++d) {
        w *= rules_[d].weights()[static_cast<std::size_t>(idx[d])];
    }
    return w;
}

}  // namespace isosum
