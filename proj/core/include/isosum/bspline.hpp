#pragma once

#include <span>
#include <vector>

namespace isosum {

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

/// Open (clamped) knot vector of a given order (degree + 1).
///
/// The first and last knot values are repeated exactly `order` times and no
/// interior value is repeated more than `order` times. Immutable after
/// construction, so knot comparisons are exact.
class KnotVector {
public:
    KnotVector(int order, std::vector<double> knots);

    /// Uniform open knot vector with `elements` elements on [a, b], interior
    /// knots of multiplicity `interior_multiplicity` (1 = maximum smoothness).
    [[nodiscard]] static KnotVector uniform(int order, int elements, double a = 0.0, double b = 1.0,
                                            int interior_multiplicity = 1);

    /// Open knot vector over the given breakpoints with a common interior multiplicity.
    [[nodiscard]] static KnotVector from_breakpoints(int order, std::span<const double> breakpoints,
                                                     int interior_multiplicity = 1);

    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] std::span<const double> knots() const noexcept { return knots_; }
    [[nodiscard]] double lower() const noexcept { return knots_.front(); }
    [[nodiscard]] double upper() const noexcept { return knots_.back(); }
    [[nodiscard]] int num_functions() const noexcept {
        return static_cast<int>(knots_.size()) - order_;
    }

    /// Number of occurrences of `xi` in the knot vector (0 if absent).
    [[nodiscard]] int multiplicity(double xi) const noexcept;

    /// Distinct knot values in ascending order.
    [[nodiscard]] std::vector<double> breakpoints() const;

private:
    int order_;
    std::vector<double> knots_;
};

/// Per-point output of `UnivariateBasis::eval_all_derivs`: the `order` active
/// functions first_active .. first_active + order - 1 and their derivatives.
struct BasisValues {
    int first_active = 0;
    int order = 0;
    int max_deriv = 0;
    std::vector<double> values;  // (max_deriv + 1) x order, derivative-major

    [[nodiscard]] double operator()(int deriv, int local) const {
        return values[static_cast<std::size_t>(deriv * order + local)];
    }
};

class UnivariateBasis {
public:
    explicit UnivariateBasis(KnotVector knots);

    [[nodiscard]] const KnotVector& knot_vector() const noexcept { return knots_; }
    [[nodiscard]] int order() const noexcept { return knots_.order(); }
    [[nodiscard]] int size() const noexcept { return knots_.num_functions(); }
    [[nodiscard]] int num_elements() const noexcept {
        return static_cast<int>(breakpoints_.size()) - 1;
    }
    [[nodiscard]] std::span<const double> breakpoints() const noexcept { return breakpoints_; }
    [[nodiscard]] double lower() const noexcept { return knots_.lower(); }
    [[nodiscard]] double upper() const noexcept { return knots_.upper(); }

    /// Convex hull of the support of function n: [t_n, t_{n+order}].
    [[nodiscard]] Interval csupp(int n) const;
    [[nodiscard]] std::vector<Interval> supports() const;

    /// Knot index i with t_i <= x < t_{i+1}; at x = upper() the last
    /// non-empty interval is used. Functions i-order+1 .. i are active.
    [[nodiscard]] int find_span(double x) const;

    /// Values and derivatives 0..max_deriv of the active functions at x.
    [[nodiscard]] BasisValues eval_all_derivs(double x, int max_deriv) const;

    /// Greville abscissae (knot averages); reproduce the identity map.
    [[nodiscard]] std::vector<double> greville() const;

private:
    KnotVector knots_;
    std::vector<double> breakpoints_;
};

/// max over points of #{n : x in csupp(n)}; 0 for an empty point list.
[[nodiscard]] int overlap_param(const UnivariateBasis& basis, std::span<const double> points);

/// Banded table of basis values at an ordered point list.
///
/// Column j holds the `order` active functions at points[j] starting at
/// first_active(j). The table also carries the convex supports of its
/// functions so it can stand alone after restriction to a sub-box.
class BasisEvalTable {
public:
    BasisEvalTable() = default;
    BasisEvalTable(int order, std::vector<Interval> supports, std::vector<double> points, int max_deriv,
                   std::vector<int> first_active, std::vector<double> values);

    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] int num_functions() const noexcept { return static_cast<int>(supports_.size()); }
    [[nodiscard]] int num_points() const noexcept { return static_cast<int>(points_.size()); }
    [[nodiscard]] int max_deriv() const noexcept { return max_deriv_; }
    [[nodiscard]] std::span<const double> points() const noexcept { return points_; }
    [[nodiscard]] std::span<const Interval> supports() const noexcept { return supports_; }
    [[nodiscard]] int first_active(int point) const { return first_active_[static_cast<std::size_t>(point)]; }

    /// The `order` values of derivative `deriv` at point j.
    [[nodiscard]] std::span<const double> column(int deriv, int point) const {
        return {values_.data() + offset(deriv, point), static_cast<std::size_t>(order_)};
    }
    [[nodiscard]] double local_value(int deriv, int point, int local) const {
        return values_[offset(deriv, point) + static_cast<std::size_t>(local)];
    }
    /// d^deriv phi_n at point j; exactly zero for inactive n.
    [[nodiscard]] double value(int deriv, int point, int n) const;

    /// Sub-table for points [point_begin, point_end) and functions
    /// [fn_begin, fn_end); function indices are renumbered from 0.
    [[nodiscard]] BasisEvalTable restrict(int point_begin, int point_end, int fn_begin, int fn_end) const;

private:
    [[nodiscard]] std::size_t offset(int deriv, int point) const {
        return (static_cast<std::size_t>(deriv) * points_.size() + static_cast<std::size_t>(point)) *
               static_cast<std::size_t>(order_);
    }

    int order_ = 0;
    std::vector<Interval> supports_;
    std::vector<double> points_;
    int max_deriv_ = 0;
    std::vector<int> first_active_;
    std::vector<double> values_;  // [deriv][point][local]
};

/// Tabulate values and derivatives 0..max_deriv at ascending points.
[[nodiscard]] BasisEvalTable tabulate(const UnivariateBasis& basis, std::span<const double> points, int max_deriv);

}  // namespace isosum
