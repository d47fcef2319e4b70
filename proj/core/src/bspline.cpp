#include "isosum/bspline.hpp"

#include <algorithm>
#include <string>

#include "isosum/errors.hpp"

namespace isosum {

KnotVector::KnotVector(int order, std::vector<double> knots) : order_(order), knots_(std::move(knots)) {
    if (order_ < 1) {
        throw ArgumentError("KnotVector: order must be >= 1, got " + std::to_string(order_));
    }
    if (!std::is_sorted(knots_.begin(), knots_.end())) {
        throw ArgumentError("KnotVector: knots must be non-decreasing");
    }
    if (static_cast<int>(knots_.size()) < 2 * order_) {
        throw ArgumentError("KnotVector: need at least 2*order knots");
    }
    if (!(knots_.front() < knots_.back())) {
        throw ArgumentError("KnotVector: empty parameter domain");
    }
    if (multiplicity(knots_.front()) != order_ || multiplicity(knots_.back()) != order_) {
        throw ArgumentError("KnotVector: end knots must have multiplicity equal to the order");
    }
    for (auto it = knots_.begin(); it != knots_.end();) {
        const auto next = std::upper_bound(it, knots_.end(), *it);
        if (next - it > order_) {
            throw ArgumentError("KnotVector: knot multiplicity exceeds order");
        }
        it = next;
    }
}

KnotVector KnotVector::uniform(int order, int elements, double a, double b, int interior_multiplicity) {
    if (elements < 1) {
        throw ArgumentError("KnotVector::uniform: need at least one element");
    }
    std::vector<double> bp(static_cast<std::size_t>(elements) + 1);
    for (int e = 0; e <= elements; ++e) {
        bp[static_cast<std::size_t>(e)] = a + (b - a) * static_cast<double>(e) / static_cast<double>(elements);
    }
    bp.back() = b;
    return from_breakpoints(order, bp, interior_multiplicity);
}

KnotVector KnotVector::from_breakpoints(int order, std::span<const double> breakpoints, int interior_multiplicity) {
    if (breakpoints.size() < 2) {
        throw ArgumentError("KnotVector::from_breakpoints: need at least two breakpoints");
    }
    if (interior_multiplicity < 1 || interior_multiplicity > order) {
        throw ArgumentError("KnotVector::from_breakpoints: interior multiplicity out of range");
    }
    std::vector<double> knots;
    knots.insert(knots.end(), static_cast<std::size_t>(order), breakpoints.front());
    for (std::size_t i = 1; i + 1 < breakpoints.size(); ++i) {
        knots.insert(knots.end(), static_cast<std::size_t>(interior_multiplicity), breakpoints[i]);
    }
    knots.insert(knots.end(), static_cast<std::size_t>(order), breakpoints.back());
    return KnotVector(order, std::move(knots));
}

int KnotVector::multiplicity(double xi) const noexcept {
    const auto range = std::equal_range(knots_.begin(), knots_.end(), xi);
    return static_cast<int>(range.second - range.first);
}

std::vector<double> KnotVector::breakpoints() const {
    std::vector<double> bp;
    std::unique_copy(knots_.begin(), knots_.end(), std::back_inserter(bp));
    return bp;
}

UnivariateBasis::UnivariateBasis(KnotVector knots) : knots_(std::move(knots)), breakpoints_(knots_.breakpoints()) {}

Interval UnivariateBasis::csupp(int n) const {
    if (n < 0 || n >= size()) {
        throw ArgumentError("csupp: function index out of range");
    }
    const auto t = knots_.knots();
    return {t[static_cast<std::size_t>(n)], t[static_cast<std::size_t>(n + order())]};
}

std::vector<Interval> UnivariateBasis::supports() const {
    std::vector<Interval> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (int n = 0; n < size(); ++n) {
        out.push_back(csupp(n));
    }
    return out;
}

int UnivariateBasis::find_span(double x) const {
    if (!(x >= lower() && x <= upper())) {
        throw DomainError("find_span: x = " + std::to_string(x) + " outside [" + std::to_string(lower()) + ", " +
                          std::to_string(upper()) + "]");
    }
    const auto t = knots_.knots();
    if (x == upper()) {
        // last non-empty interval: the one ending at the first occurrence of b
        const auto first_b = std::lower_bound(t.begin(), t.end(), x);
        return static_cast<int>(first_b - t.begin()) - 1;
    }
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    return static_cast<int>(it - t.begin()) - 1;
}

BasisValues UnivariateBasis::eval_all_derivs(double x, int max_deriv) const {
    const int p = order();
    if (max_deriv < 0 || max_deriv >= p) {
        throw UnsupportedDerivativeError("eval_all_derivs: derivative order " + std::to_string(max_deriv) +
                                         " not supported for order " + std::to_string(p));
    }
    const int span = find_span(x);
    const int deg = p - 1;
    const auto t = knots_.knots();
    auto U = [&](int i) { return t[static_cast<std::size_t>(i)]; };

    // de Boor triangle: ndu[j][r] holds basis values (upper) and knot differences (lower)
    std::vector<double> ndu(static_cast<std::size_t>(p * p));
    auto NDU = [&](int r, int c) -> double& { return ndu[static_cast<std::size_t>(r * p + c)]; };
    std::vector<double> left(static_cast<std::size_t>(p)), right(static_cast<std::size_t>(p));
    NDU(0, 0) = 1.0;
    for (int j = 1; j <= deg; ++j) {
        left[static_cast<std::size_t>(j)] = x - U(span + 1 - j);
        right[static_cast<std::size_t>(j)] = U(span + j) - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            NDU(j, r) = right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
            const double temp = NDU(r, j - 1) / NDU(j, r);
            NDU(r, j) = saved + right[static_cast<std::size_t>(r + 1)] * temp;
            saved = left[static_cast<std::size_t>(j - r)] * temp;
        }
        NDU(j, j) = saved;
    }

    BasisValues out;
    out.first_active = span - deg;
    out.order = p;
    out.max_deriv = max_deriv;
    out.values.assign(static_cast<std::size_t>((max_deriv + 1) * p), 0.0);
    auto D = [&](int k, int j) -> double& { return out.values[static_cast<std::size_t>(k * p + j)]; };
    for (int j = 0; j <= deg; ++j) {
        D(0, j) = NDU(j, deg);
    }

    std::vector<double> a(static_cast<std::size_t>(2 * p));
    auto A = [&](int s, int j) -> double& { return a[static_cast<std::size_t>(s * p + j)]; };
    for (int r = 0; r <= deg; ++r) {
        int s1 = 0;
        int s2 = 1;
        A(0, 0) = 1.0;
        for (int k = 1; k <= max_deriv; ++k) {
            double d = 0.0;
            const int rk = r - k;
            const int pk = deg - k;
            if (r >= k) {
                A(s2, 0) = A(s1, 0) / NDU(pk + 1, rk);
                d = A(s2, 0) * NDU(rk, pk);
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : deg - r;
            for (int j = j1; j <= j2; ++j) {
                A(s2, j) = (A(s1, j) - A(s1, j - 1)) / NDU(pk + 1, rk + j);
                d += A(s2, j) * NDU(rk + j, pk);
            }
            if (r <= pk) {
                A(s2, k) = -A(s1, k - 1) / NDU(pk + 1, r);
                d += A(s2, k) * NDU(r, pk);
            }
            D(k, r) = d;
            std::swap(s1, s2);
        }
    }
    double factor = static_cast<double>(deg);
    for (int k = 1; k <= max_deriv; ++k) {
        for (int j = 0; j <= deg; ++j) {
            D(k, j) *= factor;
        }
        factor *= static_cast<double>(deg - k);
    }
    return out;
}

std::vector<double> UnivariateBasis::greville() const {
    const auto t = knots_.knots();
    const int p = order();
    std::vector<double> g(static_cast<std::size_t>(size()));
    for (int n = 0; n < size(); ++n) {
        if (p == 1) {
            g[static_cast<std::size_t>(n)] = 0.5 * (t[static_cast<std::size_t>(n)] + t[static_cast<std::size_t>(n + 1)]);
            continue;
        }
        double s = 0.0;
        for (int i = 1; i < p; ++i) {
            s += t[static_cast<std::size_t>(n + i)];
        }
        g[static_cast<std::size_t>(n)] = s / static_cast<double>(p - 1);
    }
    return g;
}

int overlap_param(const UnivariateBasis& basis, std::span<const double> points) {
    int best = 0;
    const auto t = basis.knot_vector().knots();
    const int p = basis.order();
    for (const double x : points) {
        if (!(x >= basis.lower() && x <= basis.upper())) {
            throw DomainError("overlap_param: point outside the basis domain");
        }
        // csupp(n) = [t_n, t_{n+p}] contains x  <=>  t_n <= x and t_{n+p} >= x
        const int last = static_cast<int>(std::upper_bound(t.begin(), t.end(), x) - t.begin()) - 1;
        const int first_hi = static_cast<int>(std::lower_bound(t.begin(), t.end(), x) - t.begin());
        const int lo_n = std::max(0, first_hi - p);
        const int hi_n = std::min(basis.size() - 1, last);
        best = std::max(best, hi_n - lo_n + 1);
    }
    return best;
}

BasisEvalTable::BasisEvalTable(int order, std::vector<Interval> supports, std::vector<double> points, int max_deriv,
                               std::vector<int> first_active, std::vector<double> values)
    : order_(order),
      supports_(std::move(supports)),
      points_(std::move(points)),
      max_deriv_(max_deriv),
      first_active_(std::move(first_active)),
      values_(std::move(values)) {
    if (first_active_.size() != points_.size() ||
        values_.size() != static_cast<std::size_t>(max_deriv_ + 1) * points_.size() * static_cast<std::size_t>(order_)) {
        throw ArgumentError("BasisEvalTable: inconsistent table dimensions");
    }
}

double BasisEvalTable::value(int deriv, int point, int n) const {
    const int local = n - first_active(point);
    if (local < 0 || local >= order_) {
        return 0.0;
    }
    return local_value(deriv, point, local);
}

BasisEvalTable BasisEvalTable::restrict(int point_begin, int point_end, int fn_begin, int fn_end) const {
    if (point_begin < 0 || point_end > num_points() || point_begin > point_end || fn_begin < 0 ||
        fn_end > num_functions() || fn_begin > fn_end) {
        throw ArgumentError("BasisEvalTable::restrict: range out of bounds");
    }
    const std::size_t np = static_cast<std::size_t>(point_end - point_begin);
    const std::size_t p = static_cast<std::size_t>(order_);
    std::vector<double> pts(points_.begin() + point_begin, points_.begin() + point_end);
    std::vector<Interval> sup(supports_.begin() + fn_begin, supports_.begin() + fn_end);
    std::vector<int> first(np);
    std::vector<double> vals(static_cast<std::size_t>(max_deriv_ + 1) * np * p);
    for (std::size_t j = 0; j < np; ++j) {
        const int src = point_begin + static_cast<int>(j);
        const int f = first_active(src) - fn_begin;
        if (f < 0 || f + order_ > fn_end - fn_begin) {
            throw ArgumentError("BasisEvalTable::restrict: active functions leave the function range");
        }
        first[j] = f;
        for (int k = 0; k <= max_deriv_; ++k) {
            const auto col = column(k, src);
            std::copy(col.begin(), col.end(), vals.begin() + static_cast<std::ptrdiff_t>((static_cast<std::size_t>(k) * np + j) * p));
        }
    }
    return {order_, std::move(sup), std::move(pts), max_deriv_, std::move(first), std::move(vals)};
}

BasisEvalTable tabulate(const UnivariateBasis& basis, std::span<const double> points, int max_deriv) {
    if (!std::is_sorted(points.begin(), points.end())) {
        throw ArgumentError("tabulate: points must be sorted ascending");
    }
    if (max_deriv < 0 || max_deriv >= basis.order()) {
        throw UnsupportedDerivativeError("tabulate: derivative order " + std::to_string(max_deriv) +
                                         " not supported for order " + std::to_string(basis.order()));
    }
    const std::size_t np = points.size();
    const std::size_t p = static_cast<std::size_t>(basis.order());
    std::vector<int> first(np);
    std::vector<double> vals(static_cast<std::size_t>(max_deriv + 1) * np * p);
    for (std::size_t j = 0; j < np; ++j) {
        const BasisValues bv = basis.eval_all_derivs(points[j], max_deriv);
        first[j] = bv.first_active;
        for (int k = 0; k <= max_deriv; ++k) {
            for (std::size_t a = 0; a < p; ++a) {
                vals[(static_cast<std::size_t>(k) * np + j) * p + a] = bv(k, static_cast<int>(a));
            }
        }
    }
    return {basis.order(), basis.supports(), std::vector<double>(points.begin(), points.end()), max_deriv,
            std::move(first), std::move(vals)};
}

}  // namespace isosum
