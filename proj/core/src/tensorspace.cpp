#include "isosum/tensorspace.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "isosum/errors.hpp"

namespace isosum {

LexOrdering::LexOrdering(std::vector<int> dims) : dims_(std::move(dims)) {
    prefix_.assign(dims_.size() + 1, 1);
    for (std::size_t d = 0; d < dims_.size(); ++d) {
        if (dims_[d] < 0) {
            throw ArgumentError("LexOrdering: negative extent");
        }
        prefix_[d + 1] = prefix_[d] * dims_[d];
    }
}

std::int64_t LexOrdering::flatten(std::span<const int> multi) const {
    if (multi.size() != dims_.size()) {
        throw ArgumentError("LexOrdering::flatten: dimension mismatch");
    }
    std::int64_t flat = 0;
    for (std::size_t d = 0; d < dims_.size(); ++d) {
        if (multi[d] < 0 || multi[d] >= dims_[d]) {
            throw ArgumentError("LexOrdering::flatten: index out of range");
        }
        flat += multi[d] * prefix_[d];
    }
    return flat;
}

std::vector<int> LexOrdering::split(std::int64_t flat) const {
    if (flat < 0 || flat >= size()) {
        throw ArgumentError("LexOrdering::split: index out of range");
    }
    std::vector<int> multi(dims_.size());
    for (std::size_t d = 0; d < dims_.size(); ++d) {
        multi[d] = static_cast<int>((flat % prefix_[d + 1]) / prefix_[d]);
    }
    return multi;
}

int LexOrdering::component(std::int64_t flat, int dir) const {
    const auto d = static_cast<std::size_t>(dir);
    return static_cast<int>((flat % prefix_[d + 1]) / prefix_[d]);
}

PairList1D::PairList1D(int num_trial, int num_test, std::vector<std::pair<int, int>> pairs)
    : num_trial_(num_trial), num_test_(num_test) {
    for (const auto& [n, m] : pairs) {
        if (n < 0 || n >= num_trial || m < 0 || m >= num_test) {
            throw ArgumentError("PairList1D: pair index out of range");
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    row_ptr_.assign(static_cast<std::size_t>(num_test) + 1, 0);
    trial_.reserve(pairs.size());
    test_.reserve(pairs.size());
    for (const auto& [n, m] : pairs) {
        trial_.push_back(n);
        test_.push_back(m);
        ++row_ptr_[static_cast<std::size_t>(m) + 1];
    }
    for (std::size_t m = 0; m < static_cast<std::size_t>(num_test); ++m) {
        row_ptr_[m + 1] += row_ptr_[m];
    }
}

int PairList1D::find(int n, int m) const {
    if (m < 0 || m >= num_test_) {
        return -1;
    }
    const auto b = trial_.begin() + row_begin(m);
    const auto e = trial_.begin() + row_end(m);
    const auto it = std::lower_bound(b, e, n);
    return (it != e && *it == n) ? static_cast<int>(it - trial_.begin()) : -1;
}

std::vector<std::pair<int, int>> PairList1D::pairs() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(trial_.size());
    for (std::size_t k = 0; k < trial_.size(); ++k) {
        out.emplace_back(trial_[k], test_[k]);
    }
    return out;
}

namespace {

// Leftmost point of csupp ∩ X, as an index into `points`, or -1.
int leftmost_point(const Interval& s, std::span<const double> points) {
    const auto it = std::lower_bound(points.begin(), points.end(), s.lo);
    if (it == points.end() || *it > s.hi) {
        return -1;
    }
    return static_cast<int>(it - points.begin());
}

}  // namespace

PairList1D nnz_pattern_1d(std::span<const Interval> trial_supports, std::span<const Interval> test_supports,
                          std::span<const double> points) {
    if (!std::is_sorted(points.begin(), points.end())) {
        throw ArgumentError("nnz_pattern_1d: points must be sorted");
    }
    std::vector<std::pair<int, int>> pairs;
    const int N = static_cast<int>(trial_supports.size());
    const int M = static_cast<int>(test_supports.size());
    for (int n = 0; n < N; ++n) {
        const int j = leftmost_point(trial_supports[static_cast<std::size_t>(n)], points);
        if (j < 0) {
            continue;
        }
        const double x = points[static_cast<std::size_t>(j)];
        for (int m = 0; m < M; ++m) {
            if (test_supports[static_cast<std::size_t>(m)].contains(x)) {
                pairs.emplace_back(n, m);
            }
        }
    }
    for (int m = 0; m < M; ++m) {
        const int j = leftmost_point(test_supports[static_cast<std::size_t>(m)], points);
        if (j < 0) {
            continue;
        }
        const double x = points[static_cast<std::size_t>(j)];
        for (int n = 0; n < N; ++n) {
            if (trial_supports[static_cast<std::size_t>(n)].contains(x)) {
                pairs.emplace_back(n, m);
            }
        }
    }
    return {N, M, std::move(pairs)};
}

PairList1D nnz_pattern_1d(const UnivariateBasis& trial, const UnivariateBasis& test, const QuadratureRule1D& rule) {
    const auto ts = trial.supports();
    const auto ss = test.supports();
    return nnz_pattern_1d(ts, ss, rule.points());
}

std::int64_t nnz_count_exact(const UnivariateBasis& trial, const UnivariateBasis& test) {
    if (trial.lower() != test.lower() || trial.upper() != test.upper()) {
        throw ArgumentError("nnz_count_exact: bases must share the parameter interval");
    }
    const auto& kt = trial.knot_vector();
    const auto& ks = test.knot_vector();
    std::vector<double> xi;
    std::set_union(trial.breakpoints().begin(), trial.breakpoints().end(), test.breakpoints().begin(),
                   test.breakpoints().end(), std::back_inserter(xi));
    std::int64_t overlap = 0;
    for (const double v : xi) {
        if (v == trial.upper()) {
            continue;
        }
        overlap += static_cast<std::int64_t>(kt.multiplicity(v)) * ks.multiplicity(v);
    }
    return static_cast<std::int64_t>(test.order()) * trial.size() +
           static_cast<std::int64_t>(trial.order()) * test.size() - overlap;
}

TensorGeneratingSystem::TensorGeneratingSystem(std::vector<BasisEvalTable> factors, std::vector<int> derivs)
    : factors_(std::move(factors)), derivs_(std::move(derivs)) {
    if (factors_.size() != derivs_.size()) {
        throw ArgumentError("TensorGeneratingSystem: one derivative level per direction required");
    }
    std::vector<int> nf;
    std::vector<int> np;
    for (std::size_t d = 0; d < factors_.size(); ++d) {
        if (derivs_[d] < 0 || derivs_[d] > factors_[d].max_deriv()) {
            throw UnsupportedDerivativeError("TensorGeneratingSystem: derivative level not tabulated");
        }
        nf.push_back(factors_[d].num_functions());
        np.push_back(factors_[d].num_points());
    }
    functions_ = LexOrdering(std::move(nf));
    points_ = LexOrdering(std::move(np));
}

double TensorGeneratingSystem::value(std::int64_t n, std::int64_t point) const {
    double v = 1.0;
    for (int d = 0; d < dim(); ++d) {
        v *= factor(d).value(deriv(d), points_.component(point, d), functions_.component(n, d));
    }
    return v;
}

std::int64_t tensor_pattern_size(std::span<const std::int64_t> counts) {
    constexpr std::int64_t kMaxSlots = std::int64_t{1} << 40;
    std::int64_t total = 1;
    for (const std::int64_t c : counts) {
        if (c < 0) {
            throw ArgumentError("tensor_pattern_size: negative count");
        }
        if (c != 0 && total > kMaxSlots / c) {
            throw CapacityError("tensor pattern exceeds the addressable number of entries");
        }
        total *= c;
    }
    return total;
}

SparsityPattern::SparsityPattern(std::int64_t rows, std::int64_t cols, std::vector<std::int64_t> row_ptr,
                                 std::vector<std::int64_t> col_idx)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)) {
    if (static_cast<std::int64_t>(row_ptr_.size()) != rows_ + 1 || row_ptr_.front() != 0 ||
        row_ptr_.back() != static_cast<std::int64_t>(col_idx_.size())) {
        throw ArgumentError("SparsityPattern: malformed row pointer");
    }
    for (std::int64_t r = 0; r < rows_; ++r) {
        const auto b = col_idx_.begin() + row_ptr_[static_cast<std::size_t>(r)];
        const auto e = col_idx_.begin() + row_ptr_[static_cast<std::size_t>(r) + 1];
        if (b > e || !std::is_sorted(b, e) || std::adjacent_find(b, e) != e) {
            throw ArgumentError("SparsityPattern: columns must be strictly ascending within a row");
        }
        if (b != e && (*b < 0 || *(e - 1) >= cols_)) {
            throw ArgumentError("SparsityPattern: column index out of range");
        }
    }
}

SparsityPattern SparsityPattern::kronecker(std::vector<PairList1D> directions) {
    const std::size_t d = directions.size();
    std::vector<std::int64_t> counts;
    std::vector<int> rows_dims;
    std::vector<int> cols_dims;
    for (const auto& pl : directions) {
        counts.push_back(pl.size());
        rows_dims.push_back(pl.num_test());
        cols_dims.push_back(pl.num_trial());
    }
    const std::int64_t total = tensor_pattern_size(counts);
    const LexOrdering rows(rows_dims);
    const LexOrdering cols(cols_dims);
    std::vector<std::int64_t> kstride(d + 1, 1);
    for (std::size_t i = 0; i < d; ++i) {
        kstride[i + 1] = kstride[i] * counts[i];
    }

    std::vector<std::int64_t> row_ptr(static_cast<std::size_t>(rows.size()) + 1, 0);
    std::vector<std::int64_t> col_idx;
    std::vector<std::int64_t> kron_of_slot;
    col_idx.reserve(static_cast<std::size_t>(total));
    kron_of_slot.reserve(static_cast<std::size_t>(total));

    std::vector<int> begin(d), end(d), k(d);
    for (std::int64_t m = 0; m < rows.size(); ++m) {
        bool empty = false;
        for (std::size_t i = 0; i < d; ++i) {
            const int mi = rows.component(m, static_cast<int>(i));
            begin[i] = directions[i].row_begin(mi);
            end[i] = directions[i].row_end(mi);
            k[i] = begin[i];
            empty = empty || begin[i] == end[i];
        }
        if (!empty && d > 0) {
            // odometer with the last direction outermost: columns come out ascending
            while (true) {
                std::int64_t col = 0;
                std::int64_t kron = 0;
                for (std::size_t i = 0; i < d; ++i) {
                    col += directions[i].trial(k[i]) * cols.prefix(static_cast<int>(i));
                    kron += k[i] * kstride[i];
                }
                col_idx.push_back(col);
                kron_of_slot.push_back(kron);
                std::size_t i = 0;
                while (i < d && ++k[i] == end[i]) {
                    k[i] = begin[i];
                    ++i;
                }
                if (i == d) {
                    break;
                }
            }
        }
        row_ptr[static_cast<std::size_t>(m) + 1] = static_cast<std::int64_t>(col_idx.size());
    }

    SparsityPattern out(rows.size(), cols.size(), std::move(row_ptr), std::move(col_idx));
    out.slot_of_kron_.assign(kron_of_slot.size(), -1);
    for (std::size_t s = 0; s < kron_of_slot.size(); ++s) {
        out.slot_of_kron_[static_cast<std::size_t>(kron_of_slot[s])] = static_cast<std::int64_t>(s);
    }
    out.kron_of_slot_ = std::move(kron_of_slot);
    out.directions_ = std::move(directions);
    return out;
}

std::int64_t SparsityPattern::find(std::int64_t row, std::int64_t col) const {
    if (row < 0 || row >= rows_) {
        return -1;
    }
    const auto b = col_idx_.begin() + row_ptr_[static_cast<std::size_t>(row)];
    const auto e = col_idx_.begin() + row_ptr_[static_cast<std::size_t>(row) + 1];
    const auto it = std::lower_bound(b, e, col);
    return (it != e && *it == col) ? static_cast<std::int64_t>(it - col_idx_.begin()) : -1;
}

SparsityPattern tensor_pattern(const TensorGeneratingSystem& trial, const TensorGeneratingSystem& test,
                               const TensorQuadrature& quad) {
    if (trial.dim() != test.dim() || trial.dim() != quad.dim()) {
        throw ArgumentError("tensor_pattern: dimension mismatch");
    }
    std::vector<PairList1D> dirs;
    for (int d = 0; d < trial.dim(); ++d) {
        dirs.push_back(nnz_pattern_1d(trial.factor(d).supports(), test.factor(d).supports(), quad.rule(d).points()));
    }
    return SparsityPattern::kronecker(std::move(dirs));
}

}  // namespace isosum
