#include "isosum/discretization.hpp"

#include <algorithm>
#include <numeric>

#include "isosum/errors.hpp"

namespace isosum {

Discretization::Discretization(std::vector<BasisEvalTable> trial, std::vector<BasisEvalTable> test,
                               std::vector<std::vector<double>> weights) {
    const std::size_t d = trial.size();
    if (d == 0 || test.size() != d || weights.size() != d) {
        throw ArgumentError("Discretization: inconsistent dimension");
    }
    dirs_.resize(d);
    std::vector<PairList1D> lists;
    lists.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
        auto& dir = dirs_[i];
        dir.trial = std::move(trial[i]);
        dir.test = std::move(test[i]);
        dir.weights = std::move(weights[i]);
        const int nx = dir.trial.num_points();
        if (dir.test.num_points() != nx || static_cast<int>(dir.weights.size()) != nx) {
            throw ArgumentError("Discretization: trial, test and weights disagree on the point count");
        }
        dir.pairs = nnz_pattern_1d(dir.trial.supports(), dir.test.supports(), dir.trial.points());
        const int p = dir.trial.order();
        const int q = dir.test.order();
        dir.active_pairs.resize(static_cast<std::size_t>(nx) * static_cast<std::size_t>(p * q));
        for (int j = 0; j < nx; ++j) {
            const int ft = dir.trial.first_active(j);
            const int fs = dir.test.first_active(j);
            for (int a = 0; a < p; ++a) {
                for (int b = 0; b < q; ++b) {
                    const int k = dir.pairs.find(ft + a, fs + b);
                    if (k < 0) {
                        throw ArgumentError("Discretization: active pair missing from the pattern");
                    }
                    dir.active_pairs[static_cast<std::size_t>((j * p + a) * q + b)] = k;
                }
            }
        }
        lists.push_back(dir.pairs);
    }
    pattern_ = std::make_shared<const SparsityPattern>(SparsityPattern::kronecker(std::move(lists)));
}

Discretization Discretization::build(std::span<const UnivariateBasis> trial, std::span<const UnivariateBasis> test,
                                     const TensorQuadrature& quad, std::span<const int> trial_max_deriv,
                                     std::span<const int> test_max_deriv) {
    const std::size_t d = trial.size();
    if (test.size() != d || static_cast<std::size_t>(quad.dim()) != d || trial_max_deriv.size() != d ||
        test_max_deriv.size() != d) {
        throw ArgumentError("Discretization::build: inconsistent dimension");
    }
    std::vector<BasisEvalTable> tt;
    std::vector<BasisEvalTable> st;
    std::vector<std::vector<double>> w;
    for (std::size_t i = 0; i < d; ++i) {
        const auto& rule = quad.rule(static_cast<int>(i));
        tt.push_back(tabulate(trial[i], rule.points(), trial_max_deriv[i]));
        st.push_back(tabulate(test[i], rule.points(), test_max_deriv[i]));
        w.emplace_back(rule.weights().begin(), rule.weights().end());
    }
    return {std::move(tt), std::move(st), std::move(w)};
}

std::vector<int> Discretization::point_shape() const {
    std::vector<int> s;
    for (const auto& dir : dirs_) {
        s.push_back(dir.num_points());
    }
    return s;
}

std::int64_t Discretization::num_points() const noexcept {
    std::int64_t n = 1;
    for (const auto& dir : dirs_) {
        n *= dir.num_points();
    }
    return n;
}

std::int64_t Discretization::num_trial() const noexcept {
    std::int64_t n = 1;
    for (const auto& dir : dirs_) {
        n *= dir.trial.num_functions();
    }
    return n;
}

std::int64_t Discretization::num_test() const noexcept {
    std::int64_t n = 1;
    for (const auto& dir : dirs_) {
        n *= dir.test.num_functions();
    }
    return n;
}

std::vector<int> resolve_order(int dim, std::span<const int> order) {
    std::vector<int> out(static_cast<std::size_t>(dim));
    if (order.empty()) {
        std::iota(out.begin(), out.end(), 0);
        return out;
    }
    if (static_cast<int>(order.size()) != dim) {
        throw ArgumentError("direction order has wrong length");
    }
    out.assign(order.begin(), order.end());
    std::vector<int> sorted = out;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < dim; ++i) {
        if (sorted[static_cast<std::size_t>(i)] != i) {
            throw ArgumentError("direction order is not a permutation");
        }
    }
    return out;
}

}  // namespace isosum
