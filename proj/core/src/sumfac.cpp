#include "isosum/sumfac.hpp"

#include <algorithm>
#include <string>

#include "isosum/errors.hpp"

namespace isosum {

namespace {

int find_deriv(std::span<const MultiIndex> set, const MultiIndex& t, const char* what) {
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (set[i] == t) {
            return static_cast<int>(i);
        }
    }
    throw ArgumentError(std::string(what) + " multi-index is not in the coefficient's derivative set");
}

// Position of every CSR slot inside the last-level buffer when directions are
// processed in `order`.
std::vector<std::int64_t> buffer_of_slot(const SparsityPattern& pattern, std::span<const int> order) {
    const auto dirs = pattern.directions();
    const std::size_t d = dirs.size();
    std::vector<std::int64_t> nat_stride(d, 1);
    std::vector<std::int64_t> proc_stride(d, 1);
    for (std::size_t i = 1; i < d; ++i) {
        nat_stride[i] = nat_stride[i - 1] * dirs[i - 1].size();
    }
    std::int64_t s = 1;
    for (std::size_t j = 0; j < d; ++j) {
        const auto dir = static_cast<std::size_t>(order[j]);
        proc_stride[dir] = s;
        s *= dirs[dir].size();
    }
    const auto kron = pattern.kron_of_slot();
    std::vector<std::int64_t> map(kron.size());
    for (std::size_t slot = 0; slot < kron.size(); ++slot) {
        std::int64_t b = 0;
        for (std::size_t i = 0; i < d; ++i) {
            const std::int64_t k = (kron[slot] / nat_stride[i]) % dirs[i].size();
            b += k * proc_stride[i];
        }
        map[slot] = b;
    }
    return map;
}

// Iterative form of the recursion: level j holds the partial block for
// directions order[0..j] at fixed points of the remaining directions.
void sumfac_kernel(const Discretization& disc, const CoefficientField& coeff, int s, int r,
                   std::span<const int> order, std::span<double> out, FlopCounter& counter) {
    const int d = disc.dim();
    const auto& theta = coeff.trial_deriv(r);
    const auto& eta = coeff.test_deriv(s);

    std::vector<const DirectionData*> dir(static_cast<std::size_t>(d));
    std::vector<int> nx(static_cast<std::size_t>(d));
    std::vector<int> th(static_cast<std::size_t>(d));
    std::vector<int> et(static_cast<std::size_t>(d));
    std::vector<std::int64_t> pstride(static_cast<std::size_t>(d));
    std::vector<std::int64_t> len(static_cast<std::size_t>(d));
    {
        std::vector<std::int64_t> nat(static_cast<std::size_t>(d), 1);
        for (int i = 1; i < d; ++i) {
            nat[static_cast<std::size_t>(i)] = nat[static_cast<std::size_t>(i) - 1] * disc.direction(i - 1).num_points();
        }
        std::int64_t l = 1;
        for (int j = 0; j < d; ++j) {
            const int a = order[static_cast<std::size_t>(j)];
            dir[static_cast<std::size_t>(j)] = &disc.direction(a);
            nx[static_cast<std::size_t>(j)] = disc.direction(a).num_points();
            th[static_cast<std::size_t>(j)] = theta[static_cast<std::size_t>(a)];
            et[static_cast<std::size_t>(j)] = eta[static_cast<std::size_t>(a)];
            pstride[static_cast<std::size_t>(j)] = nat[static_cast<std::size_t>(a)];
            l *= disc.direction(a).pairs.size();
            len[static_cast<std::size_t>(j)] = l;
        }
    }
    for (const int n : nx) {
        if (n == 0) {
            return;
        }
    }

    std::vector<std::vector<double>> level(static_cast<std::size_t>(d - 1));
    for (int j = 0; j + 1 < d; ++j) {
        level[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(len[static_cast<std::size_t>(j)]), 0.0);
    }
    auto buf = [&](int j) -> double* {
        return j == d - 1 ? out.data() : level[static_cast<std::size_t>(j)].data();
    };

    const double* fvals = coeff.values().data();
    const std::size_t fstride = coeff.index(1, 0, 0);
    const std::size_t foff = coeff.index(0, s, r);

    std::vector<int> t(static_cast<std::size_t>(d), 0);
    std::int64_t point = 0;
    std::uint64_t flops = 0;
    for (;;) {
        {
            const DirectionData& dd = *dir[0];
            const int x = t[0];
            const double f = fvals[static_cast<std::size_t>(point) * fstride + foff];
            const auto phi = dd.trial.column(th[0], x);
            const auto psi = dd.test.column(et[0], x);
            const auto act = dd.active_at(x);
            const int p = dd.trial.order();
            const int q = dd.test.order();
            const double wf = dd.weights[static_cast<std::size_t>(x)] * f;
            double* b0 = buf(0);
            for (int a = 0; a < p; ++a) {
                const double wa = wf * phi[static_cast<std::size_t>(a)];
                for (int b = 0; b < q; ++b) {
                    b0[act[static_cast<std::size_t>(a * q + b)]] += wa * psi[static_cast<std::size_t>(b)];
                }
            }
            flops += static_cast<std::uint64_t>(p * q);
        }
        // Push completed levels outward.
        int j = 0;
        while (j + 1 < d && t[static_cast<std::size_t>(j)] == nx[static_cast<std::size_t>(j)] - 1) {
            const DirectionData& dd = *dir[static_cast<std::size_t>(j) + 1];
            const int x = t[static_cast<std::size_t>(j) + 1];
            const auto phi = dd.trial.column(th[static_cast<std::size_t>(j) + 1], x);
            const auto psi = dd.test.column(et[static_cast<std::size_t>(j) + 1], x);
            const auto act = dd.active_at(x);
            const int p = dd.trial.order();
            const int q = dd.test.order();
            const double w = dd.weights[static_cast<std::size_t>(x)];
            const std::int64_t n = len[static_cast<std::size_t>(j)];
            double* src = buf(j);
            double* dst = buf(j + 1);
            for (int a = 0; a < p; ++a) {
                const double wa = w * phi[static_cast<std::size_t>(a)];
                for (int b = 0; b < q; ++b) {
                    const double c = wa * psi[static_cast<std::size_t>(b)];
                    double* dd_ptr = dst + static_cast<std::int64_t>(act[static_cast<std::size_t>(a * q + b)]) * n;
                    for (std::int64_t k = 0; k < n; ++k) {
                        dd_ptr[k] += c * src[k];
                    }
                }
            }
            flops += static_cast<std::uint64_t>(p * q) * static_cast<std::uint64_t>(n);
            std::fill(src, src + n, 0.0);
            ++j;
        }
        int i = 0;
        while (i < d) {
            point += pstride[static_cast<std::size_t>(i)];
            if (++t[static_cast<std::size_t>(i)] < nx[static_cast<std::size_t>(i)]) {
                break;
            }
            point -= pstride[static_cast<std::size_t>(i)] * nx[static_cast<std::size_t>(i)];
            t[static_cast<std::size_t>(i)] = 0;
            ++i;
        }
        if (i == d) {
            break;
        }
    }
    counter.block_update += flops;
}

}  // namespace

void AssemblyProblem::validate() const {
    const int d = dim();
    if (d == 0) {
        throw ArgumentError("AssemblyProblem: dimension must be positive");
    }
    if (static_cast<int>(test.size()) != d || quad.dim() != d || coeff.dim() != d) {
        throw ArgumentError("AssemblyProblem: inconsistent dimension across members");
    }
    const auto shape = quad.shape();
    if (!std::equal(shape.begin(), shape.end(), coeff.shape().begin(), coeff.shape().end())) {
        throw ArgumentError("AssemblyProblem: coefficient grid does not match the quadrature grid");
    }
    for (int i = 0; i < d; ++i) {
        const auto& rule = quad.rule(i);
        const auto& tb = trial[static_cast<std::size_t>(i)];
        const auto& sb = test[static_cast<std::size_t>(i)];
        if (!rule.empty() && (rule.points().front() < std::max(tb.lower(), sb.lower()) ||
                              rule.points().back() > std::min(tb.upper(), sb.upper()))) {
            throw DomainError("AssemblyProblem: quadrature points outside the parameter domain in direction " +
                              std::to_string(i));
        }
    }
    const auto tm = trial_max_deriv();
    const auto sm = test_max_deriv();
    for (int i = 0; i < d; ++i) {
        if (tm[static_cast<std::size_t>(i)] >= trial[static_cast<std::size_t>(i)].order() ||
            sm[static_cast<std::size_t>(i)] >= test[static_cast<std::size_t>(i)].order()) {
            throw UnsupportedDerivativeError("AssemblyProblem: derivative level >= order in direction " +
                                             std::to_string(i));
        }
    }
}

std::vector<int> AssemblyProblem::trial_max_deriv() const {
    std::vector<int> m(static_cast<std::size_t>(dim()), 0);
    for (const auto& t : coeff.trial_derivs()) {
        for (std::size_t i = 0; i < m.size(); ++i) {
            m[i] = std::max(m[i], t[i]);
        }
    }
    return m;
}

std::vector<int> AssemblyProblem::test_max_deriv() const {
    std::vector<int> m(static_cast<std::size_t>(dim()), 0);
    for (const auto& t : coeff.test_derivs()) {
        for (std::size_t i = 0; i < m.size(); ++i) {
            m[i] = std::max(m[i], t[i]);
        }
    }
    return m;
}

Discretization AssemblyProblem::discretize() const {
    validate();
    const auto tm = trial_max_deriv();
    const auto sm = test_max_deriv();
    return Discretization::build(trial, test, quad, tm, sm);
}

std::vector<double> assemble_block_values(const Discretization& disc, const CoefficientField& coeff, int s, int r,
                                          std::span<const int> order, FlopCounter& counter) {
    const auto ord = resolve_order(disc.dim(), order);
    const auto& pattern = *disc.pattern();
    std::vector<double> values(static_cast<std::size_t>(pattern.nnz()), 0.0);
    if (coeff.slice_is_zero(s, r)) {
        return values;
    }
    for (int i = 0; i < disc.dim(); ++i) {
        const auto& dd = disc.direction(i);
        if (coeff.trial_deriv(r)[static_cast<std::size_t>(i)] > dd.trial.max_deriv() ||
            coeff.test_deriv(s)[static_cast<std::size_t>(i)] > dd.test.max_deriv()) {
            throw UnsupportedDerivativeError("assemble_block: derivative level not tabulated");
        }
    }
    std::vector<double> buffer(static_cast<std::size_t>(pattern.nnz()), 0.0);
    sumfac_kernel(disc, coeff, s, r, ord, buffer, counter);
    const auto map = buffer_of_slot(pattern, ord);
    for (std::size_t k = 0; k < values.size(); ++k) {
        values[k] = buffer[static_cast<std::size_t>(map[k])];
    }
    return values;
}

std::vector<double> assemble_values(const Discretization& disc, const CoefficientField& coeff,
                                    std::span<const int> order, FlopCounter& counter) {
    std::vector<double> total(static_cast<std::size_t>(disc.pattern()->nnz()), 0.0);
    for (int s = 0; s < coeff.num_test(); ++s) {
        for (int r = 0; r < coeff.num_trial(); ++r) {
            if (coeff.slice_is_zero(s, r)) {
                continue;
            }
            const auto block = assemble_block_values(disc, coeff, s, r, order, counter);
            for (std::size_t k = 0; k < total.size(); ++k) {
                total[k] += block[k];
            }
        }
    }
    return total;
}

SparseMatrix assemble_block(const AssemblyProblem& problem, const MultiIndex& theta, const MultiIndex& eta,
                            FlopCounter& counter, std::span<const int> order) {
    problem.validate();
    for (int i = 0; i < problem.dim(); ++i) {
        if (static_cast<int>(theta.size()) != problem.dim() || static_cast<int>(eta.size()) != problem.dim()) {
            throw ArgumentError("assemble_block: multi-index has wrong dimension");
        }
        if (theta[static_cast<std::size_t>(i)] >= problem.trial[static_cast<std::size_t>(i)].order() ||
            eta[static_cast<std::size_t>(i)] >= problem.test[static_cast<std::size_t>(i)].order()) {
            throw UnsupportedDerivativeError("assemble_block: derivative level >= order");
        }
    }
    const int r = find_deriv(problem.coeff.trial_derivs(), theta, "trial");
    const int s = find_deriv(problem.coeff.test_derivs(), eta, "test");
    const Discretization disc = problem.discretize();
    return {disc.pattern(), assemble_block_values(disc, problem.coeff, s, r, order, counter)};
}

SparseMatrix assemble(const AssemblyProblem& problem, FlopCounter& counter, std::span<const int> order) {
    const Discretization disc = problem.discretize();
    return {disc.pattern(), assemble_values(disc, problem.coeff, order, counter)};
}

SparseMatrix assemble_naive(const AssemblyProblem& problem, FlopCounter& counter, std::int64_t op_budget) {
    const Discretization disc = problem.discretize();
    const auto& pattern = *disc.pattern();
    const int d = disc.dim();
    const auto& coeff = problem.coeff;
    const int blocks = coeff.num_test() * coeff.num_trial();

    // Points of direction i inside csupp(trial) ∩ csupp(test) for every pair.
    std::vector<std::vector<std::pair<int, int>>> range(static_cast<std::size_t>(d));
    double estimate = blocks;
    for (int i = 0; i < d; ++i) {
        const auto& dd = disc.direction(i);
        const auto pts = dd.trial.points();
        double sum = 0.0;
        for (int k = 0; k < dd.pairs.size(); ++k) {
            const Interval a = dd.trial.supports()[static_cast<std::size_t>(dd.pairs.trial(k))];
            const Interval b = dd.test.supports()[static_cast<std::size_t>(dd.pairs.test(k))];
            const double lo = std::max(a.lo, b.lo);
            const double hi = std::min(a.hi, b.hi);
            const int first = static_cast<int>(std::lower_bound(pts.begin(), pts.end(), lo) - pts.begin());
            const int last = static_cast<int>(std::upper_bound(pts.begin(), pts.end(), hi) - pts.begin());
            range[static_cast<std::size_t>(i)].emplace_back(first, std::max(first, last));
            sum += std::max(0, last - first);
        }
        estimate *= sum;
    }
    if (estimate > static_cast<double>(op_budget)) {
        throw CapacityError("assemble_naive: estimated " + std::to_string(static_cast<long long>(estimate)) +
                            " terms exceed the budget of " + std::to_string(op_budget));
    }

    std::vector<std::int64_t> nat(static_cast<std::size_t>(d), 1);
    std::vector<std::int64_t> pstride(static_cast<std::size_t>(d), 1);
    for (int i = 1; i < d; ++i) {
        nat[static_cast<std::size_t>(i)] = nat[static_cast<std::size_t>(i) - 1] * disc.direction(i - 1).pairs.size();
        pstride[static_cast<std::size_t>(i)] =
            pstride[static_cast<std::size_t>(i) - 1] * disc.direction(i - 1).num_points();
    }

    std::vector<double> values(static_cast<std::size_t>(pattern.nnz()), 0.0);
    std::vector<int> n(static_cast<std::size_t>(d));
    std::vector<int> m(static_cast<std::size_t>(d));
    std::vector<std::pair<int, int>> box(static_cast<std::size_t>(d));
    std::vector<int> t(static_cast<std::size_t>(d));
    std::uint64_t terms = 0;
    for (std::int64_t slot = 0; slot < pattern.nnz(); ++slot) {
        const std::int64_t kron = pattern.kron_of_slot()[static_cast<std::size_t>(slot)];
        bool empty = false;
        for (int i = 0; i < d; ++i) {
            const auto& dd = disc.direction(i);
            const int k = static_cast<int>((kron / nat[static_cast<std::size_t>(i)]) % dd.pairs.size());
            n[static_cast<std::size_t>(i)] = dd.pairs.trial(k);
            m[static_cast<std::size_t>(i)] = dd.pairs.test(k);
            box[static_cast<std::size_t>(i)] = range[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            empty = empty || box[static_cast<std::size_t>(i)].first == box[static_cast<std::size_t>(i)].second;
        }
        if (empty) {
            continue;
        }
        double acc = 0.0;
        for (int s = 0; s < coeff.num_test(); ++s) {
            const auto& eta = coeff.test_deriv(s);
            for (int r = 0; r < coeff.num_trial(); ++r) {
                const auto& theta = coeff.trial_deriv(r);
                for (int i = 0; i < d; ++i) {
                    t[static_cast<std::size_t>(i)] = box[static_cast<std::size_t>(i)].first;
                }
                for (;;) {
                    std::int64_t x = 0;
                    double prod = 1.0;
                    for (int i = 0; i < d; ++i) {
                        const auto& dd = disc.direction(i);
                        const int j = t[static_cast<std::size_t>(i)];
                        x += j * pstride[static_cast<std::size_t>(i)];
                        prod *= dd.weights[static_cast<std::size_t>(j)] *
                                dd.trial.value(theta[static_cast<std::size_t>(i)], j, n[static_cast<std::size_t>(i)]) *
                                dd.test.value(eta[static_cast<std::size_t>(i)], j, m[static_cast<std::size_t>(i)]);
                    }
                    acc += coeff(x, s, r) * prod;
                    ++terms;
                    int i = 0;
                    while (i < d) {
                        if (++t[static_cast<std::size_t>(i)] < box[static_cast<std::size_t>(i)].second) {
                            break;
                        }
                        t[static_cast<std::size_t>(i)] = box[static_cast<std::size_t>(i)].first;
                        ++i;
                    }
                    if (i == d) {
                        break;
                    }
                }
            }
        }
        values[static_cast<std::size_t>(slot)] = acc;
    }
    counter.naive += terms;
    return {disc.pattern(), std::move(values)};
}

DenseMatrix assemble_kronecker_dense(const AssemblyProblem& problem, std::int64_t budget) {
    const Discretization disc = problem.discretize();
    const int d = disc.dim();
    const double work = static_cast<double>(disc.num_trial()) * static_cast<double>(disc.num_test()) *
                        static_cast<double>(disc.num_points());
    if (work > static_cast<double>(budget)) {
        throw CapacityError("assemble_kronecker_dense: N*M*#X exceeds the dense budget");
    }
    const auto& coeff = problem.coeff;
    DenseMatrix total(disc.num_test(), disc.num_trial());
    for (int s = 0; s < coeff.num_test(); ++s) {
        for (int r = 0; r < coeff.num_trial(); ++r) {
            if (coeff.slice_is_zero(s, r)) {
                continue;
            }
            DenseMatrix qphi = identity_matrix(1);
            DenseMatrix qpsi = identity_matrix(1);
            for (int i = 0; i < d; ++i) {
                const auto& dd = disc.direction(i);
                const int nx = dd.num_points();
                DenseMatrix f(nx, dd.trial.num_functions());
                DenseMatrix g(nx, dd.test.num_functions());
                for (int j = 0; j < nx; ++j) {
                    for (int a = 0; a < dd.trial.num_functions(); ++a) {
                        f(j, a) = dd.trial.value(coeff.trial_deriv(r)[static_cast<std::size_t>(i)], j, a);
                    }
                    for (int b = 0; b < dd.test.num_functions(); ++b) {
                        g(j, b) = dd.weights[static_cast<std::size_t>(j)] *
                                  dd.test.value(coeff.test_deriv(s)[static_cast<std::size_t>(i)], j, b);
                    }
                }
                qphi = kron(f, qphi);
                qpsi = kron(g, qpsi);
            }
            for (std::int64_t x = 0; x < qphi.rows(); ++x) {
                const double fx = coeff(x, s, r);
                for (std::int64_t c = 0; c < qphi.cols(); ++c) {
                    qphi(x, c) *= fx;
                }
            }
            total += qpsi.transpose() * qphi;
        }
    }
    return total;
}

std::uint64_t predicted_block_flops(const Discretization& disc, std::span<const int> order) {
    const auto ord = resolve_order(disc.dim(), order);
    const int d = disc.dim();
    std::uint64_t total = 0;
    for (int i = 0; i < d; ++i) {
        std::uint64_t later = 1;
        for (int j = i + 1; j < d; ++j) {
            later *= static_cast<std::uint64_t>(disc.direction(ord[static_cast<std::size_t>(j)]).num_points());
        }
        std::uint64_t earlier = 1;
        for (int j = 0; j < i; ++j) {
            earlier *= static_cast<std::uint64_t>(disc.direction(ord[static_cast<std::size_t>(j)]).pairs.size());
        }
        const auto& dd = disc.direction(ord[static_cast<std::size_t>(i)]);
        total += later * static_cast<std::uint64_t>(dd.trial.order() * dd.test.order()) *
                 static_cast<std::uint64_t>(dd.num_points()) * earlier;
    }
    return total;
}

}  // namespace isosum
