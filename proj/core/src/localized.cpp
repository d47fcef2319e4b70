#include "isosum/localized.hpp"

#include <algorithm>
#include <future>
#include <numeric>

#include "isosum/errors.hpp"
#include "isosum/matfree.hpp"

namespace isosum {

std::string to_string(PartitionStrategy s) {
    switch (s) {
        case PartitionStrategy::global: return "global";
        case PartitionStrategy::element: return "element";
        case PartitionStrategy::macro: return "macro";
        case PartitionStrategy::narrow: return "narrow";
        case PartitionStrategy::custom: return "custom";
    }
    return "unknown";
}

PartitionStrategy parse_strategy(const std::string& name) {
    if (name == "global") {
        return PartitionStrategy::global;
    }
    if (name == "element") {
        return PartitionStrategy::element;
    }
    if (name == "macro") {
        return PartitionStrategy::macro;
    }
    if (name == "narrow") {
        return PartitionStrategy::narrow;
    }
    if (name == "custom") {
        return PartitionStrategy::custom;
    }
    throw ArgumentError("unknown partition strategy '" + name + "'");
}

Partition::Partition(std::vector<std::vector<double>> breakpoints, std::vector<Box> boxes, PartitionStrategy strategy,
                     int narrow_direction, bool fallback)
    : breakpoints_(std::move(breakpoints)), boxes_(std::move(boxes)), strategy_(strategy), narrow_(narrow_direction),
      fallback_(fallback) {
    const int d = dim();
    if (d == 0) {
        throw ArgumentError("Partition: dimension must be positive");
    }
    if (narrow_ >= d) {
        throw ArgumentError("Partition: narrow direction out of range");
    }
    std::vector<int> k(static_cast<std::size_t>(d));
    std::int64_t cells = 1;
    for (int i = 0; i < d; ++i) {
        k[static_cast<std::size_t>(i)] = num_elements(i);
        if (k[static_cast<std::size_t>(i)] < 1) {
            throw ArgumentError("Partition: every direction needs at least one element");
        }
        cells *= k[static_cast<std::size_t>(i)];
    }
    std::vector<char> covered(static_cast<std::size_t>(cells), 0);
    for (const Box& b : boxes_) {
        if (static_cast<int>(b.lo.size()) != d || static_cast<int>(b.hi.size()) != d) {
            throw ArgumentError("Partition: box has wrong dimension");
        }
        for (int i = 0; i < d; ++i) {
            if (b.lo[static_cast<std::size_t>(i)] < 0 || b.hi[static_cast<std::size_t>(i)] > k[static_cast<std::size_t>(i)] ||
                b.lo[static_cast<std::size_t>(i)] >= b.hi[static_cast<std::size_t>(i)]) {
                throw ArgumentError("Partition: box range out of bounds");
            }
        }
        std::vector<int> t(b.lo);
        for (;;) {
            std::int64_t flat = 0;
            std::int64_t stride = 1;
            for (int i = 0; i < d; ++i) {
                flat += t[static_cast<std::size_t>(i)] * stride;
                stride *= k[static_cast<std::size_t>(i)];
            }
            if (covered[static_cast<std::size_t>(flat)] != 0) {
                throw ArgumentError("Partition: boxes overlap");
            }
            covered[static_cast<std::size_t>(flat)] = 1;
            int i = 0;
            while (i < d) {
                if (++t[static_cast<std::size_t>(i)] < b.hi[static_cast<std::size_t>(i)]) {
                    break;
                }
                t[static_cast<std::size_t>(i)] = b.lo[static_cast<std::size_t>(i)];
                ++i;
            }
            if (i == d) {
                break;
            }
        }
    }
    if (std::find(covered.begin(), covered.end(), 0) != covered.end()) {
        throw ArgumentError("Partition: boxes do not cover every element");
    }
}

std::vector<std::pair<int, int>> chunk_elements(int elements, int size) {
    if (elements < 1 || size < 1) {
        throw ArgumentError("chunk_elements: element count and size must be positive");
    }
    const int count = std::max(1, elements / size);
    std::vector<std::pair<int, int>> out;
    for (int c = 0; c < count; ++c) {
        out.emplace_back(c * size, c + 1 == count ? elements : (c + 1) * size);
    }
    return out;
}

Partition make_partition(std::span<const UnivariateBasis> bases, PartitionStrategy strategy, std::span<const int> sizes,
                         int narrow_direction) {
    const int d = static_cast<int>(bases.size());
    if (d == 0) {
        throw ArgumentError("make_partition: no bases");
    }
    if (!sizes.empty() && static_cast<int>(sizes.size()) != d) {
        throw ArgumentError("make_partition: expected " + std::to_string(d) + " box sizes");
    }
    for (const int s : sizes) {
        if (s < 1) {
            throw ArgumentError("make_partition: box sizes must be positive");
        }
    }
    std::vector<int> s(static_cast<std::size_t>(d));
    int narrow = -1;
    for (int i = 0; i < d; ++i) {
        const auto& b = bases[static_cast<std::size_t>(i)];
        const auto ii = static_cast<std::size_t>(i);
        switch (strategy) {
            case PartitionStrategy::global: s[ii] = b.num_elements(); break;
            case PartitionStrategy::element: s[ii] = 1; break;
            case PartitionStrategy::macro:
            case PartitionStrategy::narrow: s[ii] = sizes.empty() ? b.order() : sizes[ii]; break;
            case PartitionStrategy::custom:
                if (sizes.empty()) {
                    throw ArgumentError("make_partition: custom strategy needs box sizes");
                }
                s[ii] = sizes[ii];
                break;
        }
    }
    if (strategy == PartitionStrategy::narrow) {
        narrow = narrow_direction < 0 ? d - 1 : narrow_direction;
        if (narrow >= d) {
            throw ArgumentError("make_partition: narrow direction out of range");
        }
        for (int i = 0; i < d; ++i) {
            if (i != narrow && s[static_cast<std::size_t>(i)] < bases[static_cast<std::size_t>(i)].order()) {
                throw ArgumentError("make_partition: narrow boxes need at least `order` elements outside the narrow direction");
            }
        }
        s[static_cast<std::size_t>(narrow)] = 1;
    }

    bool fallback = false;
    std::vector<std::vector<std::pair<int, int>>> chunks;
    std::vector<std::vector<double>> bps;
    for (int i = 0; i < d; ++i) {
        const auto& b = bases[static_cast<std::size_t>(i)];
        if (b.num_elements() < s[static_cast<std::size_t>(i)]) {
            fallback = true;
        }
        chunks.push_back(chunk_elements(b.num_elements(), s[static_cast<std::size_t>(i)]));
        bps.emplace_back(b.breakpoints().begin(), b.breakpoints().end());
    }
    std::vector<Box> boxes;
    std::vector<std::size_t> t(static_cast<std::size_t>(d), 0);
    for (;;) {
        Box box;
        for (int i = 0; i < d; ++i) {
            const auto& c = chunks[static_cast<std::size_t>(i)][t[static_cast<std::size_t>(i)]];
            box.lo.push_back(c.first);
            box.hi.push_back(c.second);
        }
        boxes.push_back(std::move(box));
        int i = 0;
        while (i < d) {
            if (++t[static_cast<std::size_t>(i)] < chunks[static_cast<std::size_t>(i)].size()) {
                break;
            }
            t[static_cast<std::size_t>(i)] = 0;
            ++i;
        }
        if (i == d) {
            break;
        }
    }
    return {std::move(bps), std::move(boxes), strategy, narrow, fallback};
}

std::pair<int, int> function_range(const UnivariateBasis& basis, double lo, double hi) {
    const auto knots = basis.knot_vector().knots();
    const int p = basis.order();
    const int n = basis.size();
    int begin = 0;
    while (begin < n && !(knots[static_cast<std::size_t>(begin + p)] > lo)) {
        ++begin;
    }
    int end = begin;
    while (end < n && knots[static_cast<std::size_t>(end)] < hi) {
        ++end;
    }
    return {begin, end};
}

namespace {

std::pair<double, double> box_extent(const Partition& partition, int box, int dir) {
    const auto bp = partition.breakpoints(dir);
    const Box& b = partition.box(box);
    return {bp[static_cast<std::size_t>(b.lo[static_cast<std::size_t>(dir)])],
            bp[static_cast<std::size_t>(b.hi[static_cast<std::size_t>(dir)])]};
}

std::vector<std::int64_t> selection_map(std::span<const UnivariateBasis> bases,
                                        const std::vector<std::pair<int, int>>& range) {
    const std::size_t d = bases.size();
    std::vector<int> local(d);
    std::vector<std::int64_t> stride(d, 1);
    std::int64_t total = 1;
    for (std::size_t i = 0; i < d; ++i) {
        local[i] = range[i].second - range[i].first;
        total *= local[i];
        if (i > 0) {
            stride[i] = stride[i - 1] * bases[i - 1].size();
        }
    }
    std::vector<std::int64_t> map(static_cast<std::size_t>(total));
    std::vector<int> t(d, 0);
    for (std::int64_t k = 0; k < total; ++k) {
        std::int64_t g = 0;
        for (std::size_t i = 0; i < d; ++i) {
            g += (range[i].first + t[i]) * stride[i];
        }
        map[static_cast<std::size_t>(k)] = g;
        for (std::size_t i = 0; i < d; ++i) {
            if (++t[i] < local[i]) {
                break;
            }
            t[i] = 0;
        }
    }
    return map;
}

}  // namespace

Ratio repetition_ratio(const Partition& partition, std::span<const UnivariateBasis> trial,
                       std::span<const UnivariateBasis> test) {
    const int d = partition.dim();
    if (static_cast<int>(trial.size()) != d || static_cast<int>(test.size()) != d) {
        throw ArgumentError("repetition_ratio: dimension mismatch");
    }
    std::int64_t n = 1;
    std::int64_t m = 1;
    for (int i = 0; i < d; ++i) {
        n *= trial[static_cast<std::size_t>(i)].size();
        m *= test[static_cast<std::size_t>(i)].size();
    }
    std::int64_t sum_n = 0;
    std::int64_t sum_m = 0;
    for (int b = 0; b < partition.num_boxes(); ++b) {
        std::int64_t nd = 1;
        std::int64_t md = 1;
        for (int i = 0; i < d; ++i) {
            const auto [lo, hi] = box_extent(partition, b, i);
            const auto tr = function_range(trial[static_cast<std::size_t>(i)], lo, hi);
            const auto sr = function_range(test[static_cast<std::size_t>(i)], lo, hi);
            nd *= tr.second - tr.first;
            md *= sr.second - sr.first;
        }
        sum_n += nd;
        sum_m += md;
    }
    Ratio a{sum_n, n};
    Ratio b{sum_m, m};
    Ratio r = a < b ? b : a;
    const std::int64_t g = std::gcd(r.num, r.den);
    if (g > 1) {
        r.num /= g;
        r.den /= g;
    }
    return r;
}

LocalSystem restrict(std::span<const UnivariateBasis> trial, std::span<const UnivariateBasis> test,
                     const TensorQuadrature& quad, const Partition& partition, int box) {
    const int d = partition.dim();
    if (box < 0 || box >= partition.num_boxes()) {
        throw ArgumentError("restrict: box index out of range");
    }
    if (static_cast<int>(trial.size()) != d || static_cast<int>(test.size()) != d || quad.dim() != d) {
        throw ArgumentError("restrict: dimension mismatch");
    }
    for (int i = 0; i < d; ++i) {
        const auto pb = partition.breakpoints(i);
        const auto tb = trial[static_cast<std::size_t>(i)].breakpoints();
        if (!std::equal(pb.begin(), pb.end(), tb.begin(), tb.end())) {
            throw ArgumentError("restrict: partition breakpoints differ from the trial space in direction " +
                                std::to_string(i));
        }
    }
    LocalSystem ls;
    ls.box = box;
    std::vector<QuadratureRule1D> rules;
    for (int i = 0; i < d; ++i) {
        const auto [lo, hi] = box_extent(partition, box, i);
        ls.trial_range.push_back(function_range(trial[static_cast<std::size_t>(i)], lo, hi));
        ls.test_range.push_back(function_range(test[static_cast<std::size_t>(i)], lo, hi));
        const auto pts = quad.rule(i).points();
        const bool last = partition.box(box).hi[static_cast<std::size_t>(i)] == partition.num_elements(i);
        const int pb = static_cast<int>(std::lower_bound(pts.begin(), pts.end(), lo) - pts.begin());
        const int pe = last ? static_cast<int>(pts.size())
                            : static_cast<int>(std::lower_bound(pts.begin(), pts.end(), hi) - pts.begin());
        ls.point_range.emplace_back(pb, pe);
        rules.push_back(quad.rule(i).slice(pb, pe));
    }
    ls.trial_map = selection_map(trial, ls.trial_range);
    ls.test_map = selection_map(test, ls.test_range);
    ls.quad = TensorQuadrature(std::move(rules));
    return ls;
}

Discretization local_discretization(const Discretization& global, const LocalSystem& local) {
    std::vector<BasisEvalTable> tt;
    std::vector<BasisEvalTable> st;
    std::vector<std::vector<double>> w;
    for (int i = 0; i < global.dim(); ++i) {
        const auto& dd = global.direction(i);
        const auto pr = local.point_range[static_cast<std::size_t>(i)];
        const auto tr = local.trial_range[static_cast<std::size_t>(i)];
        const auto sr = local.test_range[static_cast<std::size_t>(i)];
        tt.push_back(dd.trial.restrict(pr.first, pr.second, tr.first, tr.second));
        st.push_back(dd.test.restrict(pr.first, pr.second, sr.first, sr.second));
        w.emplace_back(dd.weights.begin() + pr.first, dd.weights.begin() + pr.second);
    }
    return {std::move(tt), std::move(st), std::move(w)};
}

std::vector<int> box_direction_order(const Partition& partition, DirectionPolicy policy) {
    std::vector<int> order(static_cast<std::size_t>(partition.dim()));
    std::iota(order.begin(), order.end(), 0);
    const int nd = partition.narrow_direction();
    if (policy == DirectionPolicy::automatic && nd >= 0) {
        order.erase(order.begin() + nd);
        order.push_back(nd);
    }
    return order;
}

namespace {

// Global tables carry every derivative level the bases allow, so boxes can
// serve any coefficient derivative set.
Discretization full_discretization(const AssemblyProblem& problem) {
    const int d = problem.dim();
    if (d == 0 || static_cast<int>(problem.test.size()) != d || problem.quad.dim() != d) {
        throw ArgumentError("localized: inconsistent problem dimension");
    }
    std::vector<int> tm;
    std::vector<int> sm;
    for (int i = 0; i < d; ++i) {
        tm.push_back(problem.trial[static_cast<std::size_t>(i)].order() - 1);
        sm.push_back(problem.test[static_cast<std::size_t>(i)].order() - 1);
    }
    return Discretization::build(problem.trial, problem.test, problem.quad, tm, sm);
}

CoefficientField box_coefficients(const AssemblyProblem& problem, const LocalSystem& local,
                                  const LocalizedOptions& options) {
    if (options.factory) {
        return options.factory(local.quad);
    }
    return problem.coeff.restrict(local.point_range);
}

// Runs `work(b)` for every box in waves of `threads`, then hands each result
// to `reduce` in ascending box order.
template <class Work, class Reduce>
void for_each_box(int boxes, int threads, Work work, Reduce reduce) {
    const int wave = std::max(1, threads);
    for (int first = 0; first < boxes; first += wave) {
        const int last = std::min(boxes, first + wave);
        if (wave == 1) {
            reduce(work(first));
            continue;
        }
        std::vector<std::future<decltype(work(0))>> jobs;
        for (int b = first; b < last; ++b) {
            jobs.push_back(std::async(std::launch::async, work, b));
        }
        for (auto& j : jobs) {
            reduce(j.get());
        }
    }
}

struct BoxMatrix {
    std::vector<double> values;
    std::vector<std::int64_t> slots;
    FlopCounter flops;
};

struct BoxVector {
    std::vector<double> values;
    std::vector<std::int64_t> rows;
    FlopCounter flops;
};

}  // namespace

SparseMatrix assemble_localized(const AssemblyProblem& problem, const Partition& partition, FlopCounter& counter,
                                const LocalizedOptions& options) {
    if (!options.factory) {
        problem.validate();
    }
    const Discretization global = full_discretization(problem);
    const auto& gpat = *global.pattern();
    const int d = global.dim();
    std::vector<std::int64_t> gstride(static_cast<std::size_t>(d), 1);
    for (int i = 1; i < d; ++i) {
        gstride[static_cast<std::size_t>(i)] = gstride[static_cast<std::size_t>(i) - 1] * global.direction(i - 1).pairs.size();
    }
    const auto order = box_direction_order(partition, options.policy);

    auto work = [&](int b) {
        BoxMatrix out;
        const LocalSystem local = restrict(problem.trial, problem.test, problem.quad, partition, b);
        const Discretization ldisc = local_discretization(global, local);
        const CoefficientField coeff = box_coefficients(problem, local, options);
        out.values = assemble_values(ldisc, coeff, order, out.flops);

        // local pair -> global pair, per direction
        std::vector<std::vector<std::int64_t>> gpair(static_cast<std::size_t>(d));
        std::vector<std::int64_t> lstride(static_cast<std::size_t>(d), 1);
        for (int i = 0; i < d; ++i) {
            const auto& lp = ldisc.direction(i).pairs;
            const auto& gp = global.direction(i).pairs;
            const int t0 = local.trial_range[static_cast<std::size_t>(i)].first;
            const int s0 = local.test_range[static_cast<std::size_t>(i)].first;
            for (int k = 0; k < lp.size(); ++k) {
                const int g = gp.find(lp.trial(k) + t0, lp.test(k) + s0);
                if (g < 0) {
                    throw ArgumentError("assemble_localized: local pair outside the global pattern");
                }
                gpair[static_cast<std::size_t>(i)].push_back(g);
            }
            if (i > 0) {
                lstride[static_cast<std::size_t>(i)] = lstride[static_cast<std::size_t>(i) - 1] * ldisc.direction(i - 1).pairs.size();
            }
        }
        const auto lkron = ldisc.pattern()->kron_of_slot();
        out.slots.resize(lkron.size());
        for (std::size_t k = 0; k < lkron.size(); ++k) {
            std::int64_t g = 0;
            for (int i = 0; i < d; ++i) {
                const std::int64_t local_pair =
                    (lkron[k] / lstride[static_cast<std::size_t>(i)]) % ldisc.direction(i).pairs.size();
                g += gpair[static_cast<std::size_t>(i)][static_cast<std::size_t>(local_pair)] *
                     gstride[static_cast<std::size_t>(i)];
            }
            out.slots[k] = gpat.slot_of_kron()[static_cast<std::size_t>(g)];
        }
        return out;
    };

    std::vector<double> values(static_cast<std::size_t>(gpat.nnz()), 0.0);
    for_each_box(partition.num_boxes(), options.threads, work, [&](BoxMatrix r) {
        for (std::size_t k = 0; k < r.values.size(); ++k) {
            values[static_cast<std::size_t>(r.slots[k])] += r.values[k];
        }
        r.flops.accumulate += r.values.size();
        counter += r.flops;
    });
    return {global.pattern(), std::move(values)};
}

std::vector<double> apply_localized(const AssemblyProblem& problem, const Partition& partition,
                                    std::span<const double> u, FlopCounter& counter, const LocalizedOptions& options) {
    if (!options.factory) {
        problem.validate();
    }
    const Discretization global = full_discretization(problem);
    if (static_cast<std::int64_t>(u.size()) != global.num_trial()) {
        throw ArgumentError("apply_localized: vector has length " + std::to_string(u.size()) + ", expected " +
                            std::to_string(global.num_trial()));
    }
    const auto order = box_direction_order(partition, options.policy);

    auto work = [&](int b) {
        BoxVector out;
        const LocalSystem local = restrict(problem.trial, problem.test, problem.quad, partition, b);
        const MatrixFreeOperator op(local_discretization(global, local), box_coefficients(problem, local, options),
                                    order);
        std::vector<double> ul(local.trial_map.size());
        for (std::size_t k = 0; k < ul.size(); ++k) {
            ul[k] = u[static_cast<std::size_t>(local.trial_map[k])];
        }
        out.values = op.apply(ul, out.flops);
        out.rows = local.test_map;
        return out;
    };

    std::vector<double> v(static_cast<std::size_t>(global.num_test()), 0.0);
    for_each_box(partition.num_boxes(), options.threads, work, [&](BoxVector r) {
        for (std::size_t k = 0; k < r.values.size(); ++k) {
            v[static_cast<std::size_t>(r.rows[k])] += r.values[k];
        }
        r.flops.accumulate += r.values.size();
        counter += r.flops;
    });
    return v;
}

}  // namespace isosum
