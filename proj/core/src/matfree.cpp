#include "isosum/matfree.hpp"

#include <algorithm>
#include <string>

#include "isosum/errors.hpp"

namespace isosum {

namespace {

std::int64_t product(std::span<const std::int64_t> e, std::size_t begin, std::size_t end) {
    std::int64_t p = 1;
    for (std::size_t i = begin; i < end; ++i) {
        p *= e[i];
    }
    return p;
}

}  // namespace

std::vector<double> eval_field(std::span<const double> coeffs, std::span<const BasisEvalTable> tables,
                               std::span<const int> derivs, FlopCounter* counter, std::span<const int> order) {
    const int d = static_cast<int>(tables.size());
    if (d == 0 || static_cast<int>(derivs.size()) != d) {
        throw ArgumentError("eval_field: inconsistent dimension");
    }
    const auto ord = resolve_order(d, order);
    std::vector<std::int64_t> ext(static_cast<std::size_t>(d));
    std::int64_t n = 1;
    for (int i = 0; i < d; ++i) {
        ext[static_cast<std::size_t>(i)] = tables[static_cast<std::size_t>(i)].num_functions();
        n *= ext[static_cast<std::size_t>(i)];
        if (derivs[static_cast<std::size_t>(i)] < 0 ||
            derivs[static_cast<std::size_t>(i)] > tables[static_cast<std::size_t>(i)].max_deriv()) {
            throw UnsupportedDerivativeError("eval_field: derivative level not tabulated");
        }
    }
    if (static_cast<std::int64_t>(coeffs.size()) != n) {
        throw ArgumentError("eval_field: coefficient vector has length " + std::to_string(coeffs.size()) +
                            ", expected " + std::to_string(n));
    }
    std::vector<double> cur(coeffs.begin(), coeffs.end());
    std::vector<double> next;
    std::uint64_t flops = 0;
    for (const int i : ord) {
        const auto& tab = tables[static_cast<std::size_t>(i)];
        const int deriv = derivs[static_cast<std::size_t>(i)];
        const std::int64_t inner = product(ext, 0, static_cast<std::size_t>(i));
        const std::int64_t outer = product(ext, static_cast<std::size_t>(i) + 1, ext.size());
        const std::int64_t ni = ext[static_cast<std::size_t>(i)];
        const std::int64_t nx = tab.num_points();
        const int p = tab.order();
        next.assign(static_cast<std::size_t>(outer * nx * inner), 0.0);
        for (std::int64_t o = 0; o < outer; ++o) {
            for (std::int64_t x = 0; x < nx; ++x) {
                const int fa = tab.first_active(static_cast<int>(x));
                const auto col = tab.column(deriv, static_cast<int>(x));
                double* dst = next.data() + (o * nx + x) * inner;
                for (int l = 0; l < p; ++l) {
                    const double c = col[static_cast<std::size_t>(l)];
                    const double* src = cur.data() + (o * ni + fa + l) * inner;
                    for (std::int64_t a = 0; a < inner; ++a) {
                        dst[a] += c * src[a];
                    }
                }
            }
        }
        flops += static_cast<std::uint64_t>(outer * nx * p * inner);
        ext[static_cast<std::size_t>(i)] = nx;
        cur.swap(next);
    }
    if (counter != nullptr) {
        counter->field_eval += flops;
    }
    return cur;
}

std::vector<double> eval_field(std::span<const double> coeffs, const TensorGeneratingSystem& trial,
                               FlopCounter* counter) {
    return eval_field(coeffs, trial.factors(), trial.derivs(), counter);
}

FieldSamples eval_fields(std::span<const double> coeffs, const Discretization& disc,
                         std::span<const MultiIndex> derivs, FlopCounter* counter) {
    FieldSamples out;
    out.shape = disc.point_shape();
    std::vector<BasisEvalTable> tables;
    for (int i = 0; i < disc.dim(); ++i) {
        tables.push_back(disc.direction(i).trial);
    }
    for (const auto& t : derivs) {
        out.derivs.push_back(t);
        out.grids.push_back(eval_field(coeffs, tables, t, counter));
    }
    return out;
}

void contract_test(std::span<const double> h, const Discretization& disc, const MultiIndex& eta,
                   std::span<const int> order, std::span<double> v, FlopCounter& counter) {
    const int d = disc.dim();
    const auto ord = resolve_order(d, order);
    if (static_cast<std::int64_t>(h.size()) != disc.num_points() ||
        static_cast<std::int64_t>(v.size()) != disc.num_test()) {
        throw ArgumentError("contract_test: size mismatch");
    }
    std::vector<std::int64_t> ext(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        ext[static_cast<std::size_t>(i)] = disc.direction(i).num_points();
    }
    std::vector<double> cur(h.begin(), h.end());
    std::vector<double> next;
    std::uint64_t flops = 0;
    for (const int i : ord) {
        const auto& dd = disc.direction(i);
        const auto& tab = dd.test;
        const int deriv = eta[static_cast<std::size_t>(i)];
        const std::int64_t inner = product(ext, 0, static_cast<std::size_t>(i));
        const std::int64_t outer = product(ext, static_cast<std::size_t>(i) + 1, ext.size());
        const std::int64_t nx = ext[static_cast<std::size_t>(i)];
        const std::int64_t mi = tab.num_functions();
        const int q = tab.order();
        next.assign(static_cast<std::size_t>(outer * mi * inner), 0.0);
        for (std::int64_t o = 0; o < outer; ++o) {
            for (std::int64_t x = 0; x < nx; ++x) {
                const int fa = tab.first_active(static_cast<int>(x));
                const auto col = tab.column(deriv, static_cast<int>(x));
                const double w = dd.weights[static_cast<std::size_t>(x)];
                const double* src = cur.data() + (o * nx + x) * inner;
                for (int l = 0; l < q; ++l) {
                    const double c = w * col[static_cast<std::size_t>(l)];
                    double* dst = next.data() + (o * mi + fa + l) * inner;
                    for (std::int64_t a = 0; a < inner; ++a) {
                        dst[a] += c * src[a];
                    }
                }
            }
        }
        flops += static_cast<std::uint64_t>(outer * nx * q * inner);
        ext[static_cast<std::size_t>(i)] = mi;
        cur.swap(next);
    }
    counter.apply_contract += flops;
    for (std::size_t m = 0; m < v.size(); ++m) {
        v[m] += cur[m];
    }
    counter.apply_contract += v.size();
}

MatrixFreeOperator::MatrixFreeOperator(const AssemblyProblem& problem, std::vector<int> order)
    : MatrixFreeOperator(problem.discretize(), problem.coeff, std::move(order)) {}

MatrixFreeOperator::MatrixFreeOperator(Discretization disc, CoefficientField coeff, std::vector<int> order)
    : disc_(std::move(disc)), coeff_(std::move(coeff)), order_(resolve_order(disc_.dim(), order)) {
    const auto shape = disc_.point_shape();
    if (coeff_.dim() != disc_.dim() ||
        !std::equal(shape.begin(), shape.end(), coeff_.shape().begin(), coeff_.shape().end())) {
        throw ArgumentError("MatrixFreeOperator: coefficient grid does not match the discretization");
    }
    trial_used_.assign(static_cast<std::size_t>(coeff_.num_trial()), 0);
    test_used_.assign(static_cast<std::size_t>(coeff_.num_test()), 0);
    block_used_.assign(static_cast<std::size_t>(coeff_.num_trial() * coeff_.num_test()), 0);
    for (int s = 0; s < coeff_.num_test(); ++s) {
        for (int r = 0; r < coeff_.num_trial(); ++r) {
            if (!coeff_.slice_is_zero(s, r)) {
                block_used_[static_cast<std::size_t>(s * coeff_.num_trial() + r)] = 1;
                trial_used_[static_cast<std::size_t>(r)] = 1;
                test_used_[static_cast<std::size_t>(s)] = 1;
            }
        }
    }
}

std::vector<double> MatrixFreeOperator::apply(std::span<const double> u, FlopCounter& counter) const {
    if (static_cast<std::int64_t>(u.size()) != cols()) {
        throw ArgumentError("MatrixFreeOperator::apply: vector has length " + std::to_string(u.size()) +
                            ", expected " + std::to_string(cols()));
    }
    std::vector<double> v(static_cast<std::size_t>(rows()), 0.0);
    std::vector<BasisEvalTable> tables;
    for (int i = 0; i < disc_.dim(); ++i) {
        tables.push_back(disc_.direction(i).trial);
    }
    const int nr = coeff_.num_trial();
    std::vector<std::vector<double>> g(static_cast<std::size_t>(nr));
    for (int r = 0; r < nr; ++r) {
        if (trial_used_[static_cast<std::size_t>(r)] != 0) {
            g[static_cast<std::size_t>(r)] = eval_field(u, tables, coeff_.trial_deriv(r), &counter, order_);
        }
    }
    const std::int64_t nx = disc_.num_points();
    std::vector<double> h(static_cast<std::size_t>(nx));
    for (int s = 0; s < coeff_.num_test(); ++s) {
        if (test_used_[static_cast<std::size_t>(s)] == 0) {
            continue;
        }
        std::fill(h.begin(), h.end(), 0.0);
        for (int r = 0; r < nr; ++r) {
            if (block_used_[static_cast<std::size_t>(s * nr + r)] == 0) {
                continue;
            }
            const auto& gr = g[static_cast<std::size_t>(r)];
            for (std::int64_t x = 0; x < nx; ++x) {
                h[static_cast<std::size_t>(x)] += coeff_(x, s, r) * gr[static_cast<std::size_t>(x)];
            }
            counter.pointwise += static_cast<std::uint64_t>(nx);
        }
        contract_test(h, disc_, coeff_.test_deriv(s), order_, v, counter);
    }
    return v;
}

}  // namespace isosum
