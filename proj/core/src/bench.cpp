#include "isosum/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <random>

#include "isosum/matfree.hpp"

namespace isosum {

double spline_dimension(int p, std::span<const int> elements) {
    double n = 1.0;
    for (const int k : elements) {
        n *= static_cast<double>(p + k - 1);
    }
    return n;
}

ExponentFit fit_exponent(std::span<const int> p, std::span<const double> cost,
                         std::span<const std::vector<int>> elements) {
    const std::size_t m = p.size();
    if (cost.size() != m || elements.size() != m) {
        throw ArgumentError("fit_exponent: inconsistent input lengths");
    }
    std::vector<int> distinct(p.begin(), p.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) {
        throw ArgumentError("fit_exponent: need at least three distinct orders");
    }
    std::vector<double> x(m);
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (p[i] < 1 || !(cost[i] > 0.0)) {
            throw ArgumentError("fit_exponent: orders and costs must be positive");
        }
        x[i] = std::log(static_cast<double>(p[i]));
        y[i] = std::log(cost[i] / spline_dimension(p[i], elements[i]));
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    ExponentFit fit;
    fit.e = sxy / sxx;
    const double a = my - fit.e * mx;
    fit.c = std::exp(a);
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = y[i] - (a + fit.e * x[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / static_cast<double>(m));
    return fit;
}

ExponentFit fit_exponent(std::span<const BenchRecord> records, FlopSeries series) {
    std::vector<int> p;
    std::vector<double> cost;
    std::vector<std::vector<int>> elements;
    for (const auto& r : records) {
        if (!records.empty() && (r.strategy != records.front().strategy || r.d != records.front().d)) {
            throw ArgumentError("fit_exponent: records mix strategies or dimensions");
        }
        p.push_back(r.p);
        cost.push_back(static_cast<double>(series == FlopSeries::assemble ? r.flops_assemble : r.flops_apply));
        elements.push_back(r.elements);
    }
    return fit_exponent(p, cost, elements);
}

BenchRecord run_once(const ProblemSpec& spec, bool measure_apply) {
    const BuiltProblem built = build_problem(spec);
    const AssemblyProblem& problem = built.problem;
    BenchRecord rec;
    rec.strategy = spec.strategy;
    rec.d = spec.dim;
    rec.p = spec.orders().front();
    for (const auto& b : problem.trial) {
        rec.elements.push_back(b.num_elements());
    }
    rec.n = 1;
    for (const auto& b : problem.trial) {
        rec.n *= b.size();
    }
    rec.points = problem.quad.size();
    rec.residual = std::numeric_limits<double>::quiet_NaN();

    std::vector<double> u(static_cast<std::size_t>(rec.n));
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (auto& v : u) {
        v = dist(rng);
    }

    FlopCounter fa;
    FlopCounter fv;
    const auto t0 = std::chrono::steady_clock::now();
    if (spec.strategy == "naive") {
        (void)assemble_naive(problem, fa);
        rec.flops_assemble = fa.naive;
    } else if (spec.strategy == "global") {
        (void)assemble(problem, fa);
        rec.flops_assemble = fa.block_update;
    } else {
        const Partition part = build_partition(spec, problem);
        LocalizedOptions opt;
        opt.policy = parse_policy(spec.direction_policy);
        opt.threads = spec.threads;
        (void)assemble_localized(problem, part, fa, opt);
        rec.flops_assemble = fa.block_update;
    }
    const auto t1 = std::chrono::steady_clock::now();
    rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    if (measure_apply) {
        if (spec.strategy == "naive" || spec.strategy == "global") {
            const MatrixFreeOperator op(problem);
            (void)op.apply(u, fv);
        } else {
            const Partition part = build_partition(spec, problem);
            LocalizedOptions opt;
            opt.policy = parse_policy(spec.direction_policy);
            opt.threads = spec.threads;
            (void)apply_localized(problem, part, u, fv, opt);
        }
        rec.flops_apply = fv.apply_contract;
    }
    return rec;
}

std::vector<BenchRecord> run_sweep(const SweepOptions& options) {
    std::vector<BenchRecord> out;
    std::map<std::string, std::vector<std::size_t>> groups;
    for (const auto& strategy : options.strategies) {
        for (int p = options.p_min; p <= options.p_max; ++p) {
            ProblemSpec spec = options.base;
            spec.strategy = strategy;
            spec.order = {p};
            groups[strategy].push_back(out.size());
            out.push_back(run_once(spec, options.measure_apply));
        }
    }
    for (const auto& [strategy, idx] : groups) {
        if (idx.size() < 3) {
            continue;
        }
        std::vector<BenchRecord> recs;
        for (const auto i : idx) {
            recs.push_back(out[i]);
        }
        const double res = fit_exponent(recs).residual;
        for (const auto i : idx) {
            out[i].residual = res;
        }
    }
    return out;
}

std::string csv_header() {
    return "strategy,d,p,elements,N,points,flops_assemble,flops_apply,wall_ms,residual";
}

void write_csv(std::ostream& out, std::span<const BenchRecord> records) {
    out << csv_header() << '\n';
    char buf[64];
    for (const auto& r : records) {
        std::string el;
        for (std::size_t i = 0; i < r.elements.size(); ++i) {
            el += (i ? "x" : "") + std::to_string(r.elements[i]);
        }
        out << r.strategy << ',' << r.d << ',' << r.p << ',' << el << ',' << r.n << ',' << r.points << ','
            << r.flops_assemble << ',' << r.flops_apply << ',';
        std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
        out << buf << ',';
        if (!std::isnan(r.residual)) {
            std::snprintf(buf, sizeof buf, "%.6e", r.residual);
            out << buf;
        }
        out << '\n';
    }
}

double VerifyReport::max_error() const {
    double m = 0.0;
    for (const auto& [name, err] : errors) {
        m = std::max(m, err);
    }
    return m;
}

VerifyReport verify_problem(const ProblemSpec& spec, int random_vectors, unsigned seed) {
    const BuiltProblem built = build_problem(spec);
    const AssemblyProblem& problem = built.problem;
    VerifyReport report;
    FlopCounter fc;
    const SparseMatrix a = assemble(problem, fc);

    try {
        report.errors.emplace_back("naive", relative_frobenius_distance(a, assemble_naive(problem, fc)));
    } catch (const CapacityError&) {
        report.skipped.emplace_back("naive");
    }
    try {
        report.errors.emplace_back("kronecker", relative_frobenius_distance(a, assemble_kronecker_dense(problem, 20'000'000)));
    } catch (const CapacityError&) {
        report.skipped.emplace_back("kronecker");
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<std::vector<double>> us(static_cast<std::size_t>(random_vectors));
    for (auto& u : us) {
        u.resize(static_cast<std::size_t>(a.cols()));
        for (auto& v : u) {
            v = dist(rng);
        }
    }
    {
        const MatrixFreeOperator op(problem);
        double worst = 0.0;
        for (const auto& u : us) {
            worst = std::max(worst, relative_l2_distance(op.apply(u, fc), a.multiply(u)));
        }
        report.errors.emplace_back("apply_global", worst);
    }

    const DirectionPolicy policy = parse_policy(spec.direction_policy);
    for (const auto* name : {"element", "macro", "narrow"}) {
        ProblemSpec s = spec;
        s.strategy = name;
        if (spec.strategy != name) {
            s.box_sizes.clear();
        }
        const Partition part = build_partition(s, problem);
        LocalizedOptions opt;
        opt.policy = policy;
        opt.threads = spec.threads;
        report.errors.emplace_back(name, relative_frobenius_distance(assemble_localized(problem, part, fc, opt), a));
        double worst = 0.0;
        for (const auto& u : us) {
            worst = std::max(worst, relative_l2_distance(apply_localized(problem, part, u, fc, opt), a.multiply(u)));
        }
        report.errors.emplace_back(std::string("apply_") + name, worst);
    }
    return report;
}

}  // namespace isosum
