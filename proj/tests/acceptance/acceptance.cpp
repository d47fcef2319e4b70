// Acceptance checks for the assembly library. Prints one PASS/FAIL line per
// criterion and exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "isosum/bench.hpp"
#include "isosum/bspline.hpp"
#include "isosum/localized.hpp"
#include "isosum/matfree.hpp"
#include "isosum/problem.hpp"
#include "isosum/quadrature.hpp"
#include "isosum/sumfac.hpp"
#include "isosum/tensorspace.hpp"
#include "oracles.hpp"

using namespace isosum;

namespace {

struct Config {
    int dim;
    int order;
    int elements;
    std::string geometry;
    std::string pde;

    [[nodiscard]] std::string name() const {
        return std::to_string(dim) + "d p" + std::to_string(order) + " K" + std::to_string(elements) + " " +
               geometry + " " + pde;
    }
};

std::vector<Config> ci_grid() {
    std::vector<Config> out;
    const std::vector<std::vector<std::string>> geometries{
        {"identity", "affine"}, {"identity", "affine", "quarter_annulus"}, {"identity", "affine", "twisted_box"}};
    const std::vector<int> max_order{6, 5, 3};
    const std::vector<std::vector<int>> elements{{1, 3, 8}, {1, 3, 8}, {1, 2, 4}};
    for (int d = 1; d <= 3; ++d) {
        for (int p = 1; p <= max_order[static_cast<std::size_t>(d - 1)]; ++p) {
            for (const int k : elements[static_cast<std::size_t>(d - 1)]) {
                for (const auto& g : geometries[static_cast<std::size_t>(d - 1)]) {
                    for (const std::string pde : {"mass", "laplace", "convdiff"}) {
                        if (p == 1 && pde != "mass") {
                            continue;
                        }
                        out.push_back({d, p, k, g, pde});
                    }
                }
            }
        }
    }
    return out;
}

ProblemSpec spec_of(const Config& c) {
    ProblemSpec s;
    s.dim = c.dim;
    s.order = {c.order};
    s.elements = {c.elements};
    s.geometry = c.geometry;
    s.pde = c.pde;
    if (c.pde == "convdiff") {
        s.convection = std::vector<double>(static_cast<std::size_t>(c.dim), 0.0);
        for (int i = 0; i < c.dim; ++i) {
            s.convection[static_cast<std::size_t>(i)] = 1.0 - 0.4 * i;
        }
        s.reaction = 0.75;
    }
    return s;
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = u(rng);
    }
    return v;
}

int failures = 0;

void report(int id, bool ok, const std::string& what) {
    std::printf("%s %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!ok) {
        ++failures;
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

void oracle_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::string worst_name;
    int count = 0;
    for (const auto& c : ci_grid()) {
        const auto built = build_problem(spec_of(c));
        FlopCounter fc;
        const double e = relative_frobenius_distance(assemble(built.problem, fc), assemble_naive(built.problem, fc));
        if (!(e <= worst)) {
            worst = e;
            worst_name = c.name();
        }
        ++count;
    }
    const double t = seconds_since(t0);
    report(1, worst <= 1e-12 && t < 120.0,
           "oracle equivalence, " + std::to_string(count) + " configurations, max rel err " + fmt("%.2e", worst) +
               " (" + worst_name + "), " + fmt("%.1f", t) + " s");
}

void localization_exactness() {
    double worst_a = 0.0;
    double worst_v = 0.0;
    bool bitwise = true;
    int count = 0;
    std::mt19937_64 rng(2024);
    for (const auto& c : ci_grid()) {
        const auto built = build_problem(spec_of(c));
        const auto& p = built.problem;
        FlopCounter fc;
        const auto global = assemble(p, fc);
        std::vector<std::vector<double>> us;
        std::vector<std::vector<double>> refs;
        for (int i = 0; i < 50; ++i) {
            us.push_back(random_vector(static_cast<std::size_t>(global.cols()), rng));
            refs.push_back(global.multiply(us.back()));
        }
        for (const auto s : {PartitionStrategy::element, PartitionStrategy::macro, PartitionStrategy::narrow}) {
            if (s == PartitionStrategy::narrow && c.dim > 1 && c.elements < c.order) {
                continue;
            }
            const auto part = make_partition(p.trial, s);
            worst_a = std::max(worst_a, relative_frobenius_distance(assemble_localized(p, part, fc), global));
            for (std::size_t i = 0; i < us.size(); ++i) {
                worst_v = std::max(worst_v, relative_l2_distance(apply_localized(p, part, us[i], fc), refs[i]));
            }
            ++count;
        }
        if (c.dim == 2 && c.order == 3 && c.elements == 8) {
            const auto part = make_partition(p.trial, PartitionStrategy::macro);
            LocalizedOptions par;
            par.threads = 3;
            const auto a1 = assemble_localized(p, part, fc);
            const auto a3 = assemble_localized(p, part, fc, par);
            bitwise = bitwise && std::equal(a1.values().begin(), a1.values().end(), a3.values().begin(),
                                            a3.values().end());
        }
    }
    report(2, worst_a <= 1e-12 && worst_v <= 1e-12 && bitwise,
           "localization exactness, " + std::to_string(count) + " strategy runs, matrix " + fmt("%.2e", worst_a) +
               ", apply " + fmt("%.2e", worst_v) + (bitwise ? ", concurrent == sequential" : ", concurrent differs"));
}

void kronecker_oracle() {
    double worst = 0.0;
    int count = 0;
    for (const auto& c : ci_grid()) {
        const auto built = build_problem(spec_of(c));
        std::int64_t n = 1;
        for (const auto& b : built.problem.trial) {
            n *= b.size();
        }
        if (n * n > 10000) {
            continue;
        }
        FlopCounter fc;
        worst = std::max(worst, relative_frobenius_distance(assemble(built.problem, fc),
                                                            assemble_kronecker_dense(built.problem)));
        ++count;
    }
    report(3, worst <= 1e-12 && count > 0,
           "Kronecker oracle, " + std::to_string(count) + " instances with N*M <= 1e4, max rel err " +
               fmt("%.2e", worst));
}

void sparsity_exactness() {
    bool ok = true;
    int count = 0;
    auto knots = [](const UnivariateBasis& b) {
        return std::vector<double>(b.knot_vector().knots().begin(), b.knot_vector().knots().end());
    };
    for (int p = 1; p <= 6; ++p) {
        for (int q = 1; q <= 6; ++q) {
            for (int k = 1; k <= 8; ++k) {
                for (int mu = 1; mu <= std::max(p, q); ++mu) {
                    const UnivariateBasis trial(KnotVector::uniform(p, k, 0.0, 1.0, std::min(mu, p)));
                    const UnivariateBasis test(KnotVector::uniform(q, k, 0.0, 1.0, std::min(mu, q)));
                    const auto rule = per_element_rule(trial.breakpoints(), 1 + (p + q) % 3);
                    const auto want = oracle::brute_pattern(oracle::supports(knots(trial), p),
                                                            oracle::supports(knots(test), q),
                                                            {rule.points().begin(), rule.points().end()});
                    const auto got = nnz_pattern_1d(trial, test, rule).pairs();
                    ok = ok && nnz_count_exact(trial, test) == static_cast<std::int64_t>(want.size()) &&
                         std::set<std::pair<int, int>>(got.begin(), got.end()) == want;
                    ++count;
                }
            }
        }
    }
    // tensor pattern size is the product of the one-dimensional counts
    for (const std::vector<int> orders : {std::vector<int>{2, 3}, std::vector<int>{1, 4, 2}, std::vector<int>{5, 5}}) {
        std::vector<BasisEvalTable> tabs;
        std::vector<QuadratureRule1D> rules;
        std::int64_t product = 1;
        for (std::size_t i = 0; i < orders.size(); ++i) {
            const UnivariateBasis b(KnotVector::uniform(orders[i], 3 + static_cast<int>(i)));
            rules.push_back(per_element_rule(b.breakpoints(), orders[i]));
            tabs.push_back(tabulate(b, rules.back().points(), 0));
            product *= nnz_count_exact(b, b);
        }
        const TensorGeneratingSystem sys(tabs, std::vector<int>(orders.size(), 0));
        ok = ok && tensor_pattern(sys, sys, TensorQuadrature(rules)).nnz() == product;
    }
    report(4, ok, "sparsity exactness, " + std::to_string(count) + " one-dimensional cases");
}

void flop_scaling() {
    const auto t0 = std::chrono::steady_clock::now();
    struct Band {
        std::string label;
        double e;
        double lo;
        double hi;
    };
    std::vector<Band> bands;
    auto sweep = [&](int d, int elements, int p_max, double tol, double element_tol) {
        SweepOptions opt;
        opt.base.dim = d;
        opt.base.elements = {elements};
        opt.p_min = 2;
        opt.p_max = p_max;
        opt.strategies = {"global", "macro", "element"};
        const auto recs = run_sweep(opt);
        auto series = [&](const std::string& s) {
            std::vector<BenchRecord> out;
            std::copy_if(recs.begin(), recs.end(), std::back_inserter(out),
                         [&](const BenchRecord& r) { return r.strategy == s; });
            return out;
        };
        const double dd = d;
        const std::string tag = std::to_string(d) + "d ";
        bands.push_back({tag + "global", fit_exponent(series("global")).e, dd + 2 - tol, dd + 2 + tol});
        bands.push_back({tag + "macro", fit_exponent(series("macro")).e, dd + 2 - tol, dd + 2 + tol});
        bands.push_back({tag + "element", fit_exponent(series("element")).e, 2 * dd + 1 - element_tol,
                         2 * dd + 1 + element_tol});
        bands.push_back(
            {tag + "apply", fit_exponent(series("global"), FlopSeries::apply).e, dd + 1 - tol, dd + 1 + tol});
    };
    sweep(2, 32, 8, 0.4, 0.5);
    sweep(3, 8, 5, 0.6, 0.6);
    bool ok = true;
    std::string detail;
    for (const auto& b : bands) {
        const bool in = b.e >= b.lo && b.e <= b.hi;
        ok = ok && in;
        detail += " " + b.label + "=" + fmt("%.3f", b.e) + (in ? "" : "(out of [" + fmt("%.1f", b.lo) + "," + fmt("%.1f", b.hi) + "])");
    }
    const double t = seconds_since(t0);
    ok = ok && t < 600.0;
    report(5, ok, "flop scaling exponents:" + detail + ", " + fmt("%.1f", t) + " s");
}

void repetition_bounds() {
    bool ok = true;
    int count = 0;
    std::mt19937 rng(99);
    for (int d = 2; d <= 3; ++d) {
        for (int p = 2; p <= 6; ++p) {
            std::int64_t pd = 1;
            std::int64_t two_d = 1;
            for (int i = 0; i < d; ++i) {
                pd *= p;
                two_d *= 2;
            }
            for (const int k : {p, 2 * p, 2 * p + 1, 3 * p + 2}) {
                std::vector<UnivariateBasis> b;
                for (int i = 0; i < d; ++i) {
                    b.emplace_back(KnotVector::uniform(p, k));
                }
                ok = ok && repetition_ratio(make_partition(b, PartitionStrategy::element), b, b) <= Ratio{pd, 1};
                ok = ok && repetition_ratio(make_partition(b, PartitionStrategy::macro), b, b) <= Ratio{two_d, 1};
                ok = ok && repetition_ratio(make_partition(b, PartitionStrategy::narrow), b, b) <=
                               Ratio{two_d / 2 * d * p, 1};
                count += 3;
            }
            // uniform boxes of random sizes
            for (int t = 0; t < 10; ++t) {
                std::vector<UnivariateBasis> b;
                std::vector<int> sizes;
                std::int64_t bound = 1;
                for (int i = 0; i < d; ++i) {
                    const int s = 1 + static_cast<int>(rng() % 6);
                    sizes.push_back(s);
                    b.emplace_back(KnotVector::uniform(p, s * (1 + static_cast<int>(rng() % 3))));
                    bound *= (s + p - 1 + s - 1) / s;
                }
                ok = ok && repetition_ratio(make_partition(b, PartitionStrategy::custom, sizes), b, b) <= Ratio{bound, 1};
                ++count;
            }
        }
    }
    report(6, ok, "repetition-ratio bounds, " + std::to_string(count) + " exact comparisons");
}

void analytic_anchors() {
    bool ok = true;
    std::string detail;
    {
        AssemblyProblem p;
        p.trial = {UnivariateBasis(KnotVector::uniform(2, 1))};
        p.test = p.trial;
        p.quad = TensorQuadrature({per_element_rule(p.trial[0].breakpoints(), 2)});
        const double one = 1.0;
        FlopCounter fc;
        p.coeff = CoefficientField::constant({{0}}, {{0}}, {2}, std::span<const double>(&one, 1));
        const auto m = assemble(p, fc);
        p.coeff = CoefficientField::constant({{1}}, {{1}}, {2}, std::span<const double>(&one, 1));
        const auto k = assemble(p, fc);
        const double em = std::max({std::abs(m.at(0, 0) - 1.0 / 3), std::abs(m.at(0, 1) - 1.0 / 6),
                                    std::abs(m.at(1, 0) - 1.0 / 6), std::abs(m.at(1, 1) - 1.0 / 3)});
        const double ek = std::max({std::abs(k.at(0, 0) - 1.0), std::abs(k.at(0, 1) + 1.0), std::abs(k.at(1, 0) + 1.0),
                                    std::abs(k.at(1, 1) - 1.0)});
        ok = ok && em <= 1e-14 && ek <= 1e-14;
        detail += "1d mass " + fmt("%.1e", em) + ", stiffness " + fmt("%.1e", ek);
    }
    auto mass_total = [](const std::string& geometry, int dim, int k) {
        ProblemSpec s;
        s.dim = dim;
        s.order = {3};
        s.elements = {8};
        s.geometry = geometry;
        s.pde = "mass";
        s.quad_k = k;
        const auto built = build_problem(s);
        FlopCounter fc;
        const auto m = assemble(built.problem, fc);
        const auto v = m.multiply(std::vector<double>(static_cast<std::size_t>(m.cols()), 1.0));
        double t = 0.0;
        for (double x : v) {
            t += x;
        }
        return t;
    };
    const double annulus = 0.75 * std::numbers::pi;
    const double ea = std::abs(mass_total("quarter_annulus", 2, 8) - annulus) / annulus;
    ok = ok && ea <= 1e-10;
    detail += ", annulus area " + fmt("%.1e", ea);
    double ei = 0.0;
    for (int d = 1; d <= 3; ++d) {
        ei = std::max(ei, std::abs(mass_total("identity", d, 3) - 1.0));
    }
    ok = ok && ei <= 1e-12;
    detail += ", unit cube volume " + fmt("%.1e", ei);
    report(7, ok, "analytic anchors: " + detail);
}

void numerical_hygiene() {
    double gauss = 0.0;
    for (int k = 1; k <= 64; ++k) {
        const auto r = gauss_legendre(k);
        for (int m = 0; m <= 2 * k - 1; ++m) {
            double s = 0.0;
            for (int i = 0; i < k; ++i) {
                s += r.weights[static_cast<std::size_t>(i)] * std::pow(r.nodes[static_cast<std::size_t>(i)], m);
            }
            gauss = std::max(gauss, std::abs(s - oracle::monomial_integral(m, -1.0, 1.0)));
        }
    }
    double fd = 0.0;
    double pou = 0.0;
    std::mt19937 rng(4);
    for (int order = 1; order <= 6; ++order) {
        for (const int mu : {1, std::max(1, order - 1)}) {
            const UnivariateBasis b(KnotVector::uniform(order, 4, 0.0, 1.0, mu));
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (int t = 0; t < 40; ++t) {
                const double h = 1e-6;
                double x = t == 0 ? 1.0 : u(rng);
                const auto v = b.eval_all_derivs(x, 0);
                double s = 0.0;
                for (int a = 0; a < order; ++a) {
                    s += v(0, a);
                }
                pou = std::max(pou, std::abs(s - 1.0));
                const double e = std::min(std::floor(x * 4.0), 3.0) / 4.0;
                x = std::clamp(x, e + 2 * h, e + 0.25 - 2 * h);
                for (int k = 1; k < order; ++k) {
                    const auto c = b.eval_all_derivs(x, k);
                    const auto lo = b.eval_all_derivs(x - h, k - 1);
                    const auto hi = b.eval_all_derivs(x + h, k - 1);
                    for (int a = 0; a < order; ++a) {
                        const double diff = (hi(k - 1, a) - lo(k - 1, a)) / (2 * h);
                        fd = std::max(fd, std::abs(c(k, a) - diff) / std::max(1.0, std::abs(c(k, a))));
                    }
                }
            }
        }
    }
    double sym = 0.0;
    for (const auto& [dim, geometry] : {std::pair<int, std::string>{2, "quarter_annulus"},
                                        std::pair<int, std::string>{2, "affine"},
                                        std::pair<int, std::string>{3, "twisted_box"}}) {
        for (const std::string pde : {"laplace", "mass"}) {
            ProblemSpec s;
            s.dim = dim;
            s.order = {3};
            s.elements = {4};
            s.geometry = geometry;
            s.pde = pde;
            const auto built = build_problem(s);
            FlopCounter fc;
            sym = std::max(sym, symmetry_defect(assemble(built.problem, fc)));
        }
    }
    report(8, gauss <= 1e-13 && fd <= 1e-6 && pou <= 1e-14 && sym <= 1e-12,
           "numerical hygiene: Gauss " + fmt("%.1e", gauss) + ", derivative vs FD " + fmt("%.1e", fd) +
               ", partition of unity " + fmt("%.1e", pou) + ", symmetry " + fmt("%.1e", sym));
}

void run(int id, const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

}  // namespace

int main() {
    run(1, oracle_equivalence);
    run(2, localization_exactness);
    run(3, kronecker_oracle);
    run(4, sparsity_exactness);
    run(5, flop_scaling);
    run(6, repetition_bounds);
    run(7, analytic_anchors);
    run(8, numerical_hygiene);
    return failures == 0 ? 0 : 1;
}
