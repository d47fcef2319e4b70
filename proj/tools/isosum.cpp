// isosum: assemble, apply, verify and benchmark sum-factorized spline operators.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "isosum/bench.hpp"
#include "isosum/io.hpp"
#include "isosum/matfree.hpp"
#include "isosum/problem.hpp"

namespace {

struct SpecFlags {
    std::string problem_file;
    std::map<std::string, std::string> values;  // problem key -> text

    void add(CLI::App* app) {
        app->add_option("--problem", problem_file, "Problem definition file (key = value lines)");
        flag(app, "--dim", "dim", "Parametric dimension 1..3");
        flag(app, "--order", "order", "Spline order(s), e.g. 3 or 3,4");
        flag(app, "--elements", "elements", "Elements per direction, e.g. 8,8");
        flag(app, "--quad-k", "quad_k", "Gauss points per element (default: the order)");
        flag(app, "--geometry", "geometry", "identity | affine | quarter_annulus | twisted_box | custom");
        flag(app, "--pde", "pde", "laplace | mass | convdiff");
        flag(app, "--strategy", "strategy", "naive | global | element | macro | narrow");
        flag(app, "--box-sizes", "box_sizes", "Macro-element sizes per direction");
        flag(app, "--direction-policy", "direction_policy", "auto | fixed");
        flag(app, "--narrow-dir", "narrow_direction", "Narrow direction of narrow boxes (default: last)");
        flag(app, "--threads", "threads", "Boxes assembled concurrently");
    }

    void flag(CLI::App* app, const std::string& name, const std::string& key, const std::string& help) {
        app->add_option_function<std::string>(name, [this, key](const std::string& v) { values[key] = v; }, help);
    }

    [[nodiscard]] isosum::ProblemSpec resolve() const {
        isosum::ProblemSpec spec = problem_file.empty() ? isosum::ProblemSpec{}
                                                        : isosum::parse_problem_file(problem_file);
        for (const auto& [key, value] : values) {
            spec.set(key, value);
        }
        spec.validate();
        return spec;
    }
};

isosum::SparseMatrix assemble_with(const isosum::ProblemSpec& spec, const isosum::AssemblyProblem& problem,
                                   isosum::FlopCounter& fc) {
    if (spec.strategy == "naive") {
        return isosum::assemble_naive(problem, fc);
    }
    if (spec.strategy == "global") {
        return isosum::assemble(problem, fc);
    }
    isosum::LocalizedOptions opt;
    opt.policy = isosum::parse_policy(spec.direction_policy);
    opt.threads = spec.threads;
    return isosum::assemble_localized(problem, isosum::build_partition(spec, problem), fc, opt);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sum-factorization assembly of tensor-product spline matrices"};
    app.require_subcommand(1);

    SpecFlags asm_flags, apply_flags, verify_flags, bench_flags;
    std::string asm_out = "A.mtx";
    auto* cmd_asm = app.add_subcommand("assemble", "Assemble the matrix and write MatrixMarket");
    asm_flags.add(cmd_asm);
    cmd_asm->add_option("-o,--output", asm_out, "Output file");

    std::string apply_in, apply_out = "v.txt";
    auto* cmd_apply = app.add_subcommand("apply", "Matrix-free product v = A u");
    apply_flags.add(cmd_apply);
    cmd_apply->add_option("-i,--input", apply_in, "Input vector, one value per line")->required();
    cmd_apply->add_option("-o,--output", apply_out, "Output vector");

    double tol = 1e-12;
    int vectors = 5;
    auto* cmd_verify = app.add_subcommand("verify", "Compare every strategy against the oracles");
    verify_flags.add(cmd_verify);
    cmd_verify->add_option("--tol", tol, "Failure threshold on the max relative error");
    cmd_verify->add_option("--vectors", vectors, "Random vectors per matrix-free check");

    int p_min = 2, p_max = 8;
    std::string strategies = "global,element,macro";
    std::string bench_out;
    bool no_apply = false;
    auto* cmd_bench = app.add_subcommand("bench", "Sweep the order and write counted flops as CSV");
    bench_flags.add(cmd_bench);
    cmd_bench->add_option("--p-min", p_min, "Smallest order");
    cmd_bench->add_option("--p-max", p_max, "Largest order (inclusive)");
    cmd_bench->add_option("--strategies", strategies, "Comma-separated strategies");
    cmd_bench->add_flag("--no-apply", no_apply, "Skip matrix-free measurements");
    cmd_bench->add_option("-o,--output", bench_out, "CSV file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_asm->parsed()) {
            const auto spec = asm_flags.resolve();
            const auto built = isosum::build_problem(spec);
            isosum::FlopCounter fc;
            const auto a = assemble_with(spec, built.problem, fc);
            isosum::write_matrix_market(a, asm_out);
            std::printf("%lld x %lld, nnz %lld, block-update flops %llu -> %s\n", static_cast<long long>(a.rows()),
                        static_cast<long long>(a.cols()), static_cast<long long>(a.nnz()),
                        static_cast<unsigned long long>(spec.strategy == "naive" ? fc.naive : fc.block_update),
                        asm_out.c_str());
        } else if (cmd_apply->parsed()) {
            const auto spec = apply_flags.resolve();
            const auto built = isosum::build_problem(spec);
            const auto u = isosum::read_vector(apply_in);
            isosum::FlopCounter fc;
            std::vector<double> v;
            if (spec.strategy == "global" || spec.strategy == "naive") {
                v = isosum::MatrixFreeOperator(built.problem).apply(u, fc);
            } else {
                isosum::LocalizedOptions opt;
                opt.policy = isosum::parse_policy(spec.direction_policy);
                opt.threads = spec.threads;
                v = isosum::apply_localized(built.problem, isosum::build_partition(spec, built.problem), u, fc, opt);
            }
            isosum::write_vector(v, apply_out);
            std::printf("%zu values, contraction flops %llu -> %s\n", v.size(),
                        static_cast<unsigned long long>(fc.apply_contract), apply_out.c_str());
        } else if (cmd_verify->parsed()) {
            const auto spec = verify_flags.resolve();
            const auto report = isosum::verify_problem(spec, vectors);
            for (const auto& [name, err] : report.errors) {
                std::printf("%-16s %.3e\n", name.c_str(), err);
            }
            for (const auto& name : report.skipped) {
                std::printf("%-16s skipped (over budget)\n", name.c_str());
            }
            std::printf("max relative error: %.3e\n", report.max_error());
            return report.max_error() <= tol ? 0 : 4;
        } else if (cmd_bench->parsed()) {
            isosum::SweepOptions opt;
            opt.base = bench_flags.resolve();
            opt.p_min = p_min;
            opt.p_max = p_max;
            opt.measure_apply = !no_apply;
            opt.strategies.clear();
            std::stringstream ss(strategies);
            for (std::string s; std::getline(ss, s, ',');) {
                opt.base.strategy = s;
                opt.base.validate();
                opt.strategies.push_back(s);
            }
            const auto records = isosum::run_sweep(opt);
            if (bench_out.empty()) {
                isosum::write_csv(std::cout, records);
            } else {
                std::ofstream out(bench_out);
                if (!out) {
                    throw std::runtime_error("cannot open '" + bench_out + "' for writing");
                }
                isosum::write_csv(out, records);
            }
            for (const auto& s : opt.strategies) {
                std::vector<isosum::BenchRecord> group;
                for (const auto& r : records) {
                    if (r.strategy == s) {
                        group.push_back(r);
                    }
                }
                if (group.size() >= 3) {
                    const auto fit = isosum::fit_exponent(group);
                    std::fprintf(stderr, "%-8s assembly exponent %.3f", s.c_str(), fit.e);
                    if (!no_apply) {
                        std::fprintf(stderr, ", apply exponent %.3f",
                                     isosum::fit_exponent(group, isosum::FlopSeries::apply).e);
                    }
                    std::fprintf(stderr, "\n");
                }
            }
        }
    } catch (const isosum::SpecError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const isosum::DegenerateGeometryError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
