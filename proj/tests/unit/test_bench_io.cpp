#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "isosum/bench.hpp"
#include "isosum/io.hpp"
#include "isosum/problem.hpp"
#include "isosum/sumfac.hpp"

using namespace isosum;

namespace {

SparseMatrix small_matrix() {
    ProblemSpec spec;
    spec.dim = 2;
    spec.order = {3};
    spec.elements = {3};
    spec.geometry = "quarter_annulus";
    spec.pde = "convdiff";
    const auto built = build_problem(spec);
    FlopCounter fc;
    return assemble(built.problem, fc);
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("isosum_test_" + name);
}

}  // namespace

TEST(FitExponent, RecoversSyntheticExponent) {
    std::vector<int> p;
    std::vector<double> cost;
    std::vector<std::vector<int>> el;
    for (int q = 2; q <= 8; ++q) {
        p.push_back(q);
        el.push_back({10, 10});
        cost.push_back(2.5 * std::pow(q, 3.0) * spline_dimension(q, el.back()));
    }
    const auto fit = fit_exponent(p, cost, el);
    EXPECT_NEAR(fit.e, 3.0, 1e-9);
    EXPECT_NEAR(fit.c, 2.5, 1e-9);
    EXPECT_NEAR(fit.residual, 0.0, 1e-9);

    std::mt19937 rng(1);
    std::uniform_real_distribution<double> noise(-0.02, 0.02);
    for (auto& c : cost) {
        c *= std::exp(noise(rng));
    }
    EXPECT_NEAR(fit_exponent(p, cost, el).e, 3.0, 0.05);
}

TEST(FitExponent, NeedsThreeOrders) {
    const std::vector<int> p{2, 3, 3};
    const std::vector<double> c{1.0, 2.0, 3.0};
    const std::vector<std::vector<int>> el(3, std::vector<int>{4});
    EXPECT_THROW((void)fit_exponent(p, c, el), ArgumentError);
    const std::vector<double> bad{1.0, 0.0, 3.0};
    const std::vector<int> q{2, 3, 4};
    EXPECT_THROW((void)fit_exponent(q, bad, el), ArgumentError);
}

TEST(SplineDimension, Product) {
    const std::vector<int> el{32, 32};
    EXPECT_EQ(spline_dimension(3, el), 34.0 * 34.0);
}

TEST(MatrixMarket, RoundTripIsBitExact) {
    const auto a = small_matrix();
    std::stringstream ss;
    write_matrix_market(a, ss);
    EXPECT_EQ(ss.str().rfind("%%MatrixMarket matrix coordinate real general", 0), 0U);
    const auto b = read_matrix_market(ss);
    ASSERT_EQ(b.rows(), a.rows());
    ASSERT_EQ(b.nnz(), a.nnz());
    for (std::int64_t r = 0; r < a.rows(); ++r) {
        for (std::int64_t c = 0; c < a.cols(); ++c) {
            EXPECT_EQ(b.at(r, c), a.at(r, c));
        }
    }
    const auto path = temp_file("roundtrip.mtx");
    write_matrix_market(a, path.string());
    const auto c = read_matrix_market(path.string());
    EXPECT_EQ(relative_frobenius_distance(c, a), 0.0);
    std::filesystem::remove(path);
}

TEST(MatrixMarket, TwoByTwoAndOneBasedIndices) {
    std::istringstream in(
        "%%MatrixMarket matrix coordinate real general\n% comment\n2 2 3\n2 1 -1.5\n1 1 2\n2 2 0.25\n");
    const auto a = read_matrix_market(in);
    EXPECT_EQ(a.at(0, 0), 2.0);
    EXPECT_EQ(a.at(1, 0), -1.5);
    EXPECT_EQ(a.at(0, 1), 0.0);
    EXPECT_EQ(a.at(1, 1), 0.25);
}

TEST(MatrixMarket, RejectsMalformedFiles) {
    std::istringstream dup("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n1 1 2\n");
    EXPECT_THROW((void)read_matrix_market(dup), ArgumentError);
    std::istringstream sym("%%MatrixMarket matrix coordinate real symmetric\n1 1 1\n1 1 1\n");
    EXPECT_THROW((void)read_matrix_market(sym), ArgumentError);
    std::istringstream shortfile("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n");
    EXPECT_THROW((void)read_matrix_market(shortfile), ArgumentError);
    std::istringstream range("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n");
    EXPECT_THROW((void)read_matrix_market(range), ArgumentError);
}

TEST(VectorIO, RoundTrip) {
    const std::vector<double> v{1.0 / 3.0, -2.5e-300, 7.0, 0.1};
    const auto path = temp_file("vec.txt");
    write_vector(v, path.string());
    EXPECT_EQ(read_vector(path.string()), v);
    std::filesystem::remove(path);
}

TEST(ProblemFile, ParsesKeysAndComments) {
    std::istringstream in(
        "# annulus\n"
        "dim = 2\n"
        "order = 3, 4   # per direction\n"
        "elements = 5,6\n"
        "geometry = quarter_annulus\n"
        "pde = convdiff\n"
        "convection = 1, -2\n"
        "reaction = 0.5\n"
        "strategy = macro\n"
        "\n");
    const auto spec = parse_problem(in);
    EXPECT_EQ(spec.orders(), (std::vector<int>{3, 4}));
    EXPECT_EQ(spec.element_counts(), (std::vector<int>{5, 6}));
    EXPECT_EQ(spec.geometry, "quarter_annulus");
    EXPECT_EQ(spec.convection, (std::vector<double>{1.0, -2.0}));
    EXPECT_EQ(spec.reaction, 0.5);
    EXPECT_EQ(spec.strategy, "macro");
    const auto built = build_problem(spec);
    EXPECT_EQ(built.problem.trial[1].order(), 4);
    EXPECT_EQ(built.problem.quad.rule(1).size(), 24);
}

TEST(ProblemFile, ErrorsNameLineAndField) {
    std::istringstream bad_value("dim = 2\norder = three\n");
    try {
        (void)parse_problem(bad_value);
        FAIL();
    } catch (const SpecError& e) {
        EXPECT_EQ(e.line(), 2U);
        EXPECT_EQ(e.field(), "order");
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    std::istringstream unknown("colour = red\n");
    EXPECT_THROW((void)parse_problem(unknown), SpecError);
    std::istringstream no_eq("dim 2\n");
    EXPECT_THROW((void)parse_problem(no_eq), SpecError);

    ProblemSpec spec;
    spec.dim = 2;
    spec.order = {3, 3, 3};
    EXPECT_THROW(spec.validate(), SpecError);
    spec.order = {3};
    spec.pde = "wave";
    EXPECT_THROW(spec.validate(), SpecError);
}

TEST(ProblemFile, ExplicitKnotVectors) {
    std::istringstream in("dim = 1\norder = 3\nknots0 = 0,0,0,0.3,0.3,1,1,1\npde = mass\n");
    const auto spec = parse_problem(in);
    const auto built = build_problem(spec);
    EXPECT_EQ(built.problem.trial[0].size(), 5);
    EXPECT_EQ(built.problem.trial[0].knot_vector().multiplicity(0.3), 2);
}

TEST(Csv, HeaderAndRows) {
    BenchRecord r;
    r.strategy = "macro";
    r.d = 2;
    r.p = 3;
    r.elements = {32, 32};
    r.n = 1156;
    r.points = 9216;
    r.flops_assemble = 100;
    r.flops_apply = 50;
    r.wall_ms = 1.23456;
    r.residual = std::nan("");
    std::ostringstream out;
    write_csv(out, std::vector<BenchRecord>{r});
    EXPECT_EQ(out.str(), csv_header() + "\nmacro,2,3,32x32,1156,9216,100,50,1.235,\n");
}

TEST(Sweep, EmptyRangeAndDeterminism) {
    SweepOptions opt;
    opt.base.dim = 2;
    opt.base.elements = {4};
    opt.p_min = 3;
    opt.p_max = 2;
    EXPECT_TRUE(run_sweep(opt).empty());
    opt.p_min = 2;
    opt.p_max = 4;
    opt.strategies = {"global", "element", "macro", "narrow"};
    opt.base.elements = {6};
    const auto a = run_sweep(opt);
    const auto b = run_sweep(opt);
    ASSERT_EQ(a.size(), 12U);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].flops_assemble, b[i].flops_assemble);
        EXPECT_EQ(a[i].flops_apply, b[i].flops_apply);
        EXPECT_EQ(a[i].residual, b[i].residual);
        EXPECT_FALSE(std::isnan(a[i].residual));
        EXPECT_GT(a[i].flops_assemble, 0U);
    }
}

TEST(Verify, SmallProblemsAgreeWithOracles) {
    ProblemSpec spec;
    spec.dim = 2;
    spec.order = {3};
    spec.elements = {4};
    spec.geometry = "quarter_annulus";
    spec.pde = "convdiff";
    const auto report = verify_problem(spec, 3);
    EXPECT_GE(report.errors.size(), 8U);
    EXPECT_LE(report.max_error(), 1e-12);
}
