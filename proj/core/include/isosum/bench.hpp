#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isosum/problem.hpp"

namespace isosum {

struct BenchRecord {
    std::string strategy;
    int d = 0;
    int p = 0;
    std::vector<int> elements;
    std::int64_t n = 0;       // trial functions
    std::int64_t points = 0;  // quadrature points
    std::uint64_t flops_assemble = 0;
    std::uint64_t flops_apply = 0;
    double wall_ms = 0.0;   // informational only
    double residual = 0.0;  // rms log-residual of the strategy's fit, NaN if not fitted
};

struct ExponentFit {
    double c = 0.0;  // cost ~ c p^e N(p)
    double e = 0.0;
    double residual = 0.0;  // rms residual in log space
};

/// N(p) = prod_i (p + K_i - 1).
[[nodiscard]] double spline_dimension(int p, std::span<const int> elements);

/// Least squares of log(cost / N(p)) against log p; needs three distinct p.
[[nodiscard]] ExponentFit fit_exponent(std::span<const int> p, std::span<const double> cost,
                                       std::span<const std::vector<int>> elements);

enum class FlopSeries { assemble, apply };
[[nodiscard]] ExponentFit fit_exponent(std::span<const BenchRecord> records, FlopSeries series = FlopSeries::assemble);

/// One measurement of `spec` as given (order, strategy, ...).
[[nodiscard]] BenchRecord run_once(const ProblemSpec& spec, bool measure_apply = true);

struct SweepOptions {
    ProblemSpec base;
    std::vector<std::string> strategies{"global"};
    int p_min = 2;
    int p_max = 8;  // inclusive; p_max < p_min gives no records
    bool measure_apply = true;
};

/// Orders p_min..p_max with Gauss k = p (unless base.quad_k is set); fills
/// the residual column per strategy when at least three orders were run.
[[nodiscard]] std::vector<BenchRecord> run_sweep(const SweepOptions& options);

[[nodiscard]] std::string csv_header();
void write_csv(std::ostream& out, std::span<const BenchRecord> records);

struct VerifyReport {
    std::vector<std::pair<std::string, double>> errors;  // check name, relative error
    std::vector<std::string> skipped;

    [[nodiscard]] double max_error() const;
};

/// Global assembly against the naive and dense oracles, localized strategies
/// and matrix-free application; relative errors per check.
[[nodiscard]] VerifyReport verify_problem(const ProblemSpec& spec, int random_vectors = 5, unsigned seed = 1);

}  // namespace isosum
