#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "isosum/errors.hpp"
#include "isosum/geometry.hpp"
#include "isosum/localized.hpp"
#include "isosum/sumfac.hpp"

namespace isosum {

/// Malformed problem definition; names the line (0 for command-line input)
/// and the offending field.
class SpecError : public ArgumentError {
public:
    SpecError(const std::string& what, std::size_t line, std::string field)
        : ArgumentError(what), line_(line), field_(std::move(field)) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

/// Problem definition. Single-valued per-direction lists are broadcast to all
/// directions. Defaults: identity geometry, Laplace, global strategy,
/// Gauss points per element = order.
struct ProblemSpec {
    int dim = 2;
    std::vector<int> order{3};
    std::vector<int> elements{8};
    std::vector<std::vector<double>> knots;  // explicit knot vectors override `elements`
    int quad_k = 0;                          // 0: use the order in each direction

    std::string geometry = "identity";  // builtin name, or "custom"
    std::vector<int> geometry_order;
    std::vector<std::vector<double>> geometry_knots;
    std::vector<double> control_points;
    std::vector<double> weights;

    std::string pde = "laplace";         // laplace | mass | convdiff
    std::vector<double> convection;      // convdiff only; default all ones
    double reaction = 1.0;               // convdiff only

    std::string strategy = "global";     // naive | global | element | macro | narrow
    std::vector<int> box_sizes;
    std::string direction_policy = "auto";  // auto | fixed
    int narrow_direction = -1;
    int threads = 1;

    /// Set `key` from its textual value; `line` only feeds diagnostics.
    void set(const std::string& key, const std::string& value, std::size_t line = 0);
    /// Throws SpecError on inconsistent settings.
    void validate() const;

    [[nodiscard]] std::vector<int> orders() const;
    [[nodiscard]] std::vector<int> element_counts() const;
};

/// `key = value` lines; `#` starts a comment; arrays are comma-separated.
/// Knot vectors use keys knots0, knots1, ... and geometry_knots0, ...
[[nodiscard]] ProblemSpec parse_problem(std::istream& in);
[[nodiscard]] ProblemSpec parse_problem_file(const std::string& path);

struct BuiltProblem {
    AssemblyProblem problem;
    GeometryMap geometry;
    PDEData pde;
};

[[nodiscard]] GeometryMap resolve_geometry(const ProblemSpec& spec);
[[nodiscard]] PDEData resolve_pde(const ProblemSpec& spec);
[[nodiscard]] BuiltProblem build_problem(const ProblemSpec& spec);

/// Partition for element, macro and narrow strategies (global: one box).
[[nodiscard]] Partition build_partition(const ProblemSpec& spec, const AssemblyProblem& problem);
[[nodiscard]] DirectionPolicy parse_policy(const std::string& name);

}  // namespace isosum
