#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isosum/bspline.hpp"
#include "isosum/discretization.hpp"
#include "isosum/flops.hpp"
#include "isosum/geometry.hpp"
#include "isosum/quadrature.hpp"
#include "isosum/sparse.hpp"
#include "isosum/sumfac.hpp"

namespace isosum {

enum class PartitionStrategy { global, element, macro, narrow, custom };

[[nodiscard]] std::string to_string(PartitionStrategy s);
[[nodiscard]] PartitionStrategy parse_strategy(const std::string& name);

/// Axis-aligned box of elements: [lo[i], hi[i]) in direction i.
struct Box {
    std::vector<int> lo;
    std::vector<int> hi;

    [[nodiscard]] int size(int dir) const {
        return hi[static_cast<std::size_t>(dir)] - lo[static_cast<std::size_t>(dir)];
    }
};

/// Disjoint boxes covering all elements; boxes are numbered lexicographically
/// with direction 0 fastest.
class Partition {
public:
    Partition(std::vector<std::vector<double>> breakpoints, std::vector<Box> boxes, PartitionStrategy strategy,
              int narrow_direction = -1, bool fallback = false);

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(breakpoints_.size()); }
    [[nodiscard]] int num_boxes() const noexcept { return static_cast<int>(boxes_.size()); }
    [[nodiscard]] const Box& box(int b) const { return boxes_[static_cast<std::size_t>(b)]; }
    [[nodiscard]] std::span<const Box> boxes() const noexcept { return boxes_; }
    [[nodiscard]] std::span<const double> breakpoints(int dir) const {
        return breakpoints_[static_cast<std::size_t>(dir)];
    }
    [[nodiscard]] int num_elements(int dir) const {
        return static_cast<int>(breakpoints_[static_cast<std::size_t>(dir)].size()) - 1;
    }
    [[nodiscard]] PartitionStrategy strategy() const noexcept { return strategy_; }
    /// Direction with box size 1 for narrow partitions, else -1.
    [[nodiscard]] int narrow_direction() const noexcept { return narrow_; }
    /// Set when some direction had fewer elements than the requested size and
    /// was kept as a single chunk.
    [[nodiscard]] bool fallback() const noexcept { return fallback_; }

private:
    std::vector<std::vector<double>> breakpoints_;
    std::vector<Box> boxes_;
    PartitionStrategy strategy_;
    int narrow_;
    bool fallback_;
};

/// Per-direction chunks of size `size`; the trailing chunk absorbs the
/// remainder, so every chunk has between size and 2*size - 1 elements. With
/// fewer than `size` elements a single chunk is returned.
[[nodiscard]] std::vector<std::pair<int, int>> chunk_elements(int elements, int size);

/// element: size 1; macro: sizes default to the orders; narrow: size 1 in
/// `narrow_direction` (default last) and the orders elsewhere; custom: the
/// given sizes; global: one box.
[[nodiscard]] Partition make_partition(std::span<const UnivariateBasis> bases, PartitionStrategy strategy,
                                       std::span<const int> sizes = {}, int narrow_direction = -1);

/// Exact non-negative rational number.
struct Ratio {
    std::int64_t num = 0;
    std::int64_t den = 1;

    [[nodiscard]] double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Ratio& a, const Ratio& b) noexcept { return a.num * b.den == b.num * a.den; }
    friend bool operator<(const Ratio& a, const Ratio& b) noexcept { return a.num * b.den < b.num * a.den; }
    friend bool operator<=(const Ratio& a, const Ratio& b) noexcept { return a.num * b.den <= b.num * a.den; }
};

/// Functions of `basis` whose convex support meets the open interval (lo, hi).
[[nodiscard]] std::pair<int, int> function_range(const UnivariateBasis& basis, double lo, double hi);

/// max(sum_D N_D / N, sum_D M_D / M), reduced.
[[nodiscard]] Ratio repetition_ratio(const Partition& partition, std::span<const UnivariateBasis> trial,
                                     std::span<const UnivariateBasis> test);

/// Restriction of the spaces and the quadrature to one box.
struct LocalSystem {
    int box = 0;
    std::vector<std::pair<int, int>> trial_range;  // per direction, global [begin, end)
    std::vector<std::pair<int, int>> test_range;
    std::vector<std::pair<int, int>> point_range;
    std::vector<std::int64_t> trial_map;  // local flat index -> global flat index
    std::vector<std::int64_t> test_map;
    TensorQuadrature quad;

    [[nodiscard]] int local_trial(int dir) const {
        return trial_range[static_cast<std::size_t>(dir)].second - trial_range[static_cast<std::size_t>(dir)].first;
    }
    [[nodiscard]] int local_test(int dir) const {
        return test_range[static_cast<std::size_t>(dir)].second - test_range[static_cast<std::size_t>(dir)].first;
    }
    [[nodiscard]] int local_points(int dir) const {
        return point_range[static_cast<std::size_t>(dir)].second - point_range[static_cast<std::size_t>(dir)].first;
    }
};

/// Points in [lo, hi) belong to the box; the last box in a direction also
/// takes points at the right end of the domain.
[[nodiscard]] LocalSystem restrict(std::span<const UnivariateBasis> trial, std::span<const UnivariateBasis> test,
                                   const TensorQuadrature& quad, const Partition& partition, int box);

/// Sub-discretization of a box, re-using the global tables.
[[nodiscard]] Discretization local_discretization(const Discretization& global, const LocalSystem& local);

enum class DirectionPolicy { automatic, fixed };

/// Processing order: identity, or with the narrow direction moved last.
[[nodiscard]] std::vector<int> box_direction_order(const Partition& partition, DirectionPolicy policy);

struct LocalizedOptions {
    DirectionPolicy policy = DirectionPolicy::automatic;
    /// Boxes computed concurrently per wave; results are reduced in box order.
    int threads = 1;
    /// When set, box coefficients are built on demand from the box quadrature
    /// and the problem's coefficient field may be empty.
    CoefficientFactory factory;
};

/// Sum over boxes of S_test^T A_D S_trial, on the global pattern.
[[nodiscard]] SparseMatrix assemble_localized(const AssemblyProblem& problem, const Partition& partition,
                                              FlopCounter& counter, const LocalizedOptions& options = {});

/// Sum over boxes of S_test^T A_D S_trial u with matrix-free box operators.
[[nodiscard]] std::vector<double> apply_localized(const AssemblyProblem& problem, const Partition& partition,
                                                  std::span<const double> u, FlopCounter& counter,
                                                  const LocalizedOptions& options = {});

}  // namespace isosum
