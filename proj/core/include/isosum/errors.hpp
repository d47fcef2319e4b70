#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace isosum {

/// Evaluation point outside the parameter domain of a basis or geometry.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed input: unsorted points, mismatched lengths, bad sizes.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Requested derivative order is not available for the basis order.
class UnsupportedDerivativeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Problem too large for the requested code path (oracles, index ranges).
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Geometry map with a (numerically) singular Jacobian at a quadrature point.
class DegenerateGeometryError : public std::runtime_error {
public:
    DegenerateGeometryError(const std::string& what, std::size_t point)
        : std::runtime_error(what), point_(point) {}

    [[nodiscard]] std::size_t point() const noexcept { return point_; }

private:
    std::size_t point_;
};

/// A coefficient callable failed at a quadrature point.
class CoefficientError : public std::runtime_error {
public:
    CoefficientError(const std::string& what, std::size_t point) : std::runtime_error(what), point_(point) {}

    [[nodiscard]] std::size_t point() const noexcept { return point_; }

private:
    std::size_t point_;
};

}  // namespace isosum
