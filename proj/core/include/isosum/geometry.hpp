#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "isosum/bspline.hpp"
#include "isosum/coefficient_field.hpp"
#include "isosum/flops.hpp"
#include "isosum/quadrature.hpp"

namespace isosum {

/// G(x) = sum_n c_n phi_n(x), or (sum_n w_n c_n phi_n) / (sum_n w_n phi_n)
/// when weights are given. Control points are stored row by row in the flat
/// (direction 0 fastest) function index.
struct GeometryMap {
    std::vector<UnivariateBasis> bases;
    std::vector<double> control_points;  // N x dim
    std::vector<double> weights;         // empty, or N positive values

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(bases.size()); }
    [[nodiscard]] std::int64_t num_functions() const noexcept;
    [[nodiscard]] bool rational() const noexcept { return !weights.empty(); }
    void validate() const;
};

/// G, its Jacobian J(i, j) = dG_i/dx_j, |det J| and J^{-1} at every point of a
/// tensor grid (direction 0 fastest).
struct GeometryEvaluation {
    int dim = 0;
    std::vector<int> shape;
    std::vector<double> points;    // #X x dim
    std::vector<double> jacobian;  // #X x dim x dim, row-major
    std::vector<double> det;       // signed determinant
    std::vector<double> inverse;   // #X x dim x dim, row-major

    [[nodiscard]] std::int64_t size() const noexcept { return static_cast<std::int64_t>(det.size()); }
    [[nodiscard]] std::span<const double> point(std::int64_t x) const {
        return {points.data() + x * dim, static_cast<std::size_t>(dim)};
    }
    [[nodiscard]] std::span<const double> jac(std::int64_t x) const {
        return {jacobian.data() + x * dim * dim, static_cast<std::size_t>(dim * dim)};
    }
    [[nodiscard]] std::span<const double> inv(std::int64_t x) const {
        return {inverse.data() + x * dim * dim, static_cast<std::size_t>(dim * dim)};
    }
};

/// Throws DegenerateGeometryError naming the first point where
/// |det J| < 1e-12 * max|J_ij|^dim.
[[nodiscard]] GeometryEvaluation eval_geometry(const GeometryMap& geo, const TensorQuadrature& quad,
                                               FlopCounter* counter = nullptr);

/// Physical coefficients of -div(A grad u) + b . grad u + c u, sampled at
/// mapped points. Empty callables mean zero.
struct PDEData {
    std::function<void(std::span<const double> x, std::span<double> a)> diffusion;  // d x d, row-major
    std::function<void(std::span<const double> x, std::span<double> b)> convection;
    std::function<double(std::span<const double> x)> reaction;
};

[[nodiscard]] PDEData laplace_pde();
[[nodiscard]] PDEData mass_pde();
[[nodiscard]] PDEData convection_diffusion_pde(std::vector<double> b, double c);

/// Pulled-back coefficient on the derivative sets {0, e_0, .., e_{d-1}}:
///   F_00 = |J| c,  F_{0,j} = 0,  F_{i,0} = |J| (J^{-1} b)_i,
///   F_{i,j} = |J| (J^{-1} A J^{-T})_{ij},
/// rows indexing test derivatives and columns trial derivatives. Without
/// diffusion and convection callables the sets shrink to {0}.
[[nodiscard]] CoefficientField build_coefficient_field(const GeometryEvaluation& geo, const PDEData& pde,
                                                       FlopCounter* counter = nullptr);

/// Builds a coefficient field on any sub-grid of the parameter domain.
using CoefficientFactory = std::function<CoefficientField(const TensorQuadrature& quad)>;
[[nodiscard]] CoefficientFactory make_coefficient_factory(GeometryMap geo, PDEData pde);

/// Tensor-product map with Greville control points, so G(x) = x.
[[nodiscard]] GeometryMap identity_geometry(int dim);
/// G(x) = M x + t, given M row-major.
[[nodiscard]] GeometryMap affine_geometry(int dim, std::span<const double> matrix, std::span<const double> offset);
/// Rational quadratic quarter annulus, radii 1 and 2; area 3 pi / 4.
[[nodiscard]] GeometryMap quarter_annulus();
/// Quadratic box, twisted about the vertical axis and bent sideways.
[[nodiscard]] GeometryMap twisted_box();
/// identity1d/2d/3d, identity2d, affine1d/2d/3d, quarter_annulus, twisted_box.
[[nodiscard]] GeometryMap builtin_geometry(const std::string& name);

}  // namespace isosum
