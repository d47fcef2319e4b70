#include "isosum/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "isosum/errors.hpp"
#include "isosum/matfree.hpp"

namespace isosum {

namespace {

// Cofactor inverse of a d x d row-major matrix, d <= 3. Returns the determinant.
double invert_small(int d, const double* a, double* out) {
    if (d == 1) {
        out[0] = 1.0 / a[0];
        return a[0];
    }
    if (d == 2) {
        const double det = a[0] * a[3] - a[1] * a[2];
        out[0] = a[3] / det;
        out[1] = -a[1] / det;
        out[2] = -a[2] / det;
        out[3] = a[0] / det;
        return det;
    }
    const double c00 = a[4] * a[8] - a[5] * a[7];
    const double c01 = a[5] * a[6] - a[3] * a[8];
    const double c02 = a[3] * a[7] - a[4] * a[6];
    const double det = a[0] * c00 + a[1] * c01 + a[2] * c02;
    out[0] = c00 / det;
    out[1] = (a[2] * a[7] - a[1] * a[8]) / det;
    out[2] = (a[1] * a[5] - a[2] * a[4]) / det;
    out[3] = c01 / det;
    out[4] = (a[0] * a[8] - a[2] * a[6]) / det;
    out[5] = (a[2] * a[3] - a[0] * a[5]) / det;
    out[6] = c02 / det;
    out[7] = (a[1] * a[6] - a[0] * a[7]) / det;
    out[8] = (a[0] * a[4] - a[1] * a[3]) / det;
    return det;
}

std::vector<double> greville_net(const std::vector<UnivariateBasis>& bases) {
    const int d = static_cast<int>(bases.size());
    std::vector<std::vector<double>> g;
    std::vector<int> dims;
    for (const auto& b : bases) {
        g.push_back(b.greville());
        dims.push_back(b.size());
    }
    const LexOrdering lex(dims);
    std::vector<double> net(static_cast<std::size_t>(lex.size() * d));
    for (std::int64_t n = 0; n < lex.size(); ++n) {
        const auto idx = lex.split(n);
        for (int i = 0; i < d; ++i) {
            net[static_cast<std::size_t>(n * d + i)] = g[static_cast<std::size_t>(i)][static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
        }
    }
    return net;
}

}  // namespace

std::int64_t GeometryMap::num_functions() const noexcept {
    std::int64_t n = 1;
    for (const auto& b : bases) {
        n *= b.size();
    }
    return n;
}

void GeometryMap::validate() const {
    const int d = dim();
    if (d < 1 || d > 3) {
        throw ArgumentError("GeometryMap: dimension must be 1, 2 or 3");
    }
    for (const auto& b : bases) {
        if (b.order() < 2) {
            throw ArgumentError("GeometryMap: basis order must be at least 2");
        }
    }
    if (static_cast<std::int64_t>(control_points.size()) != num_functions() * d) {
        throw ArgumentError("GeometryMap: control point count does not match the basis");
    }
    if (!weights.empty()) {
        if (static_cast<std::int64_t>(weights.size()) != num_functions()) {
            throw ArgumentError("GeometryMap: weight count does not match the basis");
        }
        for (const double w : weights) {
            if (!(w > 0.0)) {
                throw ArgumentError("GeometryMap: weights must be strictly positive");
            }
        }
    }
}

GeometryEvaluation eval_geometry(const GeometryMap& geo, const TensorQuadrature& quad, FlopCounter* counter) {
    geo.validate();
    const int d = geo.dim();
    if (quad.dim() != d) {
        throw ArgumentError("eval_geometry: quadrature dimension mismatch");
    }
    std::vector<BasisEvalTable> tables;
    for (int i = 0; i < d; ++i) {
        tables.push_back(tabulate(geo.bases[static_cast<std::size_t>(i)], quad.rule(i).points(), 1));
    }
    const std::int64_t n = geo.num_functions();
    const std::int64_t nx = quad.size();
    FlopCounter local;

    // values[c][k]: component c (d = denominator in the rational case),
    // derivative k (0 = value, 1 + j = d/dx_j).
    const int ncomp = geo.rational() ? d + 1 : d;
    std::vector<std::vector<std::vector<double>>> vals(static_cast<std::size_t>(ncomp));
    std::vector<double> coeffs(static_cast<std::size_t>(n));
    for (int c = 0; c < ncomp; ++c) {
        for (std::int64_t k = 0; k < n; ++k) {
            const double w = geo.rational() ? geo.weights[static_cast<std::size_t>(k)] : 1.0;
            coeffs[static_cast<std::size_t>(k)] = c < d ? w * geo.control_points[static_cast<std::size_t>(k * d + c)] : w;
        }
        for (int k = 0; k <= d; ++k) {
            std::vector<int> deriv(static_cast<std::size_t>(d), 0);
            if (k > 0) {
                deriv[static_cast<std::size_t>(k - 1)] = 1;
            }
            vals[static_cast<std::size_t>(c)].push_back(eval_field(coeffs, tables, deriv, &local));
        }
    }

    GeometryEvaluation out;
    out.dim = d;
    out.shape = quad.shape();
    out.points.resize(static_cast<std::size_t>(nx * d));
    out.jacobian.resize(static_cast<std::size_t>(nx * d * d));
    out.inverse.resize(static_cast<std::size_t>(nx * d * d));
    out.det.resize(static_cast<std::size_t>(nx));
    for (std::int64_t x = 0; x < nx; ++x) {
        const auto xs = static_cast<std::size_t>(x);
        double* jac = out.jacobian.data() + x * d * d;
        const double wv = geo.rational() ? vals[static_cast<std::size_t>(d)][0][xs] : 1.0;
        for (int c = 0; c < d; ++c) {
            const double g = vals[static_cast<std::size_t>(c)][0][xs];
            out.points[static_cast<std::size_t>(x * d + c)] = g / wv;
            for (int j = 0; j < d; ++j) {
                const double dg = vals[static_cast<std::size_t>(c)][static_cast<std::size_t>(j + 1)][xs];
                if (geo.rational()) {
                    const double dw = vals[static_cast<std::size_t>(d)][static_cast<std::size_t>(j + 1)][xs];
                    jac[c * d + j] = (dg * wv - g * dw) / (wv * wv);
                } else {
                    jac[c * d + j] = dg;
                }
            }
        }
        double scale = 0.0;
        for (int k = 0; k < d * d; ++k) {
            scale = std::max(scale, std::abs(jac[k]));
        }
        double* inv = out.inverse.data() + x * d * d;
        const double det = invert_small(d, jac, inv);
        if (!(std::abs(det) >= 1e-12 * std::pow(scale, d)) || scale == 0.0) {
            const auto pt = quad.point(x);
            std::string where = "(";
            for (int i = 0; i < d; ++i) {
                where += (i ? ", " : "") + std::to_string(pt[static_cast<std::size_t>(i)]);
            }
            throw DegenerateGeometryError("eval_geometry: singular Jacobian at quadrature point " +
                                              std::to_string(x) + " " + where + ")",
                                          static_cast<std::size_t>(x));
        }
        out.det[xs] = det;
    }
    if (counter != nullptr) {
        counter->coefficient += local.field_eval + static_cast<std::uint64_t>(nx * (d * d + d * d * d));
    }
    return out;
}

PDEData laplace_pde() {
    PDEData pde;
    pde.diffusion = [](std::span<const double>, std::span<double> a) {
        const auto d = static_cast<std::size_t>(std::sqrt(static_cast<double>(a.size())) + 0.5);
        std::fill(a.begin(), a.end(), 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            a[i * d + i] = 1.0;
        }
    };
    return pde;
}

PDEData mass_pde() {
    PDEData pde;
    pde.reaction = [](std::span<const double>) { return 1.0; };
    return pde;
}

PDEData convection_diffusion_pde(std::vector<double> b, double c) {
    PDEData pde = laplace_pde();
    pde.convection = [b = std::move(b)](std::span<const double>, std::span<double> out) {
        if (b.size() != out.size()) {
            throw ArgumentError("convection vector has " + std::to_string(b.size()) + " components, expected " +
                                std::to_string(out.size()));
        }
        std::copy(b.begin(), b.end(), out.begin());
    };
    pde.reaction = [c](std::span<const double>) { return c; };
    return pde;
}

CoefficientField build_coefficient_field(const GeometryEvaluation& geo, const PDEData& pde, FlopCounter* counter) {
    const int d = geo.dim;
    const bool reaction_only = !pde.diffusion && !pde.convection;
    const int s = reaction_only ? 1 : d + 1;
    CoefficientField f = reaction_only ? CoefficientField(value_derivs(d), value_derivs(d), geo.shape)
                                       : CoefficientField(gradient_derivs(d), gradient_derivs(d), geo.shape);
    std::vector<double> a(static_cast<std::size_t>(d * d));
    std::vector<double> b(static_cast<std::size_t>(d));
    std::vector<double> ka(static_cast<std::size_t>(d * d));
    for (std::int64_t x = 0; x < geo.size(); ++x) {
        const auto pt = geo.point(x);
        double c = 0.0;
        std::fill(a.begin(), a.end(), 0.0);
        std::fill(b.begin(), b.end(), 0.0);
        try {
            if (pde.diffusion) {
                pde.diffusion(pt, a);
            }
            if (pde.convection) {
                pde.convection(pt, b);
            }
            if (pde.reaction) {
                c = pde.reaction(pt);
            }
        } catch (const std::exception& e) {
            throw CoefficientError(std::string("coefficient evaluation failed at quadrature point ") +
                                       std::to_string(x) + ": " + e.what(),
                                   static_cast<std::size_t>(x));
        }
        const auto k = geo.inv(x);
        const double ad = std::abs(geo.det[static_cast<std::size_t>(x)]);
        double* m = f.values().data() + f.index(x, 0, 0);
        m[0] = ad * c;
        if (reaction_only) {
            continue;
        }
        for (int i = 0; i < d; ++i) {
            double kb = 0.0;
            for (int l = 0; l < d; ++l) {
                kb += k[static_cast<std::size_t>(i * d + l)] * b[static_cast<std::size_t>(l)];
            }
            m[(1 + i) * s] = ad * kb;
        }
        for (int i = 0; i < d; ++i) {
            for (int l = 0; l < d; ++l) {
                double sum = 0.0;
                for (int r = 0; r < d; ++r) {
                    sum += k[static_cast<std::size_t>(i * d + r)] * a[static_cast<std::size_t>(r * d + l)];
                }
                ka[static_cast<std::size_t>(i * d + l)] = sum;
            }
        }
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                double sum = 0.0;
                for (int l = 0; l < d; ++l) {
                    sum += ka[static_cast<std::size_t>(i * d + l)] * k[static_cast<std::size_t>(j * d + l)];
                }
                m[(1 + i) * s + 1 + j] = ad * sum;
            }
        }
    }
    if (counter != nullptr) {
        counter->coefficient += static_cast<std::uint64_t>(geo.size() * (2 * d * d * d + d * d + s * s));
    }
    return f;
}

CoefficientFactory make_coefficient_factory(GeometryMap geo, PDEData pde) {
    return [geo = std::move(geo), pde = std::move(pde)](const TensorQuadrature& quad) {
        return build_coefficient_field(eval_geometry(geo, quad), pde);
    };
}

GeometryMap identity_geometry(int dim) {
    if (dim < 1 || dim > 3) {
        throw ArgumentError("identity_geometry: dimension must be 1, 2 or 3");
    }
    GeometryMap g;
    for (int i = 0; i < dim; ++i) {
        g.bases.emplace_back(KnotVector::uniform(2, 1));
    }
    g.control_points = greville_net(g.bases);
    return g;
}

GeometryMap affine_geometry(int dim, std::span<const double> matrix, std::span<const double> offset) {
    if (static_cast<int>(matrix.size()) != dim * dim || static_cast<int>(offset.size()) != dim) {
        throw ArgumentError("affine_geometry: matrix or offset has the wrong size");
    }
    GeometryMap g = identity_geometry(dim);
    const std::size_t d = static_cast<std::size_t>(dim);
    for (std::size_t n = 0; n * d < g.control_points.size(); ++n) {
        std::vector<double> x(g.control_points.begin() + static_cast<std::ptrdiff_t>(n * d),
                              g.control_points.begin() + static_cast<std::ptrdiff_t>((n + 1) * d));
        for (std::size_t i = 0; i < d; ++i) {
            double y = offset[i];
            for (std::size_t j = 0; j < d; ++j) {
                y += matrix[i * d + j] * x[j];
            }
            g.control_points[n * d + i] = y;
        }
    }
    return g;
}

GeometryMap quarter_annulus() {
    GeometryMap g;
    g.bases.emplace_back(KnotVector::uniform(2, 1));
    g.bases.emplace_back(KnotVector::uniform(3, 1));
    const double h = 1.0 / std::numbers::sqrt2;
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 2; ++i) {
            const double r = 1.0 + i;
            const double px[3] = {r, r, 0.0};
            const double py[3] = {0.0, r, r};
            g.control_points.push_back(px[j]);
            g.control_points.push_back(py[j]);
            g.weights.push_back(j == 1 ? h : 1.0);
        }
    }
    return g;
}

GeometryMap twisted_box() {
    GeometryMap g;
    for (int i = 0; i < 3; ++i) {
        g.bases.emplace_back(KnotVector::uniform(3, 1));
    }
    const auto net = greville_net(g.bases);
    for (std::size_t n = 0; n * 3 < net.size(); ++n) {
        const double u = net[3 * n] - 0.5;
        const double v = net[3 * n + 1] - 0.5;
        const double w = net[3 * n + 2];
        const double angle = 0.6 * w;
        g.control_points.push_back(0.5 + std::cos(angle) * u - std::sin(angle) * v + 0.4 * w * w);
        g.control_points.push_back(0.5 + std::sin(angle) * u + std::cos(angle) * v);
        g.control_points.push_back(w + 0.3 * (u * u + v * v));
    }
    return g;
}

GeometryMap builtin_geometry(const std::string& name) {
    if (name == "identity1d") {
        return identity_geometry(1);
    }
    if (name == "identity2d") {
        return identity_geometry(2);
    }
    if (name == "identity3d") {
        return identity_geometry(3);
    }
    if (name == "affine1d") {
        const double m[] = {2.0};
        const double t[] = {0.5};
        return affine_geometry(1, m, t);
    }
    if (name == "affine2d") {
        const double m[] = {2.0, 0.5, 0.25, 1.5};
        const double t[] = {1.0, -1.0};
        return affine_geometry(2, m, t);
    }
    if (name == "affine3d") {
        const double m[] = {2.0, 0.5, 0.0, 0.25, 1.5, 0.1, 0.0, 0.2, 1.25};
        const double t[] = {0.5, 0.0, -0.5};
        return affine_geometry(3, m, t);
    }
    if (name == "quarter_annulus") {
        return quarter_annulus();
    }
    if (name == "twisted_box") {
        return twisted_box();
    }
    throw ArgumentError("unknown geometry '" + name + "'");
}

}  // namespace isosum
