#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "isosum/errors.hpp"
#include "isosum/geometry.hpp"
#include "isosum/problem.hpp"
#include "isosum/sumfac.hpp"
#include "oracles.hpp"

using namespace isosum;

namespace {

TensorQuadrature grid(int dim, std::vector<double> pts) {
    std::vector<QuadratureRule1D> rules(static_cast<std::size_t>(dim),
                                        custom_rule(pts, std::vector<double>(pts.size(), 1.0)));
    return TensorQuadrature(std::move(rules));
}

// Exact rational quadratic quarter circle, radius r.
std::vector<double> annulus_point(double s, double t) {
    const double h = 1.0 / std::numbers::sqrt2;
    const double den = (1 - t) * (1 - t) + 2 * t * (1 - t) * h + t * t;
    const double x = ((1 - t) * (1 - t) + 2 * t * (1 - t) * h) / den;
    const double y = (2 * t * (1 - t) * h + t * t) / den;
    return {(1 + s) * x, (1 + s) * y};
}

// G(x) = sum c_n prod B_n(x_i), evaluated by recursion.
std::vector<double> spline_map(const GeometryMap& g, const std::vector<double>& x) {
    const int d = g.dim();
    std::vector<double> num(static_cast<std::size_t>(d), 0.0);
    double den = 0.0;
    const LexOrdering lex([&] {
        std::vector<int> n;
        for (const auto& b : g.bases) {
            n.push_back(b.size());
        }
        return n;
    }());
    for (std::int64_t n = 0; n < lex.size(); ++n) {
        double phi = 1.0;
        for (int i = 0; i < d; ++i) {
            const auto& kv = g.bases[static_cast<std::size_t>(i)].knot_vector();
            phi *= oracle::bspline({kv.knots().begin(), kv.knots().end()}, kv.order(), lex.component(n, i),
                                   x[static_cast<std::size_t>(i)]);
        }
        const double w = g.rational() ? g.weights[static_cast<std::size_t>(n)] : 1.0;
        den += w * phi;
        for (int i = 0; i < d; ++i) {
            num[static_cast<std::size_t>(i)] += w * phi * g.control_points[static_cast<std::size_t>(n * d + i)];
        }
    }
    for (auto& v : num) {
        v /= den;
    }
    return num;
}

std::vector<double> fd_jacobian(const std::function<std::vector<double>(const std::vector<double>&)>& f,
                                const std::vector<double>& x) {
    const std::size_t d = x.size();
    const double h = 1e-6;
    std::vector<double> j(d * d);
    for (std::size_t c = 0; c < d; ++c) {
        auto xp = x;
        auto xm = x;
        xp[c] += h;
        xm[c] -= h;
        const auto fp = f(xp);
        const auto fm = f(xm);
        for (std::size_t r = 0; r < d; ++r) {
            j[r * d + c] = (fp[r] - fm[r]) / (2 * h);
        }
    }
    return j;
}

double det(const std::vector<double>& j) {
    if (j.size() == 1) {
        return j[0];
    }
    if (j.size() == 4) {
        return j[0] * j[3] - j[1] * j[2];
    }
    return j[0] * (j[4] * j[8] - j[5] * j[7]) - j[1] * (j[3] * j[8] - j[5] * j[6]) + j[2] * (j[3] * j[7] - j[4] * j[6]);
}

// Polynomials in two variables as exponent -> coefficient maps.
using Poly = std::map<std::pair<int, int>, double>;

Poly mul(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ea, ca] : a) {
        for (const auto& [eb, cb] : b) {
            out[{ea.first + eb.first, ea.second + eb.second}] += ca * cb;
        }
    }
    return out;
}

Poly axpy(double s, const Poly& a, Poly b) {
    for (const auto& [e, c] : a) {
        b[e] += s * c;
    }
    return b;
}

double integrate_unit_square(const Poly& p) {
    double s = 0.0;
    for (const auto& [e, c] : p) {
        s += c / ((e.first + 1) * (e.second + 1));
    }
    return s;
}

Poly deriv(const Poly& p, int dir) {
    Poly out;
    for (const auto& [e, c] : p) {
        const int k = dir == 0 ? e.first : e.second;
        if (k > 0) {
            out[dir == 0 ? std::pair{e.first - 1, e.second} : std::pair{e.first, e.second - 1}] += c * k;
        }
    }
    return out;
}

// B-spline coefficients of x^m by blossoming: elementary symmetric function of
// the interior knots of each function, divided by binomial(degree, m).
std::vector<double> monomial_coefficients(const UnivariateBasis& b, int m) {
    const int k = b.order() - 1;
    const auto t = b.knot_vector().knots();
    std::vector<double> out;
    for (int n = 0; n < b.size(); ++n) {
        std::vector<double> e(static_cast<std::size_t>(k + 1), 0.0);
        e[0] = 1.0;
        for (int i = 1; i <= k; ++i) {
            const double v = t[static_cast<std::size_t>(n + i)];
            for (int j = i; j >= 1; --j) {
                e[static_cast<std::size_t>(j)] += v * e[static_cast<std::size_t>(j - 1)];
            }
        }
        double binom = 1.0;
        for (int j = 1; j <= m; ++j) {
            binom = binom * (k - j + 1) / j;
        }
        out.push_back(e[static_cast<std::size_t>(m)] / binom);
    }
    return out;
}

}  // namespace

TEST(Geometry, IdentityHasUnitJacobian) {
    for (int d = 1; d <= 3; ++d) {
        const auto geo = eval_geometry(identity_geometry(d), grid(d, {0.0, 0.3, 1.0}));
        for (std::int64_t x = 0; x < geo.size(); ++x) {
            EXPECT_NEAR(geo.det[static_cast<std::size_t>(x)], 1.0, 1e-14);
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) {
                    EXPECT_NEAR(geo.jac(x)[static_cast<std::size_t>(i * d + j)], i == j ? 1.0 : 0.0, 1e-14);
                }
            }
        }
    }
}

TEST(Geometry, ScalingDeterminantIsExact) {
    for (int d = 1; d <= 3; ++d) {
        std::vector<double> m(static_cast<std::size_t>(d * d), 0.0);
        for (int i = 0; i < d; ++i) {
            m[static_cast<std::size_t>(i * d + i)] = 2.0;
        }
        const std::vector<double> t(static_cast<std::size_t>(d), 0.0);
        const auto geo = eval_geometry(affine_geometry(d, m, t), grid(d, {0.1, 0.7}));
        for (const double v : geo.det) {
            EXPECT_EQ(v, std::pow(2.0, d));
        }
    }
}

TEST(Geometry, AffineJacobianIsTheMatrix) {
    const auto g = builtin_geometry("affine3d");
    const auto geo = eval_geometry(g, grid(3, {0.2, 0.9}));
    const std::vector<double> m{2.0, 0.5, 0.0, 0.25, 1.5, 0.1, 0.0, 0.2, 1.25};
    for (std::int64_t x = 0; x < geo.size(); ++x) {
        for (std::size_t k = 0; k < 9; ++k) {
            EXPECT_NEAR(geo.jac(x)[k], m[k], 1e-14);
        }
        EXPECT_NEAR(geo.det[static_cast<std::size_t>(x)], det(m), 1e-13);
    }
}

TEST(Geometry, QuarterAnnulusCorners) {
    const auto geo = eval_geometry(quarter_annulus(), grid(2, {0.0, 1.0}));
    const std::vector<std::vector<double>> want{{1, 0}, {2, 0}, {0, 1}, {0, 2}};
    for (std::int64_t x = 0; x < 4; ++x) {
        EXPECT_NEAR(geo.point(x)[0], want[static_cast<std::size_t>(x)][0], 1e-13);
        EXPECT_NEAR(geo.point(x)[1], want[static_cast<std::size_t>(x)][1], 1e-13);
    }
}

TEST(Geometry, QuarterAnnulusMatchesClosedFormAndDifferences) {
    const std::vector<double> pts{0.05, 0.3, 0.5, 0.77, 0.95};
    const auto geo = eval_geometry(quarter_annulus(), grid(2, pts));
    for (std::int64_t x = 0; x < geo.size(); ++x) {
        const std::vector<double> xi{pts[static_cast<std::size_t>(x % 5)], pts[static_cast<std::size_t>(x / 5)]};
        const auto want = annulus_point(xi[0], xi[1]);
        EXPECT_NEAR(geo.point(x)[0], want[0], 1e-13);
        EXPECT_NEAR(geo.point(x)[1], want[1], 1e-13);
        EXPECT_NEAR(std::hypot(geo.point(x)[0], geo.point(x)[1]), 1.0 + xi[0], 1e-13);
        const auto j = fd_jacobian([](const std::vector<double>& v) { return annulus_point(v[0], v[1]); }, xi);
        for (std::size_t k = 0; k < 4; ++k) {
            EXPECT_NEAR(geo.jac(x)[k], j[k], 1e-6);
        }
        EXPECT_NEAR(std::abs(geo.det[static_cast<std::size_t>(x)]), std::abs(det(j)), 1e-6);
        // J J^{-1} = I
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) {
                double s = 0.0;
                for (int l = 0; l < 2; ++l) {
                    s += geo.jac(x)[static_cast<std::size_t>(r * 2 + l)] * geo.inv(x)[static_cast<std::size_t>(l * 2 + c)];
                }
                EXPECT_NEAR(s, r == c ? 1.0 : 0.0, 1e-13);
            }
        }
    }
}

TEST(Geometry, TwistedBoxMatchesRecursionAndDifferences) {
    const auto g = twisted_box();
    const std::vector<double> pts{0.1, 0.45, 0.9};
    const auto geo = eval_geometry(g, grid(3, pts));
    const LexOrdering lex({3, 3, 3});
    for (std::int64_t x = 0; x < geo.size(); ++x) {
        std::vector<double> xi;
        for (int i = 0; i < 3; ++i) {
            xi.push_back(pts[static_cast<std::size_t>(lex.component(x, i))]);
        }
        const auto want = spline_map(g, xi);
        for (std::size_t i = 0; i < 3; ++i) {
            EXPECT_NEAR(geo.point(x)[i], want[i], 1e-13);
        }
        const auto j = fd_jacobian([&](const std::vector<double>& v) { return spline_map(g, v); }, xi);
        for (std::size_t k = 0; k < 9; ++k) {
            EXPECT_NEAR(geo.jac(x)[k], j[k], 1e-6);
        }
        EXPECT_NEAR(geo.det[static_cast<std::size_t>(x)], det(j), 1e-6);
        EXPECT_GT(geo.det[static_cast<std::size_t>(x)], 0.0);
    }
}

TEST(Geometry, DegenerateMapNamesThePoint) {
    auto g = identity_geometry(2);
    for (std::size_t n = 0; n < 4; ++n) {
        g.control_points[2 * n] = 0.0;
    }
    try {
        (void)eval_geometry(g, grid(2, {0.25, 0.75}));
        FAIL() << "expected DegenerateGeometryError";
    } catch (const DegenerateGeometryError& e) {
        EXPECT_EQ(e.point(), 0U);
        EXPECT_NE(std::string(e.what()).find("point 0"), std::string::npos);
    }
}

TEST(Geometry, RejectsInvalidMaps) {
    auto g = quarter_annulus();
    g.weights[1] = -1.0;
    EXPECT_THROW(g.validate(), ArgumentError);
    auto h = identity_geometry(2);
    h.control_points.pop_back();
    EXPECT_THROW(h.validate(), ArgumentError);
    EXPECT_THROW((void)builtin_geometry("torus"), ArgumentError);
}

TEST(CoefficientField, IdentityLaplaceAndMass) {
    const auto geo = eval_geometry(identity_geometry(2), grid(2, {0.2, 0.8}));
    const auto lap = build_coefficient_field(geo, laplace_pde());
    ASSERT_EQ(lap.num_trial(), 3);
    for (std::int64_t x = 0; x < lap.num_points(); ++x) {
        for (int s = 0; s < 3; ++s) {
            for (int r = 0; r < 3; ++r) {
                EXPECT_NEAR(lap(x, s, r), (s == r && s > 0) ? 1.0 : 0.0, 1e-15);
            }
        }
    }
    const auto mass = build_coefficient_field(geo, mass_pde());
    ASSERT_EQ(mass.num_trial(), 1);
    for (std::int64_t x = 0; x < mass.num_points(); ++x) {
        EXPECT_EQ(mass(x, 0, 0), 1.0);
    }
}

TEST(CoefficientField, ScaledMapGradientBlockIsIdentity) {
    const std::vector<double> m{2.0, 0.0, 0.0, 2.0};
    const std::vector<double> t{0.0, 0.0};
    const auto geo = eval_geometry(affine_geometry(2, m, t), grid(2, {0.3}));
    const auto f = build_coefficient_field(geo, laplace_pde());
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            EXPECT_NEAR(f(0, 1 + i, 1 + j), i == j ? 1.0 : 0.0, 1e-15);
        }
    }
}

TEST(CoefficientField, ConvectionPullbackAndSymmetry) {
    const auto g = quarter_annulus();
    const std::vector<double> pts{0.1, 0.6};
    const auto geo = eval_geometry(g, grid(2, pts));
    const auto sym = build_coefficient_field(geo, convection_diffusion_pde({0.0, 0.0}, 2.0));
    const auto cd = build_coefficient_field(geo, convection_diffusion_pde({1.0, -0.5}, 2.0));
    for (std::int64_t x = 0; x < geo.size(); ++x) {
        for (int s = 0; s < 3; ++s) {
            for (int r = 0; r < 3; ++r) {
                EXPECT_NEAR(sym(x, s, r), sym(x, r, s), 1e-14);
            }
        }
        // the convection row pairs the trial value with the test gradient
        const auto j = geo.jac(x);
        const double dt = det({j.begin(), j.end()});
        const std::vector<double> kinv{j[3] / dt, -j[1] / dt, -j[2] / dt, j[0] / dt};
        for (int i = 0; i < 2; ++i) {
            const double kb = kinv[static_cast<std::size_t>(2 * i)] * 1.0 + kinv[static_cast<std::size_t>(2 * i + 1)] * -0.5;
            EXPECT_NEAR(cd(x, 1 + i, 0), std::abs(dt) * kb, 1e-13);
            EXPECT_EQ(cd(x, 0, 1 + i), 0.0);
        }
        EXPECT_NEAR(cd(x, 0, 0), 2.0 * std::abs(dt), 1e-13);
    }
}

TEST(CoefficientField, CallableFailureCarriesThePoint) {
    PDEData pde = mass_pde();
    int calls = 0;
    pde.reaction = [&calls](std::span<const double>) -> double {
        if (++calls == 3) {
            throw std::runtime_error("boom");
        }
        return 1.0;
    };
    const auto geo = eval_geometry(identity_geometry(2), grid(2, {0.2, 0.8}));
    try {
        (void)build_coefficient_field(geo, pde);
        FAIL() << "expected CoefficientError";
    } catch (const CoefficientError& e) {
        EXPECT_EQ(e.point(), 2U);
        EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
    }
}

// u^T A u against the exact integral of A grad u . grad u + (b . grad u) u + c u^2
// for a manufactured polynomial u on an affine image of the unit square.
TEST(CoefficientField, PullbackQuadraticFormMatchesExactIntegral) {
    const std::vector<double> b{0.7, -0.3};
    const double c = 1.5;
    for (const std::string geometry : {"identity", "affine"}) {
        for (int order = 2; order <= 4; ++order) {
            ProblemSpec spec;
            spec.dim = 2;
            spec.order = {order};
            spec.elements = {3};
            spec.geometry = geometry;
            spec.pde = "convdiff";
            spec.convection = b;
            spec.reaction = c;
            const auto built = build_problem(spec);
            FlopCounter fc;
            const auto a = assemble(built.problem, fc);

            // u(xi) = P0(xi_0) P1(xi_1) with deg P < order
            std::vector<double> p0(static_cast<std::size_t>(order), 0.0);
            std::vector<double> p1(static_cast<std::size_t>(order), 0.0);
            for (int m = 0; m < order; ++m) {
                p0[static_cast<std::size_t>(m)] = 1.0 / (1 + m);
                p1[static_cast<std::size_t>(m)] = (m % 2 ? -0.5 : 1.0) * (m + 1);
            }
            const auto& b0 = built.problem.trial[0];
            const auto& b1 = built.problem.trial[1];
            std::vector<double> c0(static_cast<std::size_t>(b0.size()), 0.0);
            std::vector<double> c1(static_cast<std::size_t>(b1.size()), 0.0);
            Poly u;
            for (int m = 0; m < order; ++m) {
                const auto e0 = monomial_coefficients(b0, m);
                const auto e1 = monomial_coefficients(b1, m);
                for (std::size_t n = 0; n < e0.size(); ++n) {
                    c0[n] += p0[static_cast<std::size_t>(m)] * e0[n];
                }
                for (std::size_t n = 0; n < e1.size(); ++n) {
                    c1[n] += p1[static_cast<std::size_t>(m)] * e1[n];
                }
                for (int l = 0; l < order; ++l) {
                    u[{m, l}] = p0[static_cast<std::size_t>(m)] * p1[static_cast<std::size_t>(l)];
                }
            }
            std::vector<double> coeffs;
            for (double y : c1) {
                for (double x : c0) {
                    coeffs.push_back(x * y);
                }
            }
            const auto au = a.multiply(coeffs);
            double quad = 0.0;
            for (std::size_t i = 0; i < coeffs.size(); ++i) {
                quad += coeffs[i] * au[i];
            }

            const std::vector<double> m = geometry == "identity" ? std::vector<double>{1, 0, 0, 1}
                                                                 : std::vector<double>{2.0, 0.5, 0.25, 1.5};
            const double dm = det(m);
            // physical gradient = M^{-T} parametric gradient
            const std::vector<double> mit{m[3] / dm, -m[2] / dm, -m[1] / dm, m[0] / dm};
            const Poly du0 = deriv(u, 0);
            const Poly du1 = deriv(u, 1);
            const Poly g0 = axpy(mit[0], du0, axpy(mit[1], du1, {}));
            const Poly g1 = axpy(mit[2], du0, axpy(mit[3], du1, {}));
            Poly integrand = axpy(1.0, mul(g0, g0), mul(g1, g1));
            integrand = axpy(b[0], mul(g0, u), integrand);
            integrand = axpy(b[1], mul(g1, u), integrand);
            integrand = axpy(c, mul(u, u), integrand);
            const double exact = std::abs(dm) * integrate_unit_square(integrand);
            EXPECT_NEAR(quad, exact, 1e-10 * std::abs(exact)) << geometry << " order " << order;
        }
    }
}
