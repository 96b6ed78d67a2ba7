// Manufactured test cases on the unit square and the source term derived
// from them through the chain rule.
//
//   nondeg-flux       u = sin(pi x) sin(pi y), constant delta > 0
//   nondeg-potential  u = sin(pi x) sin(pi y) + (pi + 1)(x + y), delta = 0
//   nondeg-couple     u = sin(pi x) sin(pi y), delta = sum of five bumps
//   degenerate        u = exp(-10(|x-1/2|^b + |y-1/2|^b)) / 10, b = p + (k+2)/4, delta = 0
//
// All cases use mu = a = 1.

#pragma once

#include "hho/flux.hpp"
#include "hho/mesh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hho {

using MatrixField = std::function<Eigen::Matrix2d(const Point&)>;

struct CaseSpec
{
    std::string name;
    double p = 2.0;
    int k = 1;
    double mu = 1.0;
    double a = 1.0;

    ScalarField u;
    VectorField grad_u;
    MatrixField hess_u;
    ScalarField delta;
    VectorField grad_delta;

    /// Constant stabilization offset zeta, set to sup (delta + |grad u|).
    double zeta = 0.0;
    /// |u|_{W^{k+2,inf}}, when known for this case.
    std::optional<double> u_wk2_inf;
    /// Whether u vanishes on the boundary of the unit square.
    bool homogeneous_bc = true;

    /// Value of the degeneracy field as a case parameter (nondeg-flux only).
    double delta_value = 0.0;

    FluxModel flux() const
    {
        return FluxModel::carreau_yasuda(p, mu, a, delta, grad_delta);
    }

    /// Dirichlet data g = u on the boundary.
    double boundary(const Point& x) const { return u(x); }

    /// f = -div( mu (delta + |grad u|)^{p-2} grad u ), a = 1.
    double source(const Point& x) const;
};

class UnknownCaseError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

inline const std::vector<std::string>&
case_names()
{
    static const std::vector<std::string> names{"nondeg-flux", "nondeg-potential", "nondeg-couple",
                                                "degenerate"};
    return names;
}

/// |t|^e with the limit 0 at t = 0 for e > 0.
inline double
abs_pow(double t, double e)
{
    if (e == 0.0)
        return 1.0;
    const double at = std::abs(t);
    return at == 0.0 ? 0.0 : std::exp(e * std::log(at));
}

inline double
CaseSpec::source(const Point& x) const
{
    const Eigen::Vector2d g = grad_u(x);
    const Eigen::Matrix2d hs = hess_u(x);
    const double r = g.norm();
    const double base = delta(x) + r;
    const double lap = hs.trace();

    if (p == 2.0)
        return -mu * lap;
    if (base <= 0.0)
        return 0.0; // measure-zero singular point of the p-Laplacian

    // grad(delta + |grad u|) . grad u, the H grad u / |grad u| part dropped at exact zeros.
    Eigen::Vector2d grad_base = grad_delta(x);
    if (r > 1e-13)
        grad_base += hs * g / r;
    return -mu * ((p - 2.0) * std::pow(base, p - 3.0) * grad_base.dot(g) +
                  std::pow(base, p - 2.0) * lap);
}

namespace detail {

inline void
set_sine(CaseSpec& c)
{
    c.u = [](const Point& x) { return std::sin(M_PI * x.x()) * std::sin(M_PI * x.y()); };
    c.grad_u = [](const Point& x) {
        const double sx = std::sin(M_PI * x.x()), cx = std::cos(M_PI * x.x());
        const double sy = std::sin(M_PI * x.y()), cy = std::cos(M_PI * x.y());
        return Eigen::Vector2d(M_PI * cx * sy, M_PI * sx * cy);
    };
    c.hess_u = [](const Point& x) {
        const double sx = std::sin(M_PI * x.x()), cx = std::cos(M_PI * x.x());
        const double sy = std::sin(M_PI * x.y()), cy = std::cos(M_PI * x.y());
        const double pp = M_PI * M_PI;
        Eigen::Matrix2d h;
        h << -pp * sx * sy, pp * cx * cy, pp * cx * cy, -pp * sx * sy;
        return h;
    };
}

inline void
set_zero_delta(CaseSpec& c)
{
    c.delta = constant_field(0.0);
    c.grad_delta = [](const Point&) { return Eigen::Vector2d::Zero().eval(); };
}

/// sup over a (n+1)^2 lattice of the unit square.
inline double
lattice_sup(const std::function<double(const Point&)>& f, int n = 400)
{
    double m = -std::numeric_limits<double>::infinity();
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            m = std::max(m, f(Point(double(i) / n, double(j) / n)));
    return m;
}

inline const std::array<Point, 5>&
bump_centers()
{
    static const std::array<Point, 5> c{Point(0, 0), Point(1, 0), Point(0, 1), Point(1, 1),
                                        Point(0.5, 0.5)};
    return c;
}

} // namespace detail

/// Sum of five C-infinity bumps of radius 0.2 centred on the critical points of sin(pi x) sin(pi y).
inline double
bump_delta(const Point& x)
{
    double s = 0.0;
    for (const auto& c : detail::bump_centers()) {
        const double r2 = (x - c).squaredNorm();
        if (r2 < 0.04)
            s += std::exp(1.0 - 1.0 / (1.0 - 25.0 * r2));
    }
    return s;
}

inline Eigen::Vector2d
bump_delta_gradient(const Point& x)
{
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    for (const auto& c : detail::bump_centers()) {
        const Eigen::Vector2d d = x - c;
        const double r2 = d.squaredNorm();
        if (r2 < 0.04) {
            const double den = 1.0 - 25.0 * r2;
            g -= std::exp(1.0 - 1.0 / den) * 50.0 / (den * den) * d;
        }
    }
    return g;
}

/// Exponent of the degenerate case, chosen to give u and its flux the regularity the estimate needs.
inline double
degenerate_exponent(double p, int k)
{
    return p + (k + 2) / 4.0;
}

/// Builds a case by name. `delta` is only read by nondeg-flux.
inline CaseSpec
make_case(const std::string& name, double p, int k, double delta = 1.0)
{
    if (!(p > 1.0 && p <= 2.0))
        throw std::invalid_argument("make_case: p must lie in (1, 2]");
    if (k < 0)
        throw std::invalid_argument("make_case: k must be nonnegative");

    CaseSpec c;
    c.name = name;
    c.p = p;
    c.k = k;

    // |u|_{W^{k+2,inf}} of sin(pi x) sin(pi y) is normalized so that the
    // regime number reads 2^{(k-1)/2} pi^k h^{k+1} / min D_T.
    const double sine_seminorm = std::pow(2.0, (k - 1) / 2.0) * std::pow(M_PI, k);

    if (name == "nondeg-flux") {
        if (!(delta > 0.0))
            throw std::invalid_argument("nondeg-flux requires delta > 0");
        detail::set_sine(c);
        c.delta_value = delta;
        c.delta = constant_field(delta);
        c.grad_delta = [](const Point&) { return Eigen::Vector2d::Zero().eval(); };
        c.u_wk2_inf = sine_seminorm;
        c.homogeneous_bc = true;
    } else if (name == "nondeg-potential") {
        detail::set_sine(c);
        const auto base_u = c.u;
        const auto base_g = c.grad_u;
        c.u = [base_u](const Point& x) { return base_u(x) + (M_PI + 1.0) * (x.x() + x.y()); };
        c.grad_u = [base_g](const Point& x) {
            return (base_g(x) + Eigen::Vector2d::Constant(M_PI + 1.0)).eval();
        };
        detail::set_zero_delta(c);
        c.u_wk2_inf = sine_seminorm;
        c.homogeneous_bc = false;
    } else if (name == "nondeg-couple") {
        detail::set_sine(c);
        c.delta = bump_delta;
        c.grad_delta = bump_delta_gradient;
        c.u_wk2_inf = sine_seminorm;
        c.homogeneous_bc = true;
    } else if (name == "degenerate") {
        const double b = degenerate_exponent(p, k);
        c.u = [b](const Point& x) {
            return 0.1 * std::exp(-10.0 * (abs_pow(x.x() - 0.5, b) + abs_pow(x.y() - 0.5, b)));
        };
        // d/dt |t|^b = b sign(t) |t|^{b-1}
        auto d1 = [b](double t) { return b * (t < 0 ? -1.0 : 1.0) * abs_pow(t, b - 1.0); };
        auto d2 = [b](double t) { return b * (b - 1.0) * abs_pow(t, b - 2.0); };
        const auto uu = c.u;
        c.grad_u = [uu, d1](const Point& x) {
            const double v = uu(x);
            return Eigen::Vector2d(-10.0 * d1(x.x() - 0.5) * v, -10.0 * d1(x.y() - 0.5) * v);
        };
        c.hess_u = [uu, d1, d2](const Point& x) {
            const double v = uu(x);
            const double gx = -10.0 * d1(x.x() - 0.5), gy = -10.0 * d1(x.y() - 0.5);
            Eigen::Matrix2d h;
            h(0, 0) = (gx * gx - 10.0 * d2(x.x() - 0.5)) * v;
            h(1, 1) = (gy * gy - 10.0 * d2(x.y() - 0.5)) * v;
            h(0, 1) = h(1, 0) = gx * gy * v;
            return h;
        };
        detail::set_zero_delta(c);
        c.homogeneous_bc = false;
    } else {
        throw UnknownCaseError("unknown case '" + name +
                               "' (expected nondeg-flux, nondeg-potential, nondeg-couple or "
                               "degenerate)");
    }

    const auto dl = c.delta;
    const auto gu = c.grad_u;
    c.zeta = detail::lattice_sup([&](const Point& x) { return dl(x) + gu(x).norm(); });
    return c;
}

/// The four cases for a given (p, k); delta parametrizes nondeg-flux.
inline std::vector<CaseSpec>
case_catalog(double p, int k, double delta = 1.0)
{
    std::vector<CaseSpec> cs;
    for (const auto& n : case_names())
        cs.push_back(make_case(n, p, k, delta));
    return cs;
}

} // namespace hho
