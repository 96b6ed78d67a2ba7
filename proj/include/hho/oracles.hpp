// Reference computations that do not go through the quadrature or operator
// code: closed-form monomial integrals, random polynomials with exact
// gradients, and a finite-difference divergence of the exact flux.

#pragma once

#include "hho/cases.hpp"
#include "hho/mesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <map>
#include <random>
#include <vector>

namespace hho::oracle {

inline double
factorial(int n)
{
    double r = 1.0;
    for (int i = 2; i <= n; ++i)
        r *= i;
    return r;
}

inline double
binomial(int n, int k)
{
    return factorial(n) / (factorial(k) * factorial(n - k));
}

/// int_T x^i y^j over the triangle (a, b, c), by expanding x and y in
/// barycentric coordinates and using
///   int_T l1^e1 l2^e2 l3^e3 = 2|T| e1! e2! e3! / (e1 + e2 + e3 + 2)!
inline double
triangle_monomial_integral(const Point& a, const Point& b, const Point& c, int i, int j)
{
    using Key = std::array<int, 3>;
    std::map<Key, double> poly{{{0, 0, 0}, 1.0}};
    auto times_linear = [&](double ca, double cb, double cc) {
        std::map<Key, double> out;
        for (const auto& [e, v] : poly) {
            out[{e[0] + 1, e[1], e[2]}] += v * ca;
            out[{e[0], e[1] + 1, e[2]}] += v * cb;
            out[{e[0], e[1], e[2] + 1}] += v * cc;
        }
        poly.swap(out);
    };
    for (int s = 0; s < i; ++s)
        times_linear(a.x(), b.x(), c.x());
    for (int s = 0; s < j; ++s)
        times_linear(a.y(), b.y(), c.y());

    const double area = 0.5 * std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    double sum = 0.0;
    for (const auto& [e, v] : poly)
        sum += v * factorial(e[0]) * factorial(e[1]) * factorial(e[2]) / factorial(e[0] + e[1] + e[2] + 2);
    return 2.0 * area * sum;
}

/// int_[p0,p1] x^i y^j ds by binomial expansion along the segment.
inline double
segment_monomial_integral(const Point& p0, const Point& p1, int i, int j)
{
    const Point d = p1 - p0;
    double s = 0.0;
    for (int a = 0; a <= i; ++a)
        for (int b = 0; b <= j; ++b)
            s += binomial(i, a) * binomial(j, b) * std::pow(p0.x(), i - a) * std::pow(d.x(), a) *
                 std::pow(p0.y(), j - b) * std::pow(d.y(), b) / (a + b + 1);
    return d.norm() * s;
}

/// Polynomial sum c_ij x^i y^j in global coordinates.
struct Polynomial
{
    struct Term
    {
        int i, j;
        double c;
    };
    std::vector<Term> terms;
    int degree = 0;

    double operator()(const Point& x) const
    {
        double s = 0.0;
        for (const auto& t : terms)
            s += t.c * std::pow(x.x(), t.i) * std::pow(x.y(), t.j);
        return s;
    }

    Eigen::Vector2d gradient(const Point& x) const
    {
        Eigen::Vector2d g = Eigen::Vector2d::Zero();
        for (const auto& t : terms) {
            if (t.i > 0)
                g.x() += t.c * t.i * std::pow(x.x(), t.i - 1) * std::pow(x.y(), t.j);
            if (t.j > 0)
                g.y() += t.c * t.j * std::pow(x.x(), t.i) * std::pow(x.y(), t.j - 1);
        }
        return g;
    }

    double max_coefficient() const
    {
        double m = 0.0;
        for (const auto& t : terms)
            m = std::max(m, std::abs(t.c));
        return m;
    }
};

/// Uniform coefficients in [-1, 1] on every monomial of degree <= d.
template<typename Rng>
Polynomial
random_polynomial(int d, Rng& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Polynomial p;
    p.degree = d;
    for (int s = 0; s <= d; ++s)
        for (int j = 0; j <= s; ++j)
            p.terms.push_back({s - j, j, u(rng)});
    return p;
}

/// -div sigma(x, grad u(x)) by central differences of the exact flux with step h.
inline double
fd_source(const CaseSpec& c, const Point& x, double h = 1e-5)
{
    const FluxModel m = c.flux();
    auto s = [&](const Point& y) { return m.sigma(y, c.grad_u(y)); };
    const Point ex(h, 0.0), ey(0.0, h);
    const double dx = (s(x + ex).x() - s(x - ex).x()) / (2.0 * h);
    const double dy = (s(x + ey).y() - s(x - ey).y()) / (2.0 * h);
    return -(dx + dy);
}

/// Central-difference Jacobian of a vector map R^2 -> R^2.
template<typename F>
Eigen::Matrix2d
fd_jacobian(F&& f, const Eigen::Vector2d& xi, double h = 1e-6)
{
    Eigen::Matrix2d j;
    for (int c = 0; c < 2; ++c) {
        Eigen::Vector2d e = Eigen::Vector2d::Zero();
        e(c) = h;
        j.col(c) = (f(xi + e) - f(xi - e)) / (2.0 * h);
    }
    return j;
}

} // namespace hho::oracle
