// Carreau-Yasuda flux and the p-power-framed face stabilization function.

#pragma once

#include "hho/mesh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

namespace hho {

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Eigen::Vector2d(const Point&)>;

inline ScalarField
constant_field(double c)
{
    return [c](const Point&) { return c; };
}

/// Default floor used to linearize the flux at its singular point.
inline constexpr double default_regularization = 1e-8;

/// sigma(x, xi) = mu(x) (delta(x)^a(x) + |xi|^a(x))^{(p-2)/a(x)} xi
///
/// The bounds mu_min/mu_max and a_min/a_max enter the framing constants; they
/// are exact for constant fields.
struct FluxModel
{
    double p = 2.0;
    ScalarField mu = constant_field(1.0);
    ScalarField a = constant_field(1.0);
    ScalarField delta = constant_field(0.0);
    VectorField grad_delta = [](const Point&) { return Eigen::Vector2d::Zero().eval(); };

    double mu_min = 1.0, mu_max = 1.0;
    double a_min = 1.0, a_max = 1.0;

    /// Newton-path floor: (delta^a + |xi|^a) is replaced by max(., eps^a).
    double eps = default_regularization;

    /// Constant mu and a, and a given degeneracy field.
    static FluxModel carreau_yasuda(double p, double mu, double a, ScalarField delta,
                                    VectorField grad_delta)
    {
        if (!(p > 1.0 && p <= 2.0))
            throw std::invalid_argument("flux exponent p must lie in (1, 2]");
        FluxModel m;
        m.p = p;
        m.mu = constant_field(mu);
        m.a = constant_field(a);
        m.delta = std::move(delta);
        m.grad_delta = std::move(grad_delta);
        m.mu_min = m.mu_max = mu;
        m.a_min = m.a_max = a;
        return m;
    }

    static FluxModel p_laplacian(double p, double mu = 1.0)
    {
        return carreau_yasuda(p, mu, 1.0, constant_field(0.0),
                              [](const Point&) { return Eigen::Vector2d::Zero().eval(); });
    }

    /// Exact flux, continuously extended by 0 at delta = 0, xi = 0.
    Eigen::Vector2d sigma(const Point& x, const Eigen::Vector2d& xi) const
    {
        if (p == 2.0)
            return mu(x) * xi;
        const double av = a(x);
        const double s = std::pow(delta(x), av) + std::pow(xi.norm(), av);
        if (s == 0.0)
            return Eigen::Vector2d::Zero();
        return mu(x) * std::pow(s, (p - 2.0) / av) * xi;
    }

    /// Flux with the eps-floor; coincides with sigma() when delta^a + |xi|^a >= eps^a.
    Eigen::Vector2d sigma_regularized(const Point& x, const Eigen::Vector2d& xi) const
    {
        if (p == 2.0)
            return mu(x) * xi;
        const double av = a(x);
        const double s = std::pow(delta(x), av) + std::pow(xi.norm(), av);
        const double floor = std::pow(eps, av);
        if (s >= floor)
            return mu(x) * std::pow(s, (p - 2.0) / av) * xi;
        return mu(x) * std::pow(floor, (p - 2.0) / av) * xi;
    }

    /// d sigma_regularized / d xi. Symmetric positive definite.
    Eigen::Matrix2d jacobian(const Point& x, const Eigen::Vector2d& xi) const
    {
        const double m = mu(x);
        if (p == 2.0)
            return m * Eigen::Matrix2d::Identity();
        const double av = a(x);
        const double r = xi.norm();
        const double ra = std::pow(r, av);
        const double s = std::pow(delta(x), av) + ra;
        const double floor = std::pow(eps, av);
        if (s < floor)
            return m * std::pow(floor, (p - 2.0) / av) * Eigen::Matrix2d::Identity();

        const double f = m * std::pow(s, (p - 2.0) / av);
        Eigen::Matrix2d j = f * Eigen::Matrix2d::Identity();
        if (r > 0.0) {
            const Eigen::Vector2d e = xi / r;
            j += f * (p - 2.0) * (ra / s) * e * e.transpose();
        }
        return j;
    }
};

/// Continuity and strong-monotonicity constants of the Carreau-Yasuda law.
struct FramingConstants
{
    double hc; ///< continuity
    double sm; ///< strong monotonicity
};

inline FramingConstants
framing_constants(const FluxModel& m)
{
    const double p = m.p;
    auto pos = [](double v) { return std::max(0.0, v); };
    auto neg = [](double v) { return -std::min(0.0, v); };
    const double hc =
        m.mu_max / (p - 1.0) * std::pow(2.0, (-neg(1.0 / m.a_max - 1.0 / p) - 1.0) * (p - 2.0) + 1.0 / p);
    const double sm = m.mu_min * (p - 1.0) * std::pow(2.0, pos(1.0 / m.a_min - 1.0 / p) * (p - 2.0));
    return {hc, sm};
}

/// S_T(x, w) = gamma (zeta(x)^p + |w|^p)^{(p-2)/p} w
struct StabModel
{
    double p = 2.0;
    double gamma = 1.0;
    ScalarField zeta = constant_field(0.0);
    double eps = default_regularization;

    double value(const Point& x, double w) const
    {
        if (p == 2.0)
            return gamma * w;
        const double s = std::pow(zeta(x), p) + std::pow(std::abs(w), p);
        if (s == 0.0)
            return 0.0;
        return gamma * std::pow(s, (p - 2.0) / p) * w;
    }

    /// d/dw of the eps-floored stabilization function.
    double derivative(const Point& x, double w) const
    {
        if (p == 2.0)
            return gamma;
        const double aw = std::pow(std::abs(w), p);
        const double s = std::pow(zeta(x), p) + aw;
        const double floor = std::pow(eps, p);
        if (s < floor)
            return gamma * std::pow(floor, (p - 2.0) / p);
        return gamma * std::pow(s, (p - 2.0) / p) * (1.0 + (p - 2.0) * aw / s);
    }
};

/// Checks (alpha + |x| + |y|)^{p-2} |x - y| <= |x - y|^{p-1}, with the
/// left-hand side extended by 0 when alpha + |x| + |y| = 0. A relative
/// slack of 1e-12 absorbs rounding in the equality case alpha = 0, y = 0.
template<typename Vec>
bool
check_prolongement(double p, double alpha, const Vec& x, const Vec& y)
{
    if (alpha < 0.0)
        throw std::invalid_argument("check_prolongement: alpha must be nonnegative");
    const double base = alpha + x.norm() + y.norm();
    const double d = (x - y).norm();
    const double lhs = base == 0.0 ? 0.0 : std::pow(base, p - 2.0) * d;
    const double rhs = d == 0.0 ? 0.0 : std::pow(d, p - 1.0);
    return lhs <= rhs * (1.0 + 1e-12);
}

} // namespace hho
