// Post-processing: discrete energy error, empirical orders of convergence,
// flux degeneracy diagnostics and the two sides of the discrete a priori bound.

#pragma once

#include "hho/assembly.hpp"
#include "hho/cases.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace hho {

struct EnergyError
{
    double total = 0.0;
    std::vector<double> per_element; ///< ||e||_{1,p,T}; total^p = sum of their p-th powers
};

/// ||v||_{1,q,h} with the per-element breakdown. Contributions are summed in
/// element order so the result does not depend on the thread count.
inline EnergyError
discrete_seminorm(const Discretization& disc, const HybridVector& v, double q)
{
    const std::size_t nt = disc.mesh().num_elements();
    std::vector<double> pw(nt);
    parallel_for(nt, [&](std::size_t t) {
        pw[t] = seminorm_1ph_pow(disc.mesh(), disc.ops(t), disc.gather(v, t), q, disc.quad_degree());
    });
    EnergyError e;
    double s = 0.0;
    e.per_element.resize(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        s += pw[t];
        e.per_element[t] = std::pow(pw[t], 1.0 / q);
    }
    e.total = std::pow(s, 1.0 / q);
    return e;
}

/// ||u_h - I_h u||_{1,p,h}
template<typename U>
EnergyError
energy_error(const Discretization& disc, const HybridVector& uh, U&& u, double p)
{
    HybridVector e = disc.interpolate(u);
    e.values = uh.values - e.values;
    return discrete_seminorm(disc, e, p);
}

/// rate_i = log(e_{i-1}/e_i) / log(h_{i-1}/h_i); empty when either error is not positive.
inline std::vector<std::optional<double>>
eoc(const std::vector<double>& errors, const std::vector<double>& hs)
{
    if (errors.size() != hs.size())
        throw std::invalid_argument("eoc: errors and mesh sizes differ in length");
    std::vector<std::optional<double>> r;
    for (std::size_t i = 1; i < errors.size(); ++i) {
        if (!(errors[i - 1] > 0.0) || !(errors[i] > 0.0) || !(hs[i - 1] > hs[i]))
            r.emplace_back();
        else
            r.emplace_back(std::log(errors[i - 1] / errors[i]) / std::log(hs[i - 1] / hs[i]));
    }
    return r;
}

enum class Regime
{
    degenerate,
    intermediate,
    non_degenerate,
};

inline std::string
to_string(Regime r)
{
    switch (r) {
    case Regime::degenerate: return "degenerate";
    case Regime::intermediate: return "intermediate";
    case Regime::non_degenerate: return "non-degenerate";
    }
    return "?";
}

struct RegimeReport
{
    std::vector<double> flux_degeneracy; ///< D_T per element
    double min_degeneracy = 0.0;
    double eta_tilde = 0.0; ///< +inf when min D_T = 0
    double threshold = 0.0; ///< h^{k+1} |u|_{W^{k+2,inf}}
    Regime label = Regime::degenerate;
    double predicted_rate = 0.0;
};

struct SamplingDensity
{
    int element = 20; ///< barycentric lattice subdivisions (21 x 21 grid)
};

/// D_T = min(inf_T (delta + |grad u|), zeta) by sampling, and the
/// regime read from eta_tilde = |u|_{W^{k+2,inf}} h^{k+1} / min_T D_T.
/// Non-degenerate when eta_tilde <= h^{k+1}|u|, degenerate when eta_tilde >= 1,
/// intermediate otherwise with a rate interpolated in log(eta_tilde).
inline RegimeReport
degeneracy_numbers(const CaseSpec& c, const Mesh& mesh, int k, SamplingDensity dens = {})
{
    RegimeReport rep;
    const std::size_t nt = mesh.num_elements();
    rep.flux_degeneracy.resize(nt);
    parallel_for(nt, [&](std::size_t t) {
        const Element& el = mesh.element(t);
        double dmin = std::numeric_limits<double>::infinity();
        auto sample = [&](const Point& x) { dmin = std::min(dmin, c.delta(x) + c.grad_u(x).norm()); };
        if (el.vertices.size() == 3) {
            const Point& a = mesh.vertices()[el.vertices[0]];
            const Point& b = mesh.vertices()[el.vertices[1]];
            const Point& d = mesh.vertices()[el.vertices[2]];
            const int m = dens.element;
            for (int i = 0; i <= m; ++i)
                for (int j = 0; i + j <= m; ++j)
                    sample(a + (double(i) / m) * (b - a) + (double(j) / m) * (d - a));
        } else {
            for (std::size_t v : el.vertices)
                for (int i = 0; i <= dens.element; ++i)
                    sample(el.centroid + (double(i) / dens.element) * (mesh.vertices()[v] - el.centroid));
        }
        rep.flux_degeneracy[t] = std::min(dmin, c.zeta);
    });
    rep.min_degeneracy = *std::min_element(rep.flux_degeneracy.begin(), rep.flux_degeneracy.end());

    const double h = mesh.h();
    const double lo = (k + 1) * (c.p - 1.0);
    const double hi = k + 1.0;
    if (!c.u_wk2_inf || rep.min_degeneracy <= 0.0) {
        rep.eta_tilde = std::numeric_limits<double>::infinity();
        rep.threshold = c.u_wk2_inf ? std::pow(h, k + 1) * *c.u_wk2_inf : 0.0;
        rep.label = Regime::degenerate;
        rep.predicted_rate = lo;
        return rep;
    }
    rep.threshold = std::pow(h, k + 1) * *c.u_wk2_inf;
    rep.eta_tilde = rep.threshold / rep.min_degeneracy;
    if (rep.eta_tilde <= rep.threshold) {
        rep.label = Regime::non_degenerate;
        rep.predicted_rate = hi;
    } else if (rep.eta_tilde >= 1.0) {
        rep.label = Regime::degenerate;
        rep.predicted_rate = lo;
    } else {
        rep.label = Regime::intermediate;
        // theta = 1 at the threshold, 0 at eta_tilde = 1
        const double theta = std::log(rep.eta_tilde) / std::log(rep.threshold);
        rep.predicted_rate = lo + theta * (hi - lo);
    }
    return rep;
}

/// Both sides of the discrete a priori bound, without its hidden constant.
struct AprioriSides
{
    double solution_norm = 0.0; ///< ||u_h||_{1,p,h}
    double bound = 0.0;
};

template<typename F>
AprioriSides
apriori_bound_sides(const Discretization& disc, const CaseSpec& c, const HybridVector& uh, F&& f)
{
    const double p = c.p;
    const double pc = p / (p - 1.0);
    const Mesh& mesh = disc.mesh();
    const int q = disc.quad_degree();
    double fnorm = 0.0, dnorm = 0.0, znorm = 0.0;
    for (std::size_t t = 0; t < mesh.num_elements(); ++t) {
        const QuadRule r = element_quadrature(mesh, t, q);
        for (std::size_t i = 0; i < r.size(); ++i) {
            fnorm += r.weights[i] * std::pow(std::abs(f(r.points[i])), pc);
            dnorm += r.weights[i] * std::pow(c.delta(r.points[i]), p);
        }
        for (const auto& ef : mesh.element(t).faces)
            znorm += mesh.face(ef.face).length * std::pow(c.zeta, p);
    }
    fnorm = std::pow(fnorm, 1.0 / pc);
    const double dz = dnorm + znorm;
    const double sm = framing_constants(c.flux()).sm;

    AprioriSides s;
    s.solution_norm = discrete_seminorm(disc, uh, p).total;
    s.bound = std::pow(fnorm / sm, 1.0 / (p - 1.0)) +
              std::min(std::pow(dz, 1.0 / p), std::pow(dz, (2.0 - p) / p) * fnorm / sm);
    return s;
}

} // namespace hho
