// Convergence studies over (case, p, k, mesh sizes): solve, measure, tabulate.

#pragma once

#include "hho/analysis.hpp"
#include "hho/assembly.hpp"
#include "hho/cases.hpp"
#include "hho/mesh.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace hho {

struct RunConfig
{
    std::string case_name = "nondeg-flux";
    std::vector<double> p{1.5};
    std::vector<int> k{1};
    std::vector<int> n{8, 16, 32};
    double delta = 1.0; ///< nondeg-flux only
    std::optional<int> quad_degree;
    NewtonOptions newton;
    /// Writes wall_ms as 0 so repeated runs give identical CSV bytes.
    bool deterministic = false;

    void validate() const
    {
        bool known = false;
        for (const auto& c : case_names())
            known = known || c == case_name;
        if (!known)
            throw UnknownCaseError("unknown case '" + case_name + "'");
        if (p.empty() || k.empty() || n.empty())
            throw std::invalid_argument("p, k and n lists must be non-empty");
        for (double v : p)
            if (!(v > 1.0 && v <= 2.0))
                throw std::invalid_argument("p must lie in (1, 2]");
        for (int v : k)
            if (v < 0 || v > 3)
                throw std::invalid_argument("k must lie in {0, 1, 2, 3}");
        for (std::size_t i = 0; i < n.size(); ++i) {
            if (n[i] < 1)
                throw std::invalid_argument("mesh sizes must be positive");
            if (i > 0 && n[i] <= n[i - 1])
                throw std::invalid_argument("mesh sizes must be strictly ascending");
        }
    }
};

struct ErrorRecord
{
    int n = 0;
    double h = 0.0;
    std::size_t num_elements = 0;
    std::size_t ndof = 0;
    double error = 0.0;
    std::vector<double> per_element;
    int newton_iterations = 0;
    double wall_ms = 0.0;
    RegimeReport regime;
};

struct StudyResult
{
    std::string case_name;
    double p = 2.0;
    int k = 1;
    double delta = 1.0;
    std::vector<ErrorRecord> levels;
    std::vector<std::optional<double>> eocs;
    /// Set when a level failed; levels holds the completed ones.
    std::optional<std::string> failure;

    bool ok() const { return !failure; }

    std::vector<double> rates() const
    {
        std::vector<double> r;
        for (const auto& e : eocs)
            r.push_back(e ? *e : std::numeric_limits<double>::quiet_NaN());
        return r;
    }
};

/// Discrete problem of a case on one mesh, with the default stabilization
/// gamma = sigma_hc and constant zeta.
struct LevelProblem
{
    CaseSpec spec;
    FluxModel flux;
    StabModel stab;

    LevelProblem(const std::string& name, double p, int k, double delta)
      : spec(make_case(name, p, k, delta)), flux(spec.flux())
    {
        stab.p = p;
        stab.gamma = framing_constants(flux).hc;
        stab.zeta = constant_field(spec.zeta);
    }

    NewtonResult solve(const Discretization& disc, const NewtonOptions& opts) const
    {
        const CaseSpec& c = spec;
        return newton_solve(
            disc, flux, stab, [&c](const Point& x) { return c.source(x); },
            [&c](const Point& x) { return c.boundary(x); }, opts);
    }
};

inline ErrorRecord
run_level(const LevelProblem& prob, int n, int k, const RunConfig& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    DiscretizationOptions dopts;
    if (cfg.quad_degree)
        dopts.quad_degree = *cfg.quad_degree;
    const Discretization disc(build_structured_triangular(std::size_t(n)), k, dopts);
    const NewtonResult res = prob.solve(disc, cfg.newton);
    const EnergyError err = energy_error(disc, res.solution, prob.spec.u, prob.spec.p);

    ErrorRecord rec;
    rec.n = n;
    rec.h = disc.mesh().h();
    rec.num_elements = disc.mesh().num_elements();
    rec.ndof = res.solution.size();
    rec.error = err.total;
    rec.per_element = err.per_element;
    rec.newton_iterations = res.report.iterations;
    rec.regime = degeneracy_numbers(prob.spec, disc.mesh(), k);
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

/// One study for a single (p, k). Solver failures end the study early and are
/// recorded in `failure`.
inline StudyResult
run_single(const RunConfig& cfg, double p, int k)
{
    StudyResult s;
    s.case_name = cfg.case_name;
    s.p = p;
    s.k = k;
    s.delta = cfg.delta;
    const LevelProblem prob(cfg.case_name, p, k, cfg.delta);
    std::vector<double> es, hs;
    for (int n : cfg.n) {
        try {
            s.levels.push_back(run_level(prob, n, k, cfg));
        } catch (const NewtonError& e) {
            s.failure = "n=" + std::to_string(n) + ": " + e.what();
            break;
        } catch (const LinearSolveError& e) {
            s.failure = "n=" + std::to_string(n) + ": " + e.what();
            break;
        }
        es.push_back(s.levels.back().error);
        hs.push_back(s.levels.back().h);
    }
    s.eocs = eoc(es, hs);
    return s;
}

/// All (p, k) combinations of the config, p varying fastest within each k.
inline std::vector<StudyResult>
run_study(const RunConfig& cfg)
{
    cfg.validate();
    std::vector<StudyResult> out;
    for (int k : cfg.k)
        for (double p : cfg.p) {
            out.push_back(run_single(cfg, p, k));
            if (!out.back().ok())
                return out;
        }
    return out;
}

namespace detail {

inline std::string
fmt_g(double v, const char* f = "%.6g")
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

} // namespace detail

inline const char*
csv_header()
{
    return "case,p,k,n,h,ndof,error,eoc,newton_iters,eta_tilde,regime,wall_ms";
}

inline void
write_csv(std::ostream& os, const std::vector<StudyResult>& results, bool deterministic = false)
{
    using detail::fmt_g;
    os << csv_header() << '\n';
    for (const auto& s : results)
        for (std::size_t i = 0; i < s.levels.size(); ++i) {
            const auto& l = s.levels[i];
            os << s.case_name << ',' << fmt_g(s.p) << ',' << s.k << ',' << l.n << ',' << fmt_g(l.h) << ','
               << l.ndof << ',' << fmt_g(l.error) << ',';
            if (i > 0 && s.eocs[i - 1])
                os << fmt_g(*s.eocs[i - 1]);
            os << ',' << l.newton_iterations << ',' << fmt_g(l.regime.eta_tilde) << ','
               << to_string(l.regime.label) << ',' << (deterministic ? "0" : fmt_g(l.wall_ms)) << '\n';
        }
}

/// "(k+1)(p-1) ~ (k+1)"
inline std::string
rate_bracket(int k, double p)
{
    return detail::fmt_g((k + 1) * (p - 1.0), "%g") + " ~ " + detail::fmt_g(k + 1.0, "%g");
}

/// Markdown tables, one per case: h rows, (k, p) columns. The first row of a
/// column carries the bold rate bracket, the following rows the EOCs.
inline std::string
emit_table(const std::vector<StudyResult>& results)
{
    std::map<std::string, std::vector<const StudyResult*>> by_case;
    std::vector<std::string> order;
    for (const auto& s : results) {
        if (!by_case.count(s.case_name))
            order.push_back(s.case_name);
        by_case[s.case_name].push_back(&s);
    }

    std::ostringstream os;
    if (order.empty())
        os << "| h |\n|---|\n";
    for (const auto& name : order) {
        const auto& cols = by_case[name];
        os << "### " << name << "\n\n| h |";
        for (const auto* s : cols)
            os << " k=" << s->k << ", p=" << detail::fmt_g(s->p, "%g") << " |";
        os << "\n|---|";
        for (std::size_t i = 0; i < cols.size(); ++i)
            os << "---|";
        os << '\n';

        // mesh levels may differ between columns (per-k caps); rows are the union
        std::set<int> ns;
        for (const auto* s : cols)
            for (const auto& l : s->levels)
                ns.insert(l.n);
        for (int n : ns) {
            double h = 0.0;
            std::vector<std::string> cells;
            for (const auto* s : cols) {
                std::string cell;
                for (std::size_t i = 0; i < s->levels.size(); ++i) {
                    if (s->levels[i].n != n)
                        continue;
                    h = s->levels[i].h;
                    if (i == 0)
                        cell = "**" + rate_bracket(s->k, s->p) + "**";
                    else if (s->eocs[i - 1])
                        cell = detail::fmt_g(*s->eocs[i - 1], "%.2f");
                    else
                        cell = "n/a";
                }
                cells.push_back(cell);
            }
            os << "| " << detail::fmt_g(h, "%.2e") << " |";
            for (const auto& c : cells)
                os << ' ' << c << " |";
            os << '\n';
        }
        os << '\n';
    }
    return os.str();
}

} // namespace hho
