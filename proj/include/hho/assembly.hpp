// Global HHO unknowns, nonlinear residual and Newton linearization of the
// discrete diffusion function, static condensation of element unknowns and
// the damped Newton driver.

#pragma once

#include "hho/flux.hpp"
#include "hho/local_ops.hpp"
#include "hho/mesh.hpp"
#include "hho/polyquad.hpp"
#include "hho/threading.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hho {

/// Element and face unknowns of the whole mesh. Face blocks are
/// single-valued; faces carrying Dirichlet data are flagged as constrained.
struct HybridVector
{
    int degree = 0;
    std::size_t num_cells = 0;
    std::size_t num_faces = 0;
    std::size_t cell_size = 0;
    std::size_t face_size = 0;
    Eigen::VectorXd values;
    std::vector<char> constrained;

    HybridVector() = default;

    HybridVector(int k, std::size_t ncells, std::size_t nfaces)
      : degree(k), num_cells(ncells), num_faces(nfaces), cell_size(dim_poly2(k)),
        face_size(dim_poly1(k)),
        values(Eigen::VectorXd::Zero(ncells * dim_poly2(k) + nfaces * dim_poly1(k))),
        constrained(nfaces, 0)
    {}

    std::size_t size() const { return std::size_t(values.size()); }
    std::size_t cell_offset(std::size_t t) const { return t * cell_size; }
    std::size_t face_offset(std::size_t f) const { return num_cells * cell_size + f * face_size; }

    auto cell(std::size_t t) { return values.segment(cell_offset(t), cell_size); }
    auto cell(std::size_t t) const { return values.segment(cell_offset(t), cell_size); }
    auto face(std::size_t f) { return values.segment(face_offset(f), face_size); }
    auto face(std::size_t f) const { return values.segment(face_offset(f), face_size); }
};

struct DiscretizationOptions
{
    /// Quadrature degree for non-polynomial integrands (flux, source, error);
    /// negative selects 2(k+1)+2.
    int quad_degree = -1;
    bool orthonormal = false;
};

/// Mesh, degree, local operators and quadrature data shared by assembly and
/// post-processing. Immutable after construction.
class Discretization
{
public:
    struct FaceQuad
    {
        std::vector<Point> points;
        std::vector<double> weights;
        Eigen::MatrixXd delta; ///< rows: points; maps local dofs to Delta v at the point
    };

    struct CellQuad
    {
        std::vector<Point> points;
        std::vector<double> weights;
        Eigen::MatrixXd grad_x; ///< rows: points; maps local dofs to (G v)_x
        Eigen::MatrixXd grad_y;
        std::vector<FaceQuad> faces;
    };

    Discretization(std::shared_ptr<const Mesh> mesh, int k, DiscretizationOptions opts = {})
      : mesh_(std::move(mesh)), k_(k), opts_(opts)
    {
        if (k < 0)
            throw std::invalid_argument("Discretization: negative degree");
        quad_degree_ = opts.quad_degree >= 0 ? opts.quad_degree : 2 * (k + 1) + 2;
        const std::size_t nt = mesh_->num_elements();
        ops_.resize(nt);
        quad_.resize(nt);
        parallel_for(nt, [&](std::size_t t) {
            ops_[t] = build_local_operators(*mesh_, t, k_, {opts.orthonormal});
            build_quadrature(t);
        });
    }

    Discretization(const Mesh& mesh, int k, DiscretizationOptions opts = {})
      : Discretization(std::make_shared<const Mesh>(mesh), k, opts)
    {}

    const Mesh& mesh() const { return *mesh_; }
    std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
    int degree() const { return k_; }
    int quad_degree() const { return quad_degree_; }
    const LocalOperators& ops(std::size_t t) const { return ops_[t]; }
    const CellQuad& quad(std::size_t t) const { return quad_[t]; }

    HybridVector make_vector() const
    {
        return HybridVector(k_, mesh_->num_elements(), mesh_->num_faces());
    }

    Eigen::VectorXd gather(const HybridVector& v, std::size_t t) const
    {
        const auto& dofs = ops_[t].dofs;
        Eigen::VectorXd loc(dofs.size());
        loc.head(dofs.cell_size) = v.cell(t);
        const auto& faces = mesh_->element(t).faces;
        for (std::size_t i = 0; i < faces.size(); ++i)
            loc.segment(dofs.face_offset(i), dofs.face_size) = v.face(faces[i].face);
        return loc;
    }

    /// Adds a local vector into the global one.
    void scatter_add(HybridVector& v, std::size_t t, const Eigen::VectorXd& loc) const
    {
        const auto& dofs = ops_[t].dofs;
        v.cell(t) += loc.head(dofs.cell_size);
        const auto& faces = mesh_->element(t).faces;
        for (std::size_t i = 0; i < faces.size(); ++i)
            v.face(faces[i].face) += loc.segment(dofs.face_offset(i), dofs.face_size);
    }

    /// Global index of local dof j of element t.
    std::size_t global_index(const HybridVector& layout, std::size_t t, std::size_t j) const
    {
        const auto& dofs = ops_[t].dofs;
        if (j < dofs.cell_size)
            return layout.cell_offset(t) + j;
        const std::size_t i = (j - dofs.cell_size) / dofs.face_size;
        return layout.face_offset(mesh_->element(t).faces[i].face) + (j - dofs.cell_size) % dofs.face_size;
    }

    /// I_h u on the whole mesh.
    template<typename F>
    HybridVector interpolate(F&& u) const
    {
        HybridVector v = make_vector();
        for (std::size_t t = 0; t < mesh_->num_elements(); ++t)
            v.cell(t) = l2_project(ops_[t].cell_basis, element_quadrature(*mesh_, t, quad_degree_), u);
        for (std::size_t f = 0; f < mesh_->num_faces(); ++f)
            v.face(f) = l2_project(FaceBasis(*mesh_, f, k_), face_quadrature(*mesh_, f, quad_degree_), u);
        return v;
    }

private:
    void build_quadrature(std::size_t t)
    {
        const auto& op = ops_[t];
        const std::size_t nk = op.dofs.cell_size;
        const QuadRule rule = element_quadrature(*mesh_, t, quad_degree_);
        CellQuad& cq = quad_[t];
        cq.points = rule.points;
        cq.weights = rule.weights;
        const Eigen::MatrixXd phi = eval_basis(op.cell_basis, rule.points);
        cq.grad_x = phi * op.gradient.topRows(nk);
        cq.grad_y = phi * op.gradient.bottomRows(nk);
        const auto& faces = mesh_->element(t).faces;
        for (std::size_t i = 0; i < faces.size(); ++i) {
            const QuadRule fr = face_quadrature(*mesh_, faces[i].face, quad_degree_);
            FaceQuad fq;
            fq.points = fr.points;
            fq.weights = fr.weights;
            fq.delta = eval_basis(op.face_bases[i], fr.points) * op.boundary_residual[i];
            cq.faces.push_back(std::move(fq));
        }
    }

    std::shared_ptr<const Mesh> mesh_;
    int k_;
    DiscretizationOptions opts_;
    int quad_degree_ = 0;
    std::vector<LocalOperators> ops_;
    std::vector<CellQuad> quad_;
};

class LinearSolveError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Local residual (and optionally Jacobian) of element t:
///   r_i = int_T sigma(., G u) . G phi_i + h_T int_dT S_T(., Delta u) Delta phi_i
/// The residual uses the exact flux, the Jacobian the eps-floored one.
inline void
element_linearization(const Discretization& disc, std::size_t t, const FluxModel& flux,
                      const StabModel& stab, const Eigen::VectorXd& u, Eigen::VectorXd& r,
                      Eigen::MatrixXd* jac)
{
    const auto& cq = disc.quad(t);
    const std::size_t n = u.size();
    r.setZero(n);
    if (jac)
        jac->setZero(n, n);

    const Eigen::VectorXd gx = cq.grad_x * u;
    const Eigen::VectorXd gy = cq.grad_y * u;
    for (std::size_t q = 0; q < cq.points.size(); ++q) {
        const Point& x = cq.points[q];
        const double w = cq.weights[q];
        const Eigen::Vector2d xi(gx(q), gy(q));
        const Eigen::Vector2d s = flux.sigma(x, xi);
        r.noalias() += w * (s.x() * cq.grad_x.row(q).transpose() + s.y() * cq.grad_y.row(q).transpose());
        if (jac) {
            const Eigen::Matrix2d d = w * flux.jacobian(x, xi);
            const auto bx = cq.grad_x.row(q);
            const auto by = cq.grad_y.row(q);
            jac->noalias() += bx.transpose() * (d(0, 0) * bx + d(0, 1) * by);
            jac->noalias() += by.transpose() * (d(1, 0) * bx + d(1, 1) * by);
        }
    }

    const double ht = disc.mesh().element(t).diameter;
    for (const auto& fq : cq.faces) {
        const Eigen::VectorXd du = fq.delta * u;
        for (std::size_t q = 0; q < fq.points.size(); ++q) {
            const double w = ht * fq.weights[q];
            const auto row = fq.delta.row(q);
            r.noalias() += w * stab.value(fq.points[q], du(q)) * row.transpose();
            if (jac)
                jac->noalias() += (w * stab.derivative(fq.points[q], du(q))) * row.transpose() * row;
        }
    }
}

inline Eigen::VectorXd
element_residual(const Discretization& disc, std::size_t t, const FluxModel& flux,
                 const StabModel& stab, const Eigen::VectorXd& u)
{
    Eigen::VectorXd r;
    element_linearization(disc, t, flux, stab, u, r, nullptr);
    return r;
}

inline Eigen::MatrixXd
element_jacobian(const Discretization& disc, std::size_t t, const FluxModel& flux,
                 const StabModel& stab, const Eigen::VectorXd& u)
{
    Eigen::VectorXd r;
    Eigen::MatrixXd j;
    element_linearization(disc, t, flux, stab, u, r, &j);
    return j;
}

/// a_h(u, v) summed over all elements.
inline double
discrete_form(const Discretization& disc, const FluxModel& flux, const StabModel& stab,
              const HybridVector& u, const HybridVector& v)
{
    double s = 0.0;
    for (std::size_t t = 0; t < disc.mesh().num_elements(); ++t)
        s += element_residual(disc, t, flux, stab, disc.gather(u, t)).dot(disc.gather(v, t));
    return s;
}

/// Element blocks int_T f phi; face blocks zero.
template<typename F>
HybridVector
assemble_rhs(const Discretization& disc, F&& f)
{
    HybridVector b = disc.make_vector();
    for (std::size_t t = 0; t < disc.mesh().num_elements(); ++t) {
        const auto& cq = disc.quad(t);
        const auto& basis = disc.ops(t).cell_basis;
        for (std::size_t q = 0; q < cq.points.size(); ++q)
            b.cell(t) += cq.weights[q] * f(cq.points[q]) * basis.values(cq.points[q]);
    }
    return b;
}

/// Zero vector whose boundary face blocks hold pi^k_F g, flagged as constrained.
template<typename G>
HybridVector
apply_dirichlet(const Discretization& disc, G&& g)
{
    HybridVector u = disc.make_vector();
    const Mesh& mesh = disc.mesh();
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        if (!mesh.face(f).boundary)
            continue;
        u.face(f) = l2_project(FaceBasis(mesh, f, disc.degree()),
                               face_quadrature(mesh, f, disc.quad_degree()), g);
        u.constrained[f] = 1;
    }
    return u;
}

/// Global residual A(u) - b with constrained face entries zeroed.
inline HybridVector
global_residual(const Discretization& disc, const FluxModel& flux, const StabModel& stab,
                const HybridVector& u, const HybridVector& b)
{
    const std::size_t nt = disc.mesh().num_elements();
    std::vector<Eigen::VectorXd> loc(nt);
    parallel_for(nt, [&](std::size_t t) {
        element_linearization(disc, t, flux, stab, disc.gather(u, t), loc[t], nullptr);
    });
    HybridVector r = disc.make_vector();
    r.constrained = u.constrained;
    for (std::size_t t = 0; t < nt; ++t)
        disc.scatter_add(r, t, loc[t]);
    r.values -= b.values;
    for (std::size_t f = 0; f < r.num_faces; ++f)
        if (u.constrained[f])
            r.face(f).setZero();
    return r;
}

enum class LinearSolver
{
    direct, ///< sparse LDL^T
    cg,     ///< conjugate gradients with incomplete Cholesky
};

/// Face-coupled Schur complement of a Newton system after eliminating
/// element unknowns, plus the data to recover the element increments.
struct CondensedSystem
{
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
    /// Free-face numbering; -1 for constrained faces.
    std::vector<long> face_index;
    std::size_t face_size = 0;

    struct Recovery
    {
        Eigen::MatrixXd coupling; ///< J_TT^{-1} J_TF
        Eigen::VectorXd offset;   ///< J_TT^{-1} r_T
    };
    std::vector<Recovery> recovery;

    std::size_t size() const { return std::size_t(rhs.size()); }
};

/// Local Jacobians and residuals of every element at state u.
struct Linearization
{
    std::vector<Eigen::MatrixXd> jacobians;
    std::vector<Eigen::VectorXd> residuals;
};

inline Linearization
linearize(const Discretization& disc, const FluxModel& flux, const StabModel& stab,
          const HybridVector& u, const HybridVector& b)
{
    const std::size_t nt = disc.mesh().num_elements();
    Linearization lin;
    lin.jacobians.resize(nt);
    lin.residuals.resize(nt);
    parallel_for(nt, [&](std::size_t t) {
        element_linearization(disc, t, flux, stab, disc.gather(u, t), lin.residuals[t],
                              &lin.jacobians[t]);
        lin.residuals[t].head(disc.ops(t).dofs.cell_size) -= b.cell(t);
    });
    return lin;
}

/// Schur complement of the Newton system J du = -r on the free faces.
/// Face residual contributions are the local ones, so they sum to the
/// global face residual.
inline CondensedSystem
condense(const Discretization& disc, const Linearization& lin, const std::vector<char>& constrained)
{
    const Mesh& mesh = disc.mesh();
    const std::size_t nt = mesh.num_elements();
    CondensedSystem sys;
    sys.face_size = dim_poly1(disc.degree());
    sys.face_index.assign(mesh.num_faces(), -1);
    long nfree = 0;
    for (std::size_t f = 0; f < mesh.num_faces(); ++f)
        if (!constrained[f])
            sys.face_index[f] = nfree++;
    const std::size_t fs = sys.face_size;

    sys.recovery.resize(nt);
    std::vector<Eigen::MatrixXd> schur(nt);
    std::vector<Eigen::VectorXd> srhs(nt);
    parallel_for(nt, [&](std::size_t t) {
        const std::size_t nc = disc.ops(t).dofs.cell_size;
        const Eigen::MatrixXd& j = lin.jacobians[t];
        const Eigen::VectorXd& r = lin.residuals[t];
        const std::size_t nf = j.rows() - nc;
        Eigen::LLT<Eigen::MatrixXd> llt(j.topLeftCorner(nc, nc));
        if (llt.info() != Eigen::Success)
            throw LinearSolveError("singular element block in static condensation, element " +
                                   std::to_string(t));
        auto& rec = sys.recovery[t];
        rec.coupling = llt.solve(j.topRightCorner(nc, nf));
        rec.offset = llt.solve(r.head(nc));
        schur[t] = j.bottomRightCorner(nf, nf) - j.bottomLeftCorner(nf, nc) * rec.coupling;
        srhs[t] = -r.tail(nf) + j.bottomLeftCorner(nf, nc) * rec.offset;
    });

    std::vector<Eigen::Triplet<double>> trip;
    sys.rhs = Eigen::VectorXd::Zero(nfree * fs);
    for (std::size_t t = 0; t < nt; ++t) {
        const auto& faces = mesh.element(t).faces;
        for (std::size_t i = 0; i < faces.size(); ++i) {
            const long gi = sys.face_index[faces[i].face];
            if (gi < 0)
                continue;
            sys.rhs.segment(gi * fs, fs) += srhs[t].segment(i * fs, fs);
            for (std::size_t j = 0; j < faces.size(); ++j) {
                const long gj = sys.face_index[faces[j].face];
                if (gj < 0)
                    continue;
                for (std::size_t a = 0; a < fs; ++a)
                    for (std::size_t c = 0; c < fs; ++c)
                        trip.emplace_back(gi * fs + a, gj * fs + c, schur[t](i * fs + a, j * fs + c));
            }
        }
    }
    sys.matrix.resize(nfree * fs, nfree * fs);
    sys.matrix.setFromTriplets(trip.begin(), trip.end());
    return sys;
}

/// Full Newton increment from the face increments of a condensed solve.
inline HybridVector
recover(const Discretization& disc, const CondensedSystem& sys, const Eigen::VectorXd& face_step)
{
    const Mesh& mesh = disc.mesh();
    HybridVector du = disc.make_vector();
    const std::size_t fs = sys.face_size;
    for (std::size_t f = 0; f < mesh.num_faces(); ++f)
        if (sys.face_index[f] >= 0)
            du.face(f) = face_step.segment(sys.face_index[f] * fs, fs);
    for (std::size_t t = 0; t < mesh.num_elements(); ++t) {
        const auto& faces = mesh.element(t).faces;
        Eigen::VectorXd df(faces.size() * fs);
        for (std::size_t i = 0; i < faces.size(); ++i)
            df.segment(i * fs, fs) = du.face(faces[i].face);
        du.cell(t) = -sys.recovery[t].offset - sys.recovery[t].coupling * df;
    }
    return du;
}

inline Eigen::VectorXd
solve_spd(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b, LinearSolver kind)
{
    if (a.rows() == 0)
        return Eigen::VectorXd(0);
    if (kind == LinearSolver::cg) {
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                                 Eigen::IncompleteCholesky<double>>
            cg;
        cg.setTolerance(1e-13);
        cg.setMaxIterations(10 * int(a.rows()));
        cg.compute(a);
        Eigen::VectorXd x = cg.solve(b);
        if (cg.info() != Eigen::Success)
            throw LinearSolveError("conjugate gradients did not converge on the condensed system");
        return x;
    }
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
    if (ldlt.info() != Eigen::Success)
        throw LinearSolveError("sparse factorization of the condensed face system failed");
    Eigen::VectorXd x = ldlt.solve(b);
    if (ldlt.info() != Eigen::Success)
        throw LinearSolveError("sparse solve of the condensed face system failed");
    return x;
}

/// Newton increment through static condensation.
inline HybridVector
condensed_newton_step(const Discretization& disc, const Linearization& lin,
                      const std::vector<char>& constrained, LinearSolver kind = LinearSolver::direct)
{
    const CondensedSystem sys = condense(disc, lin, constrained);
    return recover(disc, sys, solve_spd(sys.matrix, sys.rhs, kind));
}

/// Newton increment from the uncondensed global system (sparse LU). Used as a
/// reference for the condensed path.
inline HybridVector
full_newton_step(const Discretization& disc, const Linearization& lin, const std::vector<char>& constrained)
{
    const Mesh& mesh = disc.mesh();
    HybridVector layout = disc.make_vector();
    const std::size_t n = layout.size();

    std::vector<long> free_index(n, -1);
    long nfree = 0;
    for (std::size_t i = 0; i < layout.num_cells * layout.cell_size; ++i)
        free_index[i] = nfree++;
    for (std::size_t f = 0; f < mesh.num_faces(); ++f)
        for (std::size_t a = 0; a < layout.face_size; ++a)
            if (!constrained[f])
                free_index[layout.face_offset(f) + a] = nfree++;

    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nfree);
    for (std::size_t t = 0; t < mesh.num_elements(); ++t) {
        const std::size_t nl = lin.residuals[t].size();
        for (std::size_t i = 0; i < nl; ++i) {
            const long gi = free_index[disc.global_index(layout, t, i)];
            if (gi < 0)
                continue;
            rhs(gi) -= lin.residuals[t](i);
            for (std::size_t j = 0; j < nl; ++j) {
                const long gj = free_index[disc.global_index(layout, t, j)];
                if (gj >= 0)
                    trip.emplace_back(gi, gj, lin.jacobians[t](i, j));
            }
        }
    }
    Eigen::SparseMatrix<double> a(nfree, nfree);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(a);
    if (lu.info() != Eigen::Success)
        throw LinearSolveError("sparse LU of the full Newton system failed");
    const Eigen::VectorXd x = lu.solve(rhs);

    HybridVector du = disc.make_vector();
    for (std::size_t i = 0; i < n; ++i)
        if (free_index[i] >= 0)
            du.values(i) = x(free_index[i]);
    return du;
}

enum class InitialGuess
{
    lifted_zero, ///< zero except the Dirichlet face blocks
    linear,      ///< solution of the p = 2, delta = 0 problem with the same data
};

struct NewtonOptions
{
    double tolerance = 1e-9; ///< on ||r||_2 / ||b||_2
    int max_iterations = 50;
    int max_halvings = 12;
    InitialGuess initial_guess = InitialGuess::linear;
    /// Continuation in p (steps of 0.25 from 2) when Newton stalls and p <= 1.5.
    bool continuation = true;
    LinearSolver linear_solver = LinearSolver::direct;
    /// Consecutive fully-damped steps after which the iteration is declared stalled.
    int stall_limit = 3;
};

struct NewtonReport
{
    int iterations = 0;
    std::vector<double> residual_norms; ///< relative, one per iterate
    std::vector<double> damping;        ///< accepted step length per iteration
    bool converged = false;
    int continuation_steps = 0;
    int total_iterations = 0; ///< including the initial guess and continuation solves
};

class NewtonError : public std::runtime_error
{
public:
    NewtonError(const std::string& what, NewtonReport report)
      : std::runtime_error(what), report_(std::move(report))
    {}
    const NewtonReport& report() const { return report_; }

private:
    NewtonReport report_;
};

struct NewtonResult
{
    HybridVector solution;
    NewtonReport report;
};

namespace detail {

inline double
free_norm(const HybridVector& r, double q)
{
    // Constrained face entries are already zero in residual vectors.
    if (q == 2.0)
        return r.values.norm();
    double s = 0.0;
    for (Eigen::Index i = 0; i < r.values.size(); ++i)
        s += std::pow(std::abs(r.values(i)), q);
    return std::pow(s, 1.0 / q);
}

/// Newton iteration from `u`; returns false on stall or when the iteration cap is hit.
inline bool
newton_iterate(const Discretization& disc, const FluxModel& flux, const StabModel& stab,
               const HybridVector& b, double scale, HybridVector& u, NewtonReport& rep,
               const NewtonOptions& opts)
{
    const double pc = flux.p / (flux.p - 1.0); // line-search norm exponent p'
    HybridVector r = global_residual(disc, flux, stab, u, b);
    double rn = r.values.norm();
    rep.residual_norms.push_back(rn / scale);
    int stalled = 0;

    for (int it = 0; it < opts.max_iterations; ++it) {
        if (rn <= opts.tolerance * scale || rn == 0.0) {
            rep.converged = true;
            return true;
        }
        const Linearization lin = linearize(disc, flux, stab, u, b);
        const HybridVector du = condensed_newton_step(disc, lin, u.constrained, opts.linear_solver);

        const double r0 = free_norm(r, pc);
        double lambda = 1.0;
        HybridVector trial = u;
        HybridVector rt;
        int halvings = 0;
        for (;; ++halvings) {
            trial.values = u.values + lambda * du.values;
            rt = global_residual(disc, flux, stab, trial, b);
            if (free_norm(rt, pc) <= (1.0 - 1e-4 * lambda) * r0 || halvings == opts.max_halvings)
                break;
            lambda *= 0.5;
        }
        stalled = (halvings == opts.max_halvings) ? stalled + 1 : 0;

        u = std::move(trial);
        r = std::move(rt);
        rn = r.values.norm();
        ++rep.iterations;
        ++rep.total_iterations;
        rep.damping.push_back(lambda);
        rep.residual_norms.push_back(rn / scale);
        if (!std::isfinite(rn) || stalled >= opts.stall_limit)
            return false;
    }
    if (rn <= opts.tolerance * scale) {
        rep.converged = true;
        return true;
    }
    return false;
}

} // namespace detail

/// Solves a_h(u_h, v_h) = int f v_h for all v_h vanishing on the boundary,
/// with u_F = pi_F g on boundary faces.
template<typename F, typename G>
NewtonResult
newton_solve(const Discretization& disc, const FluxModel& flux, const StabModel& stab, F&& f,
             G&& g, const NewtonOptions& opts = {})
{
    const HybridVector b = assemble_rhs(disc, f);
    HybridVector u = apply_dirichlet(disc, g);

    double scale = b.values.norm();
    if (scale == 0.0) {
        scale = global_residual(disc, flux, stab, u, b).values.norm();
        if (scale == 0.0)
            scale = 1.0;
    }

    NewtonReport rep;
    const bool linear = flux.p == 2.0 && stab.p == 2.0;

    if (opts.initial_guess == InitialGuess::linear && !linear) {
        FluxModel lin_flux = FluxModel::p_laplacian(2.0, flux.mu_max);
        lin_flux.mu = flux.mu;
        StabModel lin_stab = stab;
        lin_stab.p = 2.0;
        NewtonReport pre;
        NewtonOptions lo = opts;
        lo.max_iterations = 2;
        detail::newton_iterate(disc, lin_flux, lin_stab, b, scale, u, pre, lo);
        rep.total_iterations += pre.total_iterations;
    }

    const HybridVector start = u;
    NewtonReport attempt = rep;
    if (detail::newton_iterate(disc, flux, stab, b, scale, u, attempt, opts))
        return {std::move(u), std::move(attempt)};

    if (!(opts.continuation && flux.p <= 1.5))
        throw NewtonError("Newton did not converge in " + std::to_string(opts.max_iterations) +
                              " iterations",
                          attempt);

    // Continuation in p: 1.75, 1.5, ... down to the target exponent.
    u = start;
    rep.total_iterations = attempt.total_iterations;
    for (double pc = 1.75; pc > flux.p + 1e-12; pc -= 0.25) {
        FluxModel fc = flux;
        fc.p = pc;
        StabModel sc = stab;
        sc.p = pc;
        NewtonReport step;
        if (!detail::newton_iterate(disc, fc, sc, b, scale, u, step, opts))
            throw NewtonError("continuation step p = " + std::to_string(pc) + " did not converge",
                              step);
        rep.total_iterations += step.total_iterations;
        ++rep.continuation_steps;
    }
    NewtonReport final_rep;
    final_rep.total_iterations = rep.total_iterations;
    final_rep.continuation_steps = rep.continuation_steps;
    if (!detail::newton_iterate(disc, flux, stab, b, scale, u, final_rep, opts))
        throw NewtonError("Newton did not converge after continuation", final_rep);
    return {std::move(u), std::move(final_rep)};
}

} // namespace hho
