// Element-local HHO operators: L2 projectors, the local interpolator, the
// gradient reconstruction G_T, the potential reconstruction r_T and the
// boundary residual Delta_dT, all stored as dense matrices acting on the
// local vector of unknowns (element block first, then one block per face in
// the order of Element::faces).

#pragma once

#include "hho/mesh.hpp"
#include "hho/polyquad.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hho {

class OperatorError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct OperatorOptions
{
    /// Gram-Schmidt the element bases (conditioning experiments only).
    bool orthonormal = false;
};

struct LocalDofMap
{
    std::size_t element = 0;
    int degree = 0;
    std::size_t cell_size = 0;
    std::size_t face_size = 0;
    std::size_t num_faces = 0;

    std::size_t cell_offset() const { return 0; }
    std::size_t face_offset(std::size_t i) const { return cell_size + i * face_size; }
    std::size_t size() const { return cell_size + num_faces * face_size; }
};

struct LocalOperators
{
    LocalDofMap dofs;

    ElementBasis cell_basis;  ///< P^k(T)
    ElementBasis recon_basis; ///< P^{k+1}(T)
    std::vector<FaceBasis> face_bases;

    Eigen::MatrixXd cell_mass;
    Eigen::MatrixXd recon_mass;
    std::vector<Eigen::MatrixXd> face_mass;

    /// 2 N_k x ndof. Rows [0, N_k) hold the x-component coefficients on
    /// cell_basis, rows [N_k, 2 N_k) the y-component.
    Eigen::MatrixXd gradient;
    /// N_{k+1} x ndof, coefficients on recon_basis.
    Eigen::MatrixXd potential;
    /// Per face, (k+1) x ndof, coefficients on face_bases[i].
    std::vector<Eigen::MatrixXd> boundary_residual;

    /// G_T v evaluated at x.
    Eigen::Vector2d eval_gradient(const Eigen::VectorXd& v, const Point& x) const
    {
        const Eigen::VectorXd phi = cell_basis.values(x);
        const std::size_t n = dofs.cell_size;
        return {phi.dot(gradient.topRows(n) * v), phi.dot(gradient.bottomRows(n) * v)};
    }

    /// The 2 x ndof matrix mapping v to G_T v at x.
    Eigen::Matrix<double, 2, Eigen::Dynamic> gradient_at(const Point& x) const
    {
        const Eigen::VectorXd phi = cell_basis.values(x);
        const std::size_t n = dofs.cell_size;
        Eigen::Matrix<double, 2, Eigen::Dynamic> m(2, dofs.size());
        m.row(0) = phi.transpose() * gradient.topRows(n);
        m.row(1) = phi.transpose() * gradient.bottomRows(n);
        return m;
    }

    double eval_potential(const Eigen::VectorXd& v, const Point& x) const
    {
        return recon_basis.values(x).dot(potential * v);
    }

    /// Value of the element unknown v_T at x.
    double eval_cell(const Eigen::VectorXd& v, const Point& x) const
    {
        return cell_basis.values(x).dot(v.head(dofs.cell_size));
    }

    double eval_face(const Eigen::VectorXd& v, std::size_t i, const Point& x) const
    {
        return face_bases[i].values(x).dot(v.segment(dofs.face_offset(i), dofs.face_size));
    }
};

namespace detail {

inline Eigen::LLT<Eigen::MatrixXd>
factor_spd(const Eigen::MatrixXd& m, const std::string& what)
{
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw OperatorError("singular " + what);
    return llt;
}

} // namespace detail

/// L2 projection of f onto the span of `basis`, using `rule` for both the
/// mass matrix and the load.
template<typename Basis, typename F>
Eigen::VectorXd
l2_project(const Basis& basis, const QuadRule& rule, F&& f)
{
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(basis.size(), basis.size());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(basis.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Eigen::VectorXd phi = basis.values(rule.points[q]);
        mass.noalias() += rule.weights[q] * phi * phi.transpose();
        rhs += rule.weights[q] * f(rule.points[q]) * phi;
    }
    return detail::factor_spd(mass, "mass matrix in l2_project").solve(rhs);
}

/// pi^l_T f on the scaled monomials of degree l of element t.
template<typename F>
Eigen::VectorXd
project_element(const Mesh& mesh, std::size_t t, F&& f, int l, int quad_degree)
{
    return l2_project(ElementBasis(mesh, t, l), element_quadrature(mesh, t, quad_degree),
                      std::forward<F>(f));
}

/// pi^l_F f on the scaled monomials of degree l of face f.
template<typename F>
Eigen::VectorXd
project_face(const Mesh& mesh, std::size_t face, F&& f, int l, int quad_degree)
{
    return l2_project(FaceBasis(mesh, face, l), face_quadrature(mesh, face, quad_degree),
                      std::forward<F>(f));
}

/// Builds G_T, r_T and Delta_dT for element t and degree k.
inline LocalOperators
build_local_operators(const Mesh& mesh, std::size_t t, int k, const OperatorOptions& opts = {})
{
    if (k < 0)
        throw OperatorError("negative polynomial degree");

    const Element& el = mesh.element(t);
    const int qdeg = 2 * k + 2;
    const QuadRule cell_rule = element_quadrature(mesh, t, qdeg);

    LocalOperators op;
    op.dofs = {t, k, dim_poly2(k), dim_poly1(k), el.faces.size()};
    const auto& dofs = op.dofs;
    const std::size_t nk = dofs.cell_size, nk1 = dim_poly2(k + 1), nf = dofs.face_size;
    const std::size_t ndof = dofs.size();

    op.cell_basis = ElementBasis(mesh, t, k);
    op.recon_basis = ElementBasis(mesh, t, k + 1);
    if (opts.orthonormal) {
        op.cell_basis.orthonormalize(cell_rule);
        op.recon_basis.orthonormalize(cell_rule);
    }
    op.cell_mass = mass_matrix(op.cell_basis, cell_rule);
    op.recon_mass = mass_matrix(op.recon_basis, cell_rule);
    const auto cell_llt = detail::factor_spd(op.cell_mass, "element mass matrix, element " +
                                                               std::to_string(t));

    std::vector<QuadRule> face_rules;
    for (const auto& ef : el.faces) {
        face_rules.push_back(face_quadrature(mesh, ef.face, qdeg));
        op.face_bases.emplace_back(mesh, ef.face, k);
        op.face_mass.push_back(mass_matrix(op.face_bases.back(), face_rules.back()));
    }

    // Gradient reconstruction:
    //   (G v, tau)_T = (grad v_T, tau)_T + sum_F (v_F - v_T, tau . n_TF)_F
    Eigen::MatrixXd rhs_x = Eigen::MatrixXd::Zero(nk, ndof);
    Eigen::MatrixXd rhs_y = Eigen::MatrixXd::Zero(nk, ndof);
    for (std::size_t q = 0; q < cell_rule.size(); ++q) {
        const Eigen::VectorXd phi = op.cell_basis.values(cell_rule.points[q]);
        const Eigen::MatrixX2d dphi = op.cell_basis.gradients(cell_rule.points[q]);
        const double w = cell_rule.weights[q];
        rhs_x.leftCols(nk).noalias() += w * phi * dphi.col(0).transpose();
        rhs_y.leftCols(nk).noalias() += w * phi * dphi.col(1).transpose();
    }
    for (std::size_t i = 0; i < el.faces.size(); ++i) {
        const Point& n = el.faces[i].normal;
        const QuadRule& fr = face_rules[i];
        for (std::size_t q = 0; q < fr.size(); ++q) {
            const Eigen::VectorXd phi = op.cell_basis.values(fr.points[q]);
            const Eigen::VectorXd chi = op.face_bases[i].values(fr.points[q]);
            const double w = fr.weights[q];
            const Eigen::MatrixXd pp = w * phi * phi.transpose();
            const Eigen::MatrixXd pc = w * phi * chi.transpose();
            rhs_x.leftCols(nk) -= n.x() * pp;
            rhs_y.leftCols(nk) -= n.y() * pp;
            rhs_x.middleCols(dofs.face_offset(i), nf) += n.x() * pc;
            rhs_y.middleCols(dofs.face_offset(i), nf) += n.y() * pc;
        }
    }
    op.gradient.resize(2 * nk, ndof);
    op.gradient.topRows(nk) = cell_llt.solve(rhs_x);
    op.gradient.bottomRows(nk) = cell_llt.solve(rhs_y);

    // Potential reconstruction:
    //   (grad r v - G v, grad w)_T = 0 for w in P^{k+1}(T),  int_T r v = int_T v_T.
    // Solved on the non-constant modes, then the constant mode is fixed by the mean.
    Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(nk1, nk1);
    Eigen::MatrixXd rhs_r = Eigen::MatrixXd::Zero(nk1, ndof);
    Eigen::VectorXd recon_mean = Eigen::VectorXd::Zero(nk1);
    Eigen::VectorXd cell_mean = Eigen::VectorXd::Zero(nk);
    for (std::size_t q = 0; q < cell_rule.size(); ++q) {
        const Point& x = cell_rule.points[q];
        const double w = cell_rule.weights[q];
        const Eigen::MatrixX2d dpsi = op.recon_basis.gradients(x);
        const Eigen::VectorXd phi = op.cell_basis.values(x);
        stiff.noalias() += w * dpsi * dpsi.transpose();
        const Eigen::RowVectorXd gx = phi.transpose() * op.gradient.topRows(nk);
        const Eigen::RowVectorXd gy = phi.transpose() * op.gradient.bottomRows(nk);
        rhs_r.noalias() += w * (dpsi.col(0) * gx + dpsi.col(1) * gy);
        recon_mean += w * op.recon_basis.values(x);
        cell_mean += w * phi;
    }
    const std::size_t nnc = nk1 - 1;
    const auto stiff_llt = detail::factor_spd(stiff.bottomRightCorner(nnc, nnc),
                                              "reconstruction stiffness, element " +
                                                  std::to_string(t));
    op.potential = Eigen::MatrixXd::Zero(nk1, ndof);
    op.potential.bottomRows(nnc) = stiff_llt.solve(rhs_r.bottomRows(nnc));
    {
        Eigen::RowVectorXd mean_row = Eigen::RowVectorXd::Zero(ndof);
        mean_row.head(nk) = cell_mean.transpose();
        mean_row -= recon_mean.tail(nnc).transpose() * op.potential.bottomRows(nnc);
        op.potential.row(0) = mean_row / recon_mean(0);
    }

    // Boundary residual:
    //   (Delta v)|_F = h_T^{-1} [ pi_F(r v - v_F) - pi_T(r v - v_T)|_F ]
    const Eigen::MatrixXd cell_from_recon = cell_llt.solve(gram_matrix(op.cell_basis,
                                                                       op.recon_basis, cell_rule));
    Eigen::MatrixXd cell_diff = cell_from_recon * op.potential;
    cell_diff.leftCols(nk) -= Eigen::MatrixXd::Identity(nk, nk);

    for (std::size_t i = 0; i < el.faces.size(); ++i) {
        const auto face_llt = detail::factor_spd(op.face_mass[i], "face mass matrix");
        const Eigen::MatrixXd face_from_recon =
            face_llt.solve(gram_matrix(op.face_bases[i], op.recon_basis, face_rules[i]));
        const Eigen::MatrixXd face_from_cell =
            face_llt.solve(gram_matrix(op.face_bases[i], op.cell_basis, face_rules[i]));

        Eigen::MatrixXd d = face_from_recon * op.potential - face_from_cell * cell_diff;
        d.middleCols(dofs.face_offset(i), nf) -= Eigen::MatrixXd::Identity(nf, nf);
        op.boundary_residual.push_back(d / el.diameter);
    }

    return op;
}

/// I_T u: element block pi^k_T u, face blocks pi^k_F u.
template<typename F>
Eigen::VectorXd
interpolate(const Mesh& mesh, const LocalOperators& op, F&& u, int quad_degree)
{
    const Element& el = mesh.element(op.dofs.element);
    Eigen::VectorXd v(op.dofs.size());
    v.head(op.dofs.cell_size) =
        l2_project(op.cell_basis, element_quadrature(mesh, op.dofs.element, quad_degree), u);
    for (std::size_t i = 0; i < el.faces.size(); ++i)
        v.segment(op.dofs.face_offset(i), op.dofs.face_size) =
            l2_project(op.face_bases[i], face_quadrature(mesh, el.faces[i].face, quad_degree), u);
    return v;
}

/// ||v||_{1,q,T}^q = ||grad v_T||^q_{L^q(T)} + sum_F h_F^{1-q} ||v_F - v_T||^q_{L^q(F)}
inline double
seminorm_1ph_pow(const Mesh& mesh, const LocalOperators& op, const Eigen::VectorXd& v, double q,
                 int quad_degree)
{
    if (!(q > 1.0) || !std::isfinite(q))
        throw std::invalid_argument("seminorm_1ph: exponent must lie in (1, inf)");

    const std::size_t t = op.dofs.element;
    const Element& el = mesh.element(t);
    const Eigen::VectorXd vt = v.head(op.dofs.cell_size);

    double s = 0.0;
    const QuadRule rule = element_quadrature(mesh, t, quad_degree);
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const Eigen::Vector2d g = op.cell_basis.gradients(rule.points[i]).transpose() * vt;
        s += rule.weights[i] * std::pow(g.norm(), q);
    }
    for (std::size_t i = 0; i < el.faces.size(); ++i) {
        const std::size_t f = el.faces[i].face;
        const QuadRule fr = face_quadrature(mesh, f, quad_degree);
        double sf = 0.0;
        for (std::size_t j = 0; j < fr.size(); ++j) {
            const double jump = op.eval_face(v, i, fr.points[j]) - op.eval_cell(v, fr.points[j]);
            sf += fr.weights[j] * std::pow(std::abs(jump), q);
        }
        s += std::pow(mesh.face(f).diameter(), 1.0 - q) * sf;
    }
    return s;
}

inline double
seminorm_1ph(const Mesh& mesh, const LocalOperators& op, const Eigen::VectorXd& v, double q,
             int quad_degree)
{
    return std::pow(seminorm_1ph_pow(mesh, op, v, q, quad_degree), 1.0 / q);
}

} // namespace hho
