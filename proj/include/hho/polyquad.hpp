// Scaled monomial bases on elements and faces, and quadrature rules.
//
// Element rules are conical products (Gauss-Legendre x Gauss-Jacobi(1,0))
// on triangles; polygons are integrated through their centroid fan.
// Face rules are Gauss-Legendre on the segment.

#pragma once

#include "hho/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <cstddef>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hho {

/// Highest polynomial degree integrated exactly by the tabulated rules.
inline constexpr int max_quadrature_degree = 40;

class QuadratureError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct QuadRule
{
    std::vector<Point> points;
    std::vector<double> weights;
    int degree = 0;

    std::size_t size() const { return points.size(); }

    double total_weight() const
    {
        double s = 0.0;
        for (double w : weights)
            s += w;
        return s;
    }
};

/// Number of 2D monomials of total degree <= l.
constexpr std::size_t
dim_poly2(int l)
{
    return l < 0 ? 0 : std::size_t((l + 1) * (l + 2) / 2);
}

/// Number of 1D monomials of degree <= l.
constexpr std::size_t
dim_poly1(int l)
{
    return l < 0 ? 0 : std::size_t(l + 1);
}

namespace detail {

/// Golub-Welsch for Gauss-Jacobi nodes on [-1,1] with weight (1-x)^alpha (1+x)^beta.
/// Only the (0,0) and (1,0) weights are needed here.
inline std::pair<std::vector<double>, std::vector<double>>
gauss_jacobi(int n, int alpha, int beta)
{
    // Integral of the weight over [-1,1]: 2 for both supported cases.
    const double mu0 = 2.0;

    std::vector<double> x(n), w(n);
    if (n == 1) {
        x[0] = (alpha + beta == 0) ? 0.0 : double(beta - alpha) / (alpha + beta + 2);
        w[0] = mu0;
        return {x, w};
    }

    const double a = alpha, b = beta;
    Eigen::VectorXd diag(n), sub(n - 1);
    for (int k = 0; k < n; ++k) {
        const double s = 2.0 * k + a + b;
        diag(k) = (k == 0) ? (a + b == 0 ? 0.0 : (b - a) / (a + b + 2.0))
                           : (b * b - a * a) / (s * (s + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + a + b;
        sub(k - 1) = std::sqrt(4.0 * k * (k + a) * (k + b) * (k + a + b) /
                               (s * s * (s + 1.0) * (s - 1.0)));
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    for (int k = 0; k < n; ++k) {
        x[k] = eig.eigenvalues()(k);
        const double v0 = eig.eigenvectors()(0, k);
        w[k] = mu0 * v0 * v0;
    }
    return {x, w};
}

inline void
check_degree(int q, const char* who)
{
    if (q < 0)
        throw QuadratureError(std::string(who) + ": negative degree");
    if (q > max_quadrature_degree)
        throw QuadratureError(std::string(who) + ": degree " + std::to_string(q) +
                              " exceeds the supported maximum of " +
                              std::to_string(max_quadrature_degree));
}

/// Rule on the reference triangle (0,0),(1,0),(0,1), exact to degree q.
inline const QuadRule&
reference_triangle_rule(int q)
{
    static std::array<QuadRule, max_quadrature_degree + 1> cache;
    static std::array<std::once_flag, max_quadrature_degree + 1> flags;

    std::call_once(flags[q], [q] {
        const int n = q / 2 + 1;
        const auto [xa, wa] = gauss_jacobi(n, 0, 0);
        const auto [xb, wb] = gauss_jacobi(n, 1, 0);
        QuadRule r;
        r.degree = q;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                // Collapsed coordinates: x = (1+a)(1-b)/4, y = (1+b)/2, dx dy = (1-b)/8 da db.
                r.points.emplace_back((1.0 + xa[i]) * (1.0 - xb[j]) / 4.0, (1.0 + xb[j]) / 2.0);
                r.weights.push_back(wa[i] * wb[j] / 8.0);
            }
        cache[q] = std::move(r);
    });
    return cache[q];
}

/// Gauss-Legendre on [-1,1], exact to degree q.
inline const std::pair<std::vector<double>, std::vector<double>>&
reference_segment_rule(int q)
{
    static std::array<std::pair<std::vector<double>, std::vector<double>>,
                      max_quadrature_degree + 1>
        cache;
    static std::array<std::once_flag, max_quadrature_degree + 1> flags;
    std::call_once(flags[q], [q] { cache[q] = gauss_jacobi(q / 2 + 1, 0, 0); });
    return cache[q];
}

inline void
append_triangle(QuadRule& rule, const Point& a, const Point& b, const Point& c, int q)
{
    const QuadRule& ref = reference_triangle_rule(q);
    const Point e1 = b - a, e2 = c - a;
    const double jac = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        rule.points.push_back(a + ref.points[i].x() * e1 + ref.points[i].y() * e2);
        rule.weights.push_back(ref.weights[i] * jac);
    }
}

} // namespace detail

/// Rule integrating every polynomial of total degree <= q exactly on element t.
inline QuadRule
element_quadrature(const Mesh& mesh, std::size_t t, int q)
{
    detail::check_degree(q, "element_quadrature");
    const Element& el = mesh.element(t);
    const auto& v = mesh.vertices();
    QuadRule rule;
    rule.degree = q;
    if (el.vertices.size() == 3) {
        detail::append_triangle(rule, v[el.vertices[0]], v[el.vertices[1]], v[el.vertices[2]], q);
    } else {
        const std::size_t n = el.vertices.size();
        for (std::size_t i = 0; i < n; ++i)
            detail::append_triangle(rule, el.centroid, v[el.vertices[i]],
                                    v[el.vertices[(i + 1) % n]], q);
    }
    return rule;
}

/// Gauss-Legendre rule on face f, exact to degree q.
inline QuadRule
face_quadrature(const Mesh& mesh, std::size_t f, int q)
{
    detail::check_degree(q, "face_quadrature");
    const Face& face = mesh.face(f);
    const auto& [x, w] = detail::reference_segment_rule(q);
    QuadRule rule;
    rule.degree = q;
    for (std::size_t i = 0; i < x.size(); ++i) {
        rule.points.push_back(face.centroid + 0.5 * x[i] * face.length * face.tangent);
        rule.weights.push_back(0.5 * face.length * w[i]);
    }
    return rule;
}

/// Exponent pairs (i, j) of x^i y^j, graded by total degree.
inline std::vector<std::array<int, 2>>
monomial_exponents(int degree)
{
    std::vector<std::array<int, 2>> e;
    e.reserve(dim_poly2(degree));
    for (int d = 0; d <= degree; ++d)
        for (int j = 0; j <= d; ++j)
            e.push_back({d - j, j});
    return e;
}

/// Scaled monomials ((x - x_T)/h_T)^i ((y - y_T)/h_T)^j, |(i,j)| <= degree.
///
/// An optional change of basis (rows are new functions expressed on the
/// monomials) is used for the orthonormalized variant.
class ElementBasis
{
public:
    ElementBasis() = default;

    ElementBasis(const Point& center, double scale, int degree)
      : center_(center), scale_(scale), degree_(degree), exps_(monomial_exponents(degree))
    {
        if (degree < 0 || degree > 15)
            throw std::invalid_argument("ElementBasis: degree must lie in [0, 15]");
    }

    ElementBasis(const Mesh& mesh, std::size_t t, int degree)
      : ElementBasis(mesh.element(t).centroid, mesh.element(t).diameter, degree)
    {}

    int degree() const { return degree_; }
    std::size_t size() const { return exps_.size(); }
    const Point& center() const { return center_; }
    double scale() const { return scale_; }
    bool transformed() const { return transform_.has_value(); }

    Eigen::VectorXd values(const Point& x) const
    {
        const Point s = (x - center_) / scale_;
        Eigen::VectorXd r(size());
        const auto px = powers(s.x()), py = powers(s.y());
        for (std::size_t i = 0; i < size(); ++i)
            r(i) = px[exps_[i][0]] * py[exps_[i][1]];
        if (transform_)
            return *transform_ * r;
        return r;
    }

    /// Rows are basis functions, columns the x and y derivatives.
    Eigen::MatrixX2d gradients(const Point& x) const
    {
        const Point s = (x - center_) / scale_;
        Eigen::MatrixX2d g(size(), 2);
        const auto px = powers(s.x()), py = powers(s.y());
        for (std::size_t i = 0; i < size(); ++i) {
            const int a = exps_[i][0], b = exps_[i][1];
            g(i, 0) = a == 0 ? 0.0 : a * px[a - 1] * py[b] / scale_;
            g(i, 1) = b == 0 ? 0.0 : b * px[a] * py[b - 1] / scale_;
        }
        if (transform_)
            return *transform_ * g;
        return g;
    }

    /// Replaces the basis by an L2(rule)-orthonormal one via modified
    /// Gram-Schmidt in graded order. The first function stays constant.
    void orthonormalize(const QuadRule& rule)
    {
        const std::size_t n = size();
        Eigen::MatrixXd vals(rule.size(), n);
        for (std::size_t q = 0; q < rule.size(); ++q)
            vals.row(q) = values(rule.points[q]).transpose();
        Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), rule.size());

        Eigen::MatrixXd coef = transform_ ? *transform_ : Eigen::MatrixXd::Identity(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t j = 0; j < i; ++j) {
                    const double proj = (vals.col(i).array() * vals.col(j).array() * w.array()).sum();
                    vals.col(i) -= proj * vals.col(j);
                    coef.row(i) -= proj * coef.row(j);
                }
            const double nrm = std::sqrt((vals.col(i).array().square() * w.array()).sum());
            vals.col(i) /= nrm;
            coef.row(i) /= nrm;
        }
        transform_ = coef;
    }

private:
    std::array<double, 16> powers(double s) const
    {
        std::array<double, 16> p{};
        p[0] = 1.0;
        for (int i = 1; i <= degree_ && i < 16; ++i)
            p[i] = p[i - 1] * s;
        return p;
    }

    Point center_ = Point::Zero();
    double scale_ = 1.0;
    int degree_ = 0;
    std::vector<std::array<int, 2>> exps_;
    std::optional<Eigen::MatrixXd> transform_;
};

/// Scaled 1D monomials ((x - x_F) . t_F / h_F)^i, i <= degree.
class FaceBasis
{
public:
    FaceBasis() = default;

    FaceBasis(const Mesh& mesh, std::size_t f, int degree)
      : center_(mesh.face(f).centroid), tangent_(mesh.face(f).tangent),
        scale_(mesh.face(f).diameter()), degree_(degree)
    {}

    int degree() const { return degree_; }
    std::size_t size() const { return dim_poly1(degree_); }

    /// Scaled tangential coordinate, in [-1/2, 1/2] on the face.
    double coordinate(const Point& x) const { return (x - center_).dot(tangent_) / scale_; }

    Eigen::VectorXd values(const Point& x) const
    {
        const double s = coordinate(x);
        Eigen::VectorXd r(size());
        r(0) = 1.0;
        for (std::size_t i = 1; i < size(); ++i)
            r(i) = r(i - 1) * s;
        return r;
    }

private:
    Point center_ = Point::Zero();
    Point tangent_ = Point::UnitX();
    double scale_ = 1.0;
    int degree_ = 0;
};

/// Rows: evaluation points; columns: basis functions.
template<typename Basis>
Eigen::MatrixXd
eval_basis(const Basis& basis, const std::vector<Point>& points)
{
    Eigen::MatrixXd m(points.size(), basis.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        m.row(i) = basis.values(points[i]).transpose();
    return m;
}

/// One (size x 2) gradient block per point.
inline std::vector<Eigen::MatrixX2d>
eval_basis_grad(const ElementBasis& basis, const std::vector<Point>& points)
{
    std::vector<Eigen::MatrixX2d> g;
    g.reserve(points.size());
    for (const auto& p : points)
        g.push_back(basis.gradients(p));
    return g;
}

/// Gram matrix  int phi_i psi_j  of two bases under a rule.
template<typename BasisA, typename BasisB>
Eigen::MatrixXd
gram_matrix(const BasisA& a, const BasisB& b, const QuadRule& rule)
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.size(), b.size());
    for (std::size_t q = 0; q < rule.size(); ++q)
        m.noalias() += rule.weights[q] * a.values(rule.points[q]) *
                       b.values(rule.points[q]).transpose();
    return m;
}

template<typename Basis>
Eigen::MatrixXd
mass_matrix(const Basis& basis, const QuadRule& rule)
{
    return gram_matrix(basis, basis, rule);
}

/// 2-norm condition number of an SPD matrix.
inline double
condition_number(const Eigen::MatrixXd& spd)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(spd, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    return ev.maxCoeff() / ev.minCoeff();
}

} // namespace hho
