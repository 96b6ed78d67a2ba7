// Polytopal 2D meshes with global face connectivity.
//
// Elements are stored as closed polygons (a list of faces with outward
// normals), so triangles and general polygons share the same code path.
// Only triangles are generated or read from disk at the moment.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hho {

using Point = Eigen::Vector2d;

class MeshError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Raised by load_mesh; carries the 1-based line number of the offending input.
class MeshParseError : public MeshError
{
public:
    MeshParseError(std::size_t line, const std::string& what)
      : MeshError("line " + std::to_string(line) + ": " + what), line_(line)
    {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

inline constexpr std::size_t no_element = std::numeric_limits<std::size_t>::max();

struct Face
{
    std::array<std::size_t, 2> vertices{};
    /// Incident elements; the second entry is `no_element` on the boundary.
    std::array<std::size_t, 2> elements{no_element, no_element};
    bool boundary = false;
    double length = 0.0;
    Point centroid = Point::Zero();
    /// Unit vector from vertices[0] to vertices[1].
    Point tangent = Point::Zero();

    double diameter() const { return length; }
};

struct ElementFace
{
    std::size_t face;
    Point normal; ///< outward unit normal n_TF
};

struct Element
{
    std::vector<std::size_t> vertices; ///< counterclockwise
    std::vector<ElementFace> faces;    ///< faces[i] joins vertices[i] and vertices[i+1]
    double area = 0.0;
    double diameter = 0.0;
    Point centroid = Point::Zero();
};

class Mesh
{
public:
    Mesh() = default;

    /// Builds connectivity and geometry from vertex coordinates and polygonal
    /// cells. Clockwise cells are reoriented. Throws MeshError on a
    /// non-manifold edge, a repeated vertex in a cell, or a degenerate cell.
    static Mesh from_cells(std::vector<Point> vertices,
                           const std::vector<std::vector<std::size_t>>& cells);

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<Element>& elements() const { return elements_; }
    const std::vector<Face>& faces() const { return faces_; }

    const Element& element(std::size_t t) const { return elements_[t]; }
    const Face& face(std::size_t f) const { return faces_[f]; }

    std::size_t num_elements() const { return elements_.size(); }
    std::size_t num_faces() const { return faces_.size(); }
    std::size_t num_boundary_faces() const
    {
        return std::size_t(std::count_if(faces_.begin(), faces_.end(),
                                         [](const Face& f) { return f.boundary; }));
    }

    /// h = max_T h_T
    double h() const
    {
        double r = 0.0;
        for (const auto& e : elements_)
            r = std::max(r, e.diameter);
        return r;
    }

private:
    std::vector<Point> vertices_;
    std::vector<Element> elements_;
    std::vector<Face> faces_;
};

namespace detail {

inline double
signed_area(const std::vector<Point>& v, const std::vector<std::size_t>& cell)
{
    double a = 0.0;
    const std::size_t n = cell.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = v[cell[i]];
        const Point& q = v[cell[(i + 1) % n]];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

} // namespace detail

inline Mesh
Mesh::from_cells(std::vector<Point> vertices, const std::vector<std::vector<std::size_t>>& cells)
{
    constexpr double min_area = 1e-14;

    Mesh m;
    m.vertices_ = std::move(vertices);
    const auto& v = m.vertices_;

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> face_index;
    m.elements_.reserve(cells.size());

    for (std::size_t t = 0; t < cells.size(); ++t) {
        std::vector<std::size_t> cell = cells[t];
        if (cell.size() < 3)
            throw MeshError("element " + std::to_string(t) + " has fewer than 3 vertices");
        for (auto id : cell)
            if (id >= v.size())
                throw MeshError("element " + std::to_string(t) + " references vertex " +
                                std::to_string(id) + " out of range");
        {
            auto sorted = cell;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                throw MeshError("element " + std::to_string(t) + " repeats a vertex");
        }

        double area = detail::signed_area(v, cell);
        if (area < 0.0) {
            std::reverse(cell.begin(), cell.end());
            area = -area;
        }
        if (area <= min_area)
            throw MeshError("degenerate element " + std::to_string(t) + " (area " +
                            std::to_string(area) + ")");

        Element el;
        el.vertices = cell;
        el.area = area;

        // Polygon area centroid.
        Point c = Point::Zero();
        const std::size_t n = cell.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point& p = v[cell[i]];
            const Point& q = v[cell[(i + 1) % n]];
            const double cr = p.x() * q.y() - q.x() * p.y();
            c += (p + q) * cr;
        }
        el.centroid = c / (6.0 * area);

        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                el.diameter = std::max(el.diameter, (v[cell[i]] - v[cell[j]]).norm());

        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = cell[i], b = cell[(i + 1) % n];
            const auto key = std::minmax(a, b);
            const Point d = v[b] - v[a];
            const Point normal = Point(d.y(), -d.x()) / d.norm();

            auto [it, inserted] = face_index.try_emplace({key.first, key.second}, m.faces_.size());
            if (inserted) {
                Face f;
                f.vertices = {key.first, key.second};
                f.elements[0] = t;
                f.length = (v[key.second] - v[key.first]).norm();
                f.centroid = 0.5 * (v[key.first] + v[key.second]);
                f.tangent = (v[key.second] - v[key.first]) / f.length;
                m.faces_.push_back(f);
            } else {
                Face& f = m.faces_[it->second];
                if (f.elements[1] != no_element)
                    throw MeshError("non-manifold edge (" + std::to_string(key.first) + ", " +
                                    std::to_string(key.second) +
                                    ") shared by more than two elements");
                f.elements[1] = t;
            }
            el.faces.push_back({it->second, normal});
        }
        m.elements_.push_back(std::move(el));
    }

    for (auto& f : m.faces_)
        f.boundary = (f.elements[1] == no_element);

    return m;
}

/// The unit square cut into n x n cells, each split along its
/// lower-left to upper-right diagonal: 2n^2 right triangles, h = sqrt(2)/n.
inline Mesh
build_structured_triangular(std::size_t n)
{
    if (n == 0)
        throw MeshError("build_structured_triangular: n must be positive");

    std::vector<Point> verts;
    verts.reserve((n + 1) * (n + 1));
    for (std::size_t j = 0; j <= n; ++j)
        for (std::size_t i = 0; i <= n; ++i)
            verts.emplace_back(double(i) / double(n), double(j) / double(n));

    auto id = [n](std::size_t i, std::size_t j) { return j * (n + 1) + i; };

    std::vector<std::vector<std::size_t>> cells;
    cells.reserve(2 * n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return Mesh::from_cells(std::move(verts), cells);
}

/// Reads the text format
///
///     nv ne
///     x y          (nv lines)
///     i j k        (ne lines, 0-based, counterclockwise)
///
/// '#' starts a comment; blank lines are ignored.
inline Mesh
read_mesh(std::istream& in)
{
    std::string raw;
    std::size_t lineno = 0;

    auto next_line = [&](std::istringstream& ss) -> bool {
        while (std::getline(in, raw)) {
            ++lineno;
            if (auto pos = raw.find('#'); pos != std::string::npos)
                raw.erase(pos);
            if (raw.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            ss.clear();
            ss.str(raw);
            return true;
        }
        return false;
    };
    auto expect_end = [&](std::istringstream& ss) {
        std::string extra;
        if (ss >> extra)
            throw MeshParseError(lineno, "unexpected trailing token '" + extra + "'");
    };

    std::istringstream ss;
    if (!next_line(ss))
        throw MeshParseError(lineno, "missing header 'nv ne'");
    long long nv = -1, ne = -1;
    if (!(ss >> nv >> ne) || nv < 0 || ne < 0)
        throw MeshParseError(lineno, "malformed header, expected 'nv ne'");
    expect_end(ss);

    std::vector<Point> verts;
    verts.reserve(std::size_t(nv));
    for (long long i = 0; i < nv; ++i) {
        if (!next_line(ss))
            throw MeshParseError(lineno, "unexpected end of file while reading vertices");
        double x, y;
        if (!(ss >> x >> y))
            throw MeshParseError(lineno, "malformed vertex, expected 'x y'");
        expect_end(ss);
        verts.emplace_back(x, y);
    }

    std::vector<std::vector<std::size_t>> cells;
    cells.reserve(std::size_t(ne));
    for (long long e = 0; e < ne; ++e) {
        if (!next_line(ss))
            throw MeshParseError(lineno, "unexpected end of file while reading elements");
        long long a, b, c;
        if (!(ss >> a >> b >> c))
            throw MeshParseError(lineno, "malformed element, expected 'i j k'");
        expect_end(ss);
        for (auto idx : {a, b, c})
            if (idx < 0 || idx >= nv)
                throw MeshParseError(lineno, "vertex index " + std::to_string(idx) +
                                                 " out of range");
        cells.push_back({std::size_t(a), std::size_t(b), std::size_t(c)});
    }

    std::istringstream rest;
    if (next_line(rest))
        throw MeshParseError(lineno, "unexpected content after the last element");

    return Mesh::from_cells(std::move(verts), cells);
}

inline Mesh
load_mesh(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw MeshError("cannot open mesh file '" + path + "'");
    return read_mesh(in);
}

inline void
write_mesh(std::ostream& out, const Mesh& mesh)
{
    out << mesh.vertices().size() << ' ' << mesh.num_elements() << '\n';
    out.precision(17);
    for (const auto& p : mesh.vertices())
        out << p.x() << ' ' << p.y() << '\n';
    for (const auto& e : mesh.elements()) {
        if (e.vertices.size() != 3)
            throw MeshError("write_mesh: only triangular meshes can be written");
        out << e.vertices[0] << ' ' << e.vertices[1] << ' ' << e.vertices[2] << '\n';
    }
}

struct MeshStats
{
    double h = 0.0;
    double min_element_diameter = 0.0;
    double max_element_diameter = 0.0;
    double min_angle_deg = 0.0;
    /// min and max of h_F / h_T over element faces.
    double min_face_element_ratio = 0.0;
    double max_face_element_ratio = 0.0;
    std::size_t num_elements = 0;
    std::size_t num_faces = 0;
    std::size_t num_boundary_faces = 0;
};

inline MeshStats
mesh_stats(const Mesh& mesh)
{
    MeshStats s;
    s.num_elements = mesh.num_elements();
    s.num_faces = mesh.num_faces();
    s.num_boundary_faces = mesh.num_boundary_faces();
    s.min_element_diameter = std::numeric_limits<double>::infinity();
    s.min_angle_deg = 180.0;
    s.min_face_element_ratio = std::numeric_limits<double>::infinity();

    const auto& v = mesh.vertices();
    for (const auto& el : mesh.elements()) {
        s.h = std::max(s.h, el.diameter);
        s.min_element_diameter = std::min(s.min_element_diameter, el.diameter);
        s.max_element_diameter = std::max(s.max_element_diameter, el.diameter);

        const std::size_t n = el.vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point& prev = v[el.vertices[(i + n - 1) % n]];
            const Point& cur = v[el.vertices[i]];
            const Point& next = v[el.vertices[(i + 1) % n]];
            const Point a = prev - cur, b = next - cur;
            const double ang = std::atan2(std::abs(a.x() * b.y() - a.y() * b.x()), a.dot(b));
            s.min_angle_deg = std::min(s.min_angle_deg, ang * 180.0 / M_PI);
        }
        for (const auto& ef : el.faces) {
            const double r = mesh.face(ef.face).diameter() / el.diameter;
            s.min_face_element_ratio = std::min(s.min_face_element_ratio, r);
            s.max_face_element_ratio = std::max(s.max_face_element_ratio, r);
        }
    }
    return s;
}

} // namespace hho
