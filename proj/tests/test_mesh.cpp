#include "hho/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

using namespace hho;

namespace {

// Edges counted straight from the triangle list, without the Mesh face table.
std::map<std::pair<std::size_t, std::size_t>, int>
edge_use(const Mesh& m)
{
    std::map<std::pair<std::size_t, std::size_t>, int> use;
    for (const auto& el : m.elements())
        for (std::size_t i = 0; i < el.vertices.size(); ++i) {
            std::size_t a = el.vertices[i], b = el.vertices[(i + 1) % el.vertices.size()];
            if (a > b)
                std::swap(a, b);
            ++use[{a, b}];
        }
    return use;
}

Mesh
parse(const std::string& text)
{
    std::istringstream is(text);
    return read_mesh(is);
}

} // namespace

TEST(Mesh, SmallestGrid)
{
    const Mesh m = build_structured_triangular(1);
    EXPECT_EQ(m.num_elements(), 2u);
    EXPECT_EQ(m.num_faces(), 5u);
    EXPECT_EQ(m.num_boundary_faces(), 4u);
}

TEST(Mesh, AreaAdditivity)
{
    const Mesh m = build_structured_triangular(2);
    EXPECT_EQ(m.num_elements(), 8u);
    double a = 0.0;
    for (const auto& el : m.elements())
        a += el.area;
    EXPECT_NEAR(a, 1.0, 1e-12);
}

TEST(Mesh, InternalFaceCountMatchesEdgeEnumeration)
{
    const Mesh m = build_structured_triangular(4);
    int shared = 0, single = 0;
    for (const auto& [e, n] : edge_use(m)) {
        shared += n == 2;
        single += n == 1;
    }
    EXPECT_EQ(m.num_faces() - m.num_boundary_faces(), std::size_t(shared));
    EXPECT_EQ(m.num_boundary_faces(), std::size_t(single));
    EXPECT_EQ(shared, 40);
}

TEST(Mesh, RejectsZeroCells)
{
    EXPECT_THROW(build_structured_triangular(0), MeshError);
}

TEST(Mesh, FaceIncidence)
{
    const Mesh m = build_structured_triangular(5);
    std::vector<int> count(m.num_faces(), 0);
    for (const auto& el : m.elements())
        for (const auto& ef : el.faces)
            ++count[ef.face];
    for (std::size_t f = 0; f < m.num_faces(); ++f)
        EXPECT_EQ(count[f], m.face(f).boundary ? 1 : 2);
}

TEST(Mesh, ClosedPolygonsAndUnitNormals)
{
    const Mesh m = build_structured_triangular(6);
    for (const auto& el : m.elements()) {
        Eigen::Vector2d s = Eigen::Vector2d::Zero();
        for (const auto& ef : el.faces) {
            EXPECT_NEAR(ef.normal.norm(), 1.0, 1e-14);
            s += m.face(ef.face).length * ef.normal;
        }
        EXPECT_LT(s.norm(), 1e-14);
    }
}

TEST(Mesh, NormalsPointOutward)
{
    const Mesh m = build_structured_triangular(3);
    for (const auto& el : m.elements())
        for (const auto& ef : el.faces)
            EXPECT_GT((m.face(ef.face).centroid - el.centroid).dot(ef.normal), 0.0);
}

TEST(Mesh, OppositeNormalsOnInternalFaces)
{
    const Mesh m = build_structured_triangular(4);
    std::map<std::size_t, std::vector<Eigen::Vector2d>> normals;
    for (const auto& el : m.elements())
        for (const auto& ef : el.faces)
            normals[ef.face].push_back(ef.normal);
    for (const auto& [f, ns] : normals) {
        if (ns.size() == 2) {
            EXPECT_EQ(ns[0], (-ns[1]).eval());
        }
    }
}

TEST(Mesh, GeometryRecomputedFromVertices)
{
    const Mesh m = build_structured_triangular(7);
    const auto& v = m.vertices();
    double hmax = 0.0;
    for (const auto& el : m.elements()) {
        const Point &a = v[el.vertices[0]], &b = v[el.vertices[1]], &c = v[el.vertices[2]];
        const double area = 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
        EXPECT_GT(area, 0.0); // counterclockwise
        EXPECT_NEAR(el.area, area, 1e-13 * area);
        const double diam = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
        EXPECT_NEAR(el.diameter, diam, 1e-13 * diam);
        const Point g = (a + b + c) / 3.0;
        EXPECT_LT((el.centroid - g).norm(), 1e-13);
        hmax = std::max(hmax, diam);
    }
    for (std::size_t f = 0; f < m.num_faces(); ++f) {
        const auto& fv = m.face(f).vertices;
        const double len = (v[fv[0]] - v[fv[1]]).norm();
        EXPECT_NEAR(m.face(f).length, len, 1e-13 * len);
        EXPECT_LT((m.face(f).centroid - 0.5 * (v[fv[0]] + v[fv[1]])).norm(), 1e-13);
    }
    EXPECT_NEAR(m.h(), hmax, 1e-15);
}

TEST(Mesh, FaceDiametersBoundedByElementDiameters)
{
    const Mesh m = build_structured_triangular(8);
    for (const auto& el : m.elements())
        for (const auto& ef : el.faces)
            EXPECT_LE(m.face(ef.face).diameter(), el.diameter * (1 + 1e-14));
}

TEST(Mesh, RefinementQuadruplesElements)
{
    for (std::size_t n : {1, 2, 3, 5})
        EXPECT_EQ(build_structured_triangular(2 * n).num_elements(), 4 * build_structured_triangular(n).num_elements());
}

TEST(MeshStats, Sizes)
{
    EXPECT_NEAR(mesh_stats(build_structured_triangular(1)).h, std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(mesh_stats(build_structured_triangular(4)).h, 0.35355339059327373, 1e-15);
    for (std::size_t n : {2, 8, 16})
        EXPECT_DOUBLE_EQ(mesh_stats(build_structured_triangular(2 * n)).h, 0.5 * mesh_stats(build_structured_triangular(n)).h);
}

TEST(MeshStats, RegularityProxies)
{
    const MeshStats s = mesh_stats(build_structured_triangular(4));
    EXPECT_NEAR(s.min_angle_deg, 45.0, 1e-10);
    EXPECT_NEAR(s.min_face_element_ratio, 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(s.max_face_element_ratio, 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(s.min_element_diameter, s.max_element_diameter);
}

TEST(MeshIO, RoundTripOfSmallestGrid)
{
    const Mesh a = build_structured_triangular(1);
    std::ostringstream os;
    write_mesh(os, a);
    const Mesh b = parse(os.str());
    ASSERT_EQ(a.num_elements(), b.num_elements());
    ASSERT_EQ(a.num_faces(), b.num_faces());
    for (std::size_t t = 0; t < a.num_elements(); ++t)
        EXPECT_EQ(a.element(t).vertices, b.element(t).vertices);
    for (std::size_t f = 0; f < a.num_faces(); ++f) {
        EXPECT_EQ(a.face(f).vertices, b.face(f).vertices);
        EXPECT_EQ(a.face(f).boundary, b.face(f).boundary);
    }
}

TEST(MeshIO, SampleFileMatchesGenerator)
{
    const Mesh a = load_mesh(std::string(HHO_SAMPLES_DIR) + "/unit_square_n1.mesh");
    const Mesh b = build_structured_triangular(1);
    EXPECT_EQ(a.num_faces(), b.num_faces());
    EXPECT_EQ(a.num_boundary_faces(), 4u);
    std::set<std::vector<std::size_t>> ca, cb;
    for (const auto& el : a.elements())
        ca.insert(el.vertices);
    for (const auto& el : b.elements())
        cb.insert(el.vertices);
    EXPECT_EQ(ca, cb);
}

TEST(MeshIO, CommentsAndBlankLines)
{
    const Mesh m = parse("# header\n3 1  # counts\n\n0 0\n1 0\n0 1 # last vertex\n0 1 2\n");
    EXPECT_EQ(m.num_elements(), 1u);
    EXPECT_NEAR(m.element(0).area, 0.5, 1e-15);
}

TEST(MeshIO, ClockwiseInputIsReoriented)
{
    const Mesh m = parse("3 1\n0 0\n1 0\n0 1\n0 2 1\n");
    const auto& v = m.vertices();
    const auto& e = m.element(0).vertices;
    const double a = (v[e[1]] - v[e[0]]).x() * (v[e[2]] - v[e[0]]).y() - (v[e[1]] - v[e[0]]).y() * (v[e[2]] - v[e[0]]).x();
    EXPECT_GT(a, 0.0);
}

TEST(MeshIO, NonManifoldEdge)
{
    const std::string text = "5 3\n0 0\n1 0\n0.5 1\n0.5 -1\n0.5 2\n0 1 2\n1 0 3\n0 1 4\n";
    EXPECT_THROW(parse(text), MeshError);
}

TEST(MeshIO, DegenerateElement)
{
    try {
        parse("3 1\n0 0\n1 1\n2 2\n0 1 2\n");
        FAIL() << "expected an error";
    } catch (const MeshParseError&) {
        FAIL() << "degenerate element reported as a parse error";
    } catch (const MeshError& e) {
        EXPECT_NE(std::string(e.what()).find("degenerate"), std::string::npos);
    }
}

TEST(MeshIO, ParseErrorsCarryLineNumbers)
{
    auto line_of = [](const std::string& text) -> std::size_t {
        try {
            parse(text);
        } catch (const MeshParseError& e) {
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of("3 1\n0 0\n1 x\n0 1\n0 1 2\n"), 3u);
    EXPECT_EQ(line_of("# c\n3 1\n0 0\n1 0\n0 1\n0 1 7\n"), 6u);
    EXPECT_EQ(line_of("3\n"), 1u);
    EXPECT_EQ(line_of("3 1\n0 0\n1 0\n0 1\n"), 4u);
    EXPECT_EQ(line_of("3 1\n0 0 5\n1 0\n0 1\n0 1 2\n"), 2u);
}

TEST(MeshIO, MissingFile)
{
    EXPECT_THROW(load_mesh("/nonexistent/file.mesh"), MeshError);
}
