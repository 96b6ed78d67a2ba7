#include "hho/cases.hpp"
#include "hho/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hho;

TEST(Cases, CatalogNames)
{
    const auto cs = case_catalog(1.5, 1);
    ASSERT_EQ(cs.size(), 4u);
    for (std::size_t i = 0; i < cs.size(); ++i)
        EXPECT_EQ(cs[i].name, case_names()[i]);
}

TEST(Cases, UnknownCase)
{
    EXPECT_THROW(make_case("no-such-case", 1.5, 1), UnknownCaseError);
    EXPECT_THROW(make_case("nondeg-flux", 2.5, 1), std::invalid_argument);
    EXPECT_THROW(make_case("nondeg-flux", 1.0, 1), std::invalid_argument);
    EXPECT_THROW(make_case("nondeg-flux", 1.5, 1, 0.0), std::invalid_argument);
}

TEST(Cases, LinearSource)
{
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double delta : {1.0, 0.1})
        for (int i = 0; i < 50; ++i) {
            const CaseSpec c = make_case("nondeg-flux", 2.0, 1, delta);
            const Point x(u(rng), u(rng));
            const double ex = 2.0 * M_PI * M_PI * std::sin(M_PI * x.x()) * std::sin(M_PI * x.y());
            EXPECT_NEAR(c.source(x), ex, 1e-12 * 2.0 * M_PI * M_PI);
        }
}

TEST(Cases, SourceMatchesFiniteDivergence)
{
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(0.02, 0.98);
    for (double p : {1.25, 1.5, 1.75, 2.0})
        for (int k : {1, 2})
            for (const auto& c : case_catalog(p, k, 0.1)) {
                int tested = 0;
                while (tested < 100) {
                    const Point x(u(rng), u(rng));
                    // away from degeneracy: the FD step must not straddle a kink of |grad u|
                    if (c.delta(x) + c.grad_u(x).norm() < 0.05 || c.grad_u(x).norm() < 0.05)
                        continue;
                    const double fd = oracle::fd_source(c, x);
                    EXPECT_NEAR(c.source(x), fd, 1e-5 * std::max(1.0, std::abs(fd)))
                        << c.name << " p=" << p << " k=" << k << " at " << x.transpose();
                    ++tested;
                }
            }
}

TEST(Cases, DegenerateSourceFiniteNearCenter)
{
    for (double p : {1.25, 1.5, 1.75})
        for (int k : {0, 1, 2, 3}) {
            const CaseSpec c = make_case("degenerate", p, k);
            for (double r : {0.0, 1e-12, 1e-8, 1e-4, 1e-2}) {
                const double f = c.source(Point(0.5 + r, 0.5 - 0.5 * r));
                EXPECT_TRUE(std::isfinite(f)) << "p=" << p << " k=" << k << " r=" << r;
            }
        }
}

TEST(Cases, DegenerateExponent)
{
    for (double p : {1.25, 1.5, 1.75, 2.0})
        for (int k = 0; k <= 3; ++k)
            EXPECT_DOUBLE_EQ(degenerate_exponent(p, k), p + (k + 2) / 4.0);
    const CaseSpec c = make_case("degenerate", 1.5, 1);
    const double b = 1.5 + 0.75;
    EXPECT_NEAR(c.u(Point(0.7, 0.4)), 0.1 * std::exp(-10.0 * (std::pow(0.2, b) + std::pow(0.1, b))), 1e-15);
}

TEST(Cases, BumpValues)
{
    const CaseSpec c = make_case("nondeg-couple", 1.5, 1);
    for (const Point& x : {Point(0, 0), Point(1, 0), Point(0, 1), Point(1, 1), Point(0.5, 0.5)})
        EXPECT_DOUBLE_EQ(c.delta(x), 1.0);
    EXPECT_EQ(c.delta(Point(0.5, 0.1)), 0.0);
    EXPECT_NEAR(c.delta(Point(0.1, 0.0)), std::exp(1.0 - 1.0 / (1.0 - 25.0 * 0.01)), 1e-15);
}

TEST(Cases, BumpSupportAndGradient)
{
    const CaseSpec c = make_case("nondeg-couple", 1.5, 1);
    for (int i = 0; i < 64; ++i) {
        const double th = 2.0 * M_PI * i / 64.0;
        for (double r : {0.2, 0.2 + 1e-9, 0.3}) {
            const Point x = Point(0.5, 0.5) + r * Point(std::cos(th), std::sin(th));
            EXPECT_EQ(c.delta(x), 0.0);
            EXPECT_EQ(c.grad_delta(x), Eigen::Vector2d::Zero());
        }
    }
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const Point x(u(rng), u(rng));
        const double h = 1e-6;
        const Eigen::Vector2d fd((c.delta(x + Point(h, 0)) - c.delta(x - Point(h, 0))) / (2 * h),
                                 (c.delta(x + Point(0, h)) - c.delta(x - Point(0, h))) / (2 * h));
        EXPECT_LT((fd - c.grad_delta(x)).norm(), 1e-6 * std::max(1.0, fd.norm()));
    }
}

TEST(Cases, TiltedPotentialGradientBoundedBelow)
{
    const CaseSpec c = make_case("nondeg-potential", 1.5, 1);
    double m = 1e300;
    for (int j = 0; j <= 400; ++j)
        for (int i = 0; i <= 400; ++i)
            m = std::min(m, c.grad_u(Point(i / 400.0, j / 400.0)).norm());
    EXPECT_GE(m, 1.0 - 1e-9);
}

TEST(Cases, BoundaryCompatibility)
{
    for (const auto& c : case_catalog(1.5, 1)) {
        double mx = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double s = i / 100.0;
            for (const Point& x : {Point(s, 0), Point(s, 1), Point(0, s), Point(1, s)})
                mx = std::max(mx, std::abs(c.boundary(x)));
        }
        if (c.homogeneous_bc)
            EXPECT_LT(mx, 1e-15) << c.name;
        else
            EXPECT_GT(mx, 1e-3) << c.name;
    }
}

TEST(Cases, ZetaIsSupOfDegeneracy)
{
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& c : case_catalog(1.5, 1, 0.1)) {
        for (int i = 0; i < 2000; ++i) {
            const Point x(u(rng), u(rng));
            EXPECT_LE(c.delta(x) + c.grad_u(x).norm(), c.zeta * (1.0 + 1e-3)) << c.name;
        }
    }
    EXPECT_NEAR(make_case("nondeg-flux", 1.5, 1, 0.1).zeta, 0.1 + M_PI, 1e-9);
}

TEST(Cases, SineSeminormConstant)
{
    for (int k = 0; k <= 3; ++k) {
        const CaseSpec c = make_case("nondeg-flux", 1.5, k, 1.0);
        ASSERT_TRUE(c.u_wk2_inf.has_value());
        EXPECT_NEAR(*c.u_wk2_inf, std::pow(2.0, (k - 1) / 2.0) * std::pow(M_PI, k), 1e-12);
    }
    EXPECT_FALSE(make_case("degenerate", 1.5, 1).u_wk2_inf.has_value());
}
