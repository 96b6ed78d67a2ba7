#include "hho/flux.hpp"
#include "hho/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hho;

namespace {

struct Sampler
{
    std::mt19937 rng;
    explicit Sampler(unsigned seed) : rng(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
    Eigen::Vector2d vec(double r) { return {uniform(-r, r), uniform(-r, r)}; }
};

FluxModel
model(double p, double a, double delta)
{
    return FluxModel::carreau_yasuda(p, 1.0, a, constant_field(delta),
                                     [](const Point&) { return Eigen::Vector2d::Zero().eval(); });
}

const Point origin(0.0, 0.0);

} // namespace

TEST(Flux, ZeroAtRest)
{
    for (double p : {1.25, 1.5, 2.0})
        for (double d : {0.0, 0.5})
            EXPECT_EQ(model(p, 1.0, d).sigma(origin, Eigen::Vector2d::Zero()), Eigen::Vector2d::Zero());
}

TEST(Flux, LinearCaseIgnoresDelta)
{
    Sampler s(1);
    for (int i = 0; i < 20; ++i) {
        const Eigen::Vector2d xi = s.vec(3.0);
        const FluxModel m = FluxModel::carreau_yasuda(2.0, 1.7, 1.0, constant_field(s.uniform(0, 5)),
                                                      [](const Point&) { return Eigen::Vector2d::Zero().eval(); });
        EXPECT_LT((m.sigma(origin, xi) - 1.7 * xi).norm(), 1e-15);
        EXPECT_LT((m.jacobian(origin, xi) - 1.7 * Eigen::Matrix2d::Identity()).norm(), 1e-15);
    }
}

TEST(Flux, DirectEvaluation)
{
    const Eigen::Vector2d s = model(1.5, 1.0, 1.0).sigma(origin, {1.0, 0.0});
    EXPECT_NEAR(s.x(), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_EQ(s.y(), 0.0);
    EXPECT_NEAR(s.x(), 0.70711, 5e-6);
}

TEST(Flux, JacobianMatchesFiniteDifferences)
{
    Sampler s(2);
    for (int trial = 0; trial < 200; ++trial) {
        const double p = s.uniform(1.05, 2.0), a = trial % 2 ? 2.0 : 1.0;
        const FluxModel m = model(p, a, trial % 3 ? s.uniform(0.0, 1.0) : 0.0);
        Eigen::Vector2d xi = s.vec(2.0);
        if (xi.norm() < 0.1)
            xi *= 0.2 / xi.norm();
        const Eigen::Matrix2d fd = oracle::fd_jacobian([&](const Eigen::Vector2d& y) { return m.sigma(origin, y); }, xi);
        const Eigen::Matrix2d j = m.jacobian(origin, xi);
        EXPECT_LE((fd - j).norm(), 1e-6 * j.norm()) << "p=" << p << " a=" << a;
    }
}

TEST(Flux, JacobianSymmetricAndPositiveSemidefinite)
{
    Sampler s(3);
    for (int trial = 0; trial < 500; ++trial) {
        const FluxModel m = model(s.uniform(1.01, 2.0), trial % 2 ? 2.0 : 1.0, s.uniform(0.0, 1.0) * (trial % 4 != 0));
        const Eigen::Vector2d xi = trial % 7 ? s.vec(3.0) : Eigen::Vector2d::Zero();
        const Eigen::Matrix2d j = m.jacobian(origin, xi);
        EXPECT_LE(std::abs(j(0, 1) - j(1, 0)), 1e-12 * j.norm());
        EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(j).eigenvalues().minCoeff(), 0.0);
    }
}

TEST(Flux, RegularizedJacobianAtSingularPoint)
{
    const FluxModel m = model(1.5, 1.0, 0.0);
    const Eigen::Matrix2d j = m.jacobian(origin, Eigen::Vector2d::Zero());
    EXPECT_TRUE(j.allFinite());
    EXPECT_NEAR(j(0, 0), std::pow(m.eps, -0.5), 1e-6 * j(0, 0));
}

TEST(Flux, MonotoneAndStronglyMonotone)
{
    Sampler s(4);
    for (double p : {1.1, 1.25, 1.5, 1.75, 2.0})
        for (double a : {1.0, 2.0}) {
            FluxModel m = model(p, a, 0.0);
            const double sm = framing_constants(m).sm;
            for (int i = 0; i < 2000; ++i) {
                const double d = i % 5 ? s.uniform(0.0, 2.0) : 0.0;
                m.delta = constant_field(d);
                const Eigen::Vector2d t = s.vec(3.0), e = s.vec(3.0);
                const double lhs = (m.sigma(origin, t) - m.sigma(origin, e)).dot(t - e);
                const double w = std::pow(d, p) + std::pow(t.norm(), p) + std::pow(e.norm(), p);
                const double rhs = sm * std::pow(w, (p - 2.0) / p) * (t - e).squaredNorm();
                EXPECT_GE(lhs, 0.0);
                EXPECT_GE(lhs, rhs * (1.0 - 1e-12)) << "p=" << p << " a=" << a;
            }
        }
}

TEST(Flux, Continuity)
{
    Sampler s(5);
    for (double p : {1.1, 1.25, 1.5, 1.75, 2.0})
        for (double a : {1.0, 2.0}) {
            FluxModel m = model(p, a, 0.0);
            const double hc = framing_constants(m).hc;
            for (int i = 0; i < 2000; ++i) {
                const double d = i % 5 ? s.uniform(0.0, 2.0) : 0.0;
                m.delta = constant_field(d);
                const Eigen::Vector2d t = s.vec(3.0), e = s.vec(3.0);
                const double lhs = (m.sigma(origin, t) - m.sigma(origin, e)).norm();
                const double w = std::pow(d, p) + std::pow(t.norm(), p) + std::pow(e.norm(), p);
                EXPECT_LE(lhs, hc * std::pow(w, (p - 2.0) / p) * (t - e).norm() * (1.0 + 1e-12)) << "p=" << p << " a=" << a;
            }
        }
}

TEST(Flux, RegularizationIsExactAboveFloor)
{
    Sampler s(6);
    for (int i = 0; i < 1000; ++i) {
        const double a = i % 2 ? 2.0 : 1.0;
        const FluxModel m = model(s.uniform(1.1, 1.9), a, i % 3 ? s.uniform(0.0, 1.0) : 0.0);
        Eigen::Vector2d xi = s.vec(1.0) * std::pow(10.0, -s.uniform(0.0, 7.0));
        if (std::pow(m.delta(origin), a) + std::pow(xi.norm(), a) < std::pow(m.eps, a))
            continue;
        EXPECT_EQ(m.sigma(origin, xi), m.sigma_regularized(origin, xi));
    }
    const FluxModel m = model(1.5, 1.0, 0.0);
    const Eigen::Vector2d tiny(1e-10, 0.0);
    EXPECT_NE(m.sigma(origin, tiny), m.sigma_regularized(origin, tiny));
}

TEST(FramingConstants, LinearCase)
{
    // p = 2: the power-of-two factors reduce to 2^{1/2} in the continuity constant
    for (double a : {1.0, 2.0}) {
        const FramingConstants c = framing_constants(FluxModel::carreau_yasuda(
            2.0, 1.3, a, constant_field(0.0), [](const Point&) { return Eigen::Vector2d::Zero().eval(); }));
        EXPECT_NEAR(c.hc, 1.3 * std::sqrt(2.0), 1e-14);
        EXPECT_NEAR(c.sm, 1.3, 1e-14);
    }
}

TEST(FramingConstants, DirectEvaluation)
{
    const FramingConstants c = framing_constants(model(1.5, 1.0, 0.0));
    EXPECT_NEAR(c.sm, 0.5 * std::pow(2.0, (1.0 - 1.0 / 1.5) * (1.5 - 2.0)), 1e-15);
    EXPECT_NEAR(c.sm, 0.4454, 5e-5);
}

TEST(FramingConstants, OrderedOnGrid)
{
    for (int i = 1; i <= 50; ++i) {
        const double p = 1.0 + i / 50.0;
        const FramingConstants c = framing_constants(model(p, 1.0, 0.0));
        EXPECT_LE(c.sm, c.hc) << "p=" << p;
    }
}

TEST(Stabilization, ValueExamples)
{
    StabModel st;
    st.p = 1.5;
    st.gamma = 2.0;
    st.zeta = constant_field(1.0);
    EXPECT_EQ(st.value(origin, 0.0), 0.0);
    EXPECT_NEAR(st.value(origin, 1.0), 2.0 / std::cbrt(2.0), 1e-15);
    st.zeta = constant_field(0.0);
    EXPECT_EQ(st.value(origin, 0.0), 0.0);
    st.p = 2.0;
    EXPECT_DOUBLE_EQ(st.value(origin, -0.3), -0.6);
    EXPECT_DOUBLE_EQ(st.derivative(origin, -0.3), 2.0);
}

TEST(Stabilization, DerivativeMatchesFiniteDifferences)
{
    Sampler s(7);
    for (int trial = 0; trial < 200; ++trial) {
        StabModel st;
        st.p = s.uniform(1.05, 2.0);
        st.gamma = s.uniform(0.5, 2.0);
        st.zeta = constant_field(trial % 3 ? s.uniform(0.0, 2.0) : 0.0);
        double w = s.uniform(-2.0, 2.0);
        if (std::abs(w) < 0.1)
            w = 0.1 + std::abs(w);
        const double h = 1e-6;
        const double fd = (st.value(origin, w + h) - st.value(origin, w - h)) / (2.0 * h);
        EXPECT_NEAR(st.derivative(origin, w), fd, 1e-6 * std::abs(fd));
    }
}

TEST(Stabilization, MonotoneAndFramed)
{
    Sampler s(8);
    for (double p : {1.25, 1.5, 1.75}) {
        StabModel st;
        st.p = p;
        for (int i = 0; i < 2000; ++i) {
            const double z = s.uniform(0.0, 2.0), x = s.uniform(-3, 3), y = s.uniform(-3, 3);
            st.zeta = constant_field(z);
            const double d = st.value(origin, x) - st.value(origin, y);
            EXPECT_GE(d * (x - y), 0.0);
            const double w = std::pow(z, p) + std::pow(std::abs(x), p) + std::pow(std::abs(y), p);
            EXPECT_LE(std::abs(d), 4.0 * std::pow(w, (p - 2.0) / p) * std::abs(x - y));
            EXPECT_GE(st.derivative(origin, x), 0.0);
        }
    }
}

TEST(Prolongement, Examples)
{
    const Eigen::Vector2d x(0.3, -1.2), zero = Eigen::Vector2d::Zero();
    for (double p : {1.25, 1.5, 1.75}) {
        EXPECT_TRUE(check_prolongement(p, 0.7, x, x));
        EXPECT_TRUE(check_prolongement(p, 0.0, x, zero));
        EXPECT_NEAR(std::pow(x.norm(), p - 2.0) * x.norm(), std::pow(x.norm(), p - 1.0), 1e-15);
        EXPECT_TRUE(check_prolongement(p, 0.0, zero, zero));
    }
    EXPECT_THROW(check_prolongement(1.5, -1.0, x, x), std::invalid_argument);
}

TEST(Prolongement, RandomSamples)
{
    Sampler s(9);
    for (double p : {1.25, 1.5, 1.75})
        for (int i = 0; i < 100000; ++i) {
            const double alpha = i % 10 ? s.uniform(0.0, 3.0) : 0.0;
            const Eigen::Vector2d x = s.vec(2.0), y = i % 11 ? s.vec(2.0) : Eigen::Vector2d::Zero();
            ASSERT_TRUE(check_prolongement(p, alpha, x, y)) << "p=" << p << " i=" << i;
        }
}
