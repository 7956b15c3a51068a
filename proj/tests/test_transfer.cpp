#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ionloss/errors.hpp"
#include "ionloss/special_functions.hpp"
#include "ionloss/transfer.hpp"

using namespace ionloss;

namespace
{
HfsAtom const& nitrogen()
{
    return find_atom(builtin_hfs_table(), 7);
}

double chi_at(Vec2 b, double v)
{
    return eikonal_phase_single(nitrogen(), v, norm(b));
}
}  // namespace

TEST(EikonalPhase, Limits)
{
    double const v = 20;
    EXPECT_LT(eikonal_phase_single(nitrogen(), v, 600), 1e-200);
    double const step = eikonal_phase_single(nitrogen(), v, 1e-7)
                        - eikonal_phase_single(nitrogen(), v, 1e-6);
    EXPECT_NEAR(step, (2.0 * 7 / v) * std::log(10.0), 1e-9);
    EXPECT_THROW(eikonal_phase_single(nitrogen(), v, 0), DomainError);
    EXPECT_THROW(eikonal_phase_single(nitrogen(), 0, 1), DomainError);
}

TEST(EikonalPhase, InverseVelocity)
{
    for (double b : {0.01, 0.5, 3.0})
    {
        EXPECT_NEAR(eikonal_phase_single(nitrogen(), 40, b),
                    0.5 * eikonal_phase_single(nitrogen(), 20, b), 1e-15);
    }
}

TEST(EikonalPhase, PositiveDecreasing)
{
    double prev = INFINITY;
    for (int i = 0; i < 500; ++i)
    {
        double const b = 1e-4 * std::pow(1.02, i);
        double const chi = eikonal_phase_single(nitrogen(), 10, b);
        ASSERT_GT(chi, 0);
        ASSERT_LT(chi, prev);
        prev = chi;
    }
}

TEST(MomentumTransfer, GradientOfPhase)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> radius(0.05, 10);
    std::uniform_real_distribution<double> angle(0, 6.283185307179586);
    double const v = 19.9;
    for (int i = 0; i < 100; ++i)
    {
        double const r = radius(rng);
        double const a = angle(rng);
        Vec2 const b{r * std::cos(a), r * std::sin(a)};
        double const h = 1e-5 * r;
        Vec2 const grad{(chi_at(b + Vec2{h, 0}, v) - chi_at(b - Vec2{h, 0}, v)) / (2 * h),
                        (chi_at(b + Vec2{0, h}, v) - chi_at(b - Vec2{0, h}, v)) / (2 * h)};
        auto const q = momentum_transfer_single(nitrogen(), v, b).vector;
        EXPECT_LE(norm(q + grad) / norm(q), 1e-5) << "b=(" << b.x << "," << b.y << ")";
    }
}

TEST(MomentumTransfer, UnscreenedCoulombLimit)
{
    double const v = 50;
    for (double r : {1e-5, 1e-6})
    {
        double const q = momentum_transfer_single(nitrogen(), v, {r, 0}).magnitude();
        EXPECT_NEAR(q * v * r / (2 * 7), 1.0, 1e-6);
    }
}

TEST(MomentumTransfer, OddAndRadial)
{
    Vec2 const b{0.3, -1.1};
    auto const q = momentum_transfer_single(nitrogen(), 20, b).vector;
    auto const q_neg = momentum_transfer_single(nitrogen(), 20, -b).vector;
    EXPECT_DOUBLE_EQ(q.x, -q_neg.x);
    EXPECT_DOUBLE_EQ(q.y, -q_neg.y);
    EXPECT_NEAR(q.x * b.y - q.y * b.x, 0, 1e-15);
    EXPECT_GT(dot(q, b), 0);
    EXPECT_LT(momentum_transfer_single(nitrogen(), 20, {300, 0}).magnitude(), 1e-100);
    EXPECT_THROW(momentum_transfer_single(nitrogen(), 20, {0, 0}), DomainError);
}

TEST(MomentumTransfer, ExplicitFormula)
{
    auto const& n = nitrogen();
    double const v = 33;
    double const r = 0.8;
    double expected = 0;
    for (int i = 0; i < 3; ++i)
    {
        expected += n.alpha()[i] * n.a()[i] * bessel_k1(n.alpha()[i] * r);
    }
    expected *= 2 * 7 / v;
    EXPECT_NEAR(momentum_transfer_single(n, v, {0, r}).magnitude(), expected, 1e-15);
}

TEST(TotalTransfer, CoincidentProjectionsDouble)
{
    std::vector<Vec2> const proj{{0, 0}, {0, 0}};
    std::vector<HfsAtom> const atoms{nitrogen(), nitrogen()};
    Vec2 const b{0.4, 0.2};
    auto const total = total_momentum_transfer(proj, atoms, 20, b).vector;
    auto const single = momentum_transfer_single(nitrogen(), 20, b).vector;
    EXPECT_DOUBLE_EQ(total.x, 2 * single.x);
    EXPECT_DOUBLE_EQ(total.y, 2 * single.y);
}

TEST(TotalTransfer, BisectorSymmetry)
{
    std::vector<Vec2> const proj{{-1, 0}, {1, 0}};
    std::vector<HfsAtom> const atoms{nitrogen(), nitrogen()};
    auto const q = total_momentum_transfer(proj, atoms, 20, {0, 0.7}).vector;
    EXPECT_NEAR(q.x, 0, 1e-15);
    EXPECT_GT(q.y, 0);
}

TEST(TotalTransfer, SingleAtomAndErrors)
{
    std::vector<Vec2> const proj{{0.5, 0}};
    std::vector<HfsAtom> const atoms{nitrogen()};
    auto const q = total_momentum_transfer(proj, atoms, 20, {1.5, 0}).vector;
    EXPECT_DOUBLE_EQ(q.x, momentum_transfer_single(nitrogen(), 20, {1, 0}).vector.x);
    EXPECT_THROW(total_momentum_transfer(proj, atoms, 20, {0.5, 0}), DomainError);
}

TEST(TotalTransfer, TriangleInequalityAndPointReflection)
{
    std::vector<Vec2> const proj{{-0.8, 0.3}, {0.8, -0.3}};
    std::vector<HfsAtom> const atoms{nitrogen(), nitrogen()};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> coord(-4, 4);
    for (int i = 0; i < 200; ++i)
    {
        Vec2 const b{coord(rng), coord(rng)};
        auto const q = total_momentum_transfer(proj, atoms, 20, b).vector;
        double const bound = momentum_transfer_single(nitrogen(), 20, b - proj[0]).magnitude()
                             + momentum_transfer_single(nitrogen(), 20, b - proj[1]).magnitude();
        EXPECT_LE(norm(q), bound * (1 + 1e-15));
        auto const reflected = total_momentum_transfer(proj, atoms, 20, -b).vector;
        EXPECT_NEAR(reflected.x, -q.x, 1e-14 * (1 + norm(q)));
        EXPECT_NEAR(reflected.y, -q.y, 1e-14 * (1 + norm(q)));
    }
}

TEST(TransferField, MatchesDirectSum)
{
    std::vector<Vec2> const proj{{-0.8, 0.3}, {0.8, -0.3}};
    std::vector<HfsAtom> const atoms{nitrogen(), nitrogen()};
    TransferField const field(proj, atoms, 20);
    Vec2 const b{0.1, 0.9};
    auto const sample = field.at(b);
    auto const direct = total_momentum_transfer(proj, atoms, 20, b).vector;
    EXPECT_NEAR(sample.kick.vector.x, direct.x, 1e-14);
    EXPECT_NEAR(sample.kick.vector.y, direct.y, 1e-14);
    EXPECT_NEAR(sample.min_distance, std::min(norm(b - proj[0]), norm(b - proj[1])), 1e-15);

    auto const inside = field.at(proj[0] + Vec2{1e-8, 0}, 1e-6);
    EXPECT_LT(inside.min_distance, 1e-6);
    EXPECT_TRUE(std::isfinite(inside.kick.vector.x));
}
