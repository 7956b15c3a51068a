#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "ionloss/detail/gauss_legendre.hpp"
#include "ionloss/errors.hpp"
#include "ionloss/form_factor.hpp"
#include "ionloss/verification.hpp"

using namespace ionloss;

namespace
{
// W_ion from the closed-form 1s continuum density, integrated in mpmath.
struct FrozenW
{
    double s;
    double w;
};

constexpr FrozenW frozen_w[] = {
    {0.01, 2.83467e-5},
    {0.1, 0.00288946128298},
    {0.3, 0.0296369004211},
    {0.5, 0.0974312},
    {1.0, 0.446451144512},
    {2.0, 0.914725},
    {3.0, 0.988366241735},
    {5.0, 0.999551},
    {10.0, 0.999997346986},
};

IonizationTable const& shared_table()
{
    static IonizationTable const table = IonizationTable::build(20, 400, 20);
    return table;
}

// <1s| j0(q r) |1s> by radial quadrature of the density 4 Z^3 r^2 e^{-2 Z r}.
double elastic_by_quadrature(double q, double z)
{
    double total = 0;
    for (int panel = 0; panel < 200; ++panel)
    {
        double const lo = panel * 0.25 / z;
        auto const [x, w] = detail::gauss_legendre(16, lo, lo + 0.25 / z);
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            double const r = x[i];
            double const j0 = std::sin(q * r) / (q * r);
            total += w[i] * 4 * z * z * z * r * r * std::exp(-2 * z * r) * j0;
        }
    }
    return total;
}
}  // namespace

TEST(ProjectileSpec, DefaultsAndValidation)
{
    EXPECT_EQ(ProjectileSpec::fe25().z_eff(), 26);
    EXPECT_EQ(ProjectileSpec::fe24().z_eff(), 25);
    EXPECT_EQ(ProjectileSpec::fe23().z_eff(), 24);
    EXPECT_EQ(ProjectileSpec::fe23().charge_state(), 23);
    EXPECT_EQ(ProjectileSpec(26, 2, 24.5).z_eff(), 24.5);
    EXPECT_THROW(ProjectileSpec(26, 0), DomainError);
    EXPECT_THROW(ProjectileSpec(26, 4), DomainError);
    EXPECT_THROW(ProjectileSpec(2, 2), DomainError);
    EXPECT_THROW(ProjectileSpec(26, 1, 0.0), DomainError);
}

TEST(ElasticFormFactor, ClosedForm)
{
    EXPECT_EQ(elastic_form_factor(0, 7), 1.0);
    EXPECT_DOUBLE_EQ(elastic_form_factor(2 * 26, 26), 0.25);
    EXPECT_NEAR(elastic_by_quadrature(2 * 26, 26), 0.25, 1e-12);
    EXPECT_NEAR(elastic_by_quadrature(0.7 * 3, 3), elastic_form_factor(0.7 * 3, 3), 1e-12);
    EXPECT_THROW(elastic_form_factor(-1, 1), DomainError);
    EXPECT_THROW(elastic_form_factor(1, 0), DomainError);
}

TEST(ElasticFormFactor, ScalingLaw)
{
    for (double q : {0.1, 1.0, 7.0, 40.0})
    {
        EXPECT_NEAR(elastic_form_factor(q, 5), elastic_form_factor(3 * q, 15), 1e-15);
    }
}

TEST(BoundSurvival, Limits)
{
    EXPECT_EQ(bound_survival_probability(0), 1.0);
    EXPECT_LT(bound_survival_probability(40), 1e-5);
    EXPECT_THROW(bound_survival_probability(-0.1), DomainError);
    EXPECT_THROW(bound_survival_probability(1, 0), DomainError);
}

TEST(BoundSurvival, SingleShellIsElasticSquared)
{
    for (double s : {0.05, 0.5, 1.0, 2.0, 4.0, 9.0})
    {
        double const f = elastic_form_factor(s, 1);
        EXPECT_NEAR(bound_survival_probability(s, 1), f * f, 1e-12) << s;
        EXPECT_NEAR(bound_shell_probabilities(s, 3)[0], f * f, 1e-12) << s;
    }
}

TEST(IonizationProbability, MatchesFrozenContinuumValues)
{
    for (auto const& f : frozen_w)
    {
        EXPECT_NEAR(ionization_probability(f.s), f.w, 1e-5) << "s=" << f.s;
    }
}

TEST(IonizationProbability, Limits)
{
    EXPECT_EQ(ionization_probability(0), 0.0);
    EXPECT_NEAR(ionization_probability(30), 1.0, 1e-3);
}

TEST(IonizationProbability, AgreesWithContinuumOracleAtUnitKick)
{
    EXPECT_NEAR(shared_table()(1.0), continuum_ionization_oracle(1.0), 1e-3);
    EXPECT_NEAR(ionization_probability(1.0), continuum_ionization_oracle(1.0), 1e-4);
}

TEST(IonizationProbability, ScalingLaw)
{
    auto const& table = shared_table();
    for (double q : {0.3, 2.6, 26.0, 80.0})
    {
        double const z = 26;
        EXPECT_NEAR(ionization_probability(q / z), ionization_probability(3 * q / (3 * z)),
                    1e-10);
        EXPECT_NEAR(table(q / z), table(3 * q / (3 * z)), 1e-10);
    }
}

TEST(IonizationProbability, SmallKickSumRule)
{
    for (double s : {0.01, 0.03, 0.06, 0.1})
    {
        double const f = elastic_form_factor(s, 1);
        double const inelastic = 1 - f * f;
        EXPECT_LE(std::abs(inelastic / (s * s) - 1), 0.05) << s;
        EXPECT_GE(ionization_probability(s), 0);
        EXPECT_LE(ionization_probability(s), inelastic) << s;
    }
}

TEST(IonizationProbability, BoundedByInelastic)
{
    auto const& table = shared_table();
    for (std::size_t i = 0; i < table.s_grid().size(); ++i)
    {
        double const f = elastic_form_factor(table.s_grid()[i], 1);
        EXPECT_LE(table.w_values()[i], 1 - f * f + 1e-12) << table.s_grid()[i];
    }
}

TEST(IonizationTable, GridInvariants)
{
    auto const& table = shared_table();
    EXPECT_EQ(table(0), 0.0);
    EXPECT_EQ(table.s_grid().front(), 0.0);
    EXPECT_EQ(table.s_max(), 20.0);
    EXPECT_EQ(table.n_max(), 20);
    EXPECT_NEAR(table.w_values().back(), 1.0, 1e-4);
    for (std::size_t i = 1; i < table.w_values().size(); ++i)
    {
        EXPECT_GE(table.w_values()[i], table.w_values()[i - 1]);
        EXPECT_LE(table.w_values()[i], 1.0);
    }
}

TEST(IonizationTable, InterpolantStaysWithinBrackets)
{
    auto const& table = shared_table();
    auto const& s = table.s_grid();
    auto const& w = table.w_values();
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
    {
        for (double t : {0.1, 0.37, 0.5, 0.81})
        {
            double const value = table(s[i] + t * (s[i + 1] - s[i]));
            ASSERT_GE(value, w[i]);
            ASSERT_LE(value, w[i + 1]);
        }
    }
}

TEST(IonizationTable, MatchesDirectEvaluation)
{
    auto const& table = shared_table();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uniform(0, 20);
    double worst = 0;
    for (int i = 0; i < 1000; ++i)
    {
        double const s = uniform(rng);
        worst = std::max(worst, std::abs(table(s) - ionization_probability(s)));
    }
    EXPECT_LE(worst, 1e-4);
}

TEST(IonizationTable, ElasticOnlyBeyondGrid)
{
    auto const& table = shared_table();
    for (double s : {20.0, 25.0, 100.0})
    {
        double const f = std::pow(1 + s * s / 4, -2);
        EXPECT_DOUBLE_EQ(table(s), 1 - f * f);
    }
}

TEST(IonizationTable, ShellTruncationConverged)
{
    auto const coarse = IonizationTable::build(20, 400, 10);
    auto const& fine = shared_table();
    double worst = 0;
    for (std::size_t i = 0; i < fine.w_values().size(); ++i)
    {
        worst = std::max(worst, std::abs(coarse.w_values()[i] - fine.w_values()[i]));
    }
    EXPECT_LE(worst, 5e-4);
}

TEST(IonizationTable, RejectsInsufficientParameters)
{
    EXPECT_THROW(IonizationTable::build(10, 400, 20), ConfigError);
    EXPECT_THROW(IonizationTable::build(20, 100, 20), ConfigError);
    EXPECT_THROW(IonizationTable::build(20, 400, 5), ConfigError);
}

TEST(IonizationTable, FromSamplesValidation)
{
    EXPECT_THROW(IonizationTable::from_samples({0}, {0}), ConfigError);
    EXPECT_THROW(IonizationTable::from_samples({0, 1}, {0.1, 0.2}), ConfigError);
    EXPECT_THROW(IonizationTable::from_samples({0, 1, 2}, {0, 0.5, 0.4}), ConfigError);
    EXPECT_THROW(IonizationTable::from_samples({0, 2, 1}, {0, 0.1, 0.2}), ConfigError);
    EXPECT_THROW(IonizationTable::from_samples({0, 1}, {0, 1.5}), ConfigError);
    auto const flat = IonizationTable::from_samples({0, 1, 30}, {0, 0, 0});
    EXPECT_EQ(flat(0.5), 0.0);
}

TEST(IonizationTable, CsvRoundTrip)
{
    std::ostringstream first;
    shared_table().write_csv(first);
    std::istringstream in(first.str());
    auto const reread = IonizationTable::read_csv(in);
    std::ostringstream second;
    reread.write_csv(second);
    EXPECT_EQ(first.str(), second.str());
    EXPECT_EQ(reread(0.77), shared_table()(0.77));
    EXPECT_EQ(first.str().substr(0, 7), "s,w_ion");
}

TEST(IonizationTable, DeterministicBuild)
{
    std::ostringstream a;
    std::ostringstream b;
    IonizationTable::build(20, 200, 10).write_csv(a);
    IonizationTable::build(20, 200, 10).write_csv(b);
    EXPECT_EQ(a.str(), b.str());
}
