#include <cmath>

#include <gtest/gtest.h>

#include "warpspec/profiles.hpp"

using namespace warpspec;

TEST(Profiles, InnerValueFromContinuity)
{
    const auto p = CurvatureProfile::make(1.0, 2.0, 2.0);
    EXPECT_DOUBLE_EQ(p.inner_value(), -0.5);
    EXPECT_DOUBLE_EQ(p(0.0), -0.5);
    EXPECT_DOUBLE_EQ(p(1.999), -0.5);
    EXPECT_DOUBLE_EQ(p(2.0), -0.5);
}

TEST(Profiles, TailIsExact)
{
    const auto p = CurvatureProfile::make(1.0, 2.0, 2.0);
    for (double r : {2.0, 2.5, 10.0, 123.4, 1e4}) EXPECT_EQ(p(r), -1.0 + 2.0 / (r * r)) << r;
}

TEST(Profiles, ZeroBetaIsConstant)
{
    const auto p = CurvatureProfile::make(1.0, 0.0, 1.0);
    for (double r : {0.0, 0.5, 1.0, 50.0}) EXPECT_EQ(p(r), -1.0);
}

TEST(Profiles, RejectsPositiveJoin)
{
    EXPECT_THROW(CurvatureProfile::make(1.0, 4.0, 1.0), InvalidArgument);
}

TEST(Profiles, RejectsBadParameters)
{
    EXPECT_THROW(CurvatureProfile::make(0.0, 0.0, 1.0), InvalidArgument);
    EXPECT_THROW(CurvatureProfile::make(-1.0, 0.0, 1.0), InvalidArgument);
    EXPECT_THROW(CurvatureProfile::make(1.0, 0.0, 0.0), InvalidArgument);
    EXPECT_THROW(CurvatureProfile::make(1.0, -0.1, 1.0), InvalidArgument);
    EXPECT_THROW(CurvatureProfile::make(std::nan(""), 0.0, 1.0), InvalidArgument);
}

TEST(Profiles, ValidityEdgeIsAccepted)
{
    const auto p = CurvatureProfile::make(1.0, 4.0, 2.0);
    EXPECT_DOUBLE_EQ(p.inner_value(), 0.0);
}

TEST(Profiles, NonpositiveEverywhere)
{
    for (double beta : {0.0, 0.3, 2.0, 30.0}) {
        const auto p = CurvatureProfile::make(1.0, beta, CurvatureProfile::default_r_join(1.0, beta));
        for (double r = 0.0; r < 200.0; r += 0.37) EXPECT_LE(p(r), 0.0) << "beta " << beta << " r " << r;
    }
}

TEST(Profiles, DefaultJoinIsValid)
{
    EXPECT_DOUBLE_EQ(CurvatureProfile::default_r_join(1.0, 0.5), 1.0);
    EXPECT_NEAR(CurvatureProfile::default_r_join(1.0, 30.0), std::sqrt(30.0) * 1.01, 1e-12);
    EXPECT_NO_THROW(CurvatureProfile::make(1.0, 30.0, CurvatureProfile::default_r_join(1.0, 30.0)));
}

TEST(Profiles, TabulatedInterpolatesLinearly)
{
    const auto p = CurvatureProfile::tabulated({0.0, 1.0, 3.0}, {-2.0, -1.0, -0.5});
    EXPECT_DOUBLE_EQ(p(0.5), -1.5);
    EXPECT_DOUBLE_EQ(p(2.0), -0.75);
    EXPECT_DOUBLE_EQ(p(10.0), -0.5);
    EXPECT_FALSE(p.has_tail());
    EXPECT_THROW((void)p.kappa(), InvalidArgument);
}

TEST(Profiles, TabulatedRejectsPositiveValues)
{
    EXPECT_THROW(CurvatureProfile::tabulated({0.0, 1.0}, {-1.0, 0.5}), InvalidArgument);
    EXPECT_THROW(CurvatureProfile::tabulated({0.5, 1.0}, {-1.0, -1.0}), InvalidArgument);
    EXPECT_THROW(CurvatureProfile::tabulated({0.0, 0.0}, {-1.0, -1.0}), InvalidArgument);
}

TEST(Profiles, ShiftMovesTheProfileOutward)
{
    const auto p = CurvatureProfile::make(1.0, 3.0, 2.0);
    const auto q = p.shifted(1.0);
    EXPECT_EQ(q(0.5), p(0.0));
    EXPECT_EQ(q(4.0), p(3.0));
    EXPECT_FALSE(q.has_tail());
    const auto bp = q.breakpoints();
    ASSERT_EQ(bp.size(), 2u);
    EXPECT_DOUBLE_EQ(bp[0], 1.0);
    EXPECT_DOUBLE_EQ(bp[1], 3.0);
}

TEST(Profiles, TextRoundTrip)
{
    const auto p = CurvatureProfile::make(4.0, 1.0, 1.5, ProfileKind::radial_curvature);
    const auto q = profile_from_text(to_text(p));
    EXPECT_EQ(q.kappa(), 4.0);
    EXPECT_EQ(q.beta(), 1.0);
    EXPECT_EQ(q.r_join(), 1.5);
    EXPECT_EQ(q.kind(), ProfileKind::radial_curvature);
}

TEST(Profiles, TextRejectsMissingKeys)
{
    EXPECT_THROW(profile_from_text("kappa = 1\nbeta = 0.5\n"), InvalidArgument);
    EXPECT_THROW(profile_from_text("kappa = 1\nbeta = oops\nr_join = 1\n"), InvalidArgument);
}

TEST(Profiles, KindNames)
{
    EXPECT_EQ(parse_profile_kind("model_lower_bound"), ProfileKind::model_lower_bound);
    EXPECT_EQ(parse_profile_kind(to_string(ProfileKind::radial_curvature)), ProfileKind::radial_curvature);
    EXPECT_THROW(parse_profile_kind("curvy"), InvalidArgument);
}
