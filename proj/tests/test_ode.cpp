#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "warpspec/ode.hpp"

using namespace warpspec;

namespace {

double log_sinh(double t) { return t + std::log1p(-std::exp(-2.0 * t)) - std::log(2.0); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST(Warping, FlatSolution)
{
    const double tol = 1e-10;
    const auto w = solve_warping(CurvatureProfile::zero(), 50.0, tol);
    for (double t : {0.01, 0.5, 1.0, 7.3, 49.0}) {
        EXPECT_LT(rel(std::exp(w.log_j_at(t)), t), tol) << t;
        EXPECT_LT(rel(w.s_at(t), 1.0 / t), tol) << t;
    }
}

TEST(Warping, HyperbolicClosedForm)
{
    const auto w = solve_warping(CurvatureProfile::constant(-1.0), 701.0, 1e-8);
    for (double t : {1.0, 5.0, 20.0, 100.0}) {
        EXPECT_LT(rel(w.log_j_at(t), log_sinh(t)), 1e-8) << t;
        EXPECT_LT(rel(w.s_at(t), 1.0 / std::tanh(t)), 1e-8) << t;
    }
    const auto [lj, s] = w(700.0);
    EXPECT_TRUE(std::isfinite(lj));
    EXPECT_NEAR(lj, 700.0 - std::log(2.0), 1e-6);
    EXPECT_NEAR(s, 1.0, 1e-10);
}

TEST(Warping, HyperbolicAtOne)
{
    const auto w = solve_warping(CurvatureProfile::make(1.0, 0.0, 1.0), 5.0, 1e-8);
    EXPECT_NEAR(w.log_j_at(1.0), 0.1614, 1e-4);
    EXPECT_NEAR(w.s_at(1.0), 1.3130, 1e-4);
}

TEST(Warping, InverseSquareTailValue)
{
    const auto p = CurvatureProfile::make(1.0, 2.0, 2.0);
    const auto w = solve_warping(p, 101.0, 1e-8);
    const auto ref = solve_warping(p, 101.0, 1e-12);
    EXPECT_NEAR(w.s_at(100.0), 0.9999, 1e-5);
    EXPECT_NEAR(w.s_at(100.0), ref.s_at(100.0), 1e-8);
}

TEST(Warping, GridPointsAreReturnedExactly)
{
    const auto w = solve_warping(CurvatureProfile::make(1.0, 2.0, 2.0), 30.0, 1e-8);
    for (std::size_t i = 0; i < w.grid().size(); i += 37) {
        const auto [lj, s] = w(w.grid()[i]);
        EXPECT_EQ(lj, w.log_j()[i]);
        EXPECT_EQ(s, w.s()[i]);
    }
}

TEST(Warping, InterpolationBetweenNodes)
{
    const double tol = 1e-8;
    const auto w = solve_warping(CurvatureProfile::zero(), 10.0, tol);
    const auto [lj, s] = w(2.5);
    EXPECT_NEAR(lj, std::log(2.5), 10 * tol);
    EXPECT_NEAR(s, 0.4, 10 * tol);
    // off-node values across the whole range
    const auto h = solve_warping(CurvatureProfile::constant(-1.0), 60.0, tol);
    for (double t = 0.0123; t < 60.0; t = t * 1.37 + 0.011)
        EXPECT_LT(std::abs(h.s_at(t) - 1.0 / std::tanh(t)), 10 * tol * h.s_at(t)) << t;
}

TEST(Warping, ComparisonWithFlatAndPositiveS)
{
    for (double beta : {0.0, 0.5, 2.0, 30.0}) {
        const auto p = CurvatureProfile::make(1.0, beta, CurvatureProfile::default_r_join(1.0, beta));
        const auto w = solve_warping(p, 300.0, 1e-8);
        for (std::size_t i = 0; i < w.grid().size(); ++i) {
            EXPECT_GE(w.log_j()[i], std::log(w.grid()[i]) - 1e-12);
            EXPECT_GT(w.s()[i], 0.0);
        }
    }
}

TEST(Warping, RegularOrigin)
{
    const auto w = solve_warping(CurvatureProfile::make(1.0, 2.0, 2.0), 5.0, 1e-8);
    const double t0 = w.t_series();
    EXPECT_NEAR(w.s_at(t0) * t0, 1.0, 10 * t0 * t0);
}

TEST(Warping, RiccatiResidualIsSmall)
{
    const double tol = 1e-8;
    const auto p = CurvatureProfile::make(1.0, 2.0, 2.0);
    const auto w = solve_warping(p, 50.0, tol);
    const auto& g = w.grid();
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        // S(b) - S(a) + int_a^b (S^2 + R) by Simpson's rule
        const double a = g[i], b = g[i + 1], m = 0.5 * (a + b);
        auto f = [&](double t) { const double s = w.s_at(t); return s * s + p(t); };
        const double integral = (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
        worst = std::max(worst, std::abs(w.s()[i + 1] - w.s()[i] + integral));
    }
    EXPECT_LT(worst, 100 * tol);
}

TEST(Warping, TailApproachesSqrtKappaFromBelow)
{
    // S ~ sqrt(kappa) - beta / (2 sqrt(kappa) t^2): increasing and below sqrt(kappa)
    for (double beta : {0.5, 2.0, 30.0}) {
        const auto p = CurvatureProfile::make(1.0, beta, CurvatureProfile::default_r_join(1.0, beta));
        const auto w = solve_warping(p, 400.0, 1e-8);
        double prev = w.s_at(50.0);
        for (double t = 55.0; t <= 400.0; t *= 1.1) {
            const double s = w.s_at(t);
            EXPECT_GT(s, prev) << beta << " " << t;
            EXPECT_LT(s, 1.0) << beta << " " << t;
            prev = s;
        }
        EXPECT_NEAR(w.s_at(400.0), 1.0 - beta / (2.0 * 400.0 * 400.0), 0.05 * beta / (2.0 * 400.0 * 400.0));
    }
}

TEST(Warping, ToleranceRefinementIsConsistent)
{
    const auto p = CurvatureProfile::make(1.0, 2.0, 2.0);
    const double tol = 1e-7;
    const auto coarse = solve_warping(p, 200.0, tol);
    const auto fine = solve_warping(p, 200.0, tol / 2);
    EXPECT_LT(std::abs(coarse.s_at(200.0) - fine.s_at(200.0)), tol);
}

TEST(Warping, RejectsBadInputs)
{
    const auto p = CurvatureProfile::make(1.0, 0.0, 1.0);
    EXPECT_THROW(solve_warping(p, 10.0, 1e-3), InvalidArgument);
    EXPECT_THROW(solve_warping(p, 10.0, 1e-15), InvalidArgument);
    EXPECT_THROW(solve_warping(p, 1e-5, 1e-8), InvalidArgument);
    const auto w = solve_warping(p, 10.0, 1e-8);
    EXPECT_THROW(w(11.0), InvalidArgument);
    EXPECT_THROW(w(0.0), InvalidArgument);
}

TEST(TailFit, RecoversTailParameters)
{
    struct Case { double kappa, beta, r_join; };
    for (const auto& c : {Case{1.0, 0.5, 1.0}, Case{1.0, 2.0, 2.0}, Case{4.0, 1.0, 1.0}}) {
        const auto w = solve_warping(CurvatureProfile::make(c.kappa, c.beta, c.r_join), 201.0, 1e-8);
        const auto fit = riccati_tail_fit(w, 50.0, 200.0);
        EXPECT_NEAR(fit.kappa_hat, c.kappa, 0.01 * c.kappa);
        EXPECT_NEAR(fit.beta_hat, c.beta, 0.02 * c.beta);
    }
}

TEST(TailFit, HyperbolicHasNoInverseSquareTerm)
{
    const auto w = solve_warping(CurvatureProfile::make(1.0, 0.0, 1.0), 201.0, 1e-10);
    const auto fit = riccati_tail_fit(w, 50.0, 200.0);
    EXPECT_NEAR(fit.beta_hat, 0.0, 1e-6);
    EXPECT_NEAR(fit.kappa_hat, 1.0, 1e-8);
}

TEST(TailFit, RejectsPreasymptoticWindow)
{
    const auto w = solve_warping(CurvatureProfile::make(1.0, 30.0, 6.0), 50.0, 1e-8);
    EXPECT_THROW(riccati_tail_fit(w, 0.5, 8.0), SolverError);
    EXPECT_THROW(riccati_tail_fit(w, 20.0, 60.0), InvalidArgument);
}

TEST(Warping, CsvHeader)
{
    std::ostringstream os;
    write_warping_csv(os, solve_warping(CurvatureProfile::zero(), 1.0, 1e-8));
    EXPECT_EQ(os.str().substr(0, 10), "t,log_j,s\n");
}
