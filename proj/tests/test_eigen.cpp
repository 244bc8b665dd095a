#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "warpspec/eigen.hpp"
#include "warpspec/oracles.hpp"

using namespace warpspec;

namespace {

ModelSpace model(int n, const CurvatureProfile& p, double r_max, double tol = 1e-8)
{
    return ModelSpace(n, solve_warping(p, r_max, tol));
}

CurvatureProfile tail(double kappa, double beta)
{
    return CurvatureProfile::make(kappa, beta, CurvatureProfile::default_r_join(kappa, beta));
}

} // namespace

TEST(EffectivePotential, ThreeDimensionsIsMinusCurvature)
{
    const auto m = model(3, CurvatureProfile::make(1.0, 2.0, 2.0), 20.0);
    EXPECT_NEAR(effective_potential(m, 10.0), 0.98, 1e-14);
}

TEST(EffectivePotential, HyperbolicPlane)
{
    const auto m = model(2, CurvatureProfile::make(1.0, 0.0, 1.0), 40.0);
    for (double x : {0.5, 1.0, 3.0}) {
        const double c = 1.0 / std::tanh(x);
        EXPECT_NEAR(effective_potential(m, x), -0.25 * c * c + 0.5, 1e-8) << x;
    }
    EXPECT_NEAR(effective_potential(m, 30.0), 0.25, 1e-12);
}

TEST(EffectivePotential, InverseSquareAsymptote)
{
    const auto m = model(2, CurvatureProfile::make(1.0, 2.0, 2.0), 101.0);
    EXPECT_NEAR(effective_potential(m, 100.0), 0.24995, 1e-5);
    EXPECT_NEAR(m.essential_bottom(), 0.25, 0.0);
}

TEST(EffectivePotential, RejectsRadiusBelowSeries)
{
    const auto m = model(2, CurvatureProfile::make(1.0, 0.0, 1.0), 5.0);
    EXPECT_THROW(effective_potential(m, 1e-6), InvalidArgument);
}

TEST(DirichletEigen, FlatBallThreeDimensions)
{
    const double tol = 1e-8;
    const auto res = first_dirichlet_eigen(model(3, CurvatureProfile::zero(), 4.0), std::numbers::pi, tol);
    EXPECT_NEAR(res.eigenvalue, 1.0, tol);
    EXPECT_EQ(res.node_count, 0);
    // eigenfunction sin(r)/r
    for (double r : {0.5, 1.0, 2.0, 3.0}) EXPECT_NEAR(res.h_at(r), std::sin(r) / r, 1e-6) << r;
}

TEST(DirichletEigen, FlatDiskMatchesBesselZero)
{
    const double j0 = oracle::bessel_j0_first_zero();
    EXPECT_NEAR(j0, 2.404825557695773, 1e-12);
    const auto res = first_dirichlet_eigen(model(2, CurvatureProfile::zero(), 2.0), 1.0, 1e-8);
    EXPECT_NEAR(res.eigenvalue, j0 * j0, 1e-4);
}

TEST(DirichletEigen, HyperbolicPlaneDecreasesTowardQuarter)
{
    const auto m = model(2, CurvatureProfile::make(1.0, 0.0, 1.0), 21.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double L : {5.0, 10.0, 20.0}) {
        const double lam = first_dirichlet_eigen(m, L, 1e-8).eigenvalue;
        EXPECT_GT(lam, 0.25);
        EXPECT_LT(lam, prev);
        prev = lam;
    }
}

TEST(DirichletEigen, AgreesWithMatrixOracle)
{
    // n = 3: the Liouville potential is regular, so the ground state of -u'' + V u on
    // (0, L) is the model-ball eigenvalue. A Dirichlet cutoff at eps shifts the matrix
    // eigenvalue by O(eps); extrapolating over eps and 2 eps removes it.
    const auto m = model(3, CurvatureProfile::make(1.0, 2.0, 2.0), 21.0);
    const double lam = first_dirichlet_eigen(m, 20.0, 1e-9).eigenvalue;
    auto potential = [&](double t) { return effective_potential(m, t); };
    const double e1 = oracle::dirichlet_fd_eigenvalues(potential, oracle::mapped_grid(2e-3, 20.0, 4000))[0];
    const double e2 = oracle::dirichlet_fd_eigenvalues(potential, oracle::mapped_grid(4e-3, 20.0, 4000))[0];
    EXPECT_GT(e1, lam);
    EXPECT_NEAR(lam, 2.0 * e1 - e2, 2e-6 * lam);
}

TEST(DirichletEigen, DomainMonotonicity)
{
    const auto m = model(3, CurvatureProfile::make(1.0, 2.0, 2.0), 26.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double L : {5.0, 10.0, 15.0, 20.0, 25.0}) {
        const double lam = first_dirichlet_eigen(m, L, 1e-9).eigenvalue;
        EXPECT_LT(lam, prev - 1e-9) << L;
        prev = lam;
    }
}

TEST(DirichletEigen, ConsistentWithPrueferCount)
{
    const double tol = 1e-9;
    const auto m = model(3, CurvatureProfile::make(1.0, 2.0, 2.0), 31.0);
    const auto res = first_dirichlet_eigen(m, 30.0, tol);
    const double lam = res.eigenvalue;
    const double eps = m.warping().t_series();
    // the count runs on [eps, L]; its ground state sits above lam by about u'(0)^2 eps / |u|^2
    double norm = 0.0;
    const auto& s = res.samples;
    auto dens = [&](const EigenSample& p) {
        const double j = std::exp(m.warping().log_j_at(std::max(p.r, eps)));
        return j * j * p.h * p.h;
    };
    for (std::size_t i = 1; i < s.size(); ++i) norm += 0.5 * (s[i].r - s[i - 1].r) * (dens(s[i]) + dens(s[i - 1]));
    const double shift = s.front().h * s.front().h * eps / norm;
    EXPECT_EQ(count_eigenvalues_below(m, 30.0, lam - 1e-6, eps), 0);
    EXPECT_EQ(count_eigenvalues_below(m, 30.0, lam + 0.5 * shift, eps), 0);
    EXPECT_EQ(count_eigenvalues_below(m, 30.0, lam + 2.0 * shift, eps), 1);
}

TEST(DirichletEigen, LiouvilleResidual)
{
    const int n = 3;
    const double r_join = 2.0;
    const auto m = model(n, CurvatureProfile::make(1.0, 2.0, r_join), 11.0, 1e-10);
    const auto res = first_dirichlet_eigen(m, 10.0, 1e-8);
    const double c = (n - 1) / 2.0;
    auto u = [&](double r) { return std::exp(c * m.warping().log_j_at(r)) * res.h_at(r); };
    const double d = 0.02;
    double num = 0.0, den = 0.0;
    for (double r = 0.5; r < 9.5; r += 0.05) {
        // the stencil assumes smoothness, so skip the curvature kink
        if (std::abs(r - r_join) <= 2.5 * d) continue;
        // fourth-order second difference
        const double u2 = (-u(r + 2 * d) + 16 * u(r + d) - 30 * u(r) + 16 * u(r - d) - u(r - 2 * d)) / (12 * d * d);
        const double resid = -u2 + effective_potential(m, r) * u(r) - res.eigenvalue * u(r);
        num += resid * resid;
        den += u(r) * u(r);
    }
    EXPECT_LT(std::sqrt(num / den), 100 * 1e-8);
}

TEST(DirichletEigen, RejectsBadInputs)
{
    const auto m = model(3, CurvatureProfile::zero(), 4.0);
    EXPECT_THROW(first_dirichlet_eigen(m, 5.0, 1e-8), InvalidArgument);
    EXPECT_THROW(first_dirichlet_eigen(m, 3.0, 0.0), InvalidArgument);
    EXPECT_THROW(ModelSpace(1, solve_warping(CurvatureProfile::zero(), 4.0)), InvalidArgument);
}

TEST(Lemma21, GroundStatesPass)
{
    for (int n : {2, 3, 5})
        for (double beta : {0.0, 2.0}) {
            const auto m = model(n, CurvatureProfile::make(1.0, beta, beta > 0 ? 2.0 : 1.0), 11.0);
            const auto rep = check_lemma21(first_dirichlet_eigen(m, 10.0, 1e-8));
            EXPECT_TRUE(rep.passed) << "n " << n << " beta " << beta;
        }
    const auto flat = first_dirichlet_eigen(model(3, CurvatureProfile::zero(), 4.0), std::numbers::pi, 1e-8);
    EXPECT_TRUE(check_lemma21(flat).passed);
}

TEST(Lemma21, SecondEigenfunctionFails)
{
    const auto m = model(2, CurvatureProfile::make(1.0, 0.0, 1.0), 11.0);
    const auto second = dirichlet_eigen(m, 10.0, 1e-8, 1);
    EXPECT_EQ(second.node_count, 1);
    const auto rep = check_lemma21(second);
    EXPECT_FALSE(rep.passed);
    EXPECT_FALSE(rep.violations.empty());
    EXPECT_GT(second.eigenvalue, first_dirichlet_eigen(m, 10.0, 1e-8).eigenvalue);
}

TEST(Count, BelowConstantPotentialIsZero)
{
    const auto m = model(3, CurvatureProfile::constant(-1.0), 40.0);
    EXPECT_EQ(count_eigenvalues_below(m, 40.0, 0.99, 0.01), 0);
}

TEST(Count, HyperbolicPlaneHasNoBoundStates)
{
    const auto m = model(2, CurvatureProfile::make(1.0, 0.0, 1.0), 1001.0);
    EXPECT_EQ(count_eigenvalues_below(m, 1000.0, 0.25 - 1e-9, 0.01), 0);
}

TEST(Count, SupercriticalCountsGrow)
{
    const auto m = model(2, CurvatureProfile::make(1.0, 30.0, 6.0), 1.0001e4);
    int prev = -1;
    for (double L : {1e2, 1e3, 1e4}) {
        const int c = count_eigenvalues_below(m, L, 0.25 - 1e-9, 0.01);
        EXPECT_GT(c, prev) << L;
        prev = c;
    }
}

TEST(Count, MonotoneInEnergyAndRadius)
{
    const auto m = model(3, CurvatureProfile::make(1.0, 10.0, 4.0), 201.0);
    int prev = 0;
    for (double E : {0.2, 0.5, 0.8, 0.95, 1.0 - 1e-9, 1.3, 2.0}) {
        const int c = count_eigenvalues_below(m, 200.0, E, 0.01);
        EXPECT_GE(c, prev) << E;
        prev = c;
    }
    prev = 0;
    for (double L : {5.0, 20.0, 50.0, 100.0, 200.0}) {
        const int c = count_eigenvalues_below(m, L, 1.0 - 1e-9, 0.01);
        EXPECT_GE(c, prev) << L;
        prev = c;
    }
}

TEST(Count, MatchesMatrixOracle)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 5; ++i) {
        const int n = 2 + i % 4;
        const double kappa = 0.25 + 2.0 * U(rng), beta = 10.0 * U(rng);
        const auto m = model(n, tail(kappa, beta), 51.0, 1e-9);
        const double L = 10.0 + 40.0 * U(rng), eps = 0.05 + 0.45 * U(rng);
        const double E = m.essential_bottom() * (0.5 + 1.5 * U(rng));
        const auto x = oracle::mapped_grid(eps, L, 4000);
        const auto ev = oracle::dirichlet_fd_eigenvalues([&](double t) { return effective_potential(m, t); }, x);
        EXPECT_EQ(count_eigenvalues_below(m, L, E, eps), oracle::count_below(ev, E)) << "draw " << i;
    }
}

TEST(Count, RejectsBadInputs)
{
    const auto m = model(2, CurvatureProfile::make(1.0, 0.0, 1.0), 10.0);
    EXPECT_THROW(count_eigenvalues_below(m, 20.0, 0.2, 0.01), InvalidArgument);
    EXPECT_THROW(count_eigenvalues_below(m, 5.0, 0.2, 1e-7), InvalidArgument);
}

TEST(CountCurve, Classifications)
{
    const double E = 0.25 - 1e-9;
    const std::vector<double> Ls{1e2, 1e3, 1e4};
    const auto grow = count_curve(model(2, CurvatureProfile::make(1.0, 30.0, 6.0), 1.0001e4), E, Ls, 0.01);
    EXPECT_EQ(grow.classification, Growth::growing);
    EXPECT_TRUE(grow.eps_converged);
    const auto sat = count_curve(model(2, CurvatureProfile::make(1.0, 0.5, 1.0), 1.0001e4), E, Ls, 0.01);
    EXPECT_EQ(sat.classification, Growth::saturated);
    EXPECT_EQ(sat.points[1].count, sat.points[2].count);
    const auto hyp = count_curve(model(2, CurvatureProfile::make(1.0, 0.0, 1.0), 1.0001e4), E, Ls, 0.01);
    EXPECT_EQ(hyp.classification, Growth::saturated);
    for (const auto& p : hyp.points) EXPECT_EQ(p.count, 0);
}

TEST(CountCurve, ClassifierRules)
{
    using detail::classify;
    auto pts = [](int a, int b, int c) { return std::vector<CountPoint>{{1e2, a}, {1e3, b}, {1e4, c}}; };
    EXPECT_EQ(classify(pts(3, 5, 7), 30.0), Growth::growing);
    EXPECT_EQ(classify(pts(3, 3, 4), 30.0), Growth::inconclusive);
    EXPECT_EQ(classify(pts(3, 3, 4), 2.0), Growth::growing);
    EXPECT_EQ(classify(pts(3, 4, 4), 2.0), Growth::inconclusive);
    EXPECT_EQ(classify(pts(2, 2, 2), 0.5), Growth::saturated);
    EXPECT_EQ(classify({{1e3, 1}, {1e4, 1}}, 0.5), Growth::inconclusive);
}

TEST(CountCurve, RejectsBadInputs)
{
    const auto m = model(2, CurvatureProfile::make(1.0, 0.0, 1.0), 100.0);
    EXPECT_THROW(count_curve(m, 0.2, {50.0, 10.0}, 0.01), InvalidArgument);
    EXPECT_THROW(count_curve(m, 0.2, {10.0, 50.0}, 0.002), InvalidArgument);
}

TEST(EigenCsv, Headers)
{
    const auto m = model(3, CurvatureProfile::zero(), 4.0);
    std::ostringstream a, b;
    write_eigen_csv(a, first_dirichlet_eigen(m, 3.0, 1e-8));
    EXPECT_EQ(a.str().substr(0, 5), "r,h1\n");
    write_count_csv(b, count_curve(model(3, CurvatureProfile::make(1.0, 0.0, 1.0), 11.0), 0.9, {1.0, 10.0}, 0.01));
    EXPECT_EQ(b.str().substr(0, 8), "L,count\n");
}
