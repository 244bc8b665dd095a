#pragma once

#include <cmath>
#include <numbers>
#include <ostream>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "warpspec/error.hpp"
#include "warpspec/ode.hpp"
#include "warpspec/stepper.hpp"

namespace warpspec {

/// Dirichlet problem  -phi'' - (1 + delta) / (4 x^2) phi = lambda phi  on [R, 2kR].
struct HardyProblem {
    double R;
    double k;
    double delta;

    HardyProblem(double R_, double k_, double delta_)
        : R(R_)
        , k(k_)
        , delta(delta_)
    {
        detail::require(std::isfinite(R) && R > 0.0, "Hardy problem needs R > 0");
        detail::require(std::isfinite(k) && k > 2.0, "Hardy problem needs k > 2");
        detail::require(std::isfinite(delta) && delta > 0.0, "Hardy problem needs delta > 0");
    }

    double left() const { return R; }
    double right() const { return 2.0 * k * R; }

    /// Smallest stretch for which the plateau test function certifies a negative eigenvalue.
    static double critical_k(double delta) { return 2.0 * std::exp(12.0 / delta); }
};

struct HardyQuotient {
    double numerator; ///< quadratic form of the test function
    double bound;     ///< 3 - (delta/4) log(k/2)
    double norm_sq;   ///< integral of phi^2
};

namespace detail {

template <class F>
double gk_integrate(F&& f, double a, double b, double rel_tol = 1e-13)
{
    if (!(b > a)) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, rel_tol, &err);
}

} // namespace detail

/// Quadratic form of phi = chi(x) sqrt(x), chi the ramp / plateau / ramp cut-off
/// (rising on [R, 2R], 1 on [2R, kR], falling on [kR, 2kR]).
inline HardyQuotient hardy_test_quotient(const HardyProblem& p)
{
    const double R = p.R, k = p.k;
    auto chi = [&](double x) -> std::pair<double, double> {
        if (x <= 2 * R) return {(x - R) / R, 1.0 / R};
        if (x <= k * R) return {1.0, 0.0};
        return {-(x - 2 * k * R) / (k * R), -1.0 / (k * R)};
    };
    auto form = [&](double x) {
        const auto [c, dc] = chi(x);
        const double sx = std::sqrt(x);
        const double phi = c * sx;
        const double dphi = dc * sx + c / (2 * sx);
        return dphi * dphi - (1.0 + p.delta) / (4 * x * x) * phi * phi;
    };
    auto mass = [&](double x) {
        const double c = chi(x).first;
        return c * c * x;
    };
    const double b1 = 2 * R, b2 = k * R, b3 = 2 * k * R;
    HardyQuotient q{};
    q.numerator = detail::gk_integrate(form, R, b1) + detail::gk_integrate(form, b1, b2) + detail::gk_integrate(form, b2, b3);
    q.norm_sq = detail::gk_integrate(mass, R, b1) + detail::gk_integrate(mass, b1, b2) + detail::gk_integrate(mass, b2, b3);
    q.bound = 3.0 - p.delta / 4.0 * std::log(k / 2.0);
    return q;
}

namespace detail {

/// Pruefer phase at x = 2kR of the solution with phi(R) = 0, in the variable
/// s = log x where phi = sqrt(x) w(s) and  w'' = -(delta/4 + lambda e^{2s}) w.
inline double hardy_phase(const HardyProblem& p, double lambda, double eps = 1e-12)
{
    const double s0 = std::log(p.left()), s1 = std::log(p.right());
    auto q = [&](double s) { return p.delta / 4.0 + lambda * std::exp(2.0 * s); };
    auto rhs = [&](const std::array<double, 1>& th, std::array<double, 1>& d, double s) {
        const double c = std::cos(th[0]), sn = std::sin(th[0]);
        d[0] = c * c + q(s) * sn * sn;
    };
    auto cap = [&](double s, const std::array<double, 1>&) {
        return 0.5 / std::sqrt(std::max(std::abs(q(s)), 1.0));
    };
    std::array<double, 1> th{0.0};
    AdaptiveStepper<1> stepper(eps, eps);
    double dt = 0.0;
    stepper.advance(rhs, th, s0, s1, dt, cap, [](double, std::array<double, 1>&) { return false; });
    return th[0];
}

} // namespace detail

/// Lowest Dirichlet eigenvalue (signed) of the Hardy problem; root of the Pruefer phase
/// condition theta(2kR) = pi, bracketed between the potential minimum and the free
/// Dirichlet Laplacian eigenvalue.
inline double hardy_first_eigenvalue(const HardyProblem& p, double tol = 1e-12)
{
    detail::require(tol > 0.0, "tolerance must be positive");
    const double lo = -(1.0 + p.delta) / (4.0 * p.R * p.R);
    const double width = p.right() - p.left();
    const double hi = std::numbers::pi * std::numbers::pi / (width * width);
    auto f = [&](double lambda) { return detail::hardy_phase(p, lambda) - std::numbers::pi; };
    const double flo = f(lo), fhi = f(hi);
    if (!(flo < 0.0 && fhi >= 0.0)) throw SolverError("Hardy eigenvalue bracket failed");
    if (fhi == 0.0) return hi;
    const int bits = std::clamp(static_cast<int>(-std::log2(tol)), 10, 50);
    boost::math::tools::eps_tolerance<double> stop(bits);
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iters);
    if (iters >= 200) throw SolverError("Hardy eigenvalue root search did not converge");
    return 0.5 * (a + b);
}

/// Rotationally symmetric (R^n, dr^2 + h(r)^2 g_sphere) with radial curvature K = -h''/h.
class RotSymManifold {
public:
    RotSymManifold(int n, const CurvatureProfile& curvature, double r_max, double tol = 1e-10)
        : n_(n)
        , warping_(solve_warping(curvature, r_max, tol))
    {
        detail::require(n >= 2, "dimension n must be >= 2");
    }

    int n() const { return n_; }
    const CurvatureProfile& curvature() const { return warping_.profile(); }
    const WarpingSolution& warping() const { return warping_; }

    /// A = h'/h; the Laplacian of the distance to the pole is (n-1) A.
    double a_ratio(double r) const { return warping_.s_at(r); }
    double log_h(double r) const { return warping_.log_j_at(r); }

private:
    int n_;
    WarpingSolution warping_;
};

/// Hardy weight  1/(4r^2) + (n-1)(n-3)/4 A^2 - (n-1)/2 K  of the distance to the pole.
inline double hardy_weight(const RotSymManifold& man, double r)
{
    detail::require(r >= man.warping().t_series() && r <= man.warping().r_max(), "hardy weight radius out of range");
    const double n = man.n();
    const double a = man.a_ratio(r);
    return 1.0 / (4.0 * r * r) + (n - 1) * (n - 3) / 4.0 * a * a - (n - 1) / 2.0 * man.curvature()(r);
}

/// Radial C^2 bump  amplitude * (1 - ((r - center)/half_width)^2)^3  on |r - center| < half_width.
struct RadialBump {
    double center;
    double half_width;
    double amplitude;

    double value(double r) const
    {
        const double s = (r - center) / half_width;
        if (std::abs(s) >= 1.0) return 0.0;
        const double q = 1.0 - s * s;
        return amplitude * q * q * q;
    }
    double derivative(double r) const
    {
        const double s = (r - center) / half_width;
        if (std::abs(s) >= 1.0) return 0.0;
        const double q = 1.0 - s * s;
        return amplitude * 3.0 * q * q * (-2.0 * s) / half_width;
    }
    double lo() const { return center - half_width; }
    double hi() const { return center + half_width; }
};

struct HardyInequality {
    double lhs;           ///< energy of u over the exterior of B(R)
    double rhs_interior;  ///< weighted L^2 term
    double rhs_boundary;  ///< (1/2) (Delta r - 1/R) u^2 over the sphere r = R
};

inline double unit_sphere_area(int n)
{
    return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

/// Both sides of the Hardy inequality on the exterior E = {r >= R} for a radial bump.
inline HardyInequality verify_hardy_inequality(const RotSymManifold& man, double R, const RadialBump& u)
{
    const auto& w = man.warping();
    detail::require(R >= w.t_series() && R < w.r_max(), "R outside the manifold grid");
    detail::require(u.half_width > 0.0 && u.lo() >= w.t_series() && u.hi() <= w.r_max(),
                    "test function must be compactly supported inside the grid");
    const double n = man.n();
    const double mean_curvature = (n - 1) * man.a_ratio(R);
    if (mean_curvature < (1.0 - 1e-9) / R)
        throw InvalidArgument("mean curvature of the sphere r = R is below 1/R");
    const double area = unit_sphere_area(man.n());
    auto density = [&](double r) { return area * std::exp((n - 1) * man.log_h(r)); };

    HardyInequality out{0.0, 0.0, 0.0};
    const double a = std::max(R, u.lo());
    const double b = u.hi();
    if (b > a) {
        out.lhs = detail::gk_integrate([&](double r) { const double d = u.derivative(r); return d * d * density(r); }, a, b);
        out.rhs_interior = detail::gk_integrate(
            [&](double r) { const double v = u.value(r); return hardy_weight(man, r) * v * v * density(r); }, a, b);
    }
    const double uR = u.value(R);
    out.rhs_boundary = 0.5 * (mean_curvature - 1.0 / R) * uR * uR * density(R);
    return out;
}

/// CSV header for Hardy report rows.
inline void write_hardy_header(std::ostream& os) { os << "delta,k,R,numerator,bound,lambda1\n"; }

} // namespace warpspec
