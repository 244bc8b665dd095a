#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <vector>

#include "warpspec/error.hpp"
#include "warpspec/profiles.hpp"
#include "warpspec/stepper.hpp"

namespace warpspec {

struct WarpPoint {
    double log_j;
    double s;
};

/// Warping function J of  J'' + R J = 0, J(0) = 0, J'(0) = 1, stored as (log J, S = J'/J)
/// on a fixed grid. Between nodes both fields are cubic Hermite interpolants built
/// from the exact derivatives (log J)' = S and S' = -S^2 - R.
class WarpingSolution {
public:
    WarpingSolution(CurvatureProfile profile, std::vector<double> grid, std::vector<double> log_j,
                    std::vector<double> s, double t_series, double tol)
        : profile_(std::move(profile))
        , grid_(std::move(grid))
        , log_j_(std::move(log_j))
        , s_(std::move(s))
        , t_series_(t_series)
        , tol_(tol)
    {
        ds_.resize(grid_.size());
        for (std::size_t i = 0; i < grid_.size(); ++i) ds_[i] = -s_[i] * s_[i] - profile_(grid_[i]);
    }

    const CurvatureProfile& profile() const { return profile_; }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& log_j() const { return log_j_; }
    const std::vector<double>& s() const { return s_; }
    double t_series() const { return t_series_; }
    double r_max() const { return grid_.back(); }
    double tol() const { return tol_; }

    bool contains(double t) const { return t >= grid_.front() && t <= grid_.back(); }

    WarpPoint operator()(double t) const
    {
        if (!contains(t))
            throw InvalidArgument("warping evaluated at t = " + std::to_string(t) + " outside [" +
                                  std::to_string(grid_.front()) + ", " + std::to_string(grid_.back()) + "]");
        auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
        std::size_t i = static_cast<std::size_t>(it - grid_.begin());
        if (i == grid_.size()) return {log_j_.back(), s_.back()};
        --i;
        if (t == grid_[i]) return {log_j_[i], s_[i]};
        const double h = grid_[i + 1] - grid_[i];
        const double u = (t - grid_[i]) / h;
        const double u2 = u * u;
        const double u3 = u2 * u;
        const double h00 = 2 * u3 - 3 * u2 + 1;
        const double h10 = u3 - 2 * u2 + u;
        const double h01 = -2 * u3 + 3 * u2;
        const double h11 = u3 - u2;
        return {h00 * log_j_[i] + h10 * h * s_[i] + h01 * log_j_[i + 1] + h11 * h * s_[i + 1],
                h00 * s_[i] + h10 * h * ds_[i] + h01 * s_[i + 1] + h11 * h * ds_[i + 1]};
    }

    double s_at(double t) const { return (*this)(t).s; }
    double log_j_at(double t) const { return (*this)(t).log_j; }

private:
    CurvatureProfile profile_;
    std::vector<double> grid_;
    std::vector<double> log_j_;
    std::vector<double> s_;
    std::vector<double> ds_;
    double t_series_;
    double tol_;
};

namespace detail {

inline double series_radius(const CurvatureProfile& p)
{
    double t = 1e-3;
    for (double b : p.breakpoints())
        if (b > 0.0) t = std::min(t, b / 10.0);
    return t;
}

/// Output nodes: geometric near the origin, at most h_max apart up to r = 10,
/// log-spaced beyond; every profile breakpoint is a node.
inline std::vector<double> warping_grid(const CurvatureProfile& p, double t0, double r_max, double tol)
{
    const double c_rel = std::min(0.05, 1.5 * std::pow(tol, 0.25));
    const double k = std::max(1.0, std::sqrt(p.max_abs_value()));
    const double h_max = 0.5 * std::pow(38.0 * tol, 0.25) / k;
    std::vector<double> breaks;
    for (double b : p.breakpoints())
        if (b > t0 && b < r_max) breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    breaks.push_back(r_max);

    std::vector<double> g{t0};
    std::size_t next = 0;
    double t = t0;
    while (t < r_max) {
        const double h = t < 10.0 ? std::min(c_rel * t, h_max) : std::max(h_max, c_rel * t);
        double cand = t + h;
        const double stop = breaks[next];
        if (cand >= stop - 0.25 * h) {
            cand = stop;
            ++next;
        }
        g.push_back(cand);
        t = cand;
    }
    return g;
}

} // namespace detail

/// Integrate the Jacobi problem for `p` on [t_series, r_max] in (log J, S) form.
inline WarpingSolution solve_warping(const CurvatureProfile& p, double r_max, double tol = 1e-8)
{
    detail::require(tol > 1e-14 && tol < 1e-4, "warping tolerance must lie in (1e-14, 1e-4)");
    const double t0 = detail::series_radius(p);
    detail::require(std::isfinite(r_max) && r_max > t0, "r_max must exceed the series radius");

    // J = t - R0 t^3/6 + R0^2 t^5/120,  S = 1/t - R0 t/3 - R0^2 t^3/45
    const double r0 = p(0.0);
    const double t2 = t0 * t0;
    std::array<double, 2> x{std::log(t0) + std::log1p(-r0 * t2 / 6.0 + r0 * r0 * t2 * t2 / 120.0),
                            1.0 / t0 - r0 * t0 / 3.0 - r0 * r0 * t2 * t0 / 45.0};

    const std::vector<double> grid = detail::warping_grid(p, t0, r_max, tol);
    std::vector<double> log_j(grid.size()), s(grid.size());
    log_j[0] = x[0];
    s[0] = x[1];

    auto rhs = [&p](const std::array<double, 2>& y, std::array<double, 2>& dy, double t) {
        dy[0] = y[1];
        dy[1] = -y[1] * y[1] - p(t);
    };
    const double eps = std::max(0.02 * tol, 4e-16);
    AdaptiveStepper<2> stepper(eps, eps);
    double dt = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        stepper.advance(rhs, x, grid[i - 1], grid[i], dt);
        if (!(x[1] > 0.0))
            throw SolverError("S reached zero near t = " + std::to_string(grid[i]) +
                              " (conjugate point; profile must be nonpositive)");
        log_j[i] = x[0];
        s[i] = x[1];
    }
    return WarpingSolution(p, grid, std::move(log_j), std::move(s), t0, tol);
}

struct TailFit {
    double kappa_hat;
    double beta_hat;
    double rms_residual;
};

/// Least-squares fit of S(t) ~ a - b / t^2 on [t_lo, t_hi]; kappa = a^2, beta = 2ab.
inline TailFit riccati_tail_fit(const WarpingSolution& w, double t_lo, double t_hi)
{
    detail::require(t_lo < t_hi, "tail fit needs t_lo < t_hi");
    detail::require(w.contains(t_lo) && w.contains(t_hi), "tail fit window outside the warping range");
    constexpr int samples = 256;
    // normal equations for the basis {1, -1/t^2}
    double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
    std::vector<double> ts(samples), ys(samples);
    for (int i = 0; i < samples; ++i) {
        const double t = t_lo + (t_hi - t_lo) * static_cast<double>(i) / (samples - 1);
        const double y = w.s_at(t);
        const double q = -1.0 / (t * t);
        ts[i] = t;
        ys[i] = y;
        s11 += 1.0;
        s12 += q;
        s22 += q * q;
        r1 += y;
        r2 += q * y;
    }
    const double det = s11 * s22 - s12 * s12;
    const double a = (r1 * s22 - r2 * s12) / det;
    const double b = (s11 * r2 - s12 * r1) / det;
    double ss = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double e = ys[i] - (a - b / (ts[i] * ts[i]));
        ss += e * e;
    }
    const double rms = std::sqrt(ss / samples);
    // the two-term model leaves an O(1/t^3) remainder; anything much larger
    // than a percent of the 1/t^2 term means the tail has not set in
    const double allowed = 0.01 * std::abs(b) / (t_lo * t_lo) + 10.0 * w.tol();
    if (rms > allowed)
        throw SolverError("tail fit residual " + std::to_string(rms) + " exceeds " + std::to_string(allowed) +
                          ": asymptotic regime not reached on the window");
    return {a * a, 2.0 * a * b, rms};
}

/// CSV dump with header `t,log_j,s`.
inline void write_warping_csv(std::ostream& os, const WarpingSolution& w)
{
    const auto old = os.precision(17);
    os << "t,log_j,s\n";
    for (std::size_t i = 0; i < w.grid().size(); ++i)
        os << w.grid()[i] << ',' << w.log_j()[i] << ',' << w.s()[i] << '\n';
    os.precision(old);
}

} // namespace warpspec
