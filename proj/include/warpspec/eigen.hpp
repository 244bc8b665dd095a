#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "warpspec/error.hpp"
#include "warpspec/ode.hpp"
#include "warpspec/stepper.hpp"

namespace warpspec {

/// (R^n, dr^2 + J(r)^2 g_sphere) for the warping J carried by `warping`.
class ModelSpace {
public:
    ModelSpace(int n, WarpingSolution warping)
        : n_(n)
        , warping_(std::move(warping))
    {
        detail::require(n >= 2, "dimension n must be >= 2");
    }

    int n() const { return n_; }
    const WarpingSolution& warping() const { return warping_; }
    const CurvatureProfile& profile() const { return warping_.profile(); }

    /// Bottom of the essential spectrum, (n-1)^2 kappa / 4.
    double essential_bottom() const
    {
        const double m = n_ - 1;
        return m * m * profile().kappa() / 4.0;
    }

    /// log of the radial volume density J^{n-1}.
    double log_density(double r) const { return (n_ - 1) * warping_.log_j_at(r); }

private:
    int n_;
    WarpingSolution warping_;
};

/// Potential of  -u'' + V u  obtained from the radial Laplacian by u = J^{(n-1)/2} h:
/// V = (n-1)(n-3)/4 S^2 - (n-1)/2 R.
inline double effective_potential(const ModelSpace& m, double x)
{
    detail::require(x >= m.warping().t_series(), "effective potential below the series radius");
    const double s = m.warping().s_at(x);
    const double n = m.n();
    return (n - 1) * (n - 3) / 4.0 * s * s - (n - 1) / 2.0 * m.profile()(x);
}

struct EigenSample {
    double r;
    double h;
    double dh;
};

struct EigenResult {
    double eigenvalue = 0.0;
    double radius = 0.0;
    int dimension = 0;
    std::vector<EigenSample> samples;
    int node_count = 0;
    double eps_origin = 0.0;
    double tol = 0.0;

    /// Cubic Hermite interpolation of h between samples.
    double h_at(double r) const { return interpolate(r).first; }
    double dh_at(double r) const { return interpolate(r).second; }

    /// (h, h') at r; h'' comes from the radial equation via the stored second derivatives.
    std::pair<double, double> interpolate(double r) const
    {
        detail::require(r >= 0.0 && r <= radius, "eigenfunction evaluated outside [0, L]");
        auto it = std::upper_bound(samples.begin(), samples.end(), r,
                                   [](double v, const EigenSample& s) { return v < s.r; });
        std::size_t i = static_cast<std::size_t>(it - samples.begin());
        if (i == samples.size()) return {samples.back().h, samples.back().dh};
        --i;
        const auto& a = samples[i];
        const auto& b = samples[i + 1];
        const double h = b.r - a.r;
        const double u = (r - a.r) / h;
        const double u2 = u * u, u3 = u2 * u;
        const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u, h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
        const double val = h00 * a.h + h10 * h * a.dh + h01 * b.h + h11 * h * b.dh;
        const double ia = second_derivative(i), ib = second_derivative(i + 1);
        const double der = h00 * a.dh + h10 * h * ia + h01 * b.dh + h11 * h * ib;
        return {val, der};
    }

    std::vector<double> d2h; // h'' at each sample

private:
    double second_derivative(std::size_t i) const { return d2h.empty() ? 0.0 : d2h[i]; }
};

namespace detail {

struct ShotOutcome {
    int sign_changes = 0;
    double final_phase_sin = 0.0; // h(L) / |(h, h')| at L
    std::vector<EigenSample> samples;
    std::vector<double> d2h;
};

/// Integrate  h'' + (n-1) S h' + lambda h = 0  from the regular centre out to L.
/// The linear state is renormalised whenever it drifts far from unit size;
/// recorded samples are in true scale (they underflow quietly for huge L).
inline ShotOutcome shoot_radial(const ModelSpace& m, double L, double lambda, double eps, bool record,
                                double sample_spacing)
{
    const auto& w = m.warping();
    const double n = m.n();
    const double t0 = w.t_series();
    const double r0 = m.profile()(0.0);
    // regular centre: h = 1 + a t^2 + b t^4
    const double a = -lambda / (2.0 * n);
    const double b = a * ((n - 1) * 2.0 * r0 / 3.0 - lambda) / (4.0 * (n + 2.0));
    std::array<double, 2> y{1.0 + a * t0 * t0 + b * t0 * t0 * t0 * t0, 2 * a * t0 + 4 * b * t0 * t0 * t0};
    double log_scale = 0.0;

    auto rhs = [&](const std::array<double, 2>& s, std::array<double, 2>& ds, double t) {
        ds[0] = s[1];
        ds[1] = -lambda * s[0] - (n - 1) * w.s_at(t) * s[1];
    };
    const double cap = 0.25 / std::sqrt(std::max(lambda, 1.0));

    ShotOutcome out;
    auto push = [&](double t) {
        const double f = std::exp(log_scale);
        const double hh = y[0] * f, dd = y[1] * f;
        out.samples.push_back({t, hh, dd});
        out.d2h.push_back(-lambda * hh - (n - 1) * w.s_at(t) * dd);
    };
    if (record) {
        out.samples.push_back({0.0, 1.0, 0.0});
        out.d2h.push_back(-lambda / n);
        push(t0);
    }

    // stop at every warping node (the S interpolant is only C^1 there) and sample point
    std::vector<double> stops;
    for (double g : w.grid())
        if (g > t0 && g < L) stops.push_back(g);
    if (record && sample_spacing > 0.0) {
        for (double t = sample_spacing; t < L; t += sample_spacing)
            if (t > t0) stops.push_back(t);
        std::sort(stops.begin(), stops.end());
        const double close = 1e-9 * L;
        stops.erase(std::unique(stops.begin(), stops.end(), [close](double p, double q) { return q - p < close; }),
                    stops.end());
        while (!stops.empty() && L - stops.back() < close) stops.pop_back();
    }
    stops.push_back(L);

    AdaptiveStepper<2> stepper(eps, eps);
    double dt = 0.0;
    double prev_h = y[0];
    double t = t0;
    auto on_step = [&](double, std::array<double, 2>& s) {
        if ((s[0] > 0.0) != (prev_h > 0.0) || s[0] == 0.0) ++out.sign_changes;
        if (s[0] == 0.0) s[0] = -std::copysign(1e-300, prev_h);
        prev_h = s[0];
        const double mag = std::abs(s[0]) + std::abs(s[1]);
        if (mag > 1e100 || mag < 1e-100) {
            s[0] /= mag;
            s[1] /= mag;
            log_scale += std::log(mag);
            return true;
        }
        return false;
    };
    for (double stop : stops) {
        stepper.advance(rhs, y, t, stop, dt, [&](double, const auto&) { return cap; }, on_step);
        t = stop;
        if (record) push(t);
    }
    out.final_phase_sin = y[0] / std::hypot(y[0], y[1]);
    return out;
}

} // namespace detail

/// Dirichlet eigenpair number `index` (0 = ground state) of the radial Laplacian on the
/// model ball of radius L, found by node-count bisection on shots from the regular centre.
inline EigenResult dirichlet_eigen(const ModelSpace& m, double L, double tol, int index = 0)
{
    const auto& w = m.warping();
    detail::require(L > w.t_series() && L <= w.r_max(), "ball radius outside the warping range");
    detail::require(tol > 0.0, "eigenvalue tolerance must be positive");
    detail::require(index >= 0, "eigen index must be nonnegative");
    const double eps = std::clamp(0.01 * tol, 1e-13, 1e-9);

    auto above = [&](double lambda) {
        return detail::shoot_radial(m, L, lambda, eps, false, 0.0).sign_changes >= index + 1;
    };
    double lo = 0.0;
    double hi = 1.0;
    int guard = 0;
    while (!above(hi)) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 80) throw SolverError("could not bracket the Dirichlet eigenvalue");
    }
    guard = 0;
    while (hi - lo > std::max(0.01 * tol, 8 * std::numeric_limits<double>::epsilon() * hi)) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (above(mid) ? hi : lo) = mid;
        if (++guard > 200) throw SolverError("eigenvalue bisection did not converge");
    }

    const double spacing = std::min(0.01, L / 2000.0);
    auto shot = detail::shoot_radial(m, L, lo, eps, true, spacing);
    EigenResult res;
    res.eigenvalue = 0.5 * (lo + hi);
    res.radius = L;
    res.dimension = m.n();
    res.samples = std::move(shot.samples);
    res.d2h = std::move(shot.d2h);
    res.node_count = index;
    res.eps_origin = w.t_series();
    res.tol = tol;
    return res;
}

inline EigenResult first_dirichlet_eigen(const ModelSpace& m, double L, double tol)
{
    return dirichlet_eigen(m, L, tol, 0);
}

struct Lemma21Violation {
    double r;
    std::string what;
};

struct Lemma21Report {
    bool passed = true;
    std::vector<Lemma21Violation> violations;
};

/// Ground-state shape check: h > 0 on [0, L) and strictly decreasing past the origin.
inline Lemma21Report check_lemma21(const EigenResult& res)
{
    Lemma21Report rep;
    const auto& s = res.samples;
    double hmax = 0.0;
    for (const auto& p : s) hmax = std::max(hmax, std::abs(p.h));
    for (const auto& p : s) {
        if (p.r < res.radius && !(p.h > 0.0)) {
            rep.violations.push_back({p.r, "h1 not positive"});
            break;
        }
    }
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (s[i + 1].r <= res.eps_origin) continue;
        const double dr = s[i + 1].r - s[i].r;
        const double dq = (s[i + 1].h - s[i].h) / dr;
        // close to the centre h1 is flat to within the solver tolerance
        const double band = s[i].r < 100.0 * res.eps_origin ? res.tol * hmax / dr : 0.0;
        if (!(dq < band)) {
            rep.violations.push_back({s[i].r, "difference quotient not negative"});
            if (rep.violations.size() > 16) break;
        }
    }
    rep.passed = rep.violations.empty();
    return rep;
}

/// Number of Dirichlet eigenvalues below E of  -u'' + V u  on [eps_origin, L],
/// from the Pruefer phase  theta' = cos^2 theta + (E - V) sin^2 theta,  theta(eps_origin) = 0.
inline int count_eigenvalues_below(const ModelSpace& m, double L, double E, double eps_origin)
{
    const auto& w = m.warping();
    detail::require(eps_origin >= w.t_series(), "eps_origin below the series radius");
    detail::require(L > eps_origin && L <= w.r_max(), "count radius outside the warping range");
    std::array<double, 1> theta{0.0};
    auto q = [&](double x) { return E - effective_potential(m, x); };
    auto rhs = [&](const std::array<double, 1>& th, std::array<double, 1>& d, double x) {
        const double c = std::cos(th[0]), s = std::sin(th[0]);
        d[0] = c * c + q(x) * s * s;
    };
    auto cap = [&](double x, const std::array<double, 1>&) {
        return 0.5 / std::sqrt(std::max(std::abs(q(x)), 1.0));
    };
    auto no_hook = [](double, std::array<double, 1>&) { return false; };

    std::vector<double> stops;
    for (double g : w.grid())
        if (g > eps_origin && g < L) stops.push_back(g);
    stops.push_back(L);
    AdaptiveStepper<1> stepper(1e-10, 1e-10);
    double dt = 0.0;
    double x = eps_origin;
    for (double stop : stops) {
        stepper.advance(rhs, theta, x, stop, dt, cap, no_hook);
        x = stop;
    }
    return static_cast<int>(std::floor(theta[0] / std::numbers::pi));
}

enum class Growth { growing, saturated, inconclusive };

inline std::string_view to_string(Growth g)
{
    switch (g) {
    case Growth::growing: return "growing";
    case Growth::saturated: return "saturated";
    default: return "inconclusive";
    }
}

struct CountPoint {
    double L;
    int count;
};

struct CountCurve {
    int n = 0;
    double kappa = 0.0;
    double beta = 0.0;
    double threshold_energy = 0.0;
    double eps_origin = 0.0;
    std::vector<CountPoint> points;
    std::vector<int> counts_refined; // same radii, eps_origin / 4
    bool eps_converged = true;
    Growth classification = Growth::inconclusive;
};

namespace detail {

inline std::optional<std::size_t> find_radius(const std::vector<CountPoint>& pts, double L)
{
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (std::abs(pts[i].L - L) <= 1e-9 * L) return i;
    return std::nullopt;
}

/// Two-decade window ending at the largest radius; per-decade growth is demanded
/// when the coupling beta (n-1)^2 is at least 4, total growth otherwise.
inline Growth classify(const std::vector<CountPoint>& pts, double coupling)
{
    if (pts.empty()) return Growth::inconclusive;
    const double last = pts.back().L;
    const auto i1 = find_radius(pts, last / 10.0);
    const auto i2 = find_radius(pts, last / 100.0);
    if (!i1 || !i2) return Growth::inconclusive;
    const int n2 = pts[*i2].count, n1 = pts[*i1].count, n0 = pts.back().count;
    if (n2 == n1 && n1 == n0) return Growth::saturated;
    if (coupling >= 4.0) return (n1 - n2 >= 1 && n0 - n1 >= 1) ? Growth::growing : Growth::inconclusive;
    return (n0 - n2 >= 1 && n0 > n1) ? Growth::growing : Growth::inconclusive;
}

} // namespace detail

/// Eigenvalue counts below E over increasing truncation radii, with growth classification.
inline CountCurve count_curve(const ModelSpace& m, double E, const std::vector<double>& L_list, double eps_origin)
{
    detail::require(!L_list.empty(), "count curve needs at least one radius");
    for (std::size_t i = 1; i < L_list.size(); ++i)
        detail::require(L_list[i] > L_list[i - 1], "count curve radii must increase");
    detail::require(eps_origin / 4.0 >= m.warping().t_series(),
                    "eps_origin / 4 must not fall below the series radius");
    CountCurve c;
    c.n = m.n();
    if (m.profile().has_tail()) {
        c.kappa = m.profile().kappa();
        c.beta = m.profile().beta();
    }
    c.threshold_energy = E;
    c.eps_origin = eps_origin;
    for (double L : L_list) {
        c.points.push_back({L, count_eigenvalues_below(m, L, E, eps_origin)});
        c.counts_refined.push_back(count_eigenvalues_below(m, L, E, eps_origin / 4.0));
        if (c.counts_refined.back() != c.points.back().count) c.eps_converged = false;
    }
    const double coupling = m.profile().has_tail() ? c.beta * (c.n - 1) * (c.n - 1) : 0.0;
    c.classification = c.eps_converged ? detail::classify(c.points, coupling) : Growth::inconclusive;
    return c;
}

/// CSV with header `r,h1`.
inline void write_eigen_csv(std::ostream& os, const EigenResult& res)
{
    const auto old = os.precision(17);
    os << "r,h1\n";
    for (const auto& s : res.samples) os << s.r << ',' << s.h << '\n';
    os.precision(old);
}

/// CSV with header `L,count`.
inline void write_count_csv(std::ostream& os, const CountCurve& c)
{
    const auto old = os.precision(17);
    os << "L,count\n";
    for (const auto& p : c.points) os << p.L << ',' << p.count << '\n';
    os.precision(old);
}

} // namespace warpspec
