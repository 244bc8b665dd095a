#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "warpspec/eigen.hpp"
#include "warpspec/error.hpp"
#include "warpspec/hardy.hpp"
#include "warpspec/ode.hpp"
#include "warpspec/parallel.hpp"
#include "warpspec/profiles.hpp"

namespace warpspec {

// ---------------------------------------------------------------------------
// Gap inequality on model balls
// ---------------------------------------------------------------------------

/// Quadratic-form integrals of the Hardy ground state phi on [R, 2kR] and of the
/// transplanted profile f = phi J^{-(n-1)/2} on the model space.
struct HardyModeIntegrals {
    double grad_phi = 0.0;  ///< int phi'^2
    double hardy = 0.0;     ///< int phi^2 / (4 x^2)
    double mass = 0.0;      ///< int phi^2  (= int f^2 J^{n-1})
    double grad_f = 0.0;    ///< int f'^2 J^{n-1} = int (phi' - (n-1)/2 S phi)^2
    double potential = 0.0; ///< int (n-1)/2 ((n-3)/2 S^2 - R_min) phi^2
};

struct Prop22Row {
    double R = 0.0;
    double lambda1 = 0.0;    ///< positive depth: minus the signed Hardy eigenvalue
    double lambda_d = 0.0;   ///< first Dirichlet eigenvalue of the model ball B(2kR)
    double gap_target = 0.0; ///< (n-1)^2 kappa / 4 - lambda1
    bool passed = false;
    HardyModeIntegrals integrals;

    double margin() const { return gap_target - lambda_d; }
    /// int |f'|^2 J^{n-1} < gap_target * int |f|^2 J^{n-1}
    bool form_inequality() const { return integrals.grad_f < gap_target * integrals.mass; }
    /// (grad_f) - (grad_phi + potential), relative to grad_f
    double chain_residual() const
    {
        const double d = integrals.grad_f - (integrals.grad_phi + integrals.potential);
        return d / std::max(std::abs(integrals.grad_f), 1e-300);
    }
};

struct Prop22Report {
    int n = 0;
    double kappa = 0.0;
    double beta = 0.0;
    double delta = 0.0;
    double k = 0.0;
    std::vector<Prop22Row> rows;
    std::optional<double> r_star; ///< least listed R from which every larger listed R passes
    bool monotone = true;         ///< passes form a single tail of R_list

    bool ok() const { return monotone && r_star.has_value(); }
};

namespace detail {

/// Integrate the Hardy mode at `eigenvalue` in s = log x, accumulating the integrals above.
inline HardyModeIntegrals hardy_mode_integrals(const HardyProblem& p, double eigenvalue, const ModelSpace& m)
{
    const auto& w = m.warping();
    const double c = (m.n() - 1) / 2.0;
    const double c3 = (m.n() - 3) / 2.0;
    const double s0 = std::log(p.left()), s1 = std::log(p.right());
    auto rhs = [&](const std::array<double, 7>& y, std::array<double, 7>& d, double s) {
        const double x = std::exp(s);
        const double q = p.delta / 4.0 + eigenvalue * x * x;
        const double wv = y[0], ws = y[1];
        const double sx = w.s_at(x);
        const double g = wv / 2.0 + ws; // sqrt(x) phi'
        const double gf = g - c * sx * x * wv;
        const double phi2 = x * x * wv * wv; // phi^2 dx in the s variable
        d[0] = ws;
        d[1] = -q * wv;
        d[2] = g * g;
        d[3] = wv * wv / 4.0;
        d[4] = phi2;
        d[5] = gf * gf;
        d[6] = c * (c3 * sx * sx - m.profile()(x)) * phi2;
    };
    std::array<double, 7> y{0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    std::vector<double> stops;
    for (double g : w.grid())
        if (g > p.left() && g < p.right()) stops.push_back(std::log(g));
    stops.push_back(s1);
    AdaptiveStepper<7> stepper(1e-13, 1e-11);
    auto cap = [&](double s, const std::array<double, 7>&) {
        const double q = p.delta / 4.0 + eigenvalue * std::exp(2.0 * s);
        return 0.25 / std::sqrt(std::max(std::abs(q), 1.0));
    };
    double dt = 0.0, s = s0;
    for (double stop : stops) {
        stepper.advance(rhs, y, s, stop, dt, cap, [](double, std::array<double, 7>&) { return false; });
        s = stop;
    }
    return {y[2], y[3], y[4], y[5], y[6]};
}

} // namespace detail

/// For each R: Hardy depth lambda1 on [R, 2kR] against the model-ball eigenvalue on B(2kR).
inline Prop22Report verify_prop22(int n, const CurvatureProfile& profile, double delta, double k,
                                  const std::vector<double>& R_list, double tol = 1e-8, unsigned threads = 1)
{
    detail::require(n >= 2, "dimension n must be >= 2");
    detail::require(profile.has_tail(), "gap check needs a (kappa, beta) tail profile");
    detail::require(delta > 0.0, "delta must be positive");
    const double coupling = profile.beta() * (n - 1) * (n - 1);
    detail::require(coupling > 1.0 + delta, "gap check requires beta (n-1)^2 > 1 + delta");
    detail::require(k > HardyProblem::critical_k(delta), "gap check requires k > 2 exp(12 / delta)");
    detail::require(!R_list.empty(), "R_list must not be empty");
    for (std::size_t i = 0; i < R_list.size(); ++i) {
        detail::require(R_list[i] > 0.0, "R values must be positive");
        if (i > 0) detail::require(R_list[i] > R_list[i - 1], "R_list must increase");
    }

    const ModelSpace model(n, solve_warping(profile, 2.0 * k * R_list.back() * 1.001, std::clamp(tol, 1e-12, 1e-8)));
    const double e_ess = model.essential_bottom();

    Prop22Report rep;
    rep.n = n;
    rep.kappa = profile.kappa();
    rep.beta = profile.beta();
    rep.delta = delta;
    rep.k = k;
    rep.rows = parallel_map(R_list.size(), threads, [&](std::size_t i) {
        const HardyProblem hp(R_list[i], k, delta);
        const double eig = hardy_first_eigenvalue(hp);
        Prop22Row row;
        row.R = R_list[i];
        row.lambda1 = -eig;
        row.lambda_d = first_dirichlet_eigen(model, hp.right(), tol).eigenvalue;
        row.gap_target = e_ess - row.lambda1;
        row.passed = row.lambda1 > 0.0 && row.lambda_d < row.gap_target;
        row.integrals = detail::hardy_mode_integrals(hp, eig, model);
        return row;
    });

    // passes must form a suffix of R_list
    std::size_t first_pass = rep.rows.size();
    for (std::size_t i = rep.rows.size(); i-- > 0;) {
        if (!rep.rows[i].passed) break;
        first_pass = i;
    }
    for (std::size_t i = 0; i < first_pass; ++i)
        if (rep.rows[i].passed) rep.monotone = false;
    if (first_pass < rep.rows.size()) rep.r_star = rep.rows[first_pass].R;
    return rep;
}

inline void write_prop22_csv(std::ostream& os, const Prop22Report& rep)
{
    const auto old = os.precision(17);
    os << "n,kappa,beta,delta,k,R,lambda1,lambda_d,gap_target,margin,passed,grad_f,mass,chain_residual\n";
    for (const auto& r : rep.rows)
        os << rep.n << ',' << rep.kappa << ',' << rep.beta << ',' << rep.delta << ',' << rep.k << ',' << r.R << ','
           << r.lambda1 << ',' << r.lambda_d << ',' << r.gap_target << ',' << r.margin() << ','
           << (r.passed ? "pass" : "fail") << ',' << r.integrals.grad_f << ',' << r.integrals.mass << ','
           << r.chain_residual() << '\n';
    os.precision(old);
}

// ---------------------------------------------------------------------------
// Transplantation onto a rotationally symmetric target
// ---------------------------------------------------------------------------

struct TransplantReport {
    int n = 0;
    double r_w = 0.0;
    double R = 0.0;
    double grad_energy = 0.0;   ///< int |grad F_R|^2
    double norm_sq = 0.0;       ///< int F_R^2 (including the constant part on W)
    double volume_w = 0.0;      ///< Vol(W)
    double h1_center = 0.0;     ///< h1(0)
    double quotient = 0.0;      ///< grad_energy / norm_sq
    double lambda_d_model = 0.0;
    double correction = 0.0;    ///< lambda_D h1(0)^2 Vol(W) / int F_R^2
    double min_domination_gap = 0.0; ///< min over sampled r of K_target(r) - R_min(r)

    double margin() const { return lambda_d_model - quotient; }
    double strengthened_bound() const { return lambda_d_model - correction; }
};

/// Pole-centred curvature of a target whose radial curvature at distance r from the
/// boundary of the ball W = B(r_w) is target(r); constant (= target(0)) inside W.
inline CurvatureProfile target_pole_profile(const CurvatureProfile& target, double r_w)
{
    return target.shifted(r_w);
}

/// Rayleigh quotient of the transplanted model eigenfunction F_R on the target.
inline TransplantReport transplant_check(int n, const CurvatureProfile& model_profile,
                                         const CurvatureProfile& target_curvature, double r_w, double R,
                                         double tol = 1e-9)
{
    detail::require(n >= 2, "dimension n must be >= 2");
    detail::require(r_w > 0.0 && R > 0.0, "r_w and R must be positive");

    // Ricci domination along the normal geodesics leaving the boundary of W
    TransplantReport rep;
    rep.n = n;
    rep.r_w = r_w;
    rep.R = R;
    rep.min_domination_gap = std::numeric_limits<double>::infinity();
    {
        std::vector<double> probe;
        constexpr int samples = 4000;
        for (int i = 1; i <= samples; ++i) probe.push_back(R * i / samples);
        for (double b : model_profile.breakpoints()) probe.push_back(b);
        for (double b : target_curvature.breakpoints()) probe.push_back(b);
        for (double r : probe) {
            if (r <= 0.0 || r > R) continue;
            const double gap = target_curvature(r) - model_profile(r);
            rep.min_domination_gap = std::min(rep.min_domination_gap, gap);
            if (gap < -1e-14 * std::max(1.0, std::abs(model_profile(r))))
                throw InvalidArgument("Ricci domination fails at distance r = " + std::to_string(r) +
                                      " from the boundary of W");
        }
    }

    const double wtol = std::clamp(tol, 1e-12, 1e-8);
    const ModelSpace model(n, solve_warping(model_profile, R * 1.001 + 1.0, wtol));
    const EigenResult h1 = first_dirichlet_eigen(model, R, tol);
    const RotSymManifold target(n, target_pole_profile(target_curvature, r_w), r_w + R + 1.0, wtol);

    const double area = unit_sphere_area(n);
    const double nm1 = n - 1;
    auto density = [&](double rho) { return area * std::exp(nm1 * target.log_h(rho)); };

    // panels: the eigenfunction sample intervals plus every breakpoint of either profile
    std::vector<double> cuts{0.0, R};
    for (const auto& smp : h1.samples)
        if (smp.r > 0.0 && smp.r < R) cuts.push_back(smp.r);
    for (double b : model_profile.breakpoints())
        if (b > 0.0 && b < R) cuts.push_back(b);
    for (double b : target_curvature.breakpoints())
        if (b > 0.0 && b < R) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    using rule = boost::math::quadrature::gauss<double, 10>;
    double grad = 0.0, mass_annulus = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        grad += rule::integrate(
            [&](double r) { const double d = h1.dh_at(r); return d * d * density(r_w + r); }, cuts[i], cuts[i + 1]);
        mass_annulus += rule::integrate(
            [&](double r) { const double v = h1.h_at(r); return v * v * density(r_w + r); }, cuts[i], cuts[i + 1]);
    }
    // Vol(W): series part near the pole plus quadrature
    const double t0 = target.warping().t_series();
    double vol = area * std::pow(t0, n) / n;
    constexpr int wpanels = 256;
    for (int i = 0; i < wpanels; ++i)
        vol += rule::integrate(density, t0 + (r_w - t0) * i / wpanels, t0 + (r_w - t0) * (i + 1) / wpanels);

    rep.h1_center = h1.samples.front().h;
    rep.volume_w = vol;
    rep.grad_energy = grad;
    rep.norm_sq = rep.h1_center * rep.h1_center * vol + mass_annulus;
    rep.quotient = grad / rep.norm_sq;
    rep.lambda_d_model = h1.eigenvalue;
    rep.correction = h1.eigenvalue * rep.h1_center * rep.h1_center * vol / rep.norm_sq;
    return rep;
}

inline void write_transplant_csv(std::ostream& os, const TransplantReport& r)
{
    const auto old = os.precision(17);
    os << "n,r_w,R,quotient,lambda_d_model,margin,correction,strengthened_bound,volume_w,norm_sq\n";
    os << r.n << ',' << r.r_w << ',' << r.R << ',' << r.quotient << ',' << r.lambda_d_model << ',' << r.margin() << ','
       << r.correction << ',' << r.strengthened_bound() << ',' << r.volume_w << ',' << r.norm_sq << '\n';
    os.precision(old);
}

// ---------------------------------------------------------------------------
// Finite / infinite threshold sweep
// ---------------------------------------------------------------------------

/// Side of the borderline beta (n-1)^2 = 1 on which a tail coefficient lies.
inline Growth predicted_growth(int n, double beta)
{
    const double coupling = beta * (n - 1) * (n - 1);
    if (std::abs(coupling - 1.0) <= 1e-12) return Growth::inconclusive;
    return coupling > 1.0 ? Growth::growing : Growth::saturated;
}

struct SweepCell {
    double beta = 0.0;
    double r_join = 0.0;
    CountCurve curve;
    Growth predicted = Growth::inconclusive;

    bool agrees() const
    {
        if (predicted == Growth::inconclusive) return true;
        return curve.classification == predicted;
    }
};

inline std::vector<SweepCell> threshold_sweep(int n, double kappa, const std::vector<double>& beta_list,
                                              const std::vector<double>& L_list, double eps_origin,
                                              double tol = 1e-8, unsigned threads = 1)
{
    detail::require(n >= 2, "dimension n must be >= 2");
    detail::require(kappa > 0.0, "kappa must be positive");
    detail::require(!L_list.empty() && L_list.back() >= 100.0 * L_list.front(),
                    "L_list must span at least two decades");
    const double m = n - 1;
    const double E = m * m * kappa / 4.0 - 1e-9;
    return parallel_map(beta_list.size(), threads, [&](std::size_t i) {
        SweepCell cell;
        cell.beta = beta_list[i];
        cell.r_join = CurvatureProfile::default_r_join(kappa, cell.beta);
        const auto profile = CurvatureProfile::make(kappa, cell.beta, cell.r_join, ProfileKind::radial_curvature);
        const ModelSpace space(n, solve_warping(profile, L_list.back() * 1.0001, tol));
        cell.curve = count_curve(space, E, L_list, eps_origin);
        cell.predicted = predicted_growth(n, cell.beta);
        return cell;
    });
}

/// CSV with header `n,kappa,beta,L,count,classification,predicted`.
inline void write_sweep_csv(std::ostream& os, int n, double kappa, const std::vector<SweepCell>& cells)
{
    const auto old = os.precision(17);
    os << "n,kappa,beta,L,count,classification,predicted\n";
    for (const auto& c : cells)
        for (const auto& p : c.curve.points)
            os << n << ',' << kappa << ',' << c.beta << ',' << p.L << ',' << p.count << ','
               << to_string(c.curve.classification) << ',' << to_string(c.predicted) << '\n';
    os.precision(old);
}

} // namespace warpspec
