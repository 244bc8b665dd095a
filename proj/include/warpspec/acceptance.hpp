#pragma once

// End-to-end acceptance suite. Each criterion writes its evidence as CSV into the
// output directory and yields one pass/fail outcome.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "warpspec/eigen.hpp"
#include "warpspec/error.hpp"
#include "warpspec/experiments.hpp"
#include "warpspec/hardy.hpp"
#include "warpspec/ode.hpp"
#include "warpspec/oracles.hpp"
#include "warpspec/profiles.hpp"

namespace warpspec {

struct CriterionOutcome {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
};

struct AcceptanceOptions {
    std::filesystem::path out_dir = "acceptance_out";
    std::uint64_t seed = 7;
    double tol = 1e-8;
    unsigned threads = 1;
};

namespace detail {

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& w)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidArgument("cannot open output file " + path.string());
    os.precision(17);
    w(os);
}

inline std::string fmt_num(double v)
{
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline CriterionOutcome criterion_closed_form_warping(const AcceptanceOptions& o)
{
    CriterionOutcome c{1, "closed-form warping (hyperbolic)", true, ""};
    const auto w = solve_warping(CurvatureProfile::constant(-1.0), 701.0, o.tol);
    double worst = 0.0;
    write_file(o.out_dir / "warping_check.csv", [&](std::ostream& os) {
        os << "t,log_j,s,log_j_exact,s_exact,rel_err\n";
        for (double t : {1.0, 5.0, 20.0, 100.0, 700.0}) {
            const auto [lj, s] = w(t);
            // log sinh t = t + log1p(-e^{-2t}) - log 2
            const double lj_exact = t + std::log1p(-std::exp(-2.0 * t)) - std::log(2.0);
            const double s_exact = 1.0 / std::tanh(t);
            const double err = std::max(rel_err(lj, lj_exact), rel_err(s, s_exact));
            if (t <= 100.0) worst = std::max(worst, err);
            if (!std::isfinite(lj) || !std::isfinite(s)) c.passed = false;
            os << t << ',' << lj << ',' << s << ',' << lj_exact << ',' << s_exact << ',' << err << '\n';
        }
    });
    c.passed = c.passed && worst < 1e-8;
    c.detail = "max relative error " + fmt_num(worst) + " at t<=100; finite at t=700";
    return c;
}

inline CriterionOutcome criterion_tail_fit(const AcceptanceOptions& o)
{
    CriterionOutcome c{2, "Riccati tail asymptotics", true, ""};
    struct Case { double kappa, beta, r_join; };
    const Case cases[] = {{1.0, 0.5, 1.0}, {1.0, 2.0, 2.0}, {4.0, 1.0, 1.0}};
    std::ostringstream detail;
    write_file(o.out_dir / "tail_fit.csv", [&](std::ostream& os) {
        os << "kappa,beta,r_join,kappa_hat,beta_hat,kappa_rel_err,beta_rel_err,rms_residual\n";
        for (const auto& cs : cases) {
            const auto p = CurvatureProfile::make(cs.kappa, cs.beta, cs.r_join);
            const auto fit = riccati_tail_fit(solve_warping(p, 201.0, o.tol), 50.0, 200.0);
            const double ek = rel_err(fit.kappa_hat, cs.kappa), eb = rel_err(fit.beta_hat, cs.beta);
            if (!(ek < 0.01 && eb < 0.02)) c.passed = false;
            os << cs.kappa << ',' << cs.beta << ',' << cs.r_join << ',' << fit.kappa_hat << ',' << fit.beta_hat << ','
               << ek << ',' << eb << ',' << fit.rms_residual << '\n';
            detail << (detail.tellp() > 0 ? "; " : "") << "(" << cs.kappa << "," << cs.beta << "): beta err " << fmt_num(eb);
        }
    });
    c.detail = detail.str();
    return c;
}

inline CriterionOutcome criterion_hardy_suite(const AcceptanceOptions& o)
{
    CriterionOutcome c{3, "Hardy borderline test function and eigenvalue", true, ""};
    struct Row { double delta, k, R; HardyQuotient q; double lambda; };
    std::vector<std::pair<double, double>> dk;
    for (double d : {1.0, 2.0, 4.0, 8.0, 12.0}) dk.emplace_back(d, std::ceil(2.0 * std::exp(12.0 / d)) + 1.0);
    const double Rs[] = {1.0, 10.0, 100.0};
    const auto rows = parallel_map(dk.size() * 3, o.threads, [&](std::size_t i) {
        const auto [d, k] = dk[i / 3];
        const HardyProblem p(Rs[i % 3], k, d);
        return Row{d, k, p.R, hardy_test_quotient(p), hardy_first_eigenvalue(p, 1e-13)};
    });
    double worst_scale = 0.0;
    write_file(o.out_dir / "hardy.csv", [&](std::ostream& os) {
        os << "delta,k,R,numerator,bound,lambda1\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            const double base = rows[i - i % 3].lambda;
            if (!(r.q.numerator <= r.q.bound + 1e-9 && r.q.numerator < 0.0 && r.lambda < 0.0)) c.passed = false;
            const double scale = rel_err(r.lambda * r.R * r.R, base);
            worst_scale = std::max(worst_scale, scale);
            os << r.delta << ',' << r.k << ',' << r.R << ',' << r.q.numerator << ',' << r.q.bound << ',' << r.lambda << '\n';
        }
    });
    if (!(worst_scale < 1e-6)) c.passed = false;
    c.detail = "15 cells; worst scale-law deviation " + fmt_num(worst_scale);
    return c;
}

inline CriterionOutcome criterion_lemma21(const AcceptanceOptions& o)
{
    CriterionOutcome c{4, "radial ground state positivity and monotonicity", true, ""};
    struct Cell { int n; double beta; double L; };
    std::vector<Cell> cells;
    for (int n : {2, 3, 5})
        for (double b : {0.0, 2.0})
            for (double L : {10.0, 50.0}) cells.push_back({n, b, L});
    struct Out { double eigenvalue; int nodes; bool ok; std::size_t violations; };
    const auto outs = parallel_map(cells.size(), o.threads, [&](std::size_t i) {
        const auto& cl = cells[i];
        const auto p = CurvatureProfile::make(1.0, cl.beta, cl.beta > 0.0 ? 2.0 : 1.0);
        const ModelSpace m(cl.n, solve_warping(p, cl.L * 1.001 + 1.0, o.tol));
        const auto res = first_dirichlet_eigen(m, cl.L, o.tol);
        const auto rep = check_lemma21(res);
        return Out{res.eigenvalue, res.node_count, rep.passed, rep.violations.size()};
    });
    const auto flat3 = first_dirichlet_eigen(ModelSpace(3, solve_warping(CurvatureProfile::zero(), 4.0, o.tol)),
                                             std::numbers::pi, o.tol);
    const auto flat2 = first_dirichlet_eigen(ModelSpace(2, solve_warping(CurvatureProfile::zero(), 2.0, o.tol)), 1.0, o.tol);
    const double j0 = oracle::bessel_j0_first_zero();
    write_file(o.out_dir / "lemma21.csv", [&](std::ostream& os) {
        os << "n,kappa,beta,L,eigenvalue,node_count,lemma21,violations\n";
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (!outs[i].ok || outs[i].nodes != 0) c.passed = false;
            os << cells[i].n << ",1," << cells[i].beta << ',' << cells[i].L << ',' << outs[i].eigenvalue << ','
               << outs[i].nodes << ',' << (outs[i].ok ? "pass" : "fail") << ',' << outs[i].violations << '\n';
        }
        os << "3,0,0," << std::numbers::pi << ',' << flat3.eigenvalue << ',' << flat3.node_count << ",reference,1\n";
        os << "2,0,0,1," << flat2.eigenvalue << ',' << flat2.node_count << ",reference," << j0 * j0 << '\n';
    });
    const double e3 = std::abs(flat3.eigenvalue - 1.0), e2 = std::abs(flat2.eigenvalue - j0 * j0);
    if (!(e3 <= 1e-6 && e2 <= 1e-4)) c.passed = false;
    c.detail = "12 cells; flat n=3 error " + fmt_num(e3) + ", flat n=2 vs Bessel oracle " + fmt_num(e2);
    return c;
}

inline CriterionOutcome criterion_gap(const AcceptanceOptions& o)
{
    CriterionOutcome c{5, "model-ball gap below the essential spectrum", true, ""};
    const auto p = CurvatureProfile::make(1.0, 2.0, 2.0);
    const auto rep = verify_prop22(3, p, 6.0, 15.0, {5.0, 10.0, 20.0, 40.0}, o.tol, o.threads);
    write_file(o.out_dir / "prop22.csv", [&](std::ostream& os) { write_prop22_csv(os, rep); });
    if (!rep.ok()) c.passed = false;
    double min_margin = std::numeric_limits<double>::infinity();
    for (const auto& r : rep.rows) {
        if (!r.passed) continue;
        min_margin = std::min(min_margin, r.margin());
        if (!(r.margin() > 10.0 * o.tol && r.form_inequality() && std::abs(r.chain_residual()) < 1e-6)) c.passed = false;
    }
    c.detail = "r_star " + (rep.r_star ? fmt_num(*rep.r_star) : std::string("none")) + ", min margin " +
               fmt_num(min_margin);
    return c;
}

inline CriterionOutcome criterion_oracle(const AcceptanceOptions& o)
{
    CriterionOutcome c{6, "Pruefer counts against the matrix oracle", true, ""};
    struct Draw { int n; double kappa, beta, r_join, L, eps, E_factor; };
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::uniform_int_distribution<int> nd(2, 5);
    std::vector<Draw> draws;
    for (int i = 0; i < 20; ++i) {
        Draw d{};
        d.n = nd(rng);
        d.kappa = 0.25 + 2.0 * U(rng);
        d.beta = 10.0 * U(rng);
        d.r_join = CurvatureProfile::default_r_join(d.kappa, d.beta) * (1.0 + U(rng));
        d.L = 10.0 + 40.0 * U(rng);
        d.eps = 0.05 + 0.45 * U(rng);
        d.E_factor = 0.5 + 1.5 * U(rng);
        draws.push_back(d);
    }
    constexpr int points = 4000;
    struct Out { double E; int pruefer; int matrix; };
    const auto outs = parallel_map(draws.size(), o.threads, [&](std::size_t i) {
        const auto& d = draws[i];
        const ModelSpace m(d.n, solve_warping(CurvatureProfile::make(d.kappa, d.beta, d.r_join), d.L + 1.0,
                                              std::min(o.tol, 1e-9)));
        const double E = m.essential_bottom() * d.E_factor;
        const auto x = oracle::mapped_grid(d.eps, d.L, points);
        const auto ev = oracle::dirichlet_fd_eigenvalues([&](double t) { return effective_potential(m, t); }, x);
        return Out{E, count_eigenvalues_below(m, d.L, E, d.eps), oracle::count_below(ev, E)};
    });
    int mismatches = 0;
    write_file(o.out_dir / "oracle.csv", [&](std::ostream& os) {
        os << "n,kappa,beta,r_join,L,eps_origin,E,pruefer_count,matrix_count\n";
        for (std::size_t i = 0; i < draws.size(); ++i) {
            const auto& d = draws[i];
            if (outs[i].pruefer != outs[i].matrix) ++mismatches;
            os << d.n << ',' << d.kappa << ',' << d.beta << ',' << d.r_join << ',' << d.L << ',' << d.eps << ','
               << outs[i].E << ',' << outs[i].pruefer << ',' << outs[i].matrix << '\n';
        }
    });
    c.passed = mismatches == 0;
    c.detail = std::to_string(draws.size() - mismatches) + "/20 exact matches (" + std::to_string(points) + " points)";
    return c;
}

inline CriterionOutcome criterion_dichotomy(const AcceptanceOptions& o)
{
    CriterionOutcome c{7, "finite versus infinite discrete spectrum", true, ""};
    const std::vector<double> Ls{1e2, 1e3, 1e4};
    const auto s2 = threshold_sweep(2, 1.0, {0.5, 30.0}, Ls, 0.01, o.tol, o.threads);
    const auto s3 = threshold_sweep(3, 1.0, {0.1, 10.0}, Ls, 0.01, o.tol, o.threads);
    write_file(o.out_dir / "sweep.csv", [&](std::ostream& os) {
        std::ostringstream a, b;
        write_sweep_csv(a, 2, 1.0, s2);
        write_sweep_csv(b, 3, 1.0, s3);
        const std::string tail = b.str();
        os << a.str() << tail.substr(tail.find('\n') + 1);
    });
    std::ostringstream detail;
    auto check = [&](const SweepCell& cell, int n) {
        const auto& pts = cell.curve.points;
        bool ok = cell.curve.eps_converged && cell.agrees();
        if (cell.predicted == Growth::growing)
            ok = ok && pts[1].count - pts[0].count >= 1 && pts[2].count - pts[1].count >= 1;
        else
            ok = ok && pts[1].count == pts[2].count;
        if (!ok) c.passed = false;
        detail << (detail.tellp() > 0 ? "; " : "") << "n=" << n << " beta=" << cell.beta << " " << to_string(cell.curve.classification) << " ("
               << pts[0].count << "," << pts[1].count << "," << pts[2].count << ")";
    };
    for (const auto& cell : s2) check(cell, 2);
    for (const auto& cell : s3) check(cell, 3);
    c.detail = detail.str();
    return c;
}

inline CriterionOutcome criterion_hardy_inequality(const AcceptanceOptions& o)
{
    CriterionOutcome c{8, "Hardy inequality with boundary term", true, ""};
    struct Target { std::string name; CurvatureProfile K; };
    const Target targets[] = {
        {"hyperbolic", CurvatureProfile::constant(-1.0, ProfileKind::radial_curvature)},
        {"kappa1_beta0.5", CurvatureProfile::make(1.0, 0.5, 1.0, ProfileKind::radial_curvature)}};
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<RadialBump> bumps;
    for (int i = 0; i < 20; ++i) {
        const double lo = 2.05 + 40.0 * U(rng);
        const double hi = lo + 0.5 + (49.9 - lo - 0.5) * U(rng);
        bumps.push_back({0.5 * (lo + hi), 0.5 * (hi - lo), 0.5 + 1.5 * U(rng)});
    }
    double worst_full = std::numeric_limits<double>::infinity();
    double worst_interior = std::numeric_limits<double>::infinity();
    write_file(o.out_dir / "hardy_inequality.csv", [&](std::ostream& os) {
        os << "n,target,center,half_width,amplitude,lhs,rhs_interior,rhs_boundary\n";
        for (int n : {2, 3})
            for (const auto& t : targets) {
                const RotSymManifold man(n, t.K, 51.0, 1e-10);
                for (const auto& b : bumps) {
                    const auto r = verify_hardy_inequality(man, 1.0, b);
                    worst_full = std::min(worst_full, r.lhs - r.rhs_interior - r.rhs_boundary);
                    worst_interior = std::min(worst_interior, r.lhs - r.rhs_interior);
                    os << n << ',' << t.name << ',' << b.center << ',' << b.half_width << ',' << b.amplitude << ','
                       << r.lhs << ',' << r.rhs_interior << ',' << r.rhs_boundary << '\n';
                }
            }
    });
    const RotSymManifold flat(2, CurvatureProfile::zero(ProfileKind::radial_curvature), 11.0, 1e-13);
    const double w1 = std::abs(hardy_weight(flat, 1.0)), w10 = std::abs(hardy_weight(flat, 10.0));
    c.passed = worst_full >= -1e-8 && worst_interior >= -1e-8 && w1 < 1e-12 && w10 < 1e-12;
    c.detail = "80 cases; min slack " + fmt_num(std::min(worst_full, worst_interior)) + "; flat |W| " + fmt_num(w1) +
               ", " + fmt_num(w10);
    return c;
}

inline CriterionOutcome criterion_transplant(const AcceptanceOptions& o)
{
    CriterionOutcome c{9, "transplanted Rayleigh quotient", true, ""};
    const auto model = CurvatureProfile::make(1.0, 2.0, 2.0);
    const auto target = CurvatureProfile::make(1.0, 3.0, 2.0, ProfileKind::radial_curvature);
    const auto rep = transplant_check(3, model, target, 1.0, 50.0, std::min(o.tol, 1e-9));
    write_file(o.out_dir / "transplant.csv", [&](std::ostream& os) { write_transplant_csv(os, rep); });
    c.passed = rep.margin() > 0.0 && rep.margin() >= rep.correction - 1e-6;
    c.detail = "quotient " + fmt_num(rep.quotient) + " < " + fmt_num(rep.lambda_d_model) + "; margin " +
               fmt_num(rep.margin()) + " >= correction " + fmt_num(rep.correction);
    return c;
}

} // namespace detail

/// Run criteria 1-9, reporting each outcome through `report` as soon as it is known.
/// Solver failures inside a criterion mark that criterion failed and the suite continues.
inline std::vector<CriterionOutcome> run_acceptance(const AcceptanceOptions& o,
                                                    const std::function<void(const CriterionOutcome&)>& report = {})
{
    std::filesystem::create_directories(o.out_dir);
    using Fn = CriterionOutcome (*)(const AcceptanceOptions&);
    const std::pair<int, Fn> criteria[] = {
        {1, detail::criterion_closed_form_warping}, {2, detail::criterion_tail_fit},
        {3, detail::criterion_hardy_suite},         {4, detail::criterion_lemma21},
        {5, detail::criterion_gap},                 {6, detail::criterion_oracle},
        {7, detail::criterion_dichotomy},           {8, detail::criterion_hardy_inequality},
        {9, detail::criterion_transplant}};
    std::vector<CriterionOutcome> out;
    for (const auto& [id, fn] : criteria) {
        CriterionOutcome c;
        try {
            c = fn(o);
        } catch (const std::exception& e) {
            c = {id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what()};
        }
        if (report) report(c);
        out.push_back(c);
    }
    detail::write_file(o.out_dir / "acceptance.csv", [&](std::ostream& os) {
        os << "criterion,title,status,detail\n";
        for (const auto& c : out)
            os << c.id << ",\"" << c.title << "\"," << (c.passed ? "pass" : "fail") << ",\"" << c.detail << "\"\n";
    });
    return out;
}

inline std::string format_outcome(const CriterionOutcome& c)
{
    return "criterion " + std::to_string(c.id) + ": " + (c.passed ? "PASS" : "FAIL") + "  " + c.title + "  [" +
           c.detail + "]";
}

} // namespace warpspec
