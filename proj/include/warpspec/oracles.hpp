#pragma once

// Independent reference computations used by the verification suites. Nothing
// here shares a code path with the shooting / Pruefer solvers it is checked against.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "warpspec/error.hpp"

namespace warpspec::oracle {

/// Nodes on [a, b] (a > 0) uniform in  sigma(x) = log x + x / x_c:  geometric close
/// to the left end, uniform (spacing ~ x_c dsigma) far from it.
inline std::vector<double> mapped_grid(double a, double b, int interior, double x_c = 1.0)
{
    detail::require(a > 0.0 && b > a && interior >= 3, "mapped grid needs 0 < a < b and >= 3 points");
    auto sigma = [x_c](double x) { return std::log(x) + x / x_c; };
    const double s0 = sigma(a), s1 = sigma(b);
    std::vector<double> x(static_cast<std::size_t>(interior) + 2);
    x.front() = a;
    x.back() = b;
    double guess = a;
    for (int i = 1; i <= interior; ++i) {
        const double target = s0 + (s1 - s0) * i / (interior + 1.0);
        double y = guess;
        for (int it = 0; it < 100; ++it) {
            const double f = sigma(y) - target;
            const double step = f / (1.0 / y + 1.0 / x_c);
            y = std::max(y - step, 0.5 * y);
            if (std::abs(step) < 1e-15 * y) break;
        }
        x[static_cast<std::size_t>(i)] = y;
        guess = y;
    }
    return x;
}

/// Eigenvalues (ascending) of the symmetric tridiagonal matrix discretising
/// -u'' + V u with Dirichlet ends on the node set `x` (lumped linear elements,
/// symmetrised by the square root of the lumped mass).
inline Eigen::VectorXd dirichlet_fd_eigenvalues(const std::function<double(double)>& V,
                                                const std::vector<double>& x)
{
    const auto m = static_cast<Eigen::Index>(x.size()) - 2;
    detail::require(m >= 3, "finite-difference oracle needs at least three interior nodes");
    Eigen::VectorXd diag(m), sub(m - 1), mass(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto k = static_cast<std::size_t>(i) + 1;
        const double hl = x[k] - x[k - 1];
        const double hr = x[k + 1] - x[k];
        mass[i] = 0.5 * (hl + hr);
        diag[i] = (1.0 / hl + 1.0 / hr) / mass[i] + V(x[k]);
    }
    for (Eigen::Index i = 0; i + 1 < m; ++i) {
        const auto k = static_cast<std::size_t>(i) + 1;
        sub[i] = -1.0 / (x[k + 1] - x[k]) / std::sqrt(mass[i] * mass[i + 1]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw SolverError("tridiagonal eigensolver failed");
    return es.eigenvalues();
}

inline int count_below(const Eigen::VectorXd& eigenvalues, double E)
{
    int c = 0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
        if (eigenvalues[i] < E) ++c;
    return c;
}

/// J_0 from its power series (accurate for |x| <~ 10).
inline double bessel_j0_series(double x)
{
    const double q = -0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

/// First positive zero of J_0 by bisection on [2, 3].
inline double bessel_j0_first_zero()
{
    double lo = 2.0, hi = 3.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bessel_j0_series(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace warpspec::oracle
