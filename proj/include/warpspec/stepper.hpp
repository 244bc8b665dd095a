#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "warpspec/error.hpp"

namespace warpspec {

/// Error-controlled Dormand-Prince 5(4) stepping over fixed-size states.
///
/// Thin layer over Boost.Odeint's controlled stepper that adds a step budget,
/// a caller-supplied cap on the step length and a per-step hook. The hook sees
/// the accepted state and may rescale it in place (amplitude renormalisation
/// for linear problems); the FSAL derivative is refreshed afterwards.
template <std::size_t N>
class AdaptiveStepper {
public:
    using State = std::array<double, N>;

    AdaptiveStepper(double abs_tol, double rel_tol, std::size_t step_budget = 20'000'000)
        : controlled_(boost::numeric::odeint::make_controlled(
              abs_tol, rel_tol, boost::numeric::odeint::runge_kutta_dopri5<State>()))
        , budget_(step_budget)
    {
    }

    /// Advance x from t0 to exactly t1. `dt` carries the step-size guess in and out.
    /// `max_step(t, x)` bounds each attempted step; `on_step(t, x)` runs after each
    /// accepted step and may modify x.
    template <class System, class MaxStep, class OnStep>
    void advance(System&& sys, State& x, double t0, double t1, double& dt, MaxStep&& max_step, OnStep&& on_step)
    {
        double t = t0;
        State dxdt;
        sys(x, dxdt, t);
        if (!(dt > 0.0)) dt = (t1 - t0) * 1e-3;
        while (t < t1) {
            const double remaining = t1 - t;
            double trial = std::min({dt, max_step(t, x), remaining});
            // land exactly on t1 instead of leaving a sliver behind
            if (trial > 0.9 * remaining) trial = remaining;
            const double t_before = t;
            auto res = boost::numeric::odeint::fail;
            std::size_t rejects = 0;
            while (true) {
                double step = trial;
                res = controlled_.try_step(sys, x, dxdt, t, step);
                if (res == boost::numeric::odeint::success) {
                    dt = step;
                    break;
                }
                trial = step;
                if (++rejects > 200 || !(trial > 1e-15 * std::max(1.0, std::abs(t))))
                    throw SolverError("adaptive stepper: step size underflow near t = " + std::to_string(t));
            }
            if (t_before + trial == t1 || t > t1) t = t1;
            if (++steps_ > budget_) throw SolverError("adaptive stepper: step budget exhausted");
            for (double v : x)
                if (!std::isfinite(v)) throw SolverError("adaptive stepper: non-finite state at t = " + std::to_string(t));
            if (on_step(t, x)) sys(x, dxdt, t);
        }
    }

    template <class System>
    void advance(System&& sys, State& x, double t0, double t1, double& dt)
    {
        advance(
            sys, x, t0, t1, dt, [](double, const State&) { return std::numeric_limits<double>::infinity(); },
            [](double, State&) { return false; });
    }

    std::size_t steps() const { return steps_; }

private:
    using Controlled = decltype(boost::numeric::odeint::make_controlled(
        1.0, 1.0, boost::numeric::odeint::runge_kutta_dopri5<std::array<double, N>>()));
    Controlled controlled_;
    std::size_t budget_;
    std::size_t steps_ = 0;
};

} // namespace warpspec
