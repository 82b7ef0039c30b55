#pragma once

// Closed-form expected net present value of the double barrier strategy,
// barrier sensitivity, and location of the optimal upper barrier.

#include <cmath>
#include <string>
#include <utility>

#include "scalekernel/errors.hpp"
#include "scalekernel/scale.hpp"

namespace scalekernel::valuation {

using scale::ScaleKernel;
using scale::WOrder;

/// A double barrier problem: pay out surplus above `a`, inject capital at 0
/// with unit cost `kappa` (> 1), discount at rate q taken from the kernel.
struct BarrierProblem {
    BarrierProblem(ScaleKernel kernel_, double a_, double kappa_)
        : kernel(std::move(kernel_)), a(a_), kappa(kappa_), q(kernel.q()) {
        if (!(a > 0.0)) throw InvalidParameter("barrier level a must be positive");
        if (!(kappa > 1.0)) throw InvalidParameter("injection cost kappa must exceed 1");
    }

    ScaleKernel kernel;
    double a;
    double kappa;
    double q;
};

struct BarrierSearchConfig {
    double a_max = 50.0;
    double grid_growth = 1.5;
    double root_tol = 1e-10;
    int max_iters = 256;
};

namespace detail {

inline double w12_0a_checked(const ScaleKernel& k, double a) {
    const double denom = eval_W(k, 0.0, a, WOrder::W12);
    if (!(std::fabs(denom) > 1e-300))
        throw DegenerateKernel("W12(0,a) collapsed at a=" + std::to_string(a) +
                               "; eigenfunction backend failure");
    return denom;
}

}  // namespace detail

/// Value at the two barriers: v0 = V^a(0), va = V^a(a).
inline std::pair<double, double> boundary_values(const BarrierProblem& prob) {
    const ScaleKernel& k = prob.kernel;
    const double denom = detail::w12_0a_checked(k, prob.a);
    const double v0 = (eval_W(k, 0.0, 0.0, WOrder::W1) -
                       prob.kappa * eval_W(k, prob.a, 0.0, WOrder::W1)) /
                      denom;
    const double va = (eval_W(k, 0.0, prob.a, WOrder::W1) -
                       prob.kappa * eval_W(k, prob.a, prob.a, WOrder::W1)) /
                      denom;
    return {v0, va};
}

/// Expected NPV of the double barrier strategy started from surplus x.
inline double value_function(const BarrierProblem& prob, double x) {
    const ScaleKernel& k = prob.kernel;
    if (x < 0.0) {
        // an immediate injection of -x restores the surplus to 0
        return boundary_values(prob).first + prob.kappa * x;
    }
    if (x > prob.a) {
        // the surplus above a is paid out immediately
        return boundary_values(prob).second + (x - prob.a);
    }
    const double denom = detail::w12_0a_checked(k, prob.a);
    return (eval_W(k, 0.0, x, WOrder::W1) - prob.kappa * eval_W(k, prob.a, x, WOrder::W1)) /
           denom;
}

/// Barrier sensitivity numerator: varsigma(a) = W122(0,a) + kappa * W112(a,a),
/// assembled through the Sturm-Liouville reduction as
/// (2q/sigma^2(a)) [W1(0,a) - kappa s'(a)] - (2 mu(a)/sigma^2(a)) W12(0,a).
inline double varsigma(const ScaleKernel& kernel, double kappa, double a) {
    const auto c = model::coefficients(kernel.spec(), a);
    const double s2 = c.volatility * c.volatility;
    const double w1 = eval_W(kernel, 0.0, a, WOrder::W1);
    const double sp = kernel.pair().s_prime(a);
    const double w12 = eval_W(kernel, 0.0, a, WOrder::W12);
    return (2.0 * kernel.q() / s2) * (w1 - kappa * sp) - (2.0 * c.drift / s2) * w12;
}

/// Limit of varsigma as a -> 0+: -(kappa - 1) (2q/sigma^2(0)) W1(0,0), which
/// is strictly negative for kappa > 1.
inline double varsigma_zero_limit(const ScaleKernel& kernel, double kappa) {
    const double sig = kernel.spec().volatility(0.0);
    return -(kappa - 1.0) * (2.0 * kernel.q() / (sig * sig)) *
           eval_W(kernel, 0.0, 0.0, WOrder::W1);
}

/// d/da of V^a(x) at fixed x (the barrier sensitivity of the value).
/// For x > a the derivative equals its value at x = a.
inline double value_slope_in_barrier(const BarrierProblem& prob, double x) {
    if (x < 0.0) throw DomainError("value_slope_in_barrier requires x >= 0");
    const double xe = std::min(x, prob.a);
    const double denom = detail::w12_0a_checked(prob.kernel, prob.a);
    return -eval_W(prob.kernel, 0.0, xe, WOrder::W1) *
           varsigma(prob.kernel, prob.kappa, prob.a) / (denom * denom);
}

/// One-sided slopes of the value function at 0+ and a-. The smooth-fit
/// contract is slope_at_zero = kappa and slope_at_a = 1.
inline std::pair<double, double> smooth_fit_diagnostics(const BarrierProblem& prob) {
    const ScaleKernel& k = prob.kernel;
    const double denom = detail::w12_0a_checked(k, prob.a);
    const double at_zero = (eval_W(k, 0.0, 0.0, WOrder::W12) -
                            prob.kappa * eval_W(k, prob.a, 0.0, WOrder::W12)) /
                           denom;
    const double at_a = (eval_W(k, 0.0, prob.a, WOrder::W12) -
                         prob.kappa * eval_W(k, prob.a, prob.a, WOrder::W12)) /
                        denom;
    return {at_zero, at_a};
}

/// Locates the first sign change of varsigma by geometric bracketing followed
/// by bisection. Throws NoBracket when varsigma stays negative up to a_max.
inline double optimal_barrier(const ScaleKernel& kernel, double kappa,
                              const BarrierSearchConfig& cfg = {}) {
    if (!(kappa > 1.0)) throw InvalidParameter("optimal_barrier requires kappa > 1");
    if (!(cfg.a_max > 0.0) || !(cfg.grid_growth > 1.0) || !(cfg.root_tol > 0.0))
        throw InvalidParameter("invalid BarrierSearchConfig");

    auto vs = [&](double a) { return varsigma(kernel, kappa, a); };

    double lo = 1e-3;
    double f_lo = vs(lo);
    if (!std::isfinite(f_lo))
        throw NoBracket("varsigma is non-finite at the bracket floor");

    double hi, f_hi;
    if (f_lo > 0.0) {
        // the sign change sits below the standard floor; shrink toward 0
        hi = lo;
        f_hi = f_lo;
        for (int i = 0;; ++i) {
            lo = hi / cfg.grid_growth;
            f_lo = vs(lo);
            if (f_lo <= 0.0) break;
            hi = lo;
            f_hi = f_lo;
            if (lo < 1e-12 || i >= cfg.max_iters)
                throw NoBracket("varsigma stays positive down to a=" + std::to_string(lo));
        }
    } else {
        hi = lo;
        f_hi = f_lo;
        for (int i = 0;; ++i) {
            lo = hi;
            f_lo = f_hi;
            hi = std::min(hi * cfg.grid_growth, cfg.a_max);
            f_hi = vs(hi);
            if (!std::isfinite(f_hi))
                throw NoBracket("varsigma overflowed at a=" + std::to_string(hi) +
                                "; last finite value " + std::to_string(f_lo));
            if (f_hi > 0.0) break;
            if (hi >= cfg.a_max || i >= cfg.max_iters)
                throw NoBracket("varsigma never turns positive below a_max=" +
                                std::to_string(cfg.a_max) + "; last value " +
                                std::to_string(f_hi));
        }
    }

    // bisection on the sign change
    (void)f_hi;
    for (int i = 0; i < cfg.max_iters && hi - lo > cfg.root_tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (vs(mid) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace scalekernel::valuation
