#pragma once

// The bivariate q-scale kernel W(x, y) = [phi+(x) phi-(y) - phi-(x) phi+(y)] / c_q,
// its partial derivatives, and the two-sided exit functionals built from it.
//
// Higher derivatives never use numerical differentiation: since both basis
// solutions satisfy the Sturm-Liouville equation, phi'' = (2q phi - 2 mu phi') / sigma^2,
// so every third-order kernel derivative collapses to combinations of W, W1,
// W12 and coefficient values.

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "scalekernel/eigen.hpp"
#include "scalekernel/errors.hpp"
#include "scalekernel/ode.hpp"

namespace scalekernel::scale {

using eigen::EigenPair;
using model::DiffusionSpec;

enum class WOrder { W, W1, W12, W122, W112, W11 };
enum class DerivMode { Reduction, DirectOde };

/// Two-sided exit transforms from y out of (x, z):
/// up = E_y[e^(-q tau_z); tau_z < tau_x], down = E_y[e^(-q tau_x); tau_x < tau_z].
struct ExitFunctionals {
    double up;
    double down;
};

class ScaleKernel {
  public:
    explicit ScaleKernel(EigenPair pair, DerivMode mode = DerivMode::Reduction)
        : pair_(std::move(pair)), mode_(mode) {
        row_ctl_.rel_tol = 1e-12;
        row_ctl_.abs_tol = 1e-14;
    }

    const EigenPair& pair() const { return pair_; }
    double q() const { return pair_.q(); }
    DerivMode deriv_mode() const { return mode_; }
    const DiffusionSpec& spec() const { return pair_.spec(); }
    const ode::StepControl& row_control() const { return row_ctl_; }

  private:
    EigenPair pair_;
    DerivMode mode_;
    ode::StepControl row_ctl_;
};

namespace detail {

// W(x, .) and W1(x, .) satisfy the Sturm-Liouville equation in the second
// argument; integrating it from the diagonal sidesteps the catastrophic
// cancellation of the product form for separated arguments.
inline double row_integrate(const ScaleKernel& k, double x, double y, WOrder order) {
    const DiffusionSpec& spec = k.spec();
    const double q = k.q();
    const double sx = k.pair().s_prime(x);
    ode::State<2> h0;
    if (order == WOrder::W) {
        h0 = {0.0, -sx};  // W(x,x) = 0, d/dy W(x,y)|_{y=x} = -s'(x)
    } else {
        h0 = {sx, 0.0};  // W1(x,x) = s'(x), W12(x,x) = 0
    }
    if (y == x) return h0[0];
    auto rhs = [&spec, q](double u, const ode::State<2>& s, ode::State<2>& ds) {
        const double sig = spec.volatility(u);
        const double inv = 2.0 / (sig * sig);
        ds[0] = s[1];
        ds[1] = inv * (q * s[0] - spec.drift(u) * s[1]);
    };
    auto res = ode::integrate<2>(rhs, x, h0, y, k.row_control());
    if (!res.reached_end) throw IntegrationFailure("row integration stopped early");
    return res.y[0];
}

// Product form with a relative-cancellation estimate; falls back to the
// direct ODE row once the estimate crosses the guard threshold.
inline double guarded_difference(const ScaleKernel& k, double x, double y, double t1,
                                 double t2, WOrder order) {
    const double num = t1 - t2;
    const double mag = std::fabs(t1) + std::fabs(t2);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double guard = 1e-6;
    if (std::isfinite(mag) && num != 0.0 && eps * mag <= guard * std::fabs(num))
        return num / k.pair().cq();
    if (order == WOrder::W && (x == y || mag == 0.0)) return 0.0;  // exact diagonal zero
    // estimated cancellation beyond the guard threshold, or overflow of the
    // product form: evaluate through the direct ODE row instead (this also
    // yields the exact diagonal initial value for W1)
    return row_integrate(k, x, y, order);
}

}  // namespace detail

/// Evaluates W and its partial derivatives. The digit-1 superscripts of the
/// convention W1, W12, W122, W112, W11 mark derivatives in the first (u) and
/// second (z) slots.
inline double eval_W(const ScaleKernel& k, double x, double y, WOrder order) {
    const EigenPair& pair = k.pair();
    const auto ex = pair.eval(x);
    const auto ey = pair.eval(y);
    const double cq = pair.cq();

    auto w = [&] {
        return detail::guarded_difference(k, x, y, ex.plus * ey.minus,
                                          ex.minus * ey.plus, WOrder::W);
    };
    auto w1 = [&] {
        return detail::guarded_difference(k, x, y, ex.dplus * ey.minus,
                                          ex.dminus * ey.plus, WOrder::W1);
    };
    auto w12 = [&] { return (ex.dplus * ey.dminus - ex.dminus * ey.dplus) / cq; };

    switch (order) {
        case WOrder::W:
            return w();
        case WOrder::W1:
            return w1();
        case WOrder::W12:
            return w12();
        case WOrder::W122: {
            const auto c = model::coefficients(k.spec(), y);
            const double s2 = c.volatility * c.volatility;
            return (2.0 * k.q() / s2) * w1() - (2.0 * c.drift / s2) * w12();
        }
        case WOrder::W112: {
            const auto c = model::coefficients(k.spec(), x);
            const double s2 = c.volatility * c.volatility;
            // W1 with swapped arguments comes from the same point evaluations
            const double w1_yx = detail::guarded_difference(
                k, y, x, ey.dplus * ex.minus, ey.dminus * ex.plus, WOrder::W1);
            return -(2.0 * k.q() / s2) * w1_yx - (2.0 * c.drift / s2) * w12();
        }
        case WOrder::W11: {
            const auto c = model::coefficients(k.spec(), x);
            const double s2 = c.volatility * c.volatility;
            return (2.0 * k.q() / s2) * w() - (2.0 * c.drift / s2) * w1();
        }
    }
    throw DomainError("unknown derivative order");
}

/// Two-sided exit Laplace transforms for x < y < z:
/// up = W(y,x)/W(z,x), down = W(z,y)/W(z,x).
inline ExitFunctionals exit_functionals(const ScaleKernel& k, double x, double y,
                                        double z) {
    if (!(x < y && y < z))
        throw OrderingError("exit_functionals requires x < y < z");
    const double denom = eval_W(k, z, x, WOrder::W);
    return {eval_W(k, y, x, WOrder::W) / denom, eval_W(k, z, y, WOrder::W) / denom};
}

/// Evaluates y -> W(x, y) (order W) or y -> W1(x, y) (order W1) along a sorted
/// list of targets by integrating the Sturm-Liouville equation in the second
/// argument outward from the diagonal.
inline std::vector<double> stabilized_W_row(const ScaleKernel& k, double x,
                                            std::span<const double> y_targets,
                                            WOrder order) {
    if (k.deriv_mode() != DerivMode::DirectOde)
        throw DomainError("stabilized_W_row requires a DirectOde kernel");
    if (order != WOrder::W && order != WOrder::W1)
        throw DomainError("stabilized_W_row supports orders W and W1 only");
    for (std::size_t i = 1; i < y_targets.size(); ++i)
        if (!(y_targets[i] >= y_targets[i - 1]))
            throw DomainError("y_targets must be sorted ascending");

    const DiffusionSpec& spec = k.spec();
    const double q = k.q();
    const double sx = k.pair().s_prime(x);
    auto rhs = [&spec, q](double u, const ode::State<2>& s, ode::State<2>& ds) {
        const double sig = spec.volatility(u);
        const double inv = 2.0 / (sig * sig);
        ds[0] = s[1];
        ds[1] = inv * (q * s[0] - spec.drift(u) * s[1]);
    };
    const ode::State<2> diag =
        order == WOrder::W ? ode::State<2>{0.0, -sx} : ode::State<2>{sx, 0.0};

    std::vector<double> out(y_targets.size());
    // march upward from the diagonal through targets >= x
    ode::State<2> state = diag;
    double from = x;
    for (std::size_t i = 0; i < y_targets.size(); ++i) {
        const double y = y_targets[i];
        if (y < x) continue;
        if (y != from) {
            auto res = ode::integrate<2>(rhs, from, state, y, k.row_control());
            if (!res.reached_end)
                throw IntegrationFailure("row integration stopped early");
            state = res.y;
            from = y;
        }
        out[i] = state[0];
    }
    // march downward through targets < x in descending order
    state = diag;
    from = x;
    for (std::size_t j = y_targets.size(); j-- > 0;) {
        const double y = y_targets[j];
        if (y >= x) continue;
        auto res = ode::integrate<2>(rhs, from, state, y, k.row_control());
        if (!res.reached_end) throw IntegrationFailure("row integration stopped early");
        state = res.y;
        from = y;
        out[j] = state[0];
    }
    return out;
}

}  // namespace scalekernel::scale
