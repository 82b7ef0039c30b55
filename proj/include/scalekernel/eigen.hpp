#pragma once

// Fundamental solution pairs of the Sturm-Liouville equation
// (1/2) sigma^2 f'' + mu f' - q f = 0, the scale density s', and the
// Wronskian constant that normalizes the bivariate kernel.

#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "scalekernel/diffusion.hpp"
#include "scalekernel/errors.hpp"
#include "scalekernel/ode.hpp"
#include "scalekernel/quadrature.hpp"
#include "scalekernel/specialfn.hpp"

namespace scalekernel::eigen {

using model::DiffusionSpec;
using model::Family;

enum class Backend { ClosedForm, OdeIvp };

/// Values of the two basis solutions and their first derivatives at one point.
/// For the closed-form backend `plus` is the increasing fundamental solution
/// and `minus` the decreasing one; the IVP backend returns an arbitrary
/// independent basis, which downstream kernels are invariant to.
struct EigenEval {
    double plus;
    double minus;
    double dplus;
    double dminus;
};

struct OdeConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.0;  // 0 = no cap
    double base_point = 0.0;
};

/// Initial values (f, f', g, g') at the base point for the IVP backend.
struct IvpBasis {
    double f0 = 1.0;
    double df0 = 0.0;
    double g0 = 0.0;
    double dg0 = 1.0;
};

/// Scale density s'(x) = exp(-int_0^x 2 mu / sigma^2), anchored at 0.
/// Analytic antiderivatives for the named families, quadrature for Custom.
inline double scale_density(const DiffusionSpec& spec, double x) {
    switch (spec.family()) {
        case Family::BrownianDrift: {
            const double s2 = spec.sigma0() * spec.sigma0();
            return std::exp(-2.0 * spec.mu0() * x / s2);
        }
        case Family::OrnsteinUhlenbeck:
            return std::exp(spec.theta() * x * x);
        case Family::ShiryaevLog: {
            const double nu = spec.nu(), l = spec.l();
            return std::exp(nu * std::expm1(-2.0 * l * x) / l + 2.0 * nu * x);
        }
        case Family::Custom: {
            if (x == 0.0) return 1.0;
            const double integral = integrate(
                [&spec](double u) {
                    const double sig = spec.volatility(u);
                    return 2.0 * spec.drift(u) / (sig * sig);
                },
                0.0, x, QuadratureConfig{});
            return std::exp(-integral);
        }
    }
    return 1.0;  // unreachable
}

namespace detail {

class PairImpl {
  public:
    virtual ~PairImpl() = default;
    virtual EigenEval eval(double x) const = 0;
    virtual double cq() const = 0;
};

// Driftless Brownian motion: phi+- = exp(+-kx), k = sqrt(2q)/sigma0.
class BrownianImpl final : public PairImpl {
  public:
    BrownianImpl(double q, double sigma0) : k_(std::sqrt(2.0 * q) / sigma0) {}

    EigenEval eval(double x) const override {
        const double ep = std::exp(k_ * x), em = 1.0 / ep;
        return {ep, em, k_ * ep, -k_ * em};
    }
    double cq() const override { return 2.0 * k_; }

  private:
    double k_;
};

// Ornstein-Uhlenbeck: both solutions are Gaussian-scaled parabolic cylinder
// functions of order v = -q/theta. Working with S_v(z) = e^(z^2/4) D_v(z)
// cancels every Gaussian prefactor analytically; the derivative follows from
// S_v'(z) = v S_{v-1}(z).
class OrnsteinUhlenbeckImpl final : public PairImpl {
  public:
    OrnsteinUhlenbeckImpl(double q, double theta)
        : v_(-q / theta),
          root2theta_(std::sqrt(2.0 * theta)),
          cq_(2.0 * std::sqrt(theta * std::numbers::pi) / specialfn::gamma(q / theta)) {}

    EigenEval eval(double x) const override {
        const double z = root2theta_ * x;
        const double sp = specialfn::parabolic_d_scaled(v_, -z, qcfg_);
        const double sm = specialfn::parabolic_d_scaled(v_, z, qcfg_);
        const double sp1 = specialfn::parabolic_d_scaled(v_ - 1.0, -z, qcfg_);
        const double sm1 = specialfn::parabolic_d_scaled(v_ - 1.0, z, qcfg_);
        return {sp, sm, -root2theta_ * v_ * sp1, root2theta_ * v_ * sm1};
    }
    double cq() const override { return cq_; }

  private:
    double v_;
    double root2theta_;
    double cq_;
    QuadratureConfig qcfg_{1e-13, 1e-11, 400};
};

// Log-Shiryaev: solutions are confluent hypergeometric in z(x) = nu e^(-2lx)/l.
// The increasing solution is the second-kind (U) branch, the decreasing one
// the first-kind (M) branch; the Wronskian constant is evaluated once at 0.
class ShiryaevLogImpl final : public PairImpl {
  public:
    ShiryaevLogImpl(double q, double nu, double l)
        : nu_(nu),
          l_(l),
          lambda_(std::sqrt(nu * nu + 2.0 * q)),
          alpha_((lambda_ - nu) / (2.0 * l)),
          beta_((lambda_ + l) / l) {
        cq_ = 1.0;  // placeholder so eval() below is usable
        const EigenEval e0 = eval(0.0);
        cq_ = e0.dplus * e0.minus - e0.dminus * e0.plus;  // s'(0) = 1
        if (!(cq_ > 0.0))
            throw AssumptionViolation("ShiryaevLog Wronskian constant is not positive");
    }

    EigenEval eval(double x) const override {
        const double z = nu_ * std::exp(-2.0 * l_ * x) / l_;
        const double pref = std::exp(x * (nu_ - lambda_));
        const double u = specialfn::tricomi_u(alpha_, beta_, z, qcfg_);
        const double m = specialfn::kummer_m(alpha_, beta_, z);
        const double du = specialfn::tricomi_u_deriv(alpha_, beta_, z, qcfg_);
        const double dm = specialfn::kummer_m_deriv(alpha_, beta_, z);
        const double dzdx = -2.0 * l_ * z;
        return {pref * u, pref * m, pref * ((nu_ - lambda_) * u + du * dzdx),
                pref * ((nu_ - lambda_) * m + dm * dzdx)};
    }
    double cq() const override { return cq_; }

  private:
    double nu_, l_, lambda_, alpha_, beta_;
    double cq_;
    QuadratureConfig qcfg_{1e-13, 1e-11, 400};
};

// Generic backend: integrates two independent IVP solutions of the
// Sturm-Liouville equation outward from the base point, with dense output.
// The basis need not be the canonical (increasing, decreasing) pair: the
// bivariate kernel divides out the basis change.
class OdeIvpImpl final : public PairImpl {
  public:
    OdeIvpImpl(const DiffusionSpec& spec, double q, const OdeConfig& cfg,
               const IvpBasis& basis)
        : spec_(spec), base_(cfg.base_point) {
        auto rhs = [this, q](double x, const ode::State<4>& y, ode::State<4>& dy) {
            const double sig = spec_.volatility(x);
            if (!(sig > 0.0))
                throw AssumptionViolation("sigma <= 0 encountered at x=" + std::to_string(x));
            const double inv = 2.0 / (sig * sig);
            const double mu = spec_.drift(x);
            dy[0] = y[1];
            dy[1] = inv * (q * y[0] - mu * y[1]);
            dy[2] = y[3];
            dy[3] = inv * (q * y[2] - mu * y[3]);
        };
        ode::StepControl ctl;
        ctl.rel_tol = cfg.rel_tol;
        ctl.abs_tol = cfg.abs_tol;
        ctl.max_step = cfg.max_step;
        ctl.value_cap = 1e250;

        const ode::State<4> y0{basis.f0, basis.df0, basis.g0, basis.dg0};
        auto up = ode::integrate<4>(rhs, base_, y0, base_ + kSpan, ctl, &upper_);
        auto dn = ode::integrate<4>(rhs, base_, y0, base_ - kSpan, ctl, &lower_);
        hi_ = up.t;
        lo_ = dn.t;

        const double wr = basis.df0 * basis.g0 - basis.dg0 * basis.f0;
        if (wr == 0.0) throw InvalidParameter("IVP basis matrix is singular");
        cq_ = wr / scale_density(spec_, base_);
    }

    EigenEval eval(double x) const override {
        ode::State<4> y;
        if (x == base_) {
            y = upper_.empty() ? lower_.eval(x) : upper_.eval(x);
        } else if (x > base_) {
            if (x > hi_)
                throw IntegrationFailure("x=" + std::to_string(x) +
                                         " beyond integrated range (max " +
                                         std::to_string(hi_) + ")");
            y = upper_.eval(x);
        } else {
            if (x < lo_)
                throw IntegrationFailure("x=" + std::to_string(x) +
                                         " beyond integrated range (min " +
                                         std::to_string(lo_) + ")");
            y = lower_.eval(x);
        }
        return {y[0], y[2], y[1], y[3]};
    }
    double cq() const override { return cq_; }

  private:
    static constexpr double kSpan = 12.0;
    DiffusionSpec spec_;
    double base_;
    double cq_;
    double lo_ = 0.0, hi_ = 0.0;
    ode::DenseTable<4> upper_, lower_;
};

}  // namespace detail

/// Immutable evaluator for a fundamental solution pair of one (diffusion, q).
class EigenPair {
  public:
    EigenPair(std::shared_ptr<const detail::PairImpl> impl, DiffusionSpec spec, double q,
              Backend backend)
        : impl_(std::move(impl)), spec_(std::move(spec)), q_(q), backend_(backend) {}

    EigenEval eval(double x) const { return impl_->eval(x); }
    double cq() const { return impl_->cq(); }
    double q() const { return q_; }
    Backend backend() const { return backend_; }
    const DiffusionSpec& spec() const { return spec_; }
    double s_prime(double x) const { return scale_density(spec_, x); }

  private:
    std::shared_ptr<const detail::PairImpl> impl_;
    DiffusionSpec spec_;
    double q_;
    Backend backend_;
};

/// Analytic eigenfunction pair for BrownianDrift (driftless only),
/// OrnsteinUhlenbeck and ShiryaevLog.
inline EigenPair closed_form_eigenpair(const DiffusionSpec& spec, double q) {
    if (!(q > 0.0)) throw InvalidParameter("eigenpair requires q > 0");
    switch (spec.family()) {
        case Family::BrownianDrift:
            if (spec.mu0() != 0.0)
                throw UnsupportedFamily(
                    "no closed form for Brownian motion with drift; use the ODE backend");
            return EigenPair(std::make_shared<detail::BrownianImpl>(q, spec.sigma0()), spec,
                             q, Backend::ClosedForm);
        case Family::OrnsteinUhlenbeck:
            return EigenPair(std::make_shared<detail::OrnsteinUhlenbeckImpl>(q, spec.theta()),
                             spec, q, Backend::ClosedForm);
        case Family::ShiryaevLog:
            return EigenPair(
                std::make_shared<detail::ShiryaevLogImpl>(q, spec.nu(), spec.l()), spec, q,
                Backend::ClosedForm);
        case Family::Custom:
            throw UnsupportedFamily("no closed form for Custom coefficients");
    }
    throw UnsupportedFamily("unknown family");
}

/// Numeric backend: any independent IVP basis works because every downstream
/// kernel value is basis-invariant.
inline EigenPair numeric_eigenpair(const DiffusionSpec& spec, double q,
                                   const OdeConfig& cfg = {},
                                   const IvpBasis& basis = {}) {
    if (!(q > 0.0)) throw InvalidParameter("eigenpair requires q > 0");
    return EigenPair(std::make_shared<detail::OdeIvpImpl>(spec, q, cfg, basis), spec, q,
                     Backend::OdeIvp);
}

/// Closed form when available, ODE backend otherwise.
inline EigenPair make_eigenpair(const DiffusionSpec& spec, double q,
                                const OdeConfig& cfg = {}) {
    try {
        return closed_form_eigenpair(spec, q);
    } catch (const UnsupportedFamily&) {
        return numeric_eigenpair(spec, q, cfg);
    }
}

}  // namespace scalekernel::eigen
