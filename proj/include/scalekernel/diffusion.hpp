#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "scalekernel/errors.hpp"
#include "scalekernel/quadrature.hpp"

namespace scalekernel::model {

enum class Family { BrownianDrift, OrnsteinUhlenbeck, ShiryaevLog, Custom };

/// Pointwise drift/volatility pair.
struct Coefficients {
    double drift;
    double volatility;
};

using CoefficientFn = std::function<double(double)>;

/// A regular one-dimensional diffusion on the whole real line, described by
/// its drift and volatility coefficients. Immutable after construction.
class DiffusionSpec {
  public:
    static DiffusionSpec brownian(double mu0, double sigma0) {
        if (!(sigma0 > 0.0)) throw InvalidParameter("BrownianDrift requires sigma0 > 0");
        DiffusionSpec s(Family::BrownianDrift);
        s.mu0_ = mu0;
        s.sigma0_ = sigma0;
        return s;
    }

    /// dX = -theta X dt + dB
    static DiffusionSpec ornstein_uhlenbeck(double theta) {
        if (!(theta > 0.0)) throw InvalidParameter("OrnsteinUhlenbeck requires theta > 0");
        DiffusionSpec s(Family::OrnsteinUhlenbeck);
        s.theta_ = theta;
        return s;
    }

    /// dX = nu (e^(-2 l X) - 1) dt + dB
    static DiffusionSpec shiryaev_log(double nu, double l) {
        if (!(nu > 0.0)) throw InvalidParameter("ShiryaevLog requires nu > 0");
        if (!(l > 0.0)) throw InvalidParameter("ShiryaevLog requires l > 0");
        DiffusionSpec s(Family::ShiryaevLog);
        s.nu_ = nu;
        s.l_ = l;
        return s;
    }

    static DiffusionSpec custom(CoefficientFn mu, CoefficientFn sigma) {
        if (!mu || !sigma) throw InvalidParameter("Custom requires both coefficient callables");
        DiffusionSpec s(Family::Custom);
        s.custom_mu_ = std::move(mu);
        s.custom_sigma_ = std::move(sigma);
        return s;
    }

    Family family() const { return family_; }

    double drift(double x) const {
        switch (family_) {
            case Family::BrownianDrift: return mu0_;
            case Family::OrnsteinUhlenbeck: return -theta_ * x;
            case Family::ShiryaevLog: return nu_ * std::expm1(-2.0 * l_ * x);
            case Family::Custom: return eval_custom(custom_mu_, x, "drift");
        }
        return 0.0;  // unreachable
    }

    double volatility(double x) const {
        switch (family_) {
            case Family::BrownianDrift: return sigma0_;
            case Family::OrnsteinUhlenbeck: return 1.0;
            case Family::ShiryaevLog: return 1.0;
            case Family::Custom: return eval_custom(custom_sigma_, x, "volatility");
        }
        return 0.0;  // unreachable
    }

    /// mu'(x); analytic for the named families, central difference for Custom.
    double drift_derivative(double x) const {
        switch (family_) {
            case Family::BrownianDrift: return 0.0;
            case Family::OrnsteinUhlenbeck: return -theta_;
            case Family::ShiryaevLog: return -2.0 * l_ * nu_ * std::exp(-2.0 * l_ * x);
            case Family::Custom: {
                const double h = 1e-5;
                return (drift(x + h) - drift(x - h)) / (2.0 * h);
            }
        }
        return 0.0;  // unreachable
    }

    bool constant_volatility() const { return family_ != Family::Custom; }

    double mu0() const { return mu0_; }
    double sigma0() const { return sigma0_; }
    double theta() const { return theta_; }
    double nu() const { return nu_; }
    double l() const { return l_; }

  private:
    explicit DiffusionSpec(Family f) : family_(f) {}

    static double eval_custom(const CoefficientFn& fn, double x, const char* what) {
        double value;
        try {
            value = fn(x);
        } catch (const std::exception& e) {
            throw CoefficientDomainError(std::string("custom ") + what +
                                         " failed at x=" + std::to_string(x) + ": " + e.what());
        }
        if (!std::isfinite(value))
            throw CoefficientDomainError(std::string("custom ") + what +
                                         " is non-finite at x=" + std::to_string(x));
        return value;
    }

    Family family_;
    double mu0_ = 0.0;
    double sigma0_ = 1.0;
    double theta_ = 0.0;
    double nu_ = 0.0;
    double l_ = 0.0;
    CoefficientFn custom_mu_;
    CoefficientFn custom_sigma_;
};

/// Factory taking a flat parameter list:
///   BrownianDrift: {mu0, sigma0}; OrnsteinUhlenbeck: {theta}; ShiryaevLog: {nu, l}.
inline DiffusionSpec make_diffusion(Family family, const std::vector<double>& params) {
    switch (family) {
        case Family::BrownianDrift:
            if (params.size() != 2)
                throw InvalidParameter("BrownianDrift takes exactly {mu0, sigma0}");
            return DiffusionSpec::brownian(params[0], params[1]);
        case Family::OrnsteinUhlenbeck:
            if (params.size() != 1)
                throw InvalidParameter("OrnsteinUhlenbeck takes exactly {theta}");
            return DiffusionSpec::ornstein_uhlenbeck(params[0]);
        case Family::ShiryaevLog:
            if (params.size() != 2)
                throw InvalidParameter("ShiryaevLog takes exactly {nu, l}");
            return DiffusionSpec::shiryaev_log(params[0], params[1]);
        case Family::Custom:
            throw InvalidParameter("Custom diffusions take callables; use DiffusionSpec::custom");
    }
    throw InvalidParameter("unknown family");
}

inline Coefficients coefficients(const DiffusionSpec& spec, double x) {
    return {spec.drift(x), spec.volatility(x)};
}

/// Grid-based check of the standing assumptions plus the optimal-barrier
/// precondition (mu <= 0 and mu' < q, meaningful only for constant volatility).
struct ValidationReport {
    bool positivity_ok = false;
    bool local_integrability_ok = false;
    bool p2_precondition_ok = false;
    bool sigma_constant = false;
    std::vector<double> grid;
    std::vector<std::string> messages;
};

inline ValidationReport validate(const DiffusionSpec& spec, double q, double x_lo,
                                 double x_hi, int n_grid) {
    if (!(q > 0.0)) throw InvalidParameter("validate requires q > 0");
    if (!(x_lo < x_hi)) throw InvalidParameter("validate requires x_lo < x_hi");
    if (n_grid < 3) throw InvalidParameter("validate requires n_grid >= 3");

    ValidationReport report;
    report.grid.reserve(static_cast<std::size_t>(n_grid));
    for (int i = 0; i < n_grid; ++i)
        report.grid.push_back(x_lo + (x_hi - x_lo) * i / (n_grid - 1));

    // Assumption: sigma > 0 everywhere (checked on the grid).
    report.positivity_ok = true;
    double sigma_ref = 0.0;
    bool sigma_ref_set = false;
    report.sigma_constant = true;
    for (double x : report.grid) {
        double sig;
        try {
            sig = spec.volatility(x);
        } catch (const CoefficientDomainError& e) {
            report.positivity_ok = false;
            report.messages.emplace_back(e.what());
            continue;
        }
        if (!(sig > 0.0)) {
            report.positivity_ok = false;
            report.messages.push_back("sigma(x) <= 0 at x=" + std::to_string(x));
        }
        if (!sigma_ref_set) {
            sigma_ref = sig;
            sigma_ref_set = true;
        } else if (std::fabs(sig - sigma_ref) > 1e-12 * (1.0 + std::fabs(sigma_ref))) {
            report.sigma_constant = false;
        }
    }
    if (!report.sigma_constant)
        report.messages.emplace_back(
            "volatility is not constant on the grid; the barrier-optimality "
            "precondition check is not meaningful for this model");

    // Assumption: (1 + |mu|) / sigma^2 locally integrable, spot-checked by
    // adaptive quadrature over a handful of windows.
    report.local_integrability_ok = report.positivity_ok;
    if (report.positivity_ok) {
        QuadratureConfig qcfg;
        qcfg.abs_tol = 1e-8;
        qcfg.rel_tol = 1e-8;
        const double eps = (x_hi - x_lo) / 10.0;
        const int n_windows = 5;
        for (int w = 0; w < n_windows; ++w) {
            const double c = x_lo + (x_hi - x_lo) * (w + 0.5) / n_windows;
            try {
                const double val = integrate(
                    [&spec](double s) {
                        const double sig = spec.volatility(s);
                        return (1.0 + std::fabs(spec.drift(s))) / (sig * sig);
                    },
                    c - eps, c + eps, qcfg);
                if (!std::isfinite(val)) throw QuadratureNonConvergence("non-finite");
            } catch (const Error& e) {
                report.local_integrability_ok = false;
                report.messages.push_back("local integrability check failed on window around x=" +
                                          std::to_string(c) + ": " + e.what());
            }
        }
    }

    // Optimal-barrier precondition: mu <= 0 and mu' < q sampled on [0, a_max],
    // with a_max taken as the upper end of the validation range.
    const double a_max = std::max(x_hi, 0.0);
    report.p2_precondition_ok = report.sigma_constant;
    for (int i = 0; i < n_grid && report.p2_precondition_ok; ++i) {
        const double x = a_max * i / (n_grid - 1);
        double mu, dmu;
        try {
            mu = spec.drift(x);
            dmu = spec.drift_derivative(x);
        } catch (const CoefficientDomainError& e) {
            report.p2_precondition_ok = false;
            report.messages.emplace_back(e.what());
            break;
        }
        if (mu > 1e-12) {
            report.p2_precondition_ok = false;
            report.messages.push_back("drift is positive at x=" + std::to_string(x));
        }
        if (!(dmu < q)) {
            report.p2_precondition_ok = false;
            report.messages.push_back("drift derivative >= q at x=" + std::to_string(x));
        }
    }
    return report;
}

}  // namespace scalekernel::model
