#pragma once

// Monte Carlo oracle for the double barrier strategy: Euler-Maruyama steps
// with projection at both barriers (clip-and-account), counter-based
// randomness, and partition-independent accumulation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "scalekernel/diffusion.hpp"
#include "scalekernel/errors.hpp"
#include "scalekernel/rng.hpp"

namespace scalekernel::mc {

using model::DiffusionSpec;
using model::Family;

struct SimConfig {
    double dt = 1e-4;
    double horizon = 40.0;
    long n_paths = 200000;
    std::uint64_t seed = 1u;
    bool antithetic = false;
    /// Required bound on the e^(-q T) truncation factor, checked at run time.
    double truncation_tol = 1e-8;
};

/// Per-path accounting of the regulated process.
struct PathResult {
    double pv_dividends = 0.0;
    double pv_injections = 0.0;
    double total_dividends = 0.0;
    double total_injections = 0.0;
    long switches = 0;  // alternations between the two regulation boundaries
    double final_state = 0.0;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n_paths = 0;
    double truncation_bound = 0.0;
};

namespace detail {

inline void check_config(const SimConfig& cfg, double q) {
    if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(cfg.dt < cfg.horizon)) throw ConfigError("dt must be smaller than horizon");
    if (cfg.n_paths < 1) throw ConfigError("n_paths must be at least 1");
    if (!(q > 0.0)) throw ConfigError("q must be positive");
    const double tail = std::exp(-q * cfg.horizon);
    if (tail > cfg.truncation_tol)
        throw ConfigError("horizon too short: e^(-q*horizon) = " + std::to_string(tail) +
                          " exceeds the requested truncation bound " +
                          std::to_string(cfg.truncation_tol));
}

/// Stream index of a path; antithetic paths share the stream of their even twin.
inline std::uint64_t stream_of(const SimConfig& cfg, std::uint64_t path_index) {
    return cfg.antithetic ? (path_index & ~std::uint64_t{1}) : path_index;
}

template <class MuF, class SigF>
PathResult value_path(MuF mu, SigF sigma, double a, double x0, double q,
                      const SimConfig& cfg, std::uint64_t path_index) {
    const double sign = (cfg.antithetic && (path_index & 1)) ? -1.0 : 1.0;
    const std::uint64_t base = rng::stream_base(cfg.seed, stream_of(cfg, path_index));
    const long n_steps = static_cast<long>(std::llround(cfg.horizon / cfg.dt));
    const double sdt = std::sqrt(cfg.dt);
    const double dfac = std::exp(-q * cfg.dt);

    PathResult res;
    double u = x0;
    if (u > a) {  // surplus above the barrier is paid out at time zero
        res.pv_dividends += u - a;
        res.total_dividends += u - a;
        u = a;
    }
    double disc = 1.0;
    int last_boundary = 0;  // 0 none, 1 lower, 2 upper
    for (long k = 0; k < n_steps; ++k) {
        const double z =
            sign * rng::standard_normal(base, static_cast<std::uint64_t>(k) *
                                                  rng::kNormalSlots);
        double unew = u + mu(u) * cfg.dt + sigma(u) * sdt * z;
        if (unew > a) {
            const double d = unew - a;
            res.pv_dividends += disc * d;
            res.total_dividends += d;
            unew = a;
            if (last_boundary == 1) ++res.switches;
            last_boundary = 2;
        } else if (unew < 0.0) {
            const double r = -unew;
            res.pv_injections += disc * r;
            res.total_injections += r;
            unew = 0.0;
            if (last_boundary == 2) ++res.switches;
            last_boundary = 1;
        }
        u = unew;
        disc *= dfac;
    }
    res.final_state = u;
    return res;
}

struct ExitPathResult {
    double up = 0.0;
    double down = 0.0;
};

template <class MuF, class SigF>
ExitPathResult exit_path(MuF mu, SigF sigma, double x, double y, double z_hi, double q,
                         const SimConfig& cfg, std::uint64_t path_index) {
    const double sign = (cfg.antithetic && (path_index & 1)) ? -1.0 : 1.0;
    const std::uint64_t base = rng::stream_base(cfg.seed, stream_of(cfg, path_index));
    const long n_steps = static_cast<long>(std::llround(cfg.horizon / cfg.dt));
    const double sdt = std::sqrt(cfg.dt);
    const double dfac = std::exp(-q * cfg.dt);

    double u = y;
    double disc = 1.0;
    for (long k = 0; k < n_steps; ++k) {
        const double zn =
            sign * rng::standard_normal(base, static_cast<std::uint64_t>(k) *
                                                  rng::kNormalSlots);
        u += mu(u) * cfg.dt + sigma(u) * sdt * zn;
        disc *= dfac;  // crossing is detected at the step's right endpoint
        if (u >= z_hi) return {disc, 0.0};
        if (u <= x) return {0.0, disc};
    }
    return {0.0, 0.0};  // censored by the horizon
}

/// Family dispatch into a kernel templated on inlined coefficient functors.
template <class Fn>
auto with_coefficients(const DiffusionSpec& spec, Fn&& fn) {
    switch (spec.family()) {
        case Family::BrownianDrift: {
            const double m = spec.mu0(), s = spec.sigma0();
            return fn([m](double) { return m; }, [s](double) { return s; });
        }
        case Family::OrnsteinUhlenbeck: {
            const double th = spec.theta();
            return fn([th](double x) { return -th * x; }, [](double) { return 1.0; });
        }
        case Family::ShiryaevLog: {
            const double nu = spec.nu(), l = spec.l();
            return fn([nu, l](double x) { return nu * std::expm1(-2.0 * l * x); },
                      [](double) { return 1.0; });
        }
        case Family::Custom:
        default:
            return fn([&spec](double x) { return spec.drift(x); },
                      [&spec](double x) { return spec.volatility(x); });
    }
}

inline int worker_count() {
    if (const char* env = std::getenv("SCALEKERNEL_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Runs fn(path_index) for every path, partitioned across workers. Results
/// must be written into per-path slots so the partition cannot matter.
template <class Fn>
void parallel_paths(long n_paths, Fn&& fn) {
    const int workers = std::min<long>(worker_count(), n_paths);
    if (workers <= 1) {
        for (long p = 0; p < n_paths; ++p) fn(p);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    const long chunk = (n_paths + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const long lo = w * chunk;
        const long hi = std::min(n_paths, lo + chunk);
        pool.emplace_back([&fn, &errors, w, lo, hi] {
            try {
                for (long p = lo; p < hi; ++p) fn(p);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Pairwise summation over the path-ordered vector; independent of how paths
/// were distributed across workers.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline McEstimate summarize(std::span<const double> values, double truncation_bound) {
    const auto n = static_cast<long>(values.size());
    McEstimate est;
    est.n_paths = n;
    est.truncation_bound = truncation_bound;
    est.mean = pairwise_sum(values) / static_cast<double>(n);
    if (n > 1) {
        std::vector<double> sq(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double d = values[i] - est.mean;
            sq[i] = d * d;
        }
        const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
        est.std_error = std::sqrt(var / static_cast<double>(n));
    }
    return est;
}

}  // namespace detail

/// Simulates one path of the doubly regulated process. Deterministic in
/// (seed, path_index, cfg).
inline PathResult simulate_path(const DiffusionSpec& spec, double a, double x0, double q,
                                const SimConfig& cfg, long path_index) {
    detail::check_config(cfg, q);
    if (!(a > 0.0)) throw DomainError("simulate_path requires a > 0");
    if (x0 < 0.0)
        throw DomainError("simulate_path requires x0 >= 0; negative starts are valued "
                          "analytically, not simulated");
    if (path_index < 0 || path_index >= cfg.n_paths)
        throw ConfigError("path_index outside [0, n_paths)");
    return detail::with_coefficients(spec, [&](auto mu, auto sigma) {
        return detail::value_path(mu, sigma, a, x0, q, cfg,
                                  static_cast<std::uint64_t>(path_index));
    });
}

/// Monte Carlo estimate of the expected NPV of the double barrier strategy:
/// mean over paths of (discounted dividends - kappa * discounted injections).
inline McEstimate estimate_value(const DiffusionSpec& spec, double a, double x0, double q,
                                 double kappa, const SimConfig& cfg) {
    detail::check_config(cfg, q);
    if (!(a > 0.0)) throw DomainError("estimate_value requires a > 0");
    if (x0 < 0.0) throw DomainError("estimate_value requires x0 >= 0");
    std::vector<double> values(static_cast<std::size_t>(cfg.n_paths));
    detail::with_coefficients(spec, [&](auto mu, auto sigma) {
        detail::parallel_paths(cfg.n_paths, [&, mu, sigma](long p) {
            const PathResult r = detail::value_path(
                mu, sigma, a, x0, q, cfg, static_cast<std::uint64_t>(p));
            values[static_cast<std::size_t>(p)] =
                r.pv_dividends - kappa * r.pv_injections;
        });
        return 0;
    });
    const double bound = std::exp(-q * cfg.horizon) * (a + kappa * a);
    return detail::summarize(values, bound);
}

/// Monte Carlo estimate of the two-sided exit transforms of (x, z) started
/// from y: up averages e^(-q tau) on exit at z, down on exit at x.
inline std::pair<McEstimate, McEstimate> estimate_exit(const DiffusionSpec& spec, double q,
                                                       double x, double y, double z,
                                                       const SimConfig& cfg) {
    detail::check_config(cfg, q);
    if (!(x < y && y < z)) throw OrderingError("estimate_exit requires x < y < z");
    std::vector<double> ups(static_cast<std::size_t>(cfg.n_paths));
    std::vector<double> downs(static_cast<std::size_t>(cfg.n_paths));
    detail::with_coefficients(spec, [&](auto mu, auto sigma) {
        detail::parallel_paths(cfg.n_paths, [&, mu, sigma](long p) {
            const auto r = detail::exit_path(mu, sigma, x, y, z, q, cfg,
                                             static_cast<std::uint64_t>(p));
            ups[static_cast<std::size_t>(p)] = r.up;
            downs[static_cast<std::size_t>(p)] = r.down;
        });
        return 0;
    });
    const double bound = std::exp(-q * cfg.horizon);
    return {detail::summarize(ups, bound), detail::summarize(downs, bound)};
}

}  // namespace scalekernel::mc
