#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "scalekernel/errors.hpp"

namespace scalekernel {

/// Tolerances for the adaptive Gauss-Kronrod integrators.
struct QuadratureConfig {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 400;
};

namespace detail {

// 15-point Kronrod nodes with embedded 7-point Gauss rule (QUADPACK qk15).
inline constexpr double kGk15Nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};

inline constexpr double kGk15KronrodW[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr double kGk15GaussW[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
    double value;
    double error;
};

template <class F>
PanelResult gk15(const F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double fc = f(center);
    double result_gauss = fc * kGk15GaussW[3];
    double result_kronrod = fc * kGk15KronrodW[7];
    double fv[7][2];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kGk15Nodes[j];
        fv[j][0] = f(center - dx);
        fv[j][1] = f(center + dx);
        const double fsum = fv[j][0] + fv[j][1];
        result_kronrod += kGk15KronrodW[j] * fsum;
        if (j % 2 == 1) result_gauss += kGk15GaussW[j / 2] * fsum;
    }

    // QUADPACK-style error estimate sharpened by the local mean deviation.
    double mean = 0.5 * result_kronrod;
    double asc = std::fabs(fc - mean) * kGk15KronrodW[7];
    for (int j = 0; j < 7; ++j)
        asc += kGk15KronrodW[j] *
               (std::fabs(fv[j][0] - mean) + std::fabs(fv[j][1] - mean));
    asc *= std::fabs(half);

    double err = std::fabs((result_kronrod - result_gauss) * half) * 200.0;
    if (asc != 0.0 && err != 0.0)
        err = asc * std::min(1.0, std::pow(err / asc, 1.5));
    return {result_kronrod * half, err};
}

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over the finite interval [a, b].
/// Throws QuadratureNonConvergence when the tolerance cannot be met within
/// cfg.max_subdivisions panel splits or the integrand produces non-finite values.
template <class F>
double integrate(const F& f, double a, double b, const QuadratureConfig& cfg = {}) {
    if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol > 0.0) || cfg.max_subdivisions < 1)
        throw InvalidParameter("quadrature tolerances must be positive");
    if (a == b) return 0.0;

    std::vector<detail::Segment> heap;
    heap.reserve(64);
    auto push = [&heap](double lo, double hi, const detail::PanelResult& r) {
        heap.push_back({lo, hi, r.value, r.error});
        std::push_heap(heap.begin(), heap.end());
    };
    push(a, b, detail::gk15(f, a, b));

    for (int iter = 0; iter < cfg.max_subdivisions; ++iter) {
        double total = 0.0, err = 0.0;
        for (const auto& s : heap) {
            total += s.value;
            err += s.error;
        }
        if (!std::isfinite(total))
            throw QuadratureNonConvergence("integrand produced a non-finite value");
        if (err <= std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total)))
            return total;

        std::pop_heap(heap.begin(), heap.end());
        detail::Segment worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // interval is at floating-point resolution; keep its estimate
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end());
            worst.error = 0.0;
            continue;
        }
        push(worst.a, mid, detail::gk15(f, worst.a, mid));
        push(mid, worst.b, detail::gk15(f, mid, worst.b));
    }
    throw QuadratureNonConvergence("adaptive quadrature did not reach tolerance");
}

/// Integral of f over [0, inf) via the substitution t = u / (1 - u).
template <class F>
double integrate_semi_infinite(const F& f, const QuadratureConfig& cfg = {}) {
    auto g = [&f](double u) {
        const double one_minus = 1.0 - u;
        const double t = u / one_minus;
        if (!std::isfinite(t)) return 0.0;
        const double jac = 1.0 / (one_minus * one_minus);
        const double ft = f(t);
        return ft == 0.0 ? 0.0 : ft * jac;
    };
    return integrate(g, 0.0, 1.0, cfg);
}

}  // namespace scalekernel
