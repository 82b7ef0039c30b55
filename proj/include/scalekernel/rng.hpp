#pragma once

// Counter-based random numbers for reproducible parallel Monte Carlo.
//
// Every draw is a pure function of (seed, path_index, counter): the splitmix64
// output function applied to an affine counter stream, so paths can be
// partitioned across workers in any order without changing a single bit.

#include <cmath>
#include <cstdint>

namespace scalekernel::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

/// splitmix64 output function (Steele, Lea & Flood).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Base of the per-path counter stream.
inline std::uint64_t stream_base(std::uint64_t seed, std::uint64_t path_index) {
    return mix64(mix64(seed + kGolden) + path_index * kGolden);
}

/// k-th 64-bit draw of a stream.
inline std::uint64_t draw(std::uint64_t base, std::uint64_t counter) {
    return mix64(base + counter * kGolden);
}

/// Uniform in (0, 1), strictly inside the open interval.
inline double uniform01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

namespace detail {

// Marsaglia-Tsang ziggurat tables (128 layers), indices widened to 63-bit
// integer acceptance tests.
struct ZigguratTables {
    std::int64_t kn[128];
    double wn[128];
    double fn[128];

    ZigguratTables() {
        const double m1 = 9223372036854775808.0;  // 2^63
        double dn = 3.442619855899, tn = dn;
        const double vn = 9.91256303526217e-3;
        const double q = vn / std::exp(-0.5 * dn * dn);
        kn[0] = static_cast<std::int64_t>((dn / q) * m1);
        kn[1] = 0;
        wn[0] = q / m1;
        wn[127] = dn / m1;
        fn[0] = 1.0;
        fn[127] = std::exp(-0.5 * dn * dn);
        for (int i = 126; i >= 1; --i) {
            dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
            kn[i + 1] = static_cast<std::int64_t>((dn / tn) * m1);
            tn = dn;
            fn[i] = std::exp(-0.5 * dn * dn);
            wn[i] = dn / m1;
        }
    }
};

inline const ZigguratTables& zig_tables() {
    static const ZigguratTables tables;
    return tables;
}

}  // namespace detail

/// Number of counter slots reserved per normal variate; a step's draws live
/// in [counter_base, counter_base + kNormalSlots).
inline constexpr std::uint64_t kNormalSlots = 64;

/// Standard normal variate from the counter stream. Consumes a deterministic
/// window of the stream regardless of how many ziggurat retries occur.
inline double standard_normal(std::uint64_t base, std::uint64_t counter_base) {
    const auto& zt = detail::zig_tables();
    constexpr double r = 3.442619855899;
    constexpr double r_inv = 1.0 / r;

    for (std::uint64_t j = 0; j + 2 <= kNormalSlots; j += 2) {
        const auto hz = static_cast<std::int64_t>(draw(base, counter_base + j));
        const int iz = static_cast<int>(hz & 127);
        const std::int64_t ahz = hz < 0 ? -hz : hz;
        if (ahz < zt.kn[iz]) return static_cast<double>(hz) * zt.wn[iz];

        if (iz == 0) {
            // tail beyond r: Marsaglia's exponential wedge against a nested
            // slot window
            const std::uint64_t tail_key = draw(base, counter_base + j + 1);
            for (std::uint64_t t = 0; t < 30; ++t) {
                const double u1 = uniform01(mix64(tail_key + 2 * t * kGolden));
                const double u2 = uniform01(mix64(tail_key + (2 * t + 1) * kGolden));
                const double x = -std::log(u1) * r_inv;
                const double y = -std::log(u2);
                if (y + y >= x * x) return hz > 0 ? r + x : -r - x;
            }
            return hz > 0 ? r : -r;  // probabilistically unreachable
        }

        const double x = static_cast<double>(hz) * zt.wn[iz];
        const double u = uniform01(draw(base, counter_base + j + 1));
        if (zt.fn[iz] + u * (zt.fn[iz - 1] - zt.fn[iz]) < std::exp(-0.5 * x * x))
            return x;
    }
    return 0.0;  // probabilistically unreachable (> 30 rejections)
}

}  // namespace scalekernel::rng
