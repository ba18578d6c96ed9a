#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace mnx {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11 constants).
// Random access by (counter, key): any draw is addressable without state,
// which is what makes replication-parallel streams and bridge refinement
// reproducible independent of worker count.
struct Philox4x32 {
    static constexpr std::uint32_t M0 = 0xD2511F53u;
    static constexpr std::uint32_t M1 = 0xCD9E8D57u;
    static constexpr std::uint32_t W0 = 0x9E3779B9u;
    static constexpr std::uint32_t W1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += W0;
            key[1] += W1;
        }
        return ctr;
    }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

struct NormalPair {
    double z0;
    double z1;
};

// Draw purposes partition the counter space so that grid refinement adds
// draws instead of shifting existing ones.
enum class Draw : std::uint32_t {
    coarse_increment = 0,
    bridge_dyadic = 1,
    bridge_sequential = 2,
    block_time_integral = 3,
    initial_condition = 4,
};

// One replication's stream: all draws are keyed by (master seed, replication)
// plus a (purpose, a, b) address.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint32_t replication)
        : replication_(replication) {
        const std::uint64_t k = splitmix64(master_seed);
        key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    }

    std::uint32_t replication() const { return replication_; }

    NormalPair normal_pair(Draw purpose, std::uint32_t a, std::uint32_t b) const {
        const auto out = Philox4x32::block(
            {a, b, static_cast<std::uint32_t>(purpose), replication_}, key_);
        const std::uint64_t u = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
        const std::uint64_t v = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
        // u1 in (0,1], u2 in [0,1); Box-Muller.
        const double u1 = (static_cast<double>(u >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(v >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 6.283185307179586476925286766559 * u2;
        return {r * std::cos(th), r * std::sin(th)};
    }

    double normal(Draw purpose, std::uint32_t a, std::uint32_t b = 0) const {
        return normal_pair(purpose, a, b).z0;
    }

    double uniform01(Draw purpose, std::uint32_t a, std::uint32_t b = 0) const {
        const auto out = Philox4x32::block(
            {a, b, static_cast<std::uint32_t>(purpose), replication_}, key_);
        const std::uint64_t u = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
        return static_cast<double>(u >> 11) * 0x1.0p-53;
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t replication_;
};

} // namespace mnx
