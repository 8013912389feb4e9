#pragma once

#include <cstdint>
#include <random>

namespace liesym {

/// Seeded generator with a platform-independent uniform mapping.
///
/// std::uniform_real_distribution is implementation-defined, so draws are built
/// from the raw 64-bit engine output to keep runs reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace liesym
