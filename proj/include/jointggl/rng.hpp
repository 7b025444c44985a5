#pragma once

#include <cstdint>
#include <random>

namespace jggl {

/// SplitMix64 finalizer. Used to turn structured seeds (base seed, replication,
/// population) into well-mixed 64-bit generator seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Stream seed for population k of a dataset drawn with `seed`: seed XOR k.
constexpr std::uint64_t population_seed(std::uint64_t seed, std::size_t k) noexcept {
    return seed ^ static_cast<std::uint64_t>(k);
}

/// Seed of Monte Carlo replication b. Population streams inside the replication
/// are then population_seed(replication_seed(base, b), k).
constexpr std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t b) noexcept {
    return splitmix64(splitmix64(base_seed) + 0xD1B54A32D192ED03ULL * (b + 1));
}

/// Random source with a platform-independent output sequence.
///
/// The engine is std::mt19937_64, whose sequence the C++ standard pins down
/// exactly. Distribution objects from <random> are implementation-defined, so
/// uniforms, integers and normals are derived here from raw engine output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [0, bound) by rejection; bound must be positive.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal via the Marsaglia polar method. The spare variate is cached.
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace jggl
