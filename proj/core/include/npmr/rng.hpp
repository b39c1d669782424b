#pragma once

#include <cstdint>
#include <random>

namespace npmr {

/// Seedable generator with independent substreams.
///
/// Substream seeds are derived by SplitMix64 mixing of (seed, stream id), so
/// replicate r's draws depend only on the scenario seed and r.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(mix(seed)) {}

    Rng substream(std::uint64_t stream) const;

    std::uint64_t seed() const { return seed_; }
    std::mt19937_64& engine() { return engine_; }

    double normal() { return normal_(engine_); }
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    static std::uint64_t mix(std::uint64_t x);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace npmr
