#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace geodc {

/// Seeded generator with platform-independent distributions.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The std:: distribution adaptors are not, so every draw used by
/// the simulator goes through the member functions below instead.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed), seed_(seed) {}

    /// Independent substream keyed by `stream`; does not advance this one.
    [[nodiscard]] Rng derive(std::uint64_t stream) const;

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01();
    double uniform(double lo, double hi);
    /// Uniform integer on [0, n). Unbiased (rejection sampling).
    std::uint64_t uniform_index(std::uint64_t n);
    /// Standard normal via Box-Muller (no cached second value).
    double normal();
    std::uint64_t poisson(double mean);
    /// Index sampled proportionally to `weights` (all >= 0, sum > 0).
    std::size_t categorical(std::span<const double> weights);

    [[nodiscard]] std::uint64_t seed() const { return seed_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_ = 0;
};

/// splitmix64 finalizer, used for deriving substream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace geodc
