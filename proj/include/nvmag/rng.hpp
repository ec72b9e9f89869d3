#pragma once

#include <cstdint>
#include <limits>

namespace nvmag {

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based generator: output n is mix64(key + (n + 1) * golden).
/// The whole stream is a pure function of (key, n), so trial results do not
/// depend on which worker runs the trial. Satisfies UniformRandomBitGenerator.
class TrialRng {
public:
    using result_type = std::uint64_t;

    explicit TrialRng(std::uint64_t key) : key_(key) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        ++counter_;
        return mix64(key_ + counter_ * golden);
    }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    static constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Stream for one trial. Distinct trial ids under one master seed get distinct keys.
TrialRng derive_trial_rng(std::uint64_t master_seed, std::uint64_t trial_id);

}  // namespace nvmag
