#include "nvmag/rng.hpp"

namespace nvmag {

TrialRng derive_trial_rng(std::uint64_t master_seed, std::uint64_t trial_id) {
    // mix64 is a bijection, and xor with a fixed word is too, so keys never collide.
    return TrialRng(mix64(mix64(master_seed) ^ trial_id));
}

}  // namespace nvmag
