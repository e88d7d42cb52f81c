#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridec {

using NodeId = std::int32_t;
using LineId = std::int32_t;
using AreaId = std::int32_t;

using NodeSet = std::set<NodeId>;
using LineSet = std::set<LineId>;

/// Raised when an input file or request is structurally invalid.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when random sampling cannot satisfy the requested structure
/// within the retry budget.
class SamplingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// SplitMix64 generator. Used everywhere randomness is needed so that
/// streams are identical across platforms and standard library versions.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, n). Rejection-sampled, bias-free.
    std::uint64_t bounded(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("SplitMix64::bounded: n must be positive");
        const std::uint64_t threshold = -n % n;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    /// Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Scenario seed derivation: seed(i) = mix(master_seed, i). Both the CLI
/// and any external reimplementation use exactly this so that scenario
/// streams can be reproduced independently of sweep order or worker count.
inline std::uint64_t derive_scenario_seed(std::uint64_t master_seed, std::uint64_t scenario_index) {
    SplitMix64 mixer(master_seed ^ (0xA0761D6478BD642FULL * (scenario_index + 1)));
    return mixer.next();
}

} // namespace gridec
