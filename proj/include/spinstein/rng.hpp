#pragma once

#include <cstdint>
#include <vector>
#include <cmath>

namespace spinstein {

// Counter-based splittable PRNG. Each stream is keyed by (seed, stream_id);
// the output at counter c is a pure function of (seed, stream_id, c), so
// replicas never share state and replay is exact.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_(mix(seed ^ 0x9E3779B97F4A7C15ull) ^ mix(stream_id + 0xBF58476D1CE4E5B9ull)),
          counter_(0) {}

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + (++counter_) * 0x9E3779B97F4A7C15ull;
        return mix(z);
    }

    // Uniform in [0, 1).
    double next_double() {
        return (next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // Lemire's multiply-shift rejection method.
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            std::uint64_t t = (0 - n) % n;
            while (lo < t) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Sample an index from a probability vector (entries sum to ~1).
    int next_categorical(const std::vector<double>& probs) {
        double u = next_double();
        double acc = 0.0;
        int last = 0;
        for (std::size_t k = 0; k < probs.size(); ++k) {
            acc += probs[k];
            last = static_cast<int>(k);
            if (u < acc) return last;
        }
        return last;
    }

    // Derive an independent substream; deterministic in (this stream's key, tag).
    RngStream substream(std::uint64_t tag) const {
        RngStream s(0, 0);
        s.key_ = mix(key_ ^ (tag * 0xD1342543DE82EF95ull + 0x94D049BB133111EBull));
        s.counter_ = 0;
        return s;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace spinstein
