#pragma once

#include <cstdint>
#include <stdexcept>

namespace rdsec {

// Counter-based generator (splitmix64 finalizer over a keyed counter).
// A generator is identified by (seed, stream, substream); draws are a pure
// function of that identity and the draw index, so independent components
// (codebook, source, encoder) can be re-seeded and parallel trials can use
// per-trial substreams without sharing state.
enum class RngStream : std::uint64_t {
    Codebook = 0x01,
    Source = 0x02,
    Encoder = 0x03,
    Search = 0x04,
};

class CounterRng {
public:
    CounterRng(std::uint64_t seed, RngStream stream, std::uint64_t substream = 0)
        : key_(derive_key(seed, static_cast<std::uint64_t>(stream), substream)) {}

    std::uint64_t next_u64() {
        return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("CounterRng: next_below(0)");
        // Rejection sampling to avoid modulo bias.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    static std::uint64_t mix64(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return x;
    }

private:
    static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) {
        std::uint64_t k = mix64(seed + 0x9e3779b97f4a7c15ULL);
        k = mix64(k ^ (stream * 0xff51afd7ed558ccdULL));
        k = mix64(k ^ (substream * 0xc4ceb9fe1a85ec53ULL));
        return k;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace rdsec
