#pragma once

#include <cstdint>

namespace restorex {

/// SplitMix64 (Steele/Lea/Flood). Chosen over the std distributions because
/// its output is fully pinned by the constants below, so fixtures generated
/// from the same seed are byte-identical on every platform.
///
/// Constants: gamma 0x9E3779B97F4A7C15, mixers 0xBF58476D1CE4E5B9 and
/// 0x94D049BB133111EB, shifts 30/27/31.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 significant bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double next_in(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [0, n). Lemire multiply-shift; deterministic, and
    /// the bias for the n used here (tiny vs 2^64) is irrelevant.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * static_cast<unsigned __int128>(n)) >> 64);
    }

    /// Derive an independent stream, e.g. one per image or stage.
    SplitMix64 fork() { return SplitMix64(next()); }

private:
    std::uint64_t state_;
};

} // namespace restorex
