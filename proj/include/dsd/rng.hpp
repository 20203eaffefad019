#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace dsd {

/// splitmix64 step; used everywhere randomness must be reproducible across
/// platforms (std distributions are implementation-defined).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Small deterministic generator with just the draws the library needs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform in [0, bound); bound > 0. Modulo bias is irrelevant here.
    std::size_t next_index(std::size_t bound) {
        return static_cast<std::size_t>(next_u64() % bound);
    }

    /// Uniform double in [0, 1).
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [-1, 1).
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

    bool next_bool(double probability_true) { return next_unit() < probability_true; }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = next_index(i);
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t state_;
};

}  // namespace dsd
