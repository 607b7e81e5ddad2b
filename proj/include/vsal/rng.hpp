#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace vsal {

// mt19937_64 wrapper with self-contained draw helpers, so sampled sequences
// do not depend on the standard library's distribution implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [0, n), n > 0; unbiased via rejection.
    std::uint64_t uniform_index(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
        std::uint64_t x = engine_();
        while (x > limit) x = engine_();
        return x % n;
    }

    // Uniform real in [lo, hi).
    double uniform_real(double lo, double hi) {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    int uniform_int(int lo, int hi) {  // inclusive on both ends
        return lo + static_cast<int>(uniform_index(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[uniform_index(i)]);
    }

  private:
    std::mt19937_64 engine_;
};

// FNV-1a over the base seed, a stream tag, and an index. Used to derive
// independent per-image / per-copy Rng streams that are stable across
// platforms and runs.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint8_t b) {
        h ^= b;
        h *= 1099511628211ull;
    };
    for (int i = 0; i < 8; ++i) mix(static_cast<std::uint8_t>(base >> (8 * i)));
    for (char ch : tag) mix(static_cast<std::uint8_t>(ch));
    for (int i = 0; i < 8; ++i) mix(static_cast<std::uint8_t>(index >> (8 * i)));
    return h;
}

}  // namespace vsal
