#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace hadr {

// Deterministic random source. The engine is std::mt19937_64, whose output
// for a given seed is specified bit-for-bit by the standard; the
// distributions are implemented here by hand because the standard library's
// are not portable across implementations. Identical seed => identical
// stream everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed_used() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n);

    // Standard normal via Box-Muller; the spare value is cached.
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Fisher-Yates, back to front.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t seed_ = 0;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Child-seed derivation so that parallel scheduling cannot change results:
// every purpose (block construction, per-block training, bench cells, ...)
// gets its own seed computed from the master seed, a purpose tag, and an
// index. FNV-1a over the tag, then two splitmix64 finalizer rounds.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index);

} // namespace hadr
