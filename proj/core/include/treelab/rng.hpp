#pragma once

#include <cstdint>
#include <initializer_list>

namespace treelab::rng {

// Counter-based randomness: every draw is a pure function of a key tuple,
// so a value never depends on evaluation order or on the number of workers.

constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_words(std::initializer_list<std::uint64_t> words) noexcept {
    std::uint64_t h = 0x6a09e667f3bcc908ULL;
    for (std::uint64_t w : words) {
        h = mix64(h ^ mix64(w + 0x243f6a8885a308d3ULL));
    }
    return h;
}

// Uniform in the open interval (0,1), 53 bits.
constexpr double to_open_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

__extension__ using uint128 = unsigned __int128;

// Uniform integer in [0, n) by multiply-shift.
inline std::uint64_t to_range(std::uint64_t bits, std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>((static_cast<uint128>(bits) * n) >> 64);
}

// A keyed stream: draws are indexed by a counter rather than produced by
// advancing hidden state.
class Stream {
public:
    constexpr explicit Stream(std::uint64_t key) noexcept : key_(key) {}
    constexpr Stream(std::initializer_list<std::uint64_t> words) noexcept : key_(hash_words(words)) {}

    constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
        return mix64(key_ ^ mix64(counter * 0xd1342543de82ef95ULL + 1));
    }
    constexpr double uniform(std::uint64_t counter) const noexcept { return to_open_unit(bits(counter)); }
    std::uint64_t index(std::uint64_t counter, std::uint64_t n) const noexcept { return to_range(bits(counter), n); }
    constexpr std::uint64_t key() const noexcept { return key_; }

private:
    std::uint64_t key_;
};

// Domain tags separate the streams used by different consumers.
enum class Tag : std::uint64_t {
    SiteIid = 0x51,
    SiteRadial = 0x52,
    MixtureChoice = 0x53,
    PoolStep = 0x54,
    Realization = 0x55,
    Derive = 0x56,
};

constexpr std::uint64_t tag(Tag t) noexcept { return static_cast<std::uint64_t>(t); }

// Derives an independent child seed, e.g. per (E, lambda) experiment cell.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = hash_words({seed, tag(Tag::Derive)});
    for (std::uint64_t p : path) h = hash_words({h, p});
    return h;
}

}  // namespace treelab::rng
