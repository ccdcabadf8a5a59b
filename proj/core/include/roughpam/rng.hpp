#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>

namespace roughpam {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter encrypt(Counter ctr, Key key);
    // Encrypts counters (lo + i, hi, s0, s1) for i in [0, kLanes), writing
    // kLanes * 4 words in counter order. Independent lanes let the rounds
    // interleave.
    static constexpr int kLanes = 16;
    static void encrypt_lanes(std::uint64_t first_block, std::uint32_t s0, std::uint32_t s1, Key key,
                              std::uint32_t* out);
};

// A single reproducible stream. The 64-bit seed is the Philox key and the
// 64-bit stream id occupies the upper half of the counter, so streams with
// different ids never overlap.
class RngStream {
public:
    using result_type = std::uint32_t;

    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (used_ == kBufferWords) refill();
        return buffer_[used_++];
    }

    // Uniform on (0, 1), 53 random bits.
    double uniform();
    // Standard normal (ziggurat).
    double normal();
    void fill_normal(double* out, std::size_t n);
    // Gamma(shape, 1) variate.
    double gamma(double shape);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    static constexpr int kBufferWords = 4 * Philox4x32::kLanes;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, kBufferWords> buffer_{};
    int used_ = kBufferWords;
};

// Stream id derived from a purpose tag and an index, e.g. (tag, batch).
constexpr std::uint64_t stream_id(std::uint32_t tag, std::uint64_t index) {
    return (static_cast<std::uint64_t>(tag) << 48) ^ index;
}

namespace stream_tag {
inline constexpr std::uint32_t kNoise = 1;
inline constexpr std::uint32_t kSolver = 2;
inline constexpr std::uint32_t kBrownian = 3;
inline constexpr std::uint32_t kChaos = 4;
inline constexpr std::uint32_t kIsometry = 5;
inline constexpr std::uint32_t kPicard = 6;
}  // namespace stream_tag

}  // namespace roughpam
