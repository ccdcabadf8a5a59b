#include "roughpam/rng.hpp"

#include <cmath>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

namespace roughpam {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::encrypt(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, ctr[0], hi0, lo0);
        mulhilo(kM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kW0;
        key[1] += kW1;
    }
    return ctr;
}

void Philox4x32::encrypt_lanes(std::uint64_t first_block, std::uint32_t s0, std::uint32_t s1, Key key,
                               std::uint32_t* out) {
    std::uint32_t c0[kLanes], c1[kLanes], c2[kLanes], c3[kLanes];
    for (int i = 0; i < kLanes; ++i) {
        const std::uint64_t b = first_block + static_cast<std::uint64_t>(i);
        c0[i] = static_cast<std::uint32_t>(b);
        c1[i] = static_cast<std::uint32_t>(b >> 32);
        c2[i] = s0;
        c3[i] = s1;
    }
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < 10; ++round) {
        for (int i = 0; i < kLanes; ++i) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c0[i];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c2[i];
            const std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1[i] ^ k0;
            const std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3[i] ^ k1;
            c1[i] = static_cast<std::uint32_t>(p1);
            c3[i] = static_cast<std::uint32_t>(p0);
            c0[i] = n0;
            c2[i] = n2;
        }
        k0 += kW0;
        k1 += kW1;
    }
    for (int i = 0; i < kLanes; ++i) {
        out[4 * i] = c0[i];
        out[4 * i + 1] = c1[i];
        out[4 * i + 2] = c2[i];
        out[4 * i + 3] = c3[i];
    }
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_(stream_id) {}

void RngStream::refill() {
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    Philox4x32::encrypt_lanes(block_, static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32),
                              key, buffer_.data());
    block_ += Philox4x32::kLanes;
    used_ = 0;
}

double RngStream::uniform() {
    const std::uint64_t hi = (*this)() >> 6;  // 26 bits
    const std::uint64_t lo = (*this)() >> 5;  // 27 bits
    const std::uint64_t bits = (hi << 27) | lo;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
    boost::random::normal_distribution<double> dist;
    return dist(*this);
}

void RngStream::fill_normal(double* out, std::size_t n) {
    boost::random::normal_distribution<double> dist;
    for (std::size_t i = 0; i < n; ++i) out[i] = dist(*this);
}

double RngStream::gamma(double shape) {
    boost::random::gamma_distribution<double> dist(shape, 1.0);
    return dist(*this);
}

}  // namespace roughpam
