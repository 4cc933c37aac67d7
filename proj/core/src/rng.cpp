#include "comblink/rng.hpp"

#include <cmath>
#include <cstring>

namespace comblink {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
    std::uint64_t h = basis;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace {

inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view label) {
    char buf[8];
    std::memcpy(buf, &seed, 8);
    std::uint64_t h = fnv1a64(std::string_view(buf, 8));
    return fnv1a64(label, h);
}

inline void philox_round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
    constexpr std::uint64_t M0 = 0xD2511F53ull;
    constexpr std::uint64_t M1 = 0xCD9E8D57ull;
    const std::uint64_t p0 = M0 * ctr[0];
    const std::uint64_t p1 = M1 * ctr[2];
    std::uint32_t out[4];
    out[0] = static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0];
    out[1] = static_cast<std::uint32_t>(p1);
    out[2] = static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1];
    out[3] = static_cast<std::uint32_t>(p0);
    std::memcpy(ctr, out, sizeof(out));
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::string_view label) {
    set_key(mix_seed(master_seed, label));
}

void RngStream::set_key(std::uint64_t key64) {
    key64_ = key64;
    key_[0] = static_cast<std::uint32_t>(key64);
    key_[1] = static_cast<std::uint32_t>(key64 >> 32);
    counter_ = 0;
    pos_ = 4;
    have_spare_ = false;
}

RngStream RngStream::substream(std::string_view label) const {
    return RngStream(mix_seed(key64_, label));
}

RngStream RngStream::substream(std::string_view label, std::uint64_t index) const {
    char buf[8];
    std::memcpy(buf, &index, 8);
    std::uint64_t h = mix_seed(key64_, label);
    return RngStream(fnv1a64(std::string_view(buf, 8), h));
}

void RngStream::refill() {
    std::uint32_t ctr[4] = {static_cast<std::uint32_t>(counter_),
                            static_cast<std::uint32_t>(counter_ >> 32), 0x2e4b6c71u,
                            0x5f3a9d02u};
    std::uint32_t key[2] = {key_[0], key_[1]};
    for (int r = 0; r < 10; ++r) {
        philox_round(ctr, key);
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
    }
    std::memcpy(block_, ctr, sizeof(block_));
    ++counter_;
    pos_ = 0;
}

std::uint32_t RngStream::next_u32() {
    if (pos_ >= 4) refill();
    return block_[pos_++];
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
}

double RngStream::uniform() {
    return next_u32() * 0x1p-32;
}

double RngStream::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller; u1 in (0,1] so the log is finite.
    const double u1 = (static_cast<double>(next_u32()) + 1.0) * 0x1p-32;
    const double u2 = next_u32() * 0x1p-32;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

std::complex<double> RngStream::cgaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return {re, im};
}

}  // namespace comblink
