#pragma once

#include <complex>
#include <cstdint>
#include <string_view>

namespace comblink {

// Counter-based random stream (Philox4x32-10). Streams are keyed by a
// (master seed, label) pair so any module can derive its own substream and
// draw from it in any order relative to other streams, with identical
// results across runs and thread schedules.
class RngStream {
public:
    RngStream() : RngStream(0, "") {}
    RngStream(std::uint64_t master_seed, std::string_view label);

    // Derive a child stream. Same parent + same label -> same stream.
    RngStream substream(std::string_view label) const;
    RngStream substream(std::string_view label, std::uint64_t index) const;

    std::uint32_t next_u32();
    std::uint64_t next_u64();
    double uniform();    // [0, 1)
    double gaussian();   // N(0, 1)
    std::complex<double> cgaussian();  // independent N(0,1) per quadrature

private:
    explicit RngStream(std::uint64_t key64) { set_key(key64); }
    void set_key(std::uint64_t key64);
    void refill();

    std::uint64_t key64_ = 0;
    std::uint32_t key_[2] = {0, 0};
    std::uint64_t counter_ = 0;
    std::uint32_t block_[4] = {0, 0, 0, 0};
    int pos_ = 4;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// FNV-1a 64-bit, used for stream derivation and config hashing.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ull);

}  // namespace comblink
