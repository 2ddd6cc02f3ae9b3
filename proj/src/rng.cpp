// SPDX-License-Identifier: Apache-2.0
#include "rissim/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace rissim {

namespace {

constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t &hi, std::uint64_t &lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

} // namespace

Philox4x64::Philox4x64(std::uint64_t seed, std::uint64_t stream) : key_{seed, stream} {}

Philox4x64::Block Philox4x64::block(Block c, Key k) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += kW0;
            k[1] += kW1;
        }
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, c[0], hi0, lo0);
        mulhilo(kM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

Philox4x64::result_type Philox4x64::operator()() {
    if (pos_ == 4) {
        buffer_ = block(counter_, key_);
        for (auto &w : counter_)
            if (++w != 0)
                break;
        pos_ = 0;
    }
    return buffer_[pos_++];
}

double Philox4x64::uniform() {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
}

cd Philox4x64::cgauss() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-std::log(u1)) * std::polar(1.0, 2.0 * kPi * u2);
}

std::uint64_t make_stream(StreamKind kind, std::uint64_t a, std::uint64_t b) {
    if (a >= (1ULL << 24) || b >= (1ULL << 24))
        throw std::invalid_argument("make_stream: index out of range");
    return (static_cast<std::uint64_t>(kind) << 48) | (a << 24) | b;
}

} // namespace rissim
