// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

#include "rissim/types.hpp"

namespace rissim {

// Philox4x64-10 counter-based generator (Salmon et al., SC'11).
//
// Stream splitting: the 128-bit key is (seed, stream). Every independent
// quantity (one channel link, one set of positions, one phase draw) owns a
// stream id built by make_stream(), so adding a link never perturbs another.
// Within a stream the 256-bit counter starts at 0 and increments once per
// block of four 64-bit outputs, which are consumed in word order.
//
// Derived variates:
//   uniform()  = ((x >> 11) + 1) * 2^-53, in (0, 1]
//   cgauss()   = sqrt(-ln u1) * exp(j 2 pi u2), a CN(0, 1) draw
class Philox4x64 {
public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint64_t, 4>;
    using Key = std::array<std::uint64_t, 2>;

    Philox4x64(std::uint64_t seed, std::uint64_t stream);

    static Block block(Block counter, Key key);

    result_type operator()();
    double uniform();
    cd cgauss();

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }

private:
    Key key_;
    Block counter_{0, 0, 0, 0};
    Block buffer_{};
    int pos_ = 4;
};

enum class StreamKind : std::uint64_t {
    positions = 1,
    bs_ris = 2,
    ris_ris = 3,
    ris_user = 4,
    direct = 5,
    tx_ris = 6,
    ris_rx = 7,
    tx_rx = 8,
    phases = 9,
    init = 10,
};

// stream = kind << 48 | a << 24 | b, with a, b < 2^24.
std::uint64_t make_stream(StreamKind kind, std::uint64_t a = 0, std::uint64_t b = 0);

} // namespace rissim
