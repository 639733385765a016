// Bit-vector utilities. Bit lists are MSB-first throughout the library.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace csim {

using BitVec = std::vector<uint8_t>;

inline uint64_t bits_to_uint(const BitVec& bits, size_t offset, size_t count) {
    if (offset + count > bits.size()) throw std::invalid_argument("bits_to_uint: range out of bounds");
    uint64_t v = 0;
    for (size_t i = 0; i < count; ++i) v = (v << 1) | (bits[offset + i] & 1u);
    return v;
}

inline BitVec uint_to_bits(uint64_t value, size_t count) {
    BitVec out(count);
    for (size_t i = 0; i < count; ++i) out[i] = static_cast<uint8_t>((value >> (count - 1 - i)) & 1u);
    return out;
}

inline void append_bits(BitVec& dst, uint64_t value, size_t count) {
    for (size_t i = 0; i < count; ++i) dst.push_back(static_cast<uint8_t>((value >> (count - 1 - i)) & 1u));
}

inline uint32_t gray_encode(uint32_t b) { return b ^ (b >> 1); }

inline uint32_t gray_decode(uint32_t g) {
    uint32_t b = g;
    for (uint32_t shift = 1; shift < 32; shift <<= 1) b ^= b >> shift;
    return b;
}

inline bool is_power_of_two(uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

inline int int_log2(uint64_t v) {
    if (!is_power_of_two(v)) throw std::invalid_argument("int_log2: not a power of two");
    int n = 0;
    while (v > 1) {
        v >>= 1;
        ++n;
    }
    return n;
}

inline size_t hamming_distance(const BitVec& x, const BitVec& y) {
    if (x.size() != y.size()) throw std::invalid_argument("hamming_distance: length mismatch");
    size_t d = 0;
    for (size_t i = 0; i < x.size(); ++i) d += (x[i] ^ y[i]) & 1u;
    return d;
}

} // namespace csim
