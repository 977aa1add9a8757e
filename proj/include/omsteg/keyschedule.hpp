#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace omsteg {

/// 128-bit private key.
struct PrivateKey {
    std::array<std::uint8_t, 16> bytes{};

    static PrivateKey from_hex(std::string_view hex) {
        if (hex.size() != 32)
            throw std::invalid_argument("key must be exactly 32 hex characters");
        auto nibble = [](char c) -> int {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            if (c >= 'A' && c <= 'F') return c - 'A' + 10;
            throw std::invalid_argument("key contains a non-hex character");
        };
        PrivateKey k;
        for (int i = 0; i < 16; ++i)
            k.bytes[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
        return k;
    }

    std::string to_hex() const {
        static const char* d = "0123456789abcdef";
        std::string s;
        s.reserve(32);
        for (auto b : bytes) {
            s.push_back(d[b >> 4]);
            s.push_back(d[b & 0xF]);
        }
        return s;
    }
};

/// AES substitution box (frozen constant; S(0x00) = 0x63 checked below).
inline constexpr std::array<std::uint8_t, 256> kAesSbox = {
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16,
};
static_assert(kAesSbox[0x00] == 0x63 && kAesSbox[0x53] == 0xed, "S-box self-test");

/// 2560-bit expansion: two AES-128 key-schedule passes. Pass one keeps the
/// bytes of words w4..w43; the second pass re-keys with w40..w43 and appends
/// its own w4..w43. byte2bin is MSB-first, giving bits P_1..P_2560.
struct KeyExpansion {
    std::array<std::uint8_t, 320> bytes{};

    /// Bit P_pos for 1-based pos in 1..2560 (MSB-first within each byte).
    int bit(int pos) const {
        const int i = pos - 1;
        return (bytes[i >> 3] >> (7 - (i & 7))) & 1;
    }

    std::string to_hex() const {
        static const char* d = "0123456789abcdef";
        std::string s;
        s.reserve(640);
        for (auto b : bytes) {
            s.push_back(d[b >> 4]);
            s.push_back(d[b & 0xF]);
        }
        return s;
    }
};

/// 8-bit permutation mask; ones_count is |mask| in the permutation rule.
struct Mask8 {
    std::array<std::uint8_t, 8> bits{};

    int ones_count() const {
        int c = 0;
        for (auto b : bits) c += b;
        return c;
    }
};

namespace detail {

using Word = std::array<std::uint8_t, 4>;

inline Word rot_word(const Word& w) { return {w[1], w[2], w[3], w[0]}; }

inline Word sub_bytes(const Word& w) {
    return {kAesSbox[w[0]], kAesSbox[w[1]], kAesSbox[w[2]], kAesSbox[w[3]]};
}

// x^(j-1) in GF(2^8) mod x^8+x^4+x^3+x+1
inline std::uint8_t rcon_byte(int j) {
    std::uint8_t r = 1;
    for (int i = 1; i < j; ++i) r = static_cast<std::uint8_t>((r << 1) ^ ((r & 0x80) ? 0x1B : 0));
    return r;
}

// One AES-128 schedule pass; returns the 160 bytes of w4..w43.
inline std::array<std::uint8_t, 160> schedule_tail(const std::array<std::uint8_t, 16>& key) {
    std::array<Word, 44> w;
    for (int i = 0; i < 4; ++i)
        w[i] = {key[4 * i], key[4 * i + 1], key[4 * i + 2], key[4 * i + 3]};
    for (int i = 4; i < 44; ++i) {
        Word t = w[i - 1];
        if (i % 4 == 0) {
            t = sub_bytes(rot_word(t));
            t[0] ^= rcon_byte(i / 4);
        }
        for (int b = 0; b < 4; ++b) w[i][b] = w[i - 4][b] ^ t[b];
    }
    std::array<std::uint8_t, 160> out;
    for (int i = 4; i < 44; ++i)
        for (int b = 0; b < 4; ++b) out[4 * (i - 4) + b] = w[i][b];
    return out;
}

}  // namespace detail

inline KeyExpansion expand_key(const PrivateKey& key) {
    KeyExpansion P;
    const auto pass1 = detail::schedule_tail(key.bytes);
    std::array<std::uint8_t, 16> rekey;
    for (int i = 0; i < 16; ++i) rekey[i] = pass1[144 + i];  // w40..w43
    const auto pass2 = detail::schedule_tail(rekey);
    for (int i = 0; i < 160; ++i) {
        P.bytes[i] = pass1[i];
        P.bytes[160 + i] = pass2[i];
    }
    return P;
}

/// Mask consumed at counter value sigma >= 1: bits P at positions
/// ((8(sigma-1)+k-1) mod 2560) + 1 for k = 1..8. The counter itself is kept by
/// the codec pass (sigma <- mod(sigma, 2560) + 1 before each use); positions
/// wrap modulo 2560 so every access stays in range.
inline Mask8 mask_at(const KeyExpansion& P, long sigma) {
    if (sigma < 1) throw std::invalid_argument("mask_at: sigma must be >= 1");
    Mask8 m;
    for (int k = 0; k < 8; ++k) {
        const long pos = (8 * (sigma - 1) + k) % 2560 + 1;
        m.bits[k] = static_cast<std::uint8_t>(P.bit(static_cast<int>(pos)));
    }
    return m;
}

/// Stable partition: values at mask-1 positions first (original order), then
/// the mask-0 positions.
template <typename T>
std::array<T, 8> permute(const std::array<T, 8>& v, const Mask8& mask) {
    std::array<T, 8> out{};
    int j = 0;
    for (int i = 0; i < 8; ++i)
        if (mask.bits[i]) out[j++] = v[i];
    for (int i = 0; i < 8; ++i)
        if (!mask.bits[i]) out[j++] = v[i];
    return out;
}

/// Exact inverse of permute: the first |mask| values scatter back to the mask-1
/// positions in order, the rest to the mask-0 positions.
template <typename T>
std::array<T, 8> unpermute(const std::array<T, 8>& v, const Mask8& mask) {
    std::array<T, 8> out{};
    int j = 0;
    for (int i = 0; i < 8; ++i)
        if (mask.bits[i]) out[i] = v[j++];
    for (int i = 0; i < 8; ++i)
        if (!mask.bits[i]) out[i] = v[j++];
    return out;
}

}  // namespace omsteg
