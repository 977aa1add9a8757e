#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "omsteg/keyschedule.hpp"
#include "testutil.hpp"

using namespace omsteg;

namespace {
Mask8 make_mask(std::uint8_t bits) {  // MSB-first, matching the expansion's bit order
    Mask8 m;
    for (int i = 0; i < 8; ++i) m.bits[i] = (bits >> (7 - i)) & 1;
    return m;
}
}  // namespace

TEST_CASE("private key hex parsing") {
    const auto k = PrivateKey::from_hex("2b7e151628aed2a6abf7158809cf4f3c");
    CHECK(k.bytes[0] == 0x2b);
    CHECK(k.bytes[15] == 0x3c);
    CHECK(k.to_hex() == "2b7e151628aed2a6abf7158809cf4f3c");
    CHECK_THROWS_AS(PrivateKey::from_hex("2b7e"), std::invalid_argument);
    CHECK_THROWS_AS(PrivateKey::from_hex("zz7e151628aed2a6abf7158809cf4f3c"),
                    std::invalid_argument);
}

TEST_CASE("RotWord example") {
    const detail::Word w = {0x09, 0xcf, 0x4f, 0x3c};
    const detail::Word r = detail::rot_word(w);
    CHECK(r == detail::Word{0xcf, 0x4f, 0x3c, 0x09});
}

TEST_CASE("expansion is 2560 bits and matches the published AES-128 schedule") {
    const auto key = PrivateKey::from_hex("2b7e151628aed2a6abf7158809cf4f3c");
    const auto P = expand_key(key);
    CHECK(P.bytes.size() == 320);  // 2560 bits

    // w4 of the standard schedule for this key
    CHECK(P.bytes[0] == 0xa0);
    CHECK(P.bytes[1] == 0xfa);
    CHECK(P.bytes[2] == 0xfe);
    CHECK(P.bytes[3] == 0x17);
    // w43
    CHECK(P.bytes[156] == 0xb6);
    CHECK(P.bytes[157] == 0x63);
    CHECK(P.bytes[158] == 0x0c);
    CHECK(P.bytes[159] == 0xa6);

    const std::string hex = P.to_hex();
    CHECK(hex.size() == 640);
    CHECK(hex.substr(0, 32) == "a0fafe1788542cb123a339392a6c7605");
    CHECK(hex.substr(640 - 32) == "59be66c3fa9bf798117c2b1046f2752c");

    // determinism
    CHECK(expand_key(key).to_hex() == hex);
}

TEST_CASE("both passes match the independent AES oracle for random keys") {
    testutil::Rng rng(31);
    for (int t = 0; t < 100; ++t) {
        PrivateKey key;
        for (auto& b : key.bytes) b = static_cast<std::uint8_t>(rng());
        const auto P = expand_key(key);

        const auto w = testutil::aes_oracle::schedule(key.bytes);
        for (int i = 0; i < 160; ++i) CHECK(P.bytes[i] == w[16 + i]);  // w4..w43

        std::array<std::uint8_t, 16> rekey;
        for (int i = 0; i < 16; ++i) rekey[i] = w[160 + i];  // w40..w43
        const auto w2 = testutil::aes_oracle::schedule(rekey);
        for (int i = 0; i < 160; ++i) CHECK(P.bytes[160 + i] == w2[16 + i]);
    }
}

TEST_CASE("bit addressing is MSB-first") {
    KeyExpansion P{};
    P.bytes[0] = 0x80;
    CHECK(P.bit(1) == 1);
    CHECK(P.bit(2) == 0);
    P.bytes[319] = 0x01;
    CHECK(P.bit(2560) == 1);
}

TEST_CASE("mask_at windows and wrap") {
    KeyExpansion P{};
    P.bytes[0] = 0xA5;  // P_1..P_8 = 1,0,1,0,0,1,0,1
    P.bytes[319] = 0x3C;
    const auto m1 = mask_at(P, 1);
    CHECK(m1.bits == std::array<std::uint8_t, 8>{1, 0, 1, 0, 0, 1, 0, 1});
    const auto m320 = mask_at(P, 320);  // last full window: P_2553..P_2560
    CHECK(m320.bits == std::array<std::uint8_t, 8>{0, 0, 1, 1, 1, 1, 0, 0});
    const auto m321 = mask_at(P, 321);  // wraps to P_1..P_8
    CHECK(m321.bits == m1.bits);
    CHECK(mask_at(P, 1).ones_count() == 4);
    CHECK_THROWS_AS(mask_at(P, 0), std::invalid_argument);
}

TEST_CASE("permute examples") {
    const std::array<int, 8> v = {1, 2, 3, 4, 5, 6, 7, 8};
    CHECK(permute(v, make_mask(0xFF)) == v);
    CHECK(permute(v, make_mask(0x00)) == v);
    CHECK(permute(v, make_mask(0xAA)) == std::array<int, 8>{1, 3, 5, 7, 2, 4, 6, 8});
    CHECK(unpermute(std::array<int, 8>{1, 3, 5, 7, 2, 4, 6, 8}, make_mask(0xAA)) == v);
    CHECK(unpermute(v, make_mask(0xFF)) == v);
}

TEST_CASE("unpermute inverts permute for all 256 masks") {
    testutil::Rng rng(33);
    std::uniform_int_distribution<long> d(-1000, 1000);
    for (int mask = 0; mask < 256; ++mask) {
        const auto m = make_mask(static_cast<std::uint8_t>(mask));
        for (int t = 0; t < 20; ++t) {
            std::array<long, 8> v;
            for (auto& x : v) x = d(rng);
            CHECK(unpermute(permute(v, m), m) == v);
        }
    }
}
