// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <stdexcept>

#include "aspforge/crypto/digest.hpp"
#include "aspforge/crypto/fletcher32.hpp"
#include "aspforge/crypto/hmac.hpp"
#include "aspforge/crypto/secded.hpp"
#include "aspforge/rng.hpp"
#include "oracles.hpp"

using namespace aspforge;
using namespace aspforge::crypto;

namespace {
std::string hex32(const std::array<uint8_t, 32>& d) { return to_hex(as_view(d)); }
std::string hex48(const std::array<uint8_t, 48>& d) { return to_hex(as_view(d)); }
}  // namespace

TEST_CASE("sha256 known answers") {
  CHECK(hex32(sha256({})) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(hex32(sha256(str_view("abc"))) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(hex32(sha256(str_view(
            "abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"))) ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
  // determinism
  Bytes m = SeededRng::from_seed(1).bytes(1000);
  CHECK(sha256(as_view(m)) == sha256(as_view(m)));
}

TEST_CASE("sha256 streaming equals one-shot across split points") {
  auto rng = SeededRng::from_seed(2);
  Bytes data = rng.bytes(517);
  auto whole = sha256(as_view(data));
  for (size_t split : {0u, 1u, 63u, 64u, 65u, 128u, 300u, 516u, 517u}) {
    Sha256 h;
    h.update(BytesView(data.data(), split));
    h.update(BytesView(data.data() + split, data.size() - split));
    CHECK(h.finish() == whole);
  }
}

TEST_CASE("sha384 known answers") {
  CHECK(hex48(sha384({})) ==
        "38b060a751ac96384cd9327eb1b1e36a21fdb71114be07434c0cc7bf63f6e1da274edebfe76f"
        "65fbd51ad2f14898b95b");
  CHECK(hex48(sha384(str_view("abc"))) ==
        "cb00753f45a35e8bb5a03d699ac65007272c32ab0eded1631a8b605a43ff5bed8086072ba1e7"
        "cc2358baeca134c825a7");
}

TEST_CASE("sha384 of a 48-octet input is 48 octets and deterministic") {
  Bytes key_encoding = SeededRng::from_seed(3).bytes(48);
  auto d1 = sha384(as_view(key_encoding));
  auto d2 = sha384(as_view(key_encoding));
  CHECK(d1.size() == 48);
  CHECK(d1 == d2);
}

TEST_CASE("digest type carries algorithm and matching length") {
  auto d256 = hash(HashAlg::Sha256, str_view("x"));
  auto d384 = hash(HashAlg::Sha384, str_view("x"));
  CHECK(d256.bytes.size() == 32);
  CHECK(d384.bytes.size() == 48);
}

TEST_CASE("hmac-sha256 rfc4231 vectors") {
  Bytes key1(20, 0x0b);
  CHECK(hex32(hmac_sha256(as_view(key1), str_view("Hi There"))) ==
        "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7");
  CHECK(hex32(hmac_sha256(str_view("Jefe"), str_view("what do ya want for nothing?"))) ==
        "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
  // long key (> block size) case
  Bytes key3(131, 0xaa);
  CHECK(hex32(hmac_sha256(as_view(key3),
                          str_view("Test Using Larger Than Block-Size Key - Hash Key First"))) ==
        "60e431591ee0b67f0d8a26aacbf5b77f8e0bc6213728c5140546040f0ee37f54");
}

TEST_CASE("hmac key sensitivity: one flipped key bit flips the tag") {
  auto rng = SeededRng::from_seed(4);
  Bytes key = rng.bytes(32);
  Bytes msg = rng.bytes(64);
  auto tag = hmac_sha256(as_view(key), as_view(msg));
  CHECK(hmac_sha256(as_view(key), as_view(msg)) == tag);
  for (int trial = 0; trial < 64; ++trial) {
    Bytes key2 = key;
    key2[rng.below(key2.size())] ^= static_cast<uint8_t>(1u << rng.below(8));
    if (key2 == key) continue;
    CHECK(hmac_sha256(as_view(key2), as_view(msg)) != tag);
  }
  CHECK(hmac_sha256_verify(as_view(key), as_view(msg), as_view(tag)));
}

TEST_CASE("aes-128 fips-197 and sp800-38a known answers") {
  auto k197 = *fixed_from_hex<16>("000102030405060708090a0b0c0d0e0f");
  auto p197 = *fixed_from_hex<16>("00112233445566778899aabbccddeeff");
  CHECK(to_hex(as_view(aes128_encrypt_block(k197, p197))) ==
        "69c4e0d86a7b0430d8cdb78070b4c55a");

  auto key = *fixed_from_hex<16>("2b7e151628aed2a6abf7158809cf4f3c");
  auto pt = *from_hex("6bc1bee22e409f96e93d7e117393172aae2d8a571e03ac9c9eb76fac45af8e51");
  CHECK(to_hex(as_view(aes128_ecb_encrypt(key, as_view(pt)))) ==
        "3ad77bb40d7a3660a89ecaf32466ef97f5d3d58503b9699de785895a96fdbaaf");

  auto iv = *fixed_from_hex<16>("000102030405060708090a0b0c0d0e0f");
  CHECK(to_hex(as_view(aes128_cbc_encrypt(key, iv, as_view(pt)))) ==
        "7649abac8119b246cee98e9b12e9197d5086cb9b507219ee95db113a917678b2");
}

TEST_CASE("aes round-trips are identities for block-aligned data") {
  auto rng = SeededRng::from_seed(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto key = rng.array<16>();
    auto iv = rng.array<16>();
    Bytes data = rng.bytes(16 * (1 + rng.below(16)));
    CHECK(aes128_ecb_decrypt(key, as_view(aes128_ecb_encrypt(key, as_view(data)))) == data);
    CHECK(aes128_cbc_decrypt(key, iv, as_view(aes128_cbc_encrypt(key, iv, as_view(data)))) ==
          data);
  }
}

TEST_CASE("cbc first plaintext block equals ecb decrypt of c0 xor iv") {
  auto rng = SeededRng::from_seed(6);
  auto key = rng.array<16>();
  auto iv = rng.array<16>();
  Bytes ct = rng.bytes(64);
  auto plain = aes128_cbc_decrypt(key, iv, as_view(ct));
  Block16 c0{};
  std::copy(ct.begin(), ct.begin() + 16, c0.begin());
  auto first = aes128_decrypt_block(key, c0);
  for (int i = 0; i < 16; ++i) first[i] ^= iv[i];
  CHECK(std::equal(first.begin(), first.end(), plain.begin()));
}

TEST_CASE("distinct keys produce distinct blocks") {
  auto rng = SeededRng::from_seed(7);
  auto block = rng.array<16>();
  auto k1 = rng.array<16>();
  auto k2 = rng.array<16>();
  CHECK(aes128_encrypt_block(k1, block) != aes128_encrypt_block(k2, block));
}

TEST_CASE("aes rejects misaligned input") {
  auto key = SeededRng::from_seed(8).array<16>();
  Bytes data(17, 0);
  CHECK_THROWS_AS(aes128_ecb_encrypt(key, as_view(data)), std::invalid_argument);
  CHECK_THROWS_AS(aes128_cbc_decrypt(key, Block16{}, as_view(data)), std::invalid_argument);
}

TEST_CASE("fletcher32 pinned vectors") {
  CHECK(fletcher32({}) == 0x00000000u);
  CHECK(fletcher32(str_view("abcde")) == 0xF04FC729u);
  CHECK(fletcher32(str_view("abcdef")) == 0x56502D2Au);
  CHECK(fletcher32(str_view("abcdefgh")) == 0xEBE19591u);
}

TEST_CASE("fletcher32 matches the independent reference on 10000 random inputs") {
  auto rng = SeededRng::from_seed(9);
  for (int trial = 0; trial < 10000; ++trial) {
    Bytes data = rng.bytes(rng.below(128));
    CAPTURE(trial);
    REQUIRE(fletcher32(as_view(data)) == oracles::ref_fletcher32(as_view(data)));
  }
  // and on a few long buffers that exercise the deferred reduction
  for (size_t len : {1000u, 4096u, 70000u}) {
    Bytes data = rng.bytes(len);
    CHECK(fletcher32(as_view(data)) == oracles::ref_fletcher32(as_view(data)));
  }
}

TEST_CASE("fletcher32 flips on any single input bit flip (1000 trials)") {
  auto rng = SeededRng::from_seed(10);
  for (int trial = 0; trial < 1000; ++trial) {
    Bytes data = rng.bytes(1 + rng.below(64));
    uint32_t sum = fletcher32(as_view(data));
    Bytes mutated = data;
    mutated[rng.below(mutated.size())] ^= static_cast<uint8_t>(1u << rng.below(8));
    if (mutated == data) continue;
    CAPTURE(trial);
    REQUIRE(fletcher32(as_view(mutated)) != sum);
  }
}

TEST_CASE("secded clean round-trip for every byte") {
  for (int b = 0; b < 256; ++b) {
    auto w = secded_encode(static_cast<uint8_t>(b));
    auto d = secded_decode(w);
    CHECK(d.status == SecdedStatus::Clean);
    CHECK(d.data == b);
  }
}

TEST_CASE("secded corrects every single-bit flip (256 x 13 exhaustive)") {
  for (int b = 0; b < 256; ++b) {
    auto w = secded_encode(static_cast<uint8_t>(b));
    for (int flip = 0; flip < 13; ++flip) {
      SecdedWord c = w;
      if (flip < 8)
        c.data ^= static_cast<uint8_t>(1u << flip);
      else
        c.check ^= static_cast<uint8_t>(1u << (flip - 8));
      auto d = secded_decode(c);
      CAPTURE(b);
      CAPTURE(flip);
      REQUIRE(d.status == SecdedStatus::Corrected);
      REQUIRE(d.data == b);
    }
  }
}

TEST_CASE("secded flags double-bit flips as uncorrectable") {
  // exhaustive over all byte values and flip pairs
  for (int b = 0; b < 256; ++b) {
    auto w = secded_encode(static_cast<uint8_t>(b));
    for (int f1 = 0; f1 < 13; ++f1) {
      for (int f2 = f1 + 1; f2 < 13; ++f2) {
        SecdedWord c = w;
        auto flip = [&c](int f) {
          if (f < 8)
            c.data ^= static_cast<uint8_t>(1u << f);
          else
            c.check ^= static_cast<uint8_t>(1u << (f - 8));
        };
        flip(f1);
        flip(f2);
        REQUIRE(secded_decode(c).status == SecdedStatus::Uncorrectable);
      }
    }
  }
  // plus 500 random double flips, as sampled wear
  auto rng = SeededRng::from_seed(11);
  for (int trial = 0; trial < 500; ++trial) {
    auto w = secded_encode(static_cast<uint8_t>(rng.below(256)));
    int f1 = static_cast<int>(rng.below(13));
    int f2 = static_cast<int>(rng.below(13));
    if (f1 == f2) continue;
    auto flip = [&w](int f) {
      if (f < 8)
        w.data ^= static_cast<uint8_t>(1u << f);
      else
        w.check ^= static_cast<uint8_t>(1u << (f - 8));
    };
    flip(f1);
    flip(f2);
    CHECK(secded_decode(w).status == SecdedStatus::Uncorrectable);
  }
}

TEST_CASE("seeded rng: deterministic, fork-independent") {
  auto a = SeededRng::from_seed(42);
  auto b = SeededRng::from_seed(42);
  CHECK(a.bytes(64) == b.bytes(64));

  auto parent = SeededRng::from_seed(43);
  auto child = parent.fork("child");
  Bytes child_first = child.bytes(16);
  // draws from the parent do not perturb a re-forked child stream
  parent.bytes(100);
  auto child2 = parent.fork("child");
  CHECK(child2.bytes(16) == child_first);
  CHECK(SeededRng::from_seed(43).fork("other").bytes(16) != child_first);
}
