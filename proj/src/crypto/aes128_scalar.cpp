// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cstdint>
#include <cstring>

#include "aspforge/crypto/aes128.hpp"

namespace aspforge::crypto::detail {

namespace {

constexpr uint8_t gf_mul(uint8_t a, uint8_t b) {
  uint8_t p = 0;
  for (int i = 0; i < 8; ++i) {
    if (b & 1) p ^= a;
    bool hi = a & 0x80;
    a = static_cast<uint8_t>(a << 1);
    if (hi) a ^= 0x1b;
    b >>= 1;
  }
  return p;
}

constexpr uint8_t rotl8(uint8_t x, int n) {
  return static_cast<uint8_t>((x << n) | (x >> (8 - n)));
}

// S-box generated from the field inversion + affine map instead of a literal
// table; the FIPS-197 known-answer test pins it.
constexpr std::array<uint8_t, 256> make_sbox() {
  std::array<uint8_t, 256> inv{};
  for (int a = 1; a < 256; ++a) {
    for (int b = 1; b < 256; ++b) {
      if (gf_mul(static_cast<uint8_t>(a), static_cast<uint8_t>(b)) == 1) {
        inv[a] = static_cast<uint8_t>(b);
        break;
      }
    }
  }
  std::array<uint8_t, 256> sbox{};
  for (int i = 0; i < 256; ++i) {
    uint8_t b = inv[i];
    sbox[i] = static_cast<uint8_t>(b ^ rotl8(b, 1) ^ rotl8(b, 2) ^ rotl8(b, 3) ^
                                   rotl8(b, 4) ^ 0x63);
  }
  return sbox;
}

constexpr std::array<uint8_t, 256> kSbox = make_sbox();

constexpr std::array<uint8_t, 256> make_inv_sbox() {
  std::array<uint8_t, 256> inv{};
  for (int i = 0; i < 256; ++i) inv[kSbox[i]] = static_cast<uint8_t>(i);
  return inv;
}

constexpr std::array<uint8_t, 256> kInvSbox = make_inv_sbox();

constexpr uint8_t kRcon[11] = {0x00, 0x01, 0x02, 0x04, 0x08, 0x10,
                               0x20, 0x40, 0x80, 0x1b, 0x36};

void expand_key(const uint8_t key[16], uint8_t rk[176]) {
  std::memcpy(rk, key, 16);
  for (int i = 4; i < 44; ++i) {
    uint8_t t[4];
    std::memcpy(t, rk + 4 * (i - 1), 4);
    if (i % 4 == 0) {
      uint8_t tmp = t[0];
      t[0] = static_cast<uint8_t>(kSbox[t[1]] ^ kRcon[i / 4]);
      t[1] = kSbox[t[2]];
      t[2] = kSbox[t[3]];
      t[3] = kSbox[tmp];
    }
    for (int j = 0; j < 4; ++j) rk[4 * i + j] = rk[4 * (i - 4) + j] ^ t[j];
  }
}

inline uint8_t xtime(uint8_t x) {
  return static_cast<uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1b : 0x00));
}

void mix_columns(uint8_t s[16]) {
  for (int c = 0; c < 4; ++c) {
    uint8_t* p = s + 4 * c;
    uint8_t a0 = p[0], a1 = p[1], a2 = p[2], a3 = p[3];
    uint8_t all = static_cast<uint8_t>(a0 ^ a1 ^ a2 ^ a3);
    p[0] = static_cast<uint8_t>(a0 ^ all ^ xtime(static_cast<uint8_t>(a0 ^ a1)));
    p[1] = static_cast<uint8_t>(a1 ^ all ^ xtime(static_cast<uint8_t>(a1 ^ a2)));
    p[2] = static_cast<uint8_t>(a2 ^ all ^ xtime(static_cast<uint8_t>(a2 ^ a3)));
    p[3] = static_cast<uint8_t>(a3 ^ all ^ xtime(static_cast<uint8_t>(a3 ^ a0)));
  }
}

void inv_mix_columns(uint8_t s[16]) {
  for (int c = 0; c < 4; ++c) {
    uint8_t* p = s + 4 * c;
    uint8_t a0 = p[0], a1 = p[1], a2 = p[2], a3 = p[3];
    p[0] = static_cast<uint8_t>(gf_mul(a0, 0x0e) ^ gf_mul(a1, 0x0b) ^ gf_mul(a2, 0x0d) ^
                                gf_mul(a3, 0x09));
    p[1] = static_cast<uint8_t>(gf_mul(a0, 0x09) ^ gf_mul(a1, 0x0e) ^ gf_mul(a2, 0x0b) ^
                                gf_mul(a3, 0x0d));
    p[2] = static_cast<uint8_t>(gf_mul(a0, 0x0d) ^ gf_mul(a1, 0x09) ^ gf_mul(a2, 0x0e) ^
                                gf_mul(a3, 0x0b));
    p[3] = static_cast<uint8_t>(gf_mul(a0, 0x0b) ^ gf_mul(a1, 0x0d) ^ gf_mul(a2, 0x09) ^
                                gf_mul(a3, 0x0e));
  }
}

void shift_rows(uint8_t s[16]) {
  uint8_t t;
  // row 1: left rotate by 1
  t = s[1]; s[1] = s[5]; s[5] = s[9]; s[9] = s[13]; s[13] = t;
  // row 2: left rotate by 2
  std::swap(s[2], s[10]);
  std::swap(s[6], s[14]);
  // row 3: left rotate by 3
  t = s[15]; s[15] = s[11]; s[11] = s[7]; s[7] = s[3]; s[3] = t;
}

void inv_shift_rows(uint8_t s[16]) {
  uint8_t t;
  t = s[13]; s[13] = s[9]; s[9] = s[5]; s[5] = s[1]; s[1] = t;
  std::swap(s[2], s[10]);
  std::swap(s[6], s[14]);
  t = s[3]; s[3] = s[7]; s[7] = s[11]; s[11] = s[15]; s[15] = t;
}

inline void add_round_key(uint8_t s[16], const uint8_t rk[16]) {
  for (int i = 0; i < 16; ++i) s[i] ^= rk[i];
}

void scalar_expand(const uint8_t key[16], uint8_t enc[176], uint8_t dec[176]) {
  expand_key(key, enc);
  // The scalar inverse cipher walks the forward schedule backwards.
  std::memcpy(dec, enc, 176);
}

void scalar_encrypt(const uint8_t rk[176], const uint8_t in[16], uint8_t out[16]) {
  uint8_t s[16];
  std::memcpy(s, in, 16);
  add_round_key(s, rk);
  for (int round = 1; round < 10; ++round) {
    for (int i = 0; i < 16; ++i) s[i] = kSbox[s[i]];
    shift_rows(s);
    mix_columns(s);
    add_round_key(s, rk + 16 * round);
  }
  for (int i = 0; i < 16; ++i) s[i] = kSbox[s[i]];
  shift_rows(s);
  add_round_key(s, rk + 160);
  std::memcpy(out, s, 16);
}

void scalar_decrypt(const uint8_t rk[176], const uint8_t in[16], uint8_t out[16]) {
  uint8_t s[16];
  std::memcpy(s, in, 16);
  add_round_key(s, rk + 160);
  for (int round = 9; round >= 1; --round) {
    inv_shift_rows(s);
    for (int i = 0; i < 16; ++i) s[i] = kInvSbox[s[i]];
    add_round_key(s, rk + 16 * round);
    inv_mix_columns(s);
  }
  inv_shift_rows(s);
  for (int i = 0; i < 16; ++i) s[i] = kInvSbox[s[i]];
  add_round_key(s, rk);
  std::memcpy(out, s, 16);
}

}  // namespace

const Aes128Ops& aes128_ops_scalar() {
  static const Aes128Ops ops{scalar_expand, scalar_encrypt, scalar_decrypt, "scalar"};
  return ops;
}

}  // namespace aspforge::crypto::detail
