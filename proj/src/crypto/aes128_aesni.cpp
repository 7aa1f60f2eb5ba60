// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/crypto/aes128.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

namespace aspforge::crypto::detail {

namespace {

__attribute__((target("aes,sse2"))) inline __m128i expand_step(__m128i key,
                                                               __m128i keygened) {
  keygened = _mm_shuffle_epi32(keygened, _MM_SHUFFLE(3, 3, 3, 3));
  key = _mm_xor_si128(key, _mm_slli_si128(key, 4));
  key = _mm_xor_si128(key, _mm_slli_si128(key, 4));
  key = _mm_xor_si128(key, _mm_slli_si128(key, 4));
  return _mm_xor_si128(key, keygened);
}

__attribute__((target("aes,sse2"))) void aesni_expand(const uint8_t key[16],
                                                      uint8_t enc[176],
                                                      uint8_t dec[176]) {
  __m128i rk[11];
  rk[0] = _mm_loadu_si128(reinterpret_cast<const __m128i*>(key));
  rk[1] = expand_step(rk[0], _mm_aeskeygenassist_si128(rk[0], 0x01));
  rk[2] = expand_step(rk[1], _mm_aeskeygenassist_si128(rk[1], 0x02));
  rk[3] = expand_step(rk[2], _mm_aeskeygenassist_si128(rk[2], 0x04));
  rk[4] = expand_step(rk[3], _mm_aeskeygenassist_si128(rk[3], 0x08));
  rk[5] = expand_step(rk[4], _mm_aeskeygenassist_si128(rk[4], 0x10));
  rk[6] = expand_step(rk[5], _mm_aeskeygenassist_si128(rk[5], 0x20));
  rk[7] = expand_step(rk[6], _mm_aeskeygenassist_si128(rk[6], 0x40));
  rk[8] = expand_step(rk[7], _mm_aeskeygenassist_si128(rk[7], 0x80));
  rk[9] = expand_step(rk[8], _mm_aeskeygenassist_si128(rk[8], 0x1b));
  rk[10] = expand_step(rk[9], _mm_aeskeygenassist_si128(rk[9], 0x36));

  for (int i = 0; i < 11; ++i)
    _mm_store_si128(reinterpret_cast<__m128i*>(enc) + i, rk[i]);

  // Equivalent-inverse schedule for aesdec.
  _mm_store_si128(reinterpret_cast<__m128i*>(dec) + 0, rk[10]);
  for (int i = 1; i < 10; ++i)
    _mm_store_si128(reinterpret_cast<__m128i*>(dec) + i, _mm_aesimc_si128(rk[10 - i]));
  _mm_store_si128(reinterpret_cast<__m128i*>(dec) + 10, rk[0]);
}

__attribute__((target("aes,sse2"))) void aesni_encrypt(const uint8_t rk[176],
                                                       const uint8_t in[16],
                                                       uint8_t out[16]) {
  const __m128i* k = reinterpret_cast<const __m128i*>(rk);
  __m128i x = _mm_loadu_si128(reinterpret_cast<const __m128i*>(in));
  x = _mm_xor_si128(x, _mm_load_si128(k + 0));
  for (int i = 1; i < 10; ++i) x = _mm_aesenc_si128(x, _mm_load_si128(k + i));
  x = _mm_aesenclast_si128(x, _mm_load_si128(k + 10));
  _mm_storeu_si128(reinterpret_cast<__m128i*>(out), x);
}

__attribute__((target("aes,sse2"))) void aesni_decrypt(const uint8_t rk[176],
                                                       const uint8_t in[16],
                                                       uint8_t out[16]) {
  const __m128i* k = reinterpret_cast<const __m128i*>(rk);
  __m128i x = _mm_loadu_si128(reinterpret_cast<const __m128i*>(in));
  x = _mm_xor_si128(x, _mm_load_si128(k + 0));
  for (int i = 1; i < 10; ++i) x = _mm_aesdec_si128(x, _mm_load_si128(k + i));
  x = _mm_aesdeclast_si128(x, _mm_load_si128(k + 10));
  _mm_storeu_si128(reinterpret_cast<__m128i*>(out), x);
}

}  // namespace

const Aes128Ops& aes128_ops_aesni() {
  static const Aes128Ops ops{aesni_expand, aesni_encrypt, aesni_decrypt, "aes-ni"};
  return ops;
}

}  // namespace aspforge::crypto::detail

#else

namespace aspforge::crypto::detail {

const Aes128Ops& aes128_ops_aesni() { return aes128_ops_scalar(); }

}  // namespace aspforge::crypto::detail

#endif
