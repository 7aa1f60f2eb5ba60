// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0
//
// Scalar reference vs SIMD variant equivalence. On hosts without the
// relevant ISA extensions the Simd selection falls back to scalar and these
// cases degenerate to self-comparison, which is fine.

#include <doctest.h>

#include "aspforge/crypto/aes128.hpp"
#include "aspforge/crypto/cpu.hpp"
#include "aspforge/crypto/sha256.hpp"
#include "aspforge/rng.hpp"

using namespace aspforge;
using namespace aspforge::crypto;

namespace {

struct BackendGuard {
  ~BackendGuard() {
    set_aes_backend(Backend::Auto);
    set_sha256_backend(Backend::Auto);
  }
};

}  // namespace

TEST_CASE("backend selection reports a name") {
  BackendGuard guard;
  set_sha256_backend(Backend::Auto);
  set_aes_backend(Backend::Auto);
  CHECK(active_sha256_backend() != nullptr);
  CHECK(active_aes_backend() != nullptr);
  if (cpu_features().shani) CHECK(std::string(active_sha256_backend()) == "sha-ni");
  if (cpu_features().aesni) CHECK(std::string(active_aes_backend()) == "aes-ni");
  set_sha256_backend(Backend::Scalar);
  set_aes_backend(Backend::Scalar);
  CHECK(std::string(active_sha256_backend()) == "scalar");
  CHECK(std::string(active_aes_backend()) == "scalar");
}

TEST_CASE("sha256 scalar and simd agree on random inputs of every shape") {
  BackendGuard guard;
  auto rng = SeededRng::from_seed(100);
  for (int trial = 0; trial < 200; ++trial) {
    Bytes data = rng.bytes(rng.below(512));
    set_sha256_backend(Backend::Scalar);
    auto scalar = sha256(as_view(data));
    set_sha256_backend(Backend::Simd);
    auto simd = sha256(as_view(data));
    CAPTURE(trial);
    REQUIRE(scalar == simd);
  }
  // multi-block streaming path
  set_sha256_backend(Backend::Scalar);
  Bytes big = rng.bytes(1 << 16);
  auto scalar_big = sha256(as_view(big));
  set_sha256_backend(Backend::Simd);
  CHECK(sha256(as_view(big)) == scalar_big);
}

TEST_CASE("aes scalar and simd agree: block, ecb, cbc, both directions") {
  BackendGuard guard;
  auto rng = SeededRng::from_seed(101);
  for (int trial = 0; trial < 100; ++trial) {
    auto key = rng.array<16>();
    auto iv = rng.array<16>();
    Bytes data = rng.bytes(16 * (1 + rng.below(8)));

    set_aes_backend(Backend::Scalar);
    auto ecb_s = aes128_ecb_encrypt(key, as_view(data));
    auto cbc_s = aes128_cbc_encrypt(key, iv, as_view(data));
    auto dec_s = aes128_cbc_decrypt(key, iv, as_view(data));

    set_aes_backend(Backend::Simd);
    CAPTURE(trial);
    REQUIRE(aes128_ecb_encrypt(key, as_view(data)) == ecb_s);
    REQUIRE(aes128_cbc_encrypt(key, iv, as_view(data)) == cbc_s);
    REQUIRE(aes128_cbc_decrypt(key, iv, as_view(data)) == dec_s);
  }
}

TEST_CASE("cross-backend round-trip: encrypt on one, decrypt on the other") {
  BackendGuard guard;
  auto rng = SeededRng::from_seed(102);
  auto key = rng.array<16>();
  Bytes data = rng.bytes(64);

  set_aes_backend(Backend::Simd);
  auto ct = aes128_ecb_encrypt(key, as_view(data));
  set_aes_backend(Backend::Scalar);
  CHECK(aes128_ecb_decrypt(key, as_view(ct)) == data);
}
