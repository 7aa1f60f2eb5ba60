// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

#include "aspforge/bytes.hpp"

namespace aspforge::crypto {

using Key128 = std::array<uint8_t, 16>;
using Block16 = std::array<uint8_t, 16>;

namespace detail {
struct Aes128Ops {
  void (*expand)(const uint8_t key[16], uint8_t enc[176], uint8_t dec[176]);
  void (*encrypt)(const uint8_t enc[176], const uint8_t in[16], uint8_t out[16]);
  void (*decrypt)(const uint8_t dec[176], const uint8_t in[16], uint8_t out[16]);
  const char* name;
};
const Aes128Ops& aes128_ops_scalar();
const Aes128Ops& aes128_ops_aesni();
const Aes128Ops& aes128_ops_active();
}  // namespace detail

/// One expanded AES-128 key. The block kernel (scalar reference or AES-NI)
/// is bound at construction from the active backend.
class Aes128 {
 public:
  explicit Aes128(const Key128& key);

  void encrypt_block(const uint8_t in[16], uint8_t out[16]) const {
    ops_->encrypt(enc_, in, out);
  }
  void decrypt_block(const uint8_t in[16], uint8_t out[16]) const {
    ops_->decrypt(dec_, in, out);
  }

  Block16 encrypt(const Block16& in) const;
  Block16 decrypt(const Block16& in) const;

 private:
  alignas(16) uint8_t enc_[176];
  alignas(16) uint8_t dec_[176];
  const detail::Aes128Ops* ops_;
};

// Bulk modes. Data length must be a multiple of 16; no padding is applied
// (firmware bodies are block-aligned by construction). Throws
// std::invalid_argument on misaligned input.
Bytes aes128_ecb_encrypt(const Key128& key, BytesView data);
Bytes aes128_ecb_decrypt(const Key128& key, BytesView data);
Bytes aes128_cbc_encrypt(const Key128& key, const Block16& iv, BytesView data);
Bytes aes128_cbc_decrypt(const Key128& key, const Block16& iv, BytesView data);

Block16 aes128_encrypt_block(const Key128& key, const Block16& in);
Block16 aes128_decrypt_block(const Key128& key, const Block16& in);

}  // namespace aspforge::crypto
