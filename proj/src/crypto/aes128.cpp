// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/crypto/aes128.hpp"

#include <atomic>
#include <cstring>
#include <stdexcept>

#include "aspforge/crypto/cpu.hpp"

namespace aspforge::crypto {

namespace {

std::atomic<const detail::Aes128Ops*> g_ops{nullptr};

const detail::Aes128Ops* pick(Backend b) {
  bool simd = cpu_features().aesni;
  if (b == Backend::Scalar) simd = false;
  return simd ? &detail::aes128_ops_aesni() : &detail::aes128_ops_scalar();
}

void require_aligned(BytesView data) {
  if (data.size() % 16 != 0)
    throw std::invalid_argument("aes128: data length not a multiple of 16");
}

}  // namespace

namespace detail {
const Aes128Ops& aes128_ops_active() {
  const Aes128Ops* ops = g_ops.load(std::memory_order_relaxed);
  if (!ops) {
    ops = pick(Backend::Auto);
    g_ops.store(ops);
  }
  return *ops;
}
}  // namespace detail

void set_aes_backend(Backend b) { g_ops.store(pick(b)); }

const char* active_aes_backend() { return detail::aes128_ops_active().name; }

Aes128::Aes128(const Key128& key) : ops_(&detail::aes128_ops_active()) {
  ops_->expand(key.data(), enc_, dec_);
}

Block16 Aes128::encrypt(const Block16& in) const {
  Block16 out;
  encrypt_block(in.data(), out.data());
  return out;
}

Block16 Aes128::decrypt(const Block16& in) const {
  Block16 out;
  decrypt_block(in.data(), out.data());
  return out;
}

Bytes aes128_ecb_encrypt(const Key128& key, BytesView data) {
  require_aligned(data);
  Aes128 ctx(key);
  Bytes out(data.size());
  for (size_t i = 0; i < data.size(); i += 16) ctx.encrypt_block(data.data() + i, out.data() + i);
  return out;
}

Bytes aes128_ecb_decrypt(const Key128& key, BytesView data) {
  require_aligned(data);
  Aes128 ctx(key);
  Bytes out(data.size());
  for (size_t i = 0; i < data.size(); i += 16) ctx.decrypt_block(data.data() + i, out.data() + i);
  return out;
}

Bytes aes128_cbc_encrypt(const Key128& key, const Block16& iv, BytesView data) {
  require_aligned(data);
  Aes128 ctx(key);
  Bytes out(data.size());
  uint8_t chain[16];
  std::memcpy(chain, iv.data(), 16);
  for (size_t i = 0; i < data.size(); i += 16) {
    uint8_t x[16];
    for (int j = 0; j < 16; ++j) x[j] = data[i + j] ^ chain[j];
    ctx.encrypt_block(x, out.data() + i);
    std::memcpy(chain, out.data() + i, 16);
  }
  return out;
}

Bytes aes128_cbc_decrypt(const Key128& key, const Block16& iv, BytesView data) {
  require_aligned(data);
  Aes128 ctx(key);
  Bytes out(data.size());
  uint8_t chain[16];
  std::memcpy(chain, iv.data(), 16);
  for (size_t i = 0; i < data.size(); i += 16) {
    uint8_t x[16];
    ctx.decrypt_block(data.data() + i, x);
    for (int j = 0; j < 16; ++j) out[i + j] = x[j] ^ chain[j];
    std::memcpy(chain, data.data() + i, 16);
  }
  return out;
}

Block16 aes128_encrypt_block(const Key128& key, const Block16& in) {
  return Aes128(key).encrypt(in);
}

Block16 aes128_decrypt_block(const Key128& key, const Block16& in) {
  return Aes128(key).decrypt(in);
}

}  // namespace aspforge::crypto
