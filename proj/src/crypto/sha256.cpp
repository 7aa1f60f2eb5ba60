// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/crypto/sha256.hpp"

#include <atomic>
#include <cstring>

#include "aspforge/crypto/cpu.hpp"

namespace aspforge::crypto {

namespace {

using CompressFn = void (*)(uint32_t[8], const uint8_t*, size_t);

std::atomic<CompressFn> g_compress{nullptr};
std::atomic<const char*> g_backend_name{"unset"};

CompressFn pick(Backend b) {
  bool simd = cpu_features().shani;
  if (b == Backend::Scalar) simd = false;
  if (b == Backend::Simd && !cpu_features().shani) simd = false;
  g_backend_name.store(simd ? "sha-ni" : "scalar");
  return simd ? detail::sha256_compress_shani : detail::sha256_compress_scalar;
}

CompressFn compress() {
  CompressFn fn = g_compress.load(std::memory_order_relaxed);
  if (!fn) {
    fn = pick(Backend::Auto);
    g_compress.store(fn);
  }
  return fn;
}

constexpr uint32_t kIv[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                             0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};

}  // namespace

void set_sha256_backend(Backend b) { g_compress.store(pick(b)); }

const char* active_sha256_backend() {
  compress();
  return g_backend_name.load();
}

Sha256::Sha256() { std::memcpy(state_, kIv, sizeof(state_)); }

void Sha256::update(BytesView data) {
  CompressFn fn = compress();
  total_ += data.size();
  size_t off = 0;
  if (buf_len_ > 0) {
    size_t need = 64 - buf_len_;
    size_t n = data.size() < need ? data.size() : need;
    std::memcpy(buf_ + buf_len_, data.data(), n);
    buf_len_ += n;
    off = n;
    if (buf_len_ == 64) {
      fn(state_, buf_, 1);
      buf_len_ = 0;
    }
  }
  size_t blocks = (data.size() - off) / 64;
  if (blocks > 0) {
    fn(state_, data.data() + off, blocks);
    off += blocks * 64;
  }
  if (off < data.size()) {
    std::memcpy(buf_, data.data() + off, data.size() - off);
    buf_len_ = data.size() - off;
  }
}

std::array<uint8_t, 32> Sha256::finish() {
  uint64_t bit_len = total_ * 8;
  uint8_t pad[72];
  size_t pad_len = (buf_len_ < 56) ? (56 - buf_len_) : (120 - buf_len_);
  std::memset(pad, 0, sizeof(pad));
  pad[0] = 0x80;
  for (int i = 0; i < 8; ++i) pad[pad_len + i] = static_cast<uint8_t>(bit_len >> (56 - 8 * i));
  update(BytesView(pad, pad_len + 8));

  std::array<uint8_t, 32> out{};
  for (int i = 0; i < 8; ++i) {
    out[4 * i] = static_cast<uint8_t>(state_[i] >> 24);
    out[4 * i + 1] = static_cast<uint8_t>(state_[i] >> 16);
    out[4 * i + 2] = static_cast<uint8_t>(state_[i] >> 8);
    out[4 * i + 3] = static_cast<uint8_t>(state_[i]);
  }
  return out;
}

std::array<uint8_t, 32> Sha256::digest(BytesView data) {
  Sha256 h;
  h.update(data);
  return h.finish();
}

std::array<uint8_t, 32> sha256(BytesView data) { return Sha256::digest(data); }

}  // namespace aspforge::crypto
