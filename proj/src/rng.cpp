// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/rng.hpp"

#include <cstring>

#include "aspforge/crypto/sha256.hpp"

namespace aspforge {

namespace {

crypto::Key128 derive_key(BytesView material) {
  auto d = crypto::sha256(material);
  crypto::Key128 k{};
  std::memcpy(k.data(), d.data(), 16);
  return k;
}

}  // namespace

SeededRng::SeededRng(const crypto::Key128& key) : key_(key), cipher_(key) {}

SeededRng SeededRng::from_seed(uint64_t seed) {
  Bytes material;
  append(material, str_view("aspforge.rng.v1"));
  append_u64le(material, seed);
  return SeededRng(derive_key(as_view(material)));
}

SeededRng SeededRng::fork(std::string_view label) const {
  Bytes material;
  append(material, as_view(key_));
  append(material, str_view(label));
  return SeededRng(derive_key(as_view(material)));
}

void SeededRng::fill(uint8_t* out, size_t len) {
  while (len > 0) {
    if (buf_pos_ == 16) {
      uint8_t ctr[16] = {0};
      put_u32le(ctr, static_cast<uint32_t>(counter_));
      put_u32le(ctr + 4, static_cast<uint32_t>(counter_ >> 32));
      cipher_.encrypt_block(ctr, buf_);
      ++counter_;
      buf_pos_ = 0;
    }
    size_t n = 16 - buf_pos_;
    if (n > len) n = len;
    std::memcpy(out, buf_ + buf_pos_, n);
    buf_pos_ += n;
    out += n;
    len -= n;
  }
}

Bytes SeededRng::bytes(size_t len) {
  Bytes out(len);
  fill(out.data(), len);
  return out;
}

uint64_t SeededRng::next_u64() {
  uint8_t b[8];
  fill(b, 8);
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

uint64_t SeededRng::below(uint64_t n) {
  // Rejection sampling keeps the draw unbiased.
  uint64_t limit = n * (UINT64_MAX / n);
  for (;;) {
    uint64_t v = next_u64();
    if (v < limit) return v % n;
  }
}

}  // namespace aspforge
