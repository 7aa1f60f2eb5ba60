// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "aspforge/bytes.hpp"

namespace aspforge::crypto {

/// Streaming SHA-256. The compression kernel is selected at runtime
/// (scalar reference or SHA-NI) — see cpu.hpp.
class Sha256 {
 public:
  Sha256();
  void update(BytesView data);
  std::array<uint8_t, 32> finish();

  static std::array<uint8_t, 32> digest(BytesView data);

 private:
  uint32_t state_[8];
  uint8_t buf_[64];
  size_t buf_len_ = 0;
  uint64_t total_ = 0;
};

std::array<uint8_t, 32> sha256(BytesView data);

namespace detail {
// Compresses n consecutive 64-byte blocks into state.
void sha256_compress_scalar(uint32_t state[8], const uint8_t* blocks, size_t n);
void sha256_compress_shani(uint32_t state[8], const uint8_t* blocks, size_t n);
}  // namespace detail

}  // namespace aspforge::crypto
