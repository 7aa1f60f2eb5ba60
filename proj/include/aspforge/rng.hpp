// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

#include "aspforge/bytes.hpp"
#include "aspforge/crypto/aes128.hpp"

namespace aspforge {

/// Deterministic AES-128-CTR stream used for every random draw in the
/// simulator. Identical (seed, fork labels) always reproduce identical
/// streams, which is what makes whole scenario runs byte-reproducible.
class SeededRng {
 public:
  static SeededRng from_seed(uint64_t seed);

  /// Independent child stream; drawing from the child never disturbs the
  /// parent (and vice versa).
  SeededRng fork(std::string_view label) const;

  void fill(uint8_t* out, size_t len);
  Bytes bytes(size_t len);

  template <size_t N>
  std::array<uint8_t, N> array() {
    std::array<uint8_t, N> out{};
    fill(out.data(), N);
    return out;
  }

  uint64_t next_u64();
  /// Uniform value in [0, n); n must be nonzero.
  uint64_t below(uint64_t n);

 private:
  explicit SeededRng(const crypto::Key128& key);

  crypto::Key128 key_{};
  crypto::Aes128 cipher_;
  uint64_t counter_ = 0;
  uint8_t buf_[16];
  size_t buf_pos_ = 16;
};

}  // namespace aspforge
