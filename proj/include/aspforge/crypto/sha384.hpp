// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

#include "aspforge/bytes.hpp"

namespace aspforge::crypto {

/// Streaming SHA-384 (SHA-512 core, truncated output).
class Sha384 {
 public:
  Sha384();
  void update(BytesView data);
  std::array<uint8_t, 48> finish();

  static std::array<uint8_t, 48> digest(BytesView data);

 private:
  uint64_t state_[8];
  uint8_t buf_[128];
  size_t buf_len_ = 0;
  uint64_t total_ = 0;
};

std::array<uint8_t, 48> sha384(BytesView data);

}  // namespace aspforge::crypto
