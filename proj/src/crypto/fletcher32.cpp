// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/crypto/fletcher32.hpp"

namespace aspforge::crypto {

uint32_t fletcher32(BytesView data) {
  uint32_t c0 = 0, c1 = 0;
  size_t i = 0;
  size_t n = data.size();
  while (i < n) {
    // 359 words per inner run keeps the 32-bit accumulators from overflowing.
    size_t words = (n - i + 1) / 2;
    if (words > 359) words = 359;
    for (size_t w = 0; w < words; ++w) {
      uint16_t v = data[i];
      ++i;
      if (i < n) {
        v = static_cast<uint16_t>(v | (static_cast<uint16_t>(data[i]) << 8));
        ++i;
      }
      c0 += v;
      c1 += c0;
    }
    c0 %= 65535;
    c1 %= 65535;
  }
  return (c1 << 16) | c0;
}

}  // namespace aspforge::crypto
