// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/boot/branch.hpp"

namespace aspforge::boot {

std::optional<uint32_t> decode_branch(uint32_t word, uint32_t pc) {
  uint32_t op = word >> 24;
  if (op != 0xEA && op != 0xEB) return std::nullopt;
  int32_t offset = static_cast<int32_t>(word << 8) >> 8;  // sign-extend 24 bits
  return pc + 8 + 4 * static_cast<uint32_t>(offset);
}

std::optional<uint32_t> encode_branch(uint32_t pc, uint32_t target) {
  int64_t disp = static_cast<int64_t>(target) - static_cast<int64_t>(pc) - 8;
  if (disp % 4 != 0) return std::nullopt;
  int64_t offset = disp / 4;
  if (offset < -(1 << 23) || offset >= (1 << 23)) return std::nullopt;
  return 0xEA000000u | (static_cast<uint32_t>(offset) & 0x00FFFFFFu);
}

}  // namespace aspforge::boot
