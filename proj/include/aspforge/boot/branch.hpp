// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>

namespace aspforge::boot {

// 32-bit ARM unconditional branch: condition "always" with opcode b (0xEA)
// or bl (0xEB), 24-bit signed word offset, target = pc + 8 + 4*offset.

/// Decodes word as executed at pc; returns the branch target or nothing for
/// any other bit pattern.
std::optional<uint32_t> decode_branch(uint32_t word, uint32_t pc);

/// Encodes b <target> for execution at pc. Fails when the displacement is
/// not word-aligned or exceeds the 24-bit signed range.
std::optional<uint32_t> encode_branch(uint32_t pc, uint32_t target);

}  // namespace aspforge::boot
