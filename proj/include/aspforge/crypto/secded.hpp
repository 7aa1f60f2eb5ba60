// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace aspforge::crypto {

/// Hamming(13,8) SEC-DED word: one data octet plus 5 check bits
/// (4 Hamming bits and an overall parity bit in check bit 4).
struct SecdedWord {
  uint8_t data = 0;
  uint8_t check = 0;  // low 5 bits used
};

enum class SecdedStatus { Clean, Corrected, Uncorrectable };

struct SecdedDecode {
  uint8_t data = 0;
  SecdedStatus status = SecdedStatus::Clean;
};

SecdedWord secded_encode(uint8_t byte);

/// Corrects any single flipped bit among the 13 stored bits and flags any
/// double flip as Uncorrectable.
SecdedDecode secded_decode(const SecdedWord& word);

}  // namespace aspforge::crypto
