// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/crypto/secded.hpp"

namespace aspforge::crypto {

namespace {

// Hamming positions 1..12: 1,2,4,8 carry check bits, the rest carry data.
constexpr int kDataPos[8] = {3, 5, 6, 7, 9, 10, 11, 12};

// 12-bit codeword, bit p-1 holds position p.
uint16_t codeword(uint8_t data, uint8_t check) {
  uint16_t cw = 0;
  for (int k = 0; k < 8; ++k)
    if (data & (1 << k)) cw |= static_cast<uint16_t>(1 << (kDataPos[k] - 1));
  for (int i = 0; i < 4; ++i)
    if (check & (1 << i)) cw |= static_cast<uint16_t>(1 << ((1 << i) - 1));
  return cw;
}

uint8_t syndrome(uint16_t cw) {
  uint8_t s = 0;
  for (int i = 0; i < 4; ++i) {
    int parity = 0;
    for (int p = 1; p <= 12; ++p)
      if ((p & (1 << i)) && (cw & (1 << (p - 1)))) parity ^= 1;
    if (parity) s |= static_cast<uint8_t>(1 << i);
  }
  return s;
}

uint8_t extract_data(uint16_t cw) {
  uint8_t d = 0;
  for (int k = 0; k < 8; ++k)
    if (cw & (1 << (kDataPos[k] - 1))) d |= static_cast<uint8_t>(1 << k);
  return d;
}

int popcount12(uint16_t cw) { return __builtin_popcount(cw & 0x0FFF); }

}  // namespace

SecdedWord secded_encode(uint8_t byte) {
  uint16_t cw = codeword(byte, 0);
  uint8_t check = syndrome(cw);  // check bits that zero the syndrome
  cw = codeword(byte, check);
  uint8_t parity = static_cast<uint8_t>(popcount12(cw) & 1);
  return SecdedWord{byte, static_cast<uint8_t>(check | (parity << 4))};
}

SecdedDecode secded_decode(const SecdedWord& word) {
  uint16_t cw = codeword(word.data, word.check & 0x0F);
  uint8_t s = syndrome(cw);
  uint8_t stored_parity = (word.check >> 4) & 1;
  uint8_t parity_mismatch =
      static_cast<uint8_t>((popcount12(cw) & 1) ^ stored_parity);

  if (s == 0 && !parity_mismatch) return {word.data, SecdedStatus::Clean};

  if (parity_mismatch) {
    // Odd number of flips: treat as a single-bit error.
    if (s == 0) return {word.data, SecdedStatus::Corrected};  // parity bit itself
    if (s > 12) return {word.data, SecdedStatus::Uncorrectable};
    cw = static_cast<uint16_t>(cw ^ (1 << (s - 1)));
    return {extract_data(cw), SecdedStatus::Corrected};
  }

  // Even parity with a nonzero syndrome: double-bit error.
  return {word.data, SecdedStatus::Uncorrectable};
}

}  // namespace aspforge::crypto
