// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include "aspforge/attest/seed_chain.hpp"
#include "aspforge/crypto/ecdsa_p384.hpp"

namespace aspforge::attest {

inline constexpr std::string_view kVcekLabel = "VCEK";
inline constexpr std::string_view kCekLabel = "CEK";

// Report wire layout (all fixed-size fields, little-endian container):
//   "ARPT" | u32le body_len | body | u32le sig_len | signature
// body:
//   version u8 | measurement 48 | bl_svn u8 | sevfw_svn u8 | ucode_svn u8 |
//   chip_id 32 | report_data 64
// signature: ECDSA P-384 over SHA-384(body), encoded r || s (48-byte BE each).
struct AttestationReport {
  uint8_t version = 1;
  std::array<uint8_t, 48> measurement{};
  TcbVersion tcb;
  std::array<uint8_t, 32> chip_id{};
  std::array<uint8_t, 64> report_data{};
  Bytes signature;

  Bytes signed_body() const;
  Bytes to_bytes() const;
  static std::optional<AttestationReport> from_bytes(BytesView data);
  nlohmann::json to_json() const;
};

AttestationReport sign_report(const Seed32& vcek_seed,
                              const std::array<uint8_t, 48>& measurement,
                              const TcbVersion& tcb,
                              const std::array<uint8_t, 32>& chip_id,
                              const std::array<uint8_t, 64>& report_data);

/// Chip-ID: hash of the CEK public point, fixed length by construction.
std::array<uint8_t, 32> chip_id_from_cek(BytesView cek_public_point);

crypto::EcdsaP384KeyPair vcek_keypair(const Seed32& vcek_seed);

}  // namespace aspforge::attest
