// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "aspforge/attack/milanlaunchy.hpp"
#include "aspforge/crypto/rsa_pss.hpp"

namespace aspforge::attack {

enum class AttackError {
  None,
  SearchBudget,
  NoCodeExec,
  WriteProtected,
  FuseAbort,
  ExfilMissing,
};
const char* to_string(AttackError e);

inline constexpr uint32_t kExfilPayloadId = 1;
inline constexpr uint32_t kCustomPkBurnPayloadId = 2;
inline constexpr uint32_t kOraclePayloadId = 3;

/// What the exfiltration payload drops into x86 DRAM: the handed-off seeds
/// plus the CEK public point (for the chip id), then a burner status byte.
struct ExfilRecord {
  attest::Seed32 layer1{};
  std::optional<attest::Seed32> rollback;
  Bytes cek_public;  // 97 bytes
  uint8_t burn_status = 0;  // 0 ok, 1 write-protected, 2 bad sequence

  static std::optional<ExfilRecord> parse(BytesView dram);
};

boot::PayloadFn make_exfil_payload();

/// Attack I: hijack one boot to burn SHA-384(attacker pubkey) + ECC +
/// Fletcher + enable bits into the Custom_PK group, then boot an
/// attacker-signed SVN-255 bootloader and exfiltrate its handoff.
struct Attack1Result {
  AttackError error = AttackError::None;
  attest::Seed32 layer1_at_255{};
  attest::Seed32 rollback_at_255{};
  std::array<uint8_t, 32> chip_id{};
  nlohmann::json transcript;
};

Attack1Result badfuse_custom_pk(fuse::FuseArray& fuses,
                                const fw::FlashImage& legacy_flash,
                                const boot::BootRomConfig& config,
                                const crypto::RsaKeyPair& attacker_keypair,
                                unsigned match_bits, uint64_t rng_seed);

/// Attack II: bit-by-bit root-seed extraction through the fuse-burner
/// difference oracle. 256 probe bits, one cold reboot each.
struct OracleResult {
  AttackError error = AttackError::None;
  attest::Seed32 recovered{};
  uint64_t reboots = 0;
  uint64_t baseline_updates = 0;
  std::array<uint8_t, 32> chip_id{};
  nlohmann::json transcript;
};

OracleResult badfuse_oracle(fuse::FuseArray& fuses, const fw::FlashImage& legacy_flash,
                            const boot::BootRomConfig& config, unsigned match_bits,
                            uint64_t rng_seed);

/// Attacker-signed plaintext bootloader image whose body branches straight
/// into a payload descriptor (used after the Custom_PK takeover).
fw::FlashImage build_attacker_flash(const crypto::RsaKeyPair& attacker_keypair,
                                    fw::AuthScheme scheme, uint8_t svn,
                                    uint32_t payload_id);

}  // namespace aspforge::attack
