// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "aspforge/crypto/rsa_pss.hpp"
#include "aspforge/firmware/image.hpp"

namespace aspforge::fw {

inline constexpr uint32_t kAttackLoadAddr = 0x20000;
inline constexpr size_t kDefaultSramSize = 512 * 1024;

// Stale-payload descriptor: 8-octet magic, payload id, relocation-stub
// marker, then the raw payload bytes.
inline constexpr uint8_t kPayloadMagic[8] = {'A', 'S', 'P', 'P', 'A', 'Y', 'L', 'D'};
inline constexpr uint32_t kStubMarker = 0x4F4C4552;  // "RELO"
inline constexpr size_t kDescriptorBytes = 16;

Bytes make_payload_descriptor(uint32_t payload_id, BytesView payload_body);

/// Bytes covered by the scheme's signature: header (signature field zeroed)
/// followed by the first signed_size bytes of the scheme-selected body form
/// (decrypted body for Zen1, stored body for Zen3/Zen4/5).
Bytes module_signed_bytes(const FirmwareModule& m, AuthScheme scheme,
                          std::optional<BytesView> plaintext_body);

/// Signs in place, embedding the signer's public key into the header. Zen1
/// needs the plaintext body when the module is encrypted; Zen4/5 sets the
/// plaintext hash field before signing. Throws std::invalid_argument when a
/// required plaintext is missing.
FirmwareModule sign_module(FirmwareModule m, const crypto::RsaKeyPair& signer,
                           AuthScheme scheme,
                           std::optional<BytesView> plaintext_body = std::nullopt);

bool verify_module_signature(const FirmwareModule& m, const crypto::RsaKeyPair& pub,
                             AuthScheme scheme,
                             std::optional<BytesView> plaintext_body = std::nullopt);

/// CBC-encrypts the plaintext body under mek and stores Wrap(ikek, mek) in
/// the header. Plaintext must be block-aligned.
FirmwareModule encrypt_module(FirmwareModule m, const crypto::Key128& mek,
                              const crypto::Block16& iv, const crypto::Key128& ikek);

IkekEntry make_ikek_entry(const crypto::Key128& ikek_plain,
                          const crypto::Key128& bootrom_key, AuthScheme scheme);
bool verify_ikek_entry(const IkekEntry& entry, const crypto::Key128& bootrom_key,
                       AuthScheme scheme);
crypto::Key128 unwrap_ikek(const IkekEntry& entry, const crypto::Key128& bootrom_key);

/// First CBC plaintext block of an encrypted module under a candidate IKEK:
/// BlockDecrypt(Unwrap(ikek, wrapped_mek), C0) XOR IV.
crypto::Block16 first_plain_block(const crypto::Key128& ikek,
                                  const crypto::Block16& wrapped_mek,
                                  const crypto::Block16& iv,
                                  const crypto::Block16& first_cipher_block);

/// MilanLaunchy image: an unsigned primary at 0x20000 carrying the payload
/// descriptor (plus a trampoline sled back to the descriptor when the
/// collision is partial), the untouched legacy recovery, and the swapped
/// Wrapped-IKEK entry. Throws std::invalid_argument unless the recovery
/// module is encrypted.
FlashImage craft_attack_image(const crypto::Key128& collision_ikek,
                              const FirmwareModule& legacy_recovery,
                              BytesView payload_body,
                              const crypto::Key128& bootrom_key,
                              uint32_t payload_id = 1,
                              size_t sram_size = kDefaultSramSize);

}  // namespace aspforge::fw
