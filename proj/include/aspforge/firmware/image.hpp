// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "aspforge/bytes.hpp"
#include "aspforge/crypto/aes128.hpp"

namespace aspforge::fw {

enum class AuthScheme { Zen1, Zen3Milan, Zen45 };

enum class EntryType : uint32_t {
  PrimaryBl = 0x1,
  SevFw = 0x2,
  RecoveryBl = 0x3,
  Microcode = 0x4,
  WrappedIkek = 0x21,
};

inline constexpr char kFlashMagic[4] = {'A', 'S', 'I', 'M'};
inline constexpr char kModuleMagic[4] = {'A', 'M', 'O', 'D'};

// Module record layout (header then body). All integers little-endian.
//   0x000 magic            4
//   0x004 svn              1
//   0x005 flags            1   bit 0 = body encrypted
//   0x008 load_addr        4
//   0x00C signed_size      4
//   0x010 image_size       4
//   0x020 wrapped_mek     16
//   0x030 iv              16
//   0x040 body_sha256     32   plaintext hash (Zen4/5 scheme), else zero
//   0x060 signature      512   RSA-PSS-4096-SHA384
//   0x260 pubkey modulus 512
//   0x460 pubkey exponent  4
//   0x464 reserved        28
inline constexpr size_t kHeaderSize = 0x480;
inline constexpr size_t kSignatureBytes = 512;

inline constexpr uint8_t kFlagEncrypted = 0x01;

struct FirmwareModule {
  uint8_t svn = 0;
  uint8_t flags = 0;
  uint32_t load_addr = 0;
  uint32_t signed_size = 0;
  uint32_t image_size = 0;
  crypto::Block16 wrapped_mek{};
  crypto::Block16 iv{};
  std::array<uint8_t, 32> body_sha256{};
  Bytes signature;        // kSignatureBytes, zeros when unsigned
  Bytes pubkey_modulus;   // 512 bytes, zeros when absent
  uint32_t pubkey_exponent = 0;
  Bytes body;

  bool encrypted() const { return flags & kFlagEncrypted; }

  /// Header image; the signature field is zeroed when building signing input.
  Bytes header_bytes(bool zero_signature) const;
  Bytes to_bytes() const;
  static std::optional<FirmwareModule> parse(BytesView record);
};

struct IkekEntry {
  crypto::Block16 wrapped_ikek{};
  std::array<uint8_t, 32> hmac_tag{};  // zero for the Zen1 scheme

  Bytes to_bytes() const;
  static std::optional<IkekEntry> parse(BytesView record);
};
inline constexpr size_t kIkekEntryBytes = 48;

struct DirectoryEntry {
  uint32_t type = 0;
  uint32_t offset = 0;  // relative to the blob
  uint32_t size = 0;
};

enum class ParseError { BadMagic, Truncated, OutOfBounds, DuplicateEntry, BadModule };

/// Directory-of-entries firmware container. Entry order and blob bytes are
/// preserved exactly, so parse/serialize round-trips are identities.
struct FlashImage {
  std::vector<DirectoryEntry> entries;
  Bytes blob;

  std::optional<DirectoryEntry> find(EntryType type) const;
  BytesView entry_bytes(const DirectoryEntry& e) const;
  std::optional<FirmwareModule> module(EntryType type) const;
  std::optional<IkekEntry> ikek_entry() const;

  /// In-place surgical replacement; the new record must keep the entry size.
  bool replace_entry(EntryType type, BytesView record);
};

std::variant<FlashImage, ParseError> parse_flash(BytesView data);
Bytes serialize_flash(const FlashImage& image);

/// Sequential packer used by the fixture builders and the attack crafting.
class FlashImageBuilder {
 public:
  FlashImageBuilder& add(EntryType type, BytesView record);
  FlashImage build();

 private:
  FlashImage image_;
};

}  // namespace aspforge::fw
