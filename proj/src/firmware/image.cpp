// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/firmware/image.hpp"

#include <cstring>

namespace aspforge::fw {

namespace {
constexpr size_t kOffSvn = 0x04;
constexpr size_t kOffFlags = 0x05;
constexpr size_t kOffLoadAddr = 0x08;
constexpr size_t kOffSignedSize = 0x0C;
constexpr size_t kOffImageSize = 0x10;
constexpr size_t kOffWrappedMek = 0x20;
constexpr size_t kOffIv = 0x30;
constexpr size_t kOffBodySha256 = 0x40;
constexpr size_t kOffSignature = 0x60;
constexpr size_t kOffPubkeyMod = 0x260;
constexpr size_t kOffPubkeyExp = 0x460;
}  // namespace

Bytes FirmwareModule::header_bytes(bool zero_signature) const {
  Bytes h(kHeaderSize, 0);
  std::memcpy(h.data(), kModuleMagic, 4);
  h[kOffSvn] = svn;
  h[kOffFlags] = flags;
  put_u32le(h.data() + kOffLoadAddr, load_addr);
  put_u32le(h.data() + kOffSignedSize, signed_size);
  put_u32le(h.data() + kOffImageSize, image_size);
  std::memcpy(h.data() + kOffWrappedMek, wrapped_mek.data(), 16);
  std::memcpy(h.data() + kOffIv, iv.data(), 16);
  std::memcpy(h.data() + kOffBodySha256, body_sha256.data(), 32);
  if (!zero_signature && signature.size() == kSignatureBytes)
    std::memcpy(h.data() + kOffSignature, signature.data(), kSignatureBytes);
  if (pubkey_modulus.size() == 512)
    std::memcpy(h.data() + kOffPubkeyMod, pubkey_modulus.data(), 512);
  put_u32le(h.data() + kOffPubkeyExp, pubkey_exponent);
  return h;
}

Bytes FirmwareModule::to_bytes() const {
  Bytes out = header_bytes(false);
  append(out, as_view(body));
  return out;
}

std::optional<FirmwareModule> FirmwareModule::parse(BytesView record) {
  if (record.size() < kHeaderSize) return std::nullopt;
  if (std::memcmp(record.data(), kModuleMagic, 4) != 0) return std::nullopt;

  FirmwareModule m;
  m.svn = record[kOffSvn];
  m.flags = record[kOffFlags];
  m.load_addr = read_u32le(record.data() + kOffLoadAddr);
  m.signed_size = read_u32le(record.data() + kOffSignedSize);
  m.image_size = read_u32le(record.data() + kOffImageSize);
  std::memcpy(m.wrapped_mek.data(), record.data() + kOffWrappedMek, 16);
  std::memcpy(m.iv.data(), record.data() + kOffIv, 16);
  std::memcpy(m.body_sha256.data(), record.data() + kOffBodySha256, 32);
  m.signature.assign(record.begin() + kOffSignature,
                     record.begin() + kOffSignature + kSignatureBytes);
  m.pubkey_modulus.assign(record.begin() + kOffPubkeyMod,
                          record.begin() + kOffPubkeyMod + 512);
  m.pubkey_exponent = read_u32le(record.data() + kOffPubkeyExp);

  if (record.size() != kHeaderSize + m.image_size) return std::nullopt;
  if (m.signed_size > m.image_size) return std::nullopt;
  m.body.assign(record.begin() + kHeaderSize, record.end());
  return m;
}

Bytes IkekEntry::to_bytes() const {
  Bytes out;
  append(out, as_view(wrapped_ikek));
  append(out, as_view(hmac_tag));
  return out;
}

std::optional<IkekEntry> IkekEntry::parse(BytesView record) {
  if (record.size() != kIkekEntryBytes) return std::nullopt;
  IkekEntry e;
  std::memcpy(e.wrapped_ikek.data(), record.data(), 16);
  std::memcpy(e.hmac_tag.data(), record.data() + 16, 32);
  return e;
}

std::optional<DirectoryEntry> FlashImage::find(EntryType type) const {
  for (const auto& e : entries)
    if (e.type == static_cast<uint32_t>(type)) return e;
  return std::nullopt;
}

BytesView FlashImage::entry_bytes(const DirectoryEntry& e) const {
  return BytesView(blob.data() + e.offset, e.size);
}

std::optional<FirmwareModule> FlashImage::module(EntryType type) const {
  auto e = find(type);
  if (!e) return std::nullopt;
  return FirmwareModule::parse(entry_bytes(*e));
}

std::optional<IkekEntry> FlashImage::ikek_entry() const {
  auto e = find(EntryType::WrappedIkek);
  if (!e) return std::nullopt;
  return IkekEntry::parse(entry_bytes(*e));
}

bool FlashImage::replace_entry(EntryType type, BytesView record) {
  auto e = find(type);
  if (!e || e->size != record.size()) return false;
  std::memcpy(blob.data() + e->offset, record.data(), record.size());
  return true;
}

std::variant<FlashImage, ParseError> parse_flash(BytesView data) {
  if (data.size() < 8) return ParseError::Truncated;
  if (std::memcmp(data.data(), kFlashMagic, 4) != 0) return ParseError::BadMagic;
  uint32_t count = read_u32le(data.data() + 4);
  size_t table_end = 8 + static_cast<size_t>(count) * 12;
  if (count > 256 || data.size() < table_end) return ParseError::Truncated;

  FlashImage img;
  img.blob.assign(data.begin() + table_end, data.end());
  for (uint32_t i = 0; i < count; ++i) {
    const uint8_t* p = data.data() + 8 + i * 12;
    DirectoryEntry e{read_u32le(p), read_u32le(p + 4), read_u32le(p + 8)};
    if (static_cast<size_t>(e.offset) + e.size > img.blob.size())
      return ParseError::OutOfBounds;
    for (const auto& prev : img.entries)
      if (prev.type == e.type) return ParseError::DuplicateEntry;
    img.entries.push_back(e);
  }
  return img;
}

Bytes serialize_flash(const FlashImage& image) {
  Bytes out;
  out.insert(out.end(), kFlashMagic, kFlashMagic + 4);
  append_u32le(out, static_cast<uint32_t>(image.entries.size()));
  for (const auto& e : image.entries) {
    append_u32le(out, e.type);
    append_u32le(out, e.offset);
    append_u32le(out, e.size);
  }
  append(out, as_view(image.blob));
  return out;
}

FlashImageBuilder& FlashImageBuilder::add(EntryType type, BytesView record) {
  DirectoryEntry e;
  e.type = static_cast<uint32_t>(type);
  e.offset = static_cast<uint32_t>(image_.blob.size());
  e.size = static_cast<uint32_t>(record.size());
  image_.entries.push_back(e);
  append(image_.blob, record);
  return *this;
}

FlashImage FlashImageBuilder::build() { return std::move(image_); }

}  // namespace aspforge::fw
