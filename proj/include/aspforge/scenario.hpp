// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "aspforge/boot/bootrom.hpp"
#include "aspforge/rng.hpp"

namespace aspforge {

/// Scenario toggles mirrored by the CLI config file.
struct ScenarioConfig {
  fw::AuthScheme arch = fw::AuthScheme::Zen3Milan;
  bool write_protect = false;
  bool ecc_fletcher_enforced = false;
  bool distribute_encrypted_fw = true;
  uint64_t rng_seed = 0;

  nlohmann::json to_json() const;
  static std::optional<ScenarioConfig> from_json(const nlohmann::json& j);
};

std::optional<fw::AuthScheme> scheme_from_string(std::string_view s);
const char* to_string(fw::AuthScheme s);

/// Per-seed platform secrets: the BootROM key baked into silicon, the
/// vendor's IKEK and RSA signing key, and the ROM-resident digest of the
/// vendor public key. Generation is memoized per seed (RSA keygen is the
/// expensive part).
struct Platform {
  uint64_t rng_seed = 0;
  crypto::Key128 bootrom_key{};
  crypto::Key128 ikek{};
  crypto::RsaKeyPair vendor_keypair;
  std::array<uint8_t, 48> builtin_pk_digest{};
};

const Platform& make_platform(uint64_t rng_seed);

fuse::FuseArray make_factory_fuses(uint64_t rng_seed, bool enable_vcek_redundancy,
                                   bool write_protect,
                                   std::optional<attest::Seed32> vcek_seed = std::nullopt,
                                   std::optional<attest::Seed32> cek_seed = std::nullopt);

struct FlashBuildSpec {
  fw::AuthScheme arch = fw::AuthScheme::Zen3Milan;
  uint8_t bl_svn = 0;
  uint8_t sevfw_svn = 0;
  uint8_t ucode_svn = 0;
  bool encrypt = false;
};

/// Vendor-built firmware image: primary + recovery bootloaders, SEV
/// firmware, microcode, and the Wrapped-IKEK entry. Bodies and per-module
/// keys depend only on the seed, never on the scheme, so images for
/// different schemes differ purely in authentication material.
fw::FlashImage build_standard_flash(const Platform& platform, const FlashBuildSpec& spec);

boot::BootRomConfig make_bootrom_config(const Platform& platform,
                                        const ScenarioConfig& config);

/// The Milan-PI-1.0.0.1-style image the attacks downgrade to: encrypted,
/// minimum bootloader SVN.
fw::FlashImage build_legacy_flash(const Platform& platform, fw::AuthScheme arch);

inline constexpr uint8_t kLegacyBlSvn = 0;
inline constexpr uint8_t kDefaultSevFwSvn = 10;
inline constexpr uint8_t kDefaultUcodeSvn = 44;

}  // namespace aspforge
