// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/scenario.hpp"

#include <map>
#include <mutex>

#include "aspforge/crypto/sha384.hpp"

namespace aspforge {

namespace {

Bytes make_module_body(SeededRng rng, size_t size) {
  Bytes body = rng.bytes(size);
  // Benign first instruction (mov r0, r0): never decodes as a branch.
  put_u32le(body.data(), 0xE1A00000);
  return body;
}

struct ModulePlan {
  fw::EntryType type;
  const char* label;
  uint32_t load_addr;
  size_t body_size;
  uint8_t svn;
};

}  // namespace

nlohmann::json ScenarioConfig::to_json() const {
  return nlohmann::json{{"arch", to_string(arch)},
                        {"write_protect", write_protect},
                        {"ecc_fletcher_enforced", ecc_fletcher_enforced},
                        {"distribute_encrypted_fw", distribute_encrypted_fw},
                        {"rng_seed", rng_seed}};
}

std::optional<ScenarioConfig> ScenarioConfig::from_json(const nlohmann::json& j) {
  ScenarioConfig c;
  if (j.contains("arch")) {
    auto s = scheme_from_string(j["arch"].get<std::string>());
    if (!s) return std::nullopt;
    c.arch = *s;
  }
  c.write_protect = j.value("write_protect", false);
  c.ecc_fletcher_enforced = j.value("ecc_fletcher_enforced", false);
  c.distribute_encrypted_fw = j.value("distribute_encrypted_fw", true);
  c.rng_seed = j.value("rng_seed", uint64_t{0});
  return c;
}

std::optional<fw::AuthScheme> scheme_from_string(std::string_view s) {
  if (s == "zen1") return fw::AuthScheme::Zen1;
  if (s == "zen3") return fw::AuthScheme::Zen3Milan;
  if (s == "zen45") return fw::AuthScheme::Zen45;
  return std::nullopt;
}

const char* to_string(fw::AuthScheme s) {
  switch (s) {
    case fw::AuthScheme::Zen1: return "zen1";
    case fw::AuthScheme::Zen3Milan: return "zen3";
    case fw::AuthScheme::Zen45: return "zen45";
  }
  return "?";
}

const Platform& make_platform(uint64_t rng_seed) {
  static std::mutex mu;
  static std::map<uint64_t, Platform> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(rng_seed);
  if (it != cache.end()) return it->second;

  SeededRng root = SeededRng::from_seed(rng_seed);
  Platform p;
  p.rng_seed = rng_seed;
  p.bootrom_key = root.fork("platform.bootrom_key").array<16>();
  p.ikek = root.fork("platform.ikek").array<16>();
  auto key_rng = root.fork("platform.vendor_rsa");
  p.vendor_keypair = crypto::rsa4096_generate(key_rng);
  p.builtin_pk_digest = crypto::sha384(as_view(p.vendor_keypair.public_encoding()));
  return cache.emplace(rng_seed, std::move(p)).first->second;
}

fuse::FuseArray make_factory_fuses(uint64_t rng_seed, bool enable_vcek_redundancy,
                                   bool write_protect,
                                   std::optional<attest::Seed32> vcek_seed,
                                   std::optional<attest::Seed32> cek_seed) {
  SeededRng root = SeededRng::from_seed(rng_seed);
  attest::Seed32 vcek = vcek_seed ? *vcek_seed : root.fork("fuses.vcek_seed").array<32>();
  attest::Seed32 cek = cek_seed ? *cek_seed : root.fork("fuses.cek_seed").array<32>();

  if (!enable_vcek_redundancy)
    return fuse::FuseArray::factory_fresh(as_view(vcek), as_view(cek), write_protect);

  // Redundancy-enforced variant: the seed region is burned through the
  // factory burner together with its ECC, checksum, and enable bits.
  attest::Seed32 zero{};
  auto fuses = fuse::FuseArray::factory_fresh(as_view(zero), as_view(cek), false);
  fuses.provision_with_redundancy(fuse::FuseRegion::VcekSeed, as_view(vcek),
                                  /*enable_ecc=*/true, /*enable_fletcher=*/true);
  fuses.set_write_protect(write_protect);
  fuses.clear_events();
  return fuses;
}

fw::FlashImage build_standard_flash(const Platform& platform, const FlashBuildSpec& spec) {
  SeededRng rng = SeededRng::from_seed(platform.rng_seed).fork("flash");

  const ModulePlan plan[] = {
      {fw::EntryType::PrimaryBl, "primary_bl", 0x1000, 2048, spec.bl_svn},
      {fw::EntryType::RecoveryBl, "recovery_bl", 0x1000, 2048, spec.bl_svn},
      {fw::EntryType::SevFw, "sev_fw", 0x40000, 1024, spec.sevfw_svn},
      {fw::EntryType::Microcode, "microcode", 0x60000, 512, spec.ucode_svn},
  };

  fw::FlashImageBuilder builder;
  for (const auto& entry : plan) {
    Bytes plaintext = make_module_body(rng.fork(std::string("body.") + entry.label),
                                       entry.body_size);
    fw::FirmwareModule m;
    m.svn = entry.svn;
    m.load_addr = entry.load_addr;
    m.image_size = static_cast<uint32_t>(plaintext.size());
    m.signed_size = m.image_size;
    m.body = plaintext;

    if (spec.encrypt) {
      auto mek = rng.fork(std::string("mek.") + entry.label).array<16>();
      auto iv = rng.fork(std::string("iv.") + entry.label).array<16>();
      m = fw::encrypt_module(std::move(m), mek, iv, platform.ikek);
    }
    m = fw::sign_module(std::move(m), platform.vendor_keypair, spec.arch,
                        as_view(plaintext));
    builder.add(entry.type, as_view(m.to_bytes()));
  }

  builder.add(fw::EntryType::WrappedIkek,
              as_view(fw::make_ikek_entry(platform.ikek, platform.bootrom_key, spec.arch)
                          .to_bytes()));
  return builder.build();
}

boot::BootRomConfig make_bootrom_config(const Platform& platform,
                                        const ScenarioConfig& config) {
  boot::BootRomConfig c;
  c.arch_scheme = config.arch;
  c.bootrom_key = platform.bootrom_key;
  c.builtin_amd_pk_digest = platform.builtin_pk_digest;
  c.vendor_keypair = platform.vendor_keypair.public_only();
  c.enforce_write_protect = config.write_protect;
  c.distribute_encrypted_fw = config.distribute_encrypted_fw;
  return c;
}

fw::FlashImage build_legacy_flash(const Platform& platform, fw::AuthScheme arch) {
  FlashBuildSpec spec;
  spec.arch = arch;
  spec.bl_svn = kLegacyBlSvn;
  spec.sevfw_svn = kDefaultSevFwSvn;
  spec.ucode_svn = kDefaultUcodeSvn;
  spec.encrypt = true;
  return build_standard_flash(platform, spec);
}

}  // namespace aspforge
