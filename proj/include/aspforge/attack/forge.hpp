// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "aspforge/attest/report.hpp"

namespace aspforge::attack {

/// Seed material recovered by either BadFuse method, or captured from a
/// single exploited boot (layer-1 seed plus rollback at some SVN).
struct ExtractedMaterial {
  std::optional<attest::Seed32> root_seed;    // full root (oracle extraction)
  std::optional<attest::Seed32> layer1_seed;  // layer-1 seed at cur
  std::optional<attest::Seed32> rollback_seed;
  uint8_t cur = 0;
  std::array<uint8_t, 32> chip_id{};

  nlohmann::json to_json() const;
  static std::optional<ExtractedMaterial> from_json(const nlohmann::json& j);
};

struct ForgeResult {
  attest::AttestationReport report;
  /// False when the target bl_svn is above what the material can derive;
  /// the report is then signed with a necessarily wrong key and will not
  /// verify (the one-wayness trap).
  bool seed_reachable = false;
};

ForgeResult forge_report(const ExtractedMaterial& material,
                         const attest::TcbVersion& target,
                         const std::array<uint8_t, 48>& measurement,
                         const std::array<uint8_t, 64>& report_data);

}  // namespace aspforge::attack
