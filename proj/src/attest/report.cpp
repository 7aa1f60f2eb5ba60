// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/attest/report.hpp"

#include <cstring>

#include "aspforge/crypto/sha256.hpp"

namespace aspforge::attest {

namespace {
constexpr char kReportMagic[4] = {'A', 'R', 'P', 'T'};
constexpr size_t kBodyLen = 1 + 48 + 3 + 32 + 64;
}  // namespace

Bytes AttestationReport::signed_body() const {
  Bytes out;
  out.push_back(version);
  append(out, as_view(measurement));
  out.push_back(tcb.bl_svn);
  out.push_back(tcb.sevfw_svn);
  out.push_back(tcb.ucode_svn);
  append(out, as_view(chip_id));
  append(out, as_view(report_data));
  return out;
}

Bytes AttestationReport::to_bytes() const {
  Bytes body = signed_body();
  Bytes out;
  out.insert(out.end(), kReportMagic, kReportMagic + 4);
  append_u32le(out, static_cast<uint32_t>(body.size()));
  append(out, as_view(body));
  append_u32le(out, static_cast<uint32_t>(signature.size()));
  append(out, as_view(signature));
  return out;
}

std::optional<AttestationReport> AttestationReport::from_bytes(BytesView data) {
  if (data.size() < 8 || std::memcmp(data.data(), kReportMagic, 4) != 0)
    return std::nullopt;
  uint32_t body_len = read_u32le(data.data() + 4);
  if (body_len != kBodyLen || data.size() < 8 + body_len + 4) return std::nullopt;
  const uint8_t* b = data.data() + 8;

  AttestationReport r;
  r.version = b[0];
  std::memcpy(r.measurement.data(), b + 1, 48);
  r.tcb = TcbVersion{b[49], b[50], b[51]};
  std::memcpy(r.chip_id.data(), b + 52, 32);
  std::memcpy(r.report_data.data(), b + 84, 64);

  uint32_t sig_len = read_u32le(data.data() + 8 + body_len);
  if (data.size() != 8 + body_len + 4 + sig_len) return std::nullopt;
  r.signature.assign(data.begin() + 8 + body_len + 4, data.end());
  return r;
}

nlohmann::json AttestationReport::to_json() const {
  return nlohmann::json{
      {"version", version},
      {"measurement", to_hex(as_view(measurement))},
      {"tcb", {{"bl_svn", tcb.bl_svn}, {"sevfw_svn", tcb.sevfw_svn}, {"ucode_svn", tcb.ucode_svn}}},
      {"chip_id", to_hex(as_view(chip_id))},
      {"report_data", to_hex(as_view(report_data))},
      {"signature", to_hex(as_view(signature))},
  };
}

AttestationReport sign_report(const Seed32& vcek_seed,
                              const std::array<uint8_t, 48>& measurement,
                              const TcbVersion& tcb,
                              const std::array<uint8_t, 32>& chip_id,
                              const std::array<uint8_t, 64>& report_data) {
  AttestationReport r;
  r.measurement = measurement;
  r.tcb = tcb;
  r.chip_id = chip_id;
  r.report_data = report_data;
  auto key = vcek_keypair(vcek_seed);
  r.signature = crypto::ecdsa_p384_sha384_sign(key, as_view(r.signed_body()));
  return r;
}

std::array<uint8_t, 32> chip_id_from_cek(BytesView cek_public_point) {
  return crypto::sha256(cek_public_point);
}

crypto::EcdsaP384KeyPair vcek_keypair(const Seed32& vcek_seed) {
  return crypto::ecdsa_keypair_from_seed(as_view(vcek_seed), str_view(kVcekLabel));
}

}  // namespace aspforge::attest
