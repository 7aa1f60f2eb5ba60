// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/attest/kds.hpp"

#include <cstring>

#include "aspforge/crypto/sha256.hpp"

namespace aspforge::attest {

namespace {
constexpr char kCertMagic[4] = {'A', 'C', 'R', 'T'};
constexpr size_t kCertBodyLen = 97 + 3 + 32;
}  // namespace

Bytes MockKdsCert::signed_body() const {
  Bytes out;
  append(out, as_view(vcek_public));
  out.push_back(tcb.bl_svn);
  out.push_back(tcb.sevfw_svn);
  out.push_back(tcb.ucode_svn);
  append(out, as_view(chip_id));
  return out;
}

Bytes MockKdsCert::to_bytes() const {
  Bytes body = signed_body();
  Bytes out;
  out.insert(out.end(), kCertMagic, kCertMagic + 4);
  append_u32le(out, static_cast<uint32_t>(body.size()));
  append(out, as_view(body));
  append_u32le(out, static_cast<uint32_t>(ark_signature.size()));
  append(out, as_view(ark_signature));
  return out;
}

std::optional<MockKdsCert> MockKdsCert::from_bytes(BytesView data) {
  if (data.size() < 8 || std::memcmp(data.data(), kCertMagic, 4) != 0)
    return std::nullopt;
  uint32_t body_len = read_u32le(data.data() + 4);
  if (body_len != kCertBodyLen || data.size() < 8 + body_len + 4) return std::nullopt;
  const uint8_t* b = data.data() + 8;

  MockKdsCert c;
  c.vcek_public.assign(b, b + 97);
  c.tcb = TcbVersion{b[97], b[98], b[99]};
  std::memcpy(c.chip_id.data(), b + 100, 32);

  uint32_t sig_len = read_u32le(data.data() + 8 + body_len);
  if (data.size() != 8 + body_len + 4 + sig_len) return std::nullopt;
  c.ark_signature.assign(data.begin() + 8 + body_len + 4, data.end());
  return c;
}

nlohmann::json MockKdsCert::to_json() const {
  return nlohmann::json{
      {"vcek_public", to_hex(as_view(vcek_public))},
      {"tcb", {{"bl_svn", tcb.bl_svn}, {"sevfw_svn", tcb.sevfw_svn}, {"ucode_svn", tcb.ucode_svn}}},
      {"chip_id", to_hex(as_view(chip_id))},
      {"ark_signature", to_hex(as_view(ark_signature))},
  };
}

MockKds::MockKds() = default;

const crypto::EcdsaP384KeyPair& MockKds::ark() {
  static const crypto::EcdsaP384KeyPair key = [] {
    auto seed = crypto::sha256(str_view("aspforge.mock-kds.ark.v1"));
    return crypto::ecdsa_keypair_from_seed(as_view(seed), str_view("ARK"));
  }();
  return key;
}

std::array<uint8_t, 32> MockKds::enroll(const Seed32& vcek_root, const Seed32& cek_seed) {
  auto cek = crypto::ecdsa_keypair_from_seed(as_view(cek_seed), str_view(kCekLabel));
  auto chip_id = chip_id_from_cek(as_view(cek.public_point));
  roots_[chip_id] = vcek_root;
  return chip_id;
}

std::optional<MockKdsCert> MockKds::issue(const std::array<uint8_t, 32>& chip_id,
                                          const TcbVersion& tcb) const {
  auto it = roots_.find(chip_id);
  if (it == roots_.end()) return std::nullopt;

  MockKdsCert cert;
  cert.vcek_public = vcek_keypair(derive_tcb_seed(it->second, tcb)).public_point;
  cert.tcb = tcb;
  cert.chip_id = chip_id;
  cert.ark_signature = crypto::ecdsa_p384_sha384_sign(ark(), as_view(cert.signed_body()));
  return cert;
}

bool MockKds::verify_cert(const MockKdsCert& cert) {
  return crypto::ecdsa_p384_sha384_verify(as_view(ark().public_point),
                                          as_view(cert.signed_body()),
                                          as_view(cert.ark_signature));
}

bool verify_report(const AttestationReport& report, const MockKdsCert& cert) {
  if (!MockKds::verify_cert(cert)) return false;
  if (!(cert.tcb == report.tcb)) return false;
  if (cert.chip_id != report.chip_id) return false;
  return crypto::ecdsa_p384_sha384_verify(as_view(cert.vcek_public),
                                          as_view(report.signed_body()),
                                          as_view(report.signature));
}

}  // namespace aspforge::attest
