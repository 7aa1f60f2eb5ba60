// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>

#include "aspforge/attest/report.hpp"

namespace aspforge::attest {

// Cert wire layout:
//   "ACRT" | u32le body_len | body | u32le sig_len | ark_signature
// body: vcek_public 97 | bl_svn u8 | sevfw_svn u8 | ucode_svn u8 | chip_id 32
struct MockKdsCert {
  Bytes vcek_public;  // 97-byte SEC1 point
  TcbVersion tcb;
  std::array<uint8_t, 32> chip_id{};
  Bytes ark_signature;

  Bytes signed_body() const;
  Bytes to_bytes() const;
  static std::optional<MockKdsCert> from_bytes(BytesView data);
  nlohmann::json to_json() const;
};

/// Key distribution authority stand-in. Holds enrolled chips' root seeds and
/// issues TCB-versioned VCEK certificates under a single well-known mock
/// root key (the chain terminates there). Single-writer registry.
class MockKds {
 public:
  MockKds();

  /// The well-known mock root keypair; fixed so that issue and verify agree
  /// across separate processes.
  static const crypto::EcdsaP384KeyPair& ark();

  /// Registers a chip by its factory seeds; returns the chip id.
  std::array<uint8_t, 32> enroll(const Seed32& vcek_root, const Seed32& cek_seed);

  std::optional<MockKdsCert> issue(const std::array<uint8_t, 32>& chip_id,
                                   const TcbVersion& tcb) const;

  static bool verify_cert(const MockKdsCert& cert);

 private:
  std::map<std::array<uint8_t, 32>, Seed32> roots_;
};

/// Full chain check: ARK signature on the cert, cert/report binding
/// (tcb and chip id), then the report signature under the cert's key.
/// Returns false on any mismatch, never throws.
bool verify_report(const AttestationReport& report, const MockKdsCert& cert);

}  // namespace aspforge::attest
