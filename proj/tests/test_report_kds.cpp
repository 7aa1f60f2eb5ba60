// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "aspforge/attest/kds.hpp"
#include "aspforge/rng.hpp"

using namespace aspforge;
using namespace aspforge::attest;

namespace {

struct Fixture {
  Seed32 root{};
  Seed32 cek_seed{};
  MockKds kds;
  std::array<uint8_t, 32> chip_id{};
  std::array<uint8_t, 48> measurement{};
  std::array<uint8_t, 64> report_data{};

  explicit Fixture(uint64_t seed) {
    auto rng = SeededRng::from_seed(seed);
    root = rng.fork("root").array<32>();
    cek_seed = rng.fork("cek").array<32>();
    measurement = rng.fork("measurement").array<48>();
    chip_id = kds.enroll(root, cek_seed);
  }

  AttestationReport honest_report(const TcbVersion& tcb) {
    return sign_report(derive_tcb_seed(root, tcb), measurement, tcb, chip_id,
                       report_data);
  }
};

}  // namespace

TEST_CASE("sign then verify against a matching kds cert") {
  Fixture fx(600);
  TcbVersion tcb{4, 10, 44};
  auto report = fx.honest_report(tcb);
  auto cert = fx.kds.issue(fx.chip_id, tcb);
  REQUIRE(cert.has_value());
  CHECK(MockKds::verify_cert(*cert));
  CHECK(verify_report(report, *cert));
}

TEST_CASE("issue is refused for unknown chips") {
  MockKds kds;
  std::array<uint8_t, 32> nobody{};
  CHECK_FALSE(kds.issue(nobody, {1, 2, 3}).has_value());
}

TEST_CASE("certs for different tcbs carry distinct public keys") {
  Fixture fx(601);
  auto a = fx.kds.issue(fx.chip_id, {4, 10, 44});
  auto b = fx.kds.issue(fx.chip_id, {5, 10, 44});
  auto c = fx.kds.issue(fx.chip_id, {4, 10, 45});
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  REQUIRE(c.has_value());
  CHECK(a->vcek_public != b->vcek_public);
  CHECK(a->vcek_public != c->vcek_public);
  CHECK(b->vcek_public != c->vcek_public);
}

TEST_CASE("report mutated after signing fails verification") {
  Fixture fx(602);
  TcbVersion tcb{4, 10, 44};
  auto report = fx.honest_report(tcb);
  auto cert = fx.kds.issue(fx.chip_id, tcb);
  REQUIRE(cert.has_value());

  SUBCASE("tcb field") {
    auto bad = report;
    bad.tcb.sevfw_svn ^= 1;
    CHECK_FALSE(verify_report(bad, *cert));
  }
  SUBCASE("measurement") {
    auto bad = report;
    bad.measurement[47] ^= 0x80;
    CHECK_FALSE(verify_report(bad, *cert));
  }
  SUBCASE("report_data") {
    auto bad = report;
    bad.report_data[0] ^= 1;
    CHECK_FALSE(verify_report(bad, *cert));
  }
  SUBCASE("chip id") {
    auto bad = report;
    bad.chip_id[16] ^= 2;
    CHECK_FALSE(verify_report(bad, *cert));
  }
}

TEST_CASE("single-bit flips across the serialized report all fail verification") {
  Fixture fx(603);
  TcbVersion tcb{9, 1, 2};
  auto report = fx.honest_report(tcb);
  auto cert = fx.kds.issue(fx.chip_id, tcb);
  REQUIRE(cert.has_value());

  Bytes wire = report.to_bytes();
  // flip one bit at each field boundary (and a few interior spots)
  const size_t offsets[] = {8,       8 + 0,  8 + 1,   8 + 48,  8 + 49, 8 + 50,
                            8 + 51,  8 + 52, 8 + 83,  8 + 84,  8 + 147,
                            wire.size() - 96, wire.size() - 48, wire.size() - 1};
  for (size_t off : offsets) {
    Bytes bad = wire;
    bad[off] ^= 0x01;
    auto parsed = AttestationReport::from_bytes(as_view(bad));
    CAPTURE(off);
    if (!parsed) continue;  // structural damage counts as rejection
    REQUIRE_FALSE(verify_report(*parsed, *cert));
  }
}

TEST_CASE("cert/report binding: tcb and chip id must match") {
  Fixture fx(604);
  auto report = fx.honest_report({4, 10, 44});

  // cert for a different tcb carries a different key: fails
  auto cert5 = fx.kds.issue(fx.chip_id, {5, 10, 44});
  REQUIRE(cert5.has_value());
  CHECK_FALSE(verify_report(report, *cert5));

  // report claiming tcb 5 but signed with the seed for tcb 4: fails
  auto mismatched = sign_report(derive_tcb_seed(fx.root, {4, 10, 44}), fx.measurement,
                                {5, 10, 44}, fx.chip_id, fx.report_data);
  CHECK_FALSE(verify_report(mismatched, *cert5));

  // tampered ark signature on the cert: fails
  auto cert4 = fx.kds.issue(fx.chip_id, {4, 10, 44});
  REQUIRE(cert4.has_value());
  auto bad_cert = *cert4;
  bad_cert.ark_signature[10] ^= 1;
  CHECK_FALSE(verify_report(report, bad_cert));
}

TEST_CASE("report and cert wire round-trips") {
  Fixture fx(605);
  TcbVersion tcb{200, 10, 44};
  auto report = fx.honest_report(tcb);
  auto cert = fx.kds.issue(fx.chip_id, tcb);
  REQUIRE(cert.has_value());

  auto report2 = AttestationReport::from_bytes(as_view(report.to_bytes()));
  REQUIRE(report2.has_value());
  CHECK(report2->to_bytes() == report.to_bytes());
  CHECK(verify_report(*report2, *cert));

  auto cert2 = MockKdsCert::from_bytes(as_view(cert->to_bytes()));
  REQUIRE(cert2.has_value());
  CHECK(cert2->to_bytes() == cert->to_bytes());
  CHECK(verify_report(report, *cert2));

  CHECK_FALSE(AttestationReport::from_bytes(str_view("ARPTjunk")).has_value());
  CHECK_FALSE(MockKdsCert::from_bytes(str_view("ACRTjunk")).has_value());

  // json export carries the key fields
  auto j = report.to_json();
  CHECK(j["tcb"]["bl_svn"] == 200);
  CHECK(j["chip_id"] == to_hex(as_view(fx.chip_id)));
}

TEST_CASE("chip id is stable and depends only on the cek public point") {
  auto rng = SeededRng::from_seed(606);
  auto seed = rng.array<32>();
  auto kp = crypto::ecdsa_keypair_from_seed(as_view(seed), str_view(kCekLabel));
  auto id1 = chip_id_from_cek(as_view(kp.public_point));
  auto id2 = chip_id_from_cek(as_view(kp.public_point));
  CHECK(id1 == id2);
}
