// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>
#include <openssl/core_names.h>
#include <openssl/evp.h>
#include <openssl/param_build.h>
#include <openssl/rsa.h>

#include "aspforge/crypto/ecdsa_p384.hpp"
#include "aspforge/crypto/rsa_pss.hpp"
#include "aspforge/crypto/sha384.hpp"
#include "aspforge/rng.hpp"

using namespace aspforge;
using namespace aspforge::crypto;

namespace {

const RsaKeyPair& test_rsa_key() {
  static const RsaKeyPair key = [] {
    auto rng = SeededRng::from_seed(200).fork("test_rsa");
    return rsa4096_generate(rng);
  }();
  return key;
}

// Independent verifier route: OpenSSL's own RSA-PSS implementation fed with
// just (n, e). Our signer must satisfy it.
bool openssl_pss_verify(const RsaKeyPair& key, BytesView msg, BytesView sig) {
  BIGNUM* n = BN_bin2bn(key.n.data(), static_cast<int>(key.n.size()), nullptr);
  BIGNUM* e = BN_new();
  BN_set_word(e, key.e);

  OSSL_PARAM_BLD* bld = OSSL_PARAM_BLD_new();
  OSSL_PARAM_BLD_push_BN(bld, OSSL_PKEY_PARAM_RSA_N, n);
  OSSL_PARAM_BLD_push_BN(bld, OSSL_PKEY_PARAM_RSA_E, e);
  OSSL_PARAM* params = OSSL_PARAM_BLD_to_param(bld);

  EVP_PKEY* pkey = nullptr;
  EVP_PKEY_CTX* kctx = EVP_PKEY_CTX_new_from_name(nullptr, "RSA", nullptr);
  EVP_PKEY_fromdata_init(kctx);
  EVP_PKEY_fromdata(kctx, &pkey, EVP_PKEY_PUBLIC_KEY, params);

  bool ok = false;
  if (pkey) {
    EVP_MD_CTX* mctx = EVP_MD_CTX_new();
    EVP_PKEY_CTX* vctx = nullptr;
    if (EVP_DigestVerifyInit(mctx, &vctx, EVP_sha384(), nullptr, pkey) == 1) {
      EVP_PKEY_CTX_set_rsa_padding(vctx, RSA_PKCS1_PSS_PADDING);
      EVP_PKEY_CTX_set_rsa_pss_saltlen(vctx, 48);
      EVP_PKEY_CTX_set_rsa_mgf1_md(vctx, EVP_sha384());
      ok = EVP_DigestVerify(mctx, sig.data(), sig.size(), msg.data(), msg.size()) == 1;
    }
    EVP_MD_CTX_free(mctx);
  }

  EVP_PKEY_free(pkey);
  EVP_PKEY_CTX_free(kctx);
  OSSL_PARAM_free(params);
  OSSL_PARAM_BLD_free(bld);
  BN_free(n);
  BN_free(e);
  return ok;
}

}  // namespace

TEST_CASE("ecdsa p-384 matches the rfc 6979 deterministic test vector") {
  EcdsaP384KeyPair key;
  key.private_scalar = *from_hex(
      "6b9d3dad2e1b8c1c05b19875b6659f4de23c3b667bf297ba9aa47740787137d896d5724e4c70a8"
      "25f872c9ea60d2edf5");
  auto sig = ecdsa_p384_sha384_sign(key, str_view("sample"));
  CHECK(to_hex(BytesView(sig.data(), 48)) ==
        "94edbb92a5ecb8aad4736e56c691916b3f88140666ce9fa73d64c4ea95ad133c81a648152e44"
        "acf96e36dd1e80fabe46");
  CHECK(to_hex(BytesView(sig.data() + 48, 48)) ==
        "99ef4aeb15f178cea1fe40db2603138f130e740a19624526203b6351d0a3a94fa329c145786e"
        "679e7b82c71a38628ac8");
}

TEST_CASE("keypair_from_seed: deterministic, label-separated, in-range scalar") {
  auto rng = SeededRng::from_seed(201);
  // P-384 group order, for the range check
  const Bytes order = *from_hex(
      "ffffffffffffffffffffffffffffffffffffffffffffffffc7634d81f4372ddf581a0db248b0"
      "a77aecec196accc52973");

  for (int trial = 0; trial < 16; ++trial) {
    auto seed = rng.bytes(32);
    auto vcek1 = ecdsa_keypair_from_seed(as_view(seed), str_view("VCEK"));
    auto vcek2 = ecdsa_keypair_from_seed(as_view(seed), str_view("VCEK"));
    auto cek = ecdsa_keypair_from_seed(as_view(seed), str_view("CEK"));
    CHECK(vcek1.public_point == vcek2.public_point);
    CHECK(vcek1.private_scalar == vcek2.private_scalar);
    CHECK(vcek1.public_point != cek.public_point);

    // 1 <= scalar < order (big-endian lexicographic compare works here)
    CHECK(vcek1.private_scalar.size() == 48);
    bool nonzero = false;
    for (uint8_t b : vcek1.private_scalar) nonzero |= (b != 0);
    CHECK(nonzero);
    CHECK(std::lexicographical_compare(vcek1.private_scalar.begin(),
                                       vcek1.private_scalar.end(), order.begin(),
                                       order.end()));
  }
}

TEST_CASE("ecdsa sign/verify round-trip and tamper rejection") {
  Bytes seed(32, 0x5A);
  auto key = ecdsa_keypair_from_seed(as_view(seed), str_view("VCEK"));
  Bytes msg = SeededRng::from_seed(202).bytes(149);
  auto sig = ecdsa_p384_sha384_sign(key, as_view(msg));
  CHECK(sig.size() == kEcdsaSignatureBytes);
  CHECK(ecdsa_p384_sha384_verify(as_view(key.public_point), as_view(msg), as_view(sig)));
  // deterministic signatures
  CHECK(ecdsa_p384_sha384_sign(key, as_view(msg)) == sig);

  Bytes bad_msg = msg;
  bad_msg[7] ^= 0x01;
  CHECK_FALSE(
      ecdsa_p384_sha384_verify(as_view(key.public_point), as_view(bad_msg), as_view(sig)));

  Bytes bad_sig = sig;
  bad_sig[60] ^= 0x80;
  CHECK_FALSE(
      ecdsa_p384_sha384_verify(as_view(key.public_point), as_view(msg), as_view(bad_sig)));

  Bytes other_seed(32, 0x5B);
  auto other = ecdsa_keypair_from_seed(as_view(other_seed), str_view("VCEK"));
  CHECK_FALSE(
      ecdsa_p384_sha384_verify(as_view(other.public_point), as_view(msg), as_view(sig)));

  // malformed inputs return false rather than throwing
  CHECK_FALSE(ecdsa_p384_sha384_verify(as_view(key.public_point), as_view(msg),
                                       BytesView(sig.data(), 95)));
  Bytes bad_point(kP384PointBytes, 0x02);
  CHECK_FALSE(ecdsa_p384_sha384_verify(as_view(bad_point), as_view(msg), as_view(sig)));
}

TEST_CASE("rsa-4096 generation is deterministic per stream and well-formed") {
  const auto& key = test_rsa_key();
  CHECK(key.n.size() == kRsaModulusBytes);
  CHECK((key.n[0] & 0x80) != 0);  // full 4096 bits
  CHECK(key.has_private());

  auto rng = SeededRng::from_seed(200).fork("test_rsa");
  auto again = rsa4096_generate(rng);
  CHECK(again.n == key.n);
  CHECK(again.d == key.d);
}

TEST_CASE("rsa-pss sign/verify round-trip, reproducible signatures") {
  const auto& key = test_rsa_key();
  Bytes msg = SeededRng::from_seed(203).bytes(3000);
  auto sig = rsa_pss_sha384_sign(key, as_view(msg));
  CHECK(sig.size() == kRsaModulusBytes);
  CHECK(rsa_pss_sha384_verify(key, as_view(msg), as_view(sig)));
  CHECK(rsa_pss_sha384_sign(key, as_view(msg)) == sig);

  SUBCASE("any flipped message bit fails") {
    Bytes bad = msg;
    bad[1234] ^= 0x10;
    CHECK_FALSE(rsa_pss_sha384_verify(key, as_view(bad), as_view(sig)));
  }
  SUBCASE("any flipped signature bit fails") {
    auto rng = SeededRng::from_seed(204);
    for (int trial = 0; trial < 8; ++trial) {
      Bytes bad = sig;
      bad[rng.below(bad.size())] ^= static_cast<uint8_t>(1u << rng.below(8));
      CHECK_FALSE(rsa_pss_sha384_verify(key, as_view(msg), as_view(bad)));
    }
  }
  SUBCASE("wrong public key fails") {
    auto rng = SeededRng::from_seed(205).fork("other_rsa");
    auto other = rsa4096_generate(rng);
    CHECK_FALSE(rsa_pss_sha384_verify(other, as_view(msg), as_view(sig)));
  }
  SUBCASE("malformed signature encodings fail without throwing") {
    CHECK_FALSE(rsa_pss_sha384_verify(key, as_view(msg), BytesView(sig.data(), 100)));
    Bytes all_ff(kRsaModulusBytes, 0xFF);
    CHECK_FALSE(rsa_pss_sha384_verify(key, as_view(msg), as_view(all_ff)));
  }
}

TEST_CASE("rsa-pss signatures satisfy an independent verifier") {
  const auto& key = test_rsa_key();
  auto rng = SeededRng::from_seed(206);
  for (int trial = 0; trial < 4; ++trial) {
    Bytes msg = rng.bytes(100 + rng.below(2000));
    auto sig = rsa_pss_sha384_sign(key, as_view(msg));
    CAPTURE(trial);
    REQUIRE(openssl_pss_verify(key, as_view(msg), as_view(sig)));
  }
}

TEST_CASE("public encoding is modulus then exponent") {
  const auto& key = test_rsa_key();
  auto enc = key.public_encoding();
  CHECK(enc.size() == kRsaModulusBytes + 4);
  CHECK(BytesView(enc.data(), kRsaModulusBytes).back() == key.n.back());
  CHECK(enc[kRsaModulusBytes + 3] == 0x01);  // 65537 big-endian tail
}
