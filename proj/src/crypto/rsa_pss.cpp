// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/crypto/rsa_pss.hpp"

#include <openssl/bn.h>

#include <memory>
#include <stdexcept>

#include "aspforge/crypto/sha384.hpp"

namespace aspforge::crypto {

namespace {

constexpr size_t kPrimeBytes = kRsaModulusBytes / 2;
constexpr size_t kHashLen = 48;
constexpr size_t kEmLen = kRsaModulusBytes;        // ceil((4096-1)/8)
constexpr size_t kDbLen = kEmLen - kHashLen - 1;   // 463

struct BnDeleter {
  void operator()(BIGNUM* p) const { BN_free(p); }
};
struct CtxDeleter {
  void operator()(BN_CTX* p) const { BN_CTX_free(p); }
};
using Bn = std::unique_ptr<BIGNUM, BnDeleter>;
using Ctx = std::unique_ptr<BN_CTX, CtxDeleter>;

Bn bn_new() { return Bn(BN_new()); }

Bn bn_from(BytesView bytes) {
  return Bn(BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), nullptr));
}

Bytes bn_to(const BIGNUM* v, size_t len) {
  Bytes out(len);
  if (BN_bn2binpad(v, out.data(), static_cast<int>(len)) < 0)
    throw std::runtime_error("rsa: value does not fit encoding");
  return out;
}

// Draws odd candidates with the top two bits forced until one is prime and
// compatible with the public exponent.
Bn deterministic_prime(SeededRng& rng, BN_CTX* ctx) {
  Bn p = bn_new();
  Bn rem = bn_new();
  Bn e = bn_new();
  BN_set_word(e.get(), kRsaPublicExponent);
  uint8_t buf[kPrimeBytes];
  for (;;) {
    rng.fill(buf, sizeof(buf));
    buf[0] |= 0xC0;
    buf[kPrimeBytes - 1] |= 0x01;
    BN_bin2bn(buf, kPrimeBytes, p.get());
    // gcd(e, p-1) must be 1 so d exists.
    BN_sub_word(p.get(), 1);
    BN_mod(rem.get(), p.get(), e.get(), ctx);
    BN_add_word(p.get(), 1);
    if (BN_is_zero(rem.get())) continue;
    if (BN_check_prime(p.get(), ctx, nullptr) == 1) return p;
  }
}

Bytes mgf1_sha384(BytesView seed, size_t out_len) {
  Bytes out;
  out.reserve(out_len + kHashLen);
  uint32_t counter = 0;
  while (out.size() < out_len) {
    Bytes block(seed.begin(), seed.end());
    for (int i = 3; i >= 0; --i) block.push_back(static_cast<uint8_t>(counter >> (8 * i)));
    auto d = sha384(as_view(block));
    out.insert(out.end(), d.begin(), d.end());
    ++counter;
  }
  out.resize(out_len);
  return out;
}

std::array<uint8_t, kHashLen> pss_h(const std::array<uint8_t, kHashLen>& m_hash,
                                    BytesView salt) {
  Bytes m_prime(8, 0);
  append(m_prime, BytesView(m_hash.data(), m_hash.size()));
  append(m_prime, salt);
  return sha384(as_view(m_prime));
}

Bytes rsa_private_op(const RsaKeyPair& key, BytesView input) {
  Ctx ctx(BN_CTX_new());
  Bn c = bn_from(input);
  Bn p = bn_from(key.p), q = bn_from(key.q);
  Bn dp = bn_from(key.dp), dq = bn_from(key.dq), qinv = bn_from(key.qinv);
  Bn m1 = bn_new(), m2 = bn_new(), h = bn_new(), m = bn_new();

  BN_mod_exp(m1.get(), c.get(), dp.get(), p.get(), ctx.get());
  BN_mod_exp(m2.get(), c.get(), dq.get(), q.get(), ctx.get());
  BN_mod_sub(h.get(), m1.get(), m2.get(), p.get(), ctx.get());
  BN_mod_mul(h.get(), h.get(), qinv.get(), p.get(), ctx.get());
  BN_mul(m.get(), q.get(), h.get(), ctx.get());
  BN_add(m.get(), m.get(), m2.get());
  return bn_to(m.get(), kRsaModulusBytes);
}

Bytes rsa_public_op(const RsaKeyPair& key, BytesView input) {
  Ctx ctx(BN_CTX_new());
  Bn s = bn_from(input);
  Bn n = bn_from(key.n);
  Bn e = bn_new();
  BN_set_word(e.get(), key.e);
  Bn m = bn_new();
  BN_mod_exp(m.get(), s.get(), e.get(), n.get(), ctx.get());
  return bn_to(m.get(), kRsaModulusBytes);
}

}  // namespace

Bytes RsaKeyPair::public_encoding() const {
  Bytes out = n;
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<uint8_t>(e >> (8 * i)));
  return out;
}

RsaKeyPair rsa4096_generate(SeededRng& rng) {
  Ctx ctx(BN_CTX_new());
  Bn p = deterministic_prime(rng, ctx.get());
  Bn q = deterministic_prime(rng, ctx.get());
  while (BN_cmp(p.get(), q.get()) == 0) q = deterministic_prime(rng, ctx.get());
  // Keep p > q so the CRT recombination below stays in range.
  if (BN_cmp(p.get(), q.get()) < 0) std::swap(p, q);

  Bn n = bn_new();
  BN_mul(n.get(), p.get(), q.get(), ctx.get());

  Bn p1 = bn_new(), q1 = bn_new(), lambda = bn_new(), gcd = bn_new();
  BN_sub(p1.get(), p.get(), BN_value_one());
  BN_sub(q1.get(), q.get(), BN_value_one());
  BN_gcd(gcd.get(), p1.get(), q1.get(), ctx.get());
  BN_mul(lambda.get(), p1.get(), q1.get(), ctx.get());
  BN_div(lambda.get(), nullptr, lambda.get(), gcd.get(), ctx.get());

  Bn e = bn_new();
  BN_set_word(e.get(), kRsaPublicExponent);
  Bn d(BN_mod_inverse(nullptr, e.get(), lambda.get(), ctx.get()));
  if (!d) throw std::runtime_error("rsa: no modular inverse for e");

  Bn dp = bn_new(), dq = bn_new();
  BN_mod(dp.get(), d.get(), p1.get(), ctx.get());
  BN_mod(dq.get(), d.get(), q1.get(), ctx.get());
  Bn qinv(BN_mod_inverse(nullptr, q.get(), p.get(), ctx.get()));
  if (!qinv) throw std::runtime_error("rsa: no inverse of q mod p");

  RsaKeyPair key;
  key.n = bn_to(n.get(), kRsaModulusBytes);
  key.e = kRsaPublicExponent;
  key.d = bn_to(d.get(), kRsaModulusBytes);
  key.p = bn_to(p.get(), kPrimeBytes);
  key.q = bn_to(q.get(), kPrimeBytes);
  key.dp = bn_to(dp.get(), kPrimeBytes);
  key.dq = bn_to(dq.get(), kPrimeBytes);
  key.qinv = bn_to(qinv.get(), kPrimeBytes);
  return key;
}

Bytes rsa_pss_sha384_sign(const RsaKeyPair& key, BytesView message) {
  if (!key.has_private()) throw std::invalid_argument("rsa: signing needs a private key");

  auto m_hash = sha384(message);

  // Salt derived from the message hash keeps signatures reproducible.
  Bytes salt_input;
  append(salt_input, str_view("aspforge.pss.salt.v1"));
  append(salt_input, BytesView(m_hash.data(), m_hash.size()));
  auto salt = sha384(as_view(salt_input));

  auto h = pss_h(m_hash, BytesView(salt.data(), salt.size()));

  Bytes db(kDbLen, 0);
  db[kDbLen - kHashLen - 1] = 0x01;
  std::copy(salt.begin(), salt.end(), db.end() - kHashLen);

  Bytes mask = mgf1_sha384(BytesView(h.data(), h.size()), kDbLen);
  Bytes em(kEmLen);
  for (size_t i = 0; i < kDbLen; ++i) em[i] = db[i] ^ mask[i];
  em[0] &= 0x7F;  // emBits = 4095
  std::copy(h.begin(), h.end(), em.begin() + kDbLen);
  em[kEmLen - 1] = 0xBC;

  return rsa_private_op(key, as_view(em));
}

bool rsa_pss_sha384_verify(const RsaKeyPair& key, BytesView message, BytesView signature) {
  if (signature.size() != kRsaModulusBytes) return false;
  if (key.n.size() != kRsaModulusBytes) return false;
  // Reject values >= n.
  {
    Bn s = bn_from(signature);
    Bn n = bn_from(key.n);
    if (BN_cmp(s.get(), n.get()) >= 0) return false;
  }

  Bytes em = rsa_public_op(key, signature);
  if (em[kEmLen - 1] != 0xBC) return false;
  if (em[0] & 0x80) return false;

  BytesView masked_db(em.data(), kDbLen);
  BytesView h(em.data() + kDbLen, kHashLen);

  Bytes mask = mgf1_sha384(h, kDbLen);
  Bytes db(kDbLen);
  for (size_t i = 0; i < kDbLen; ++i) db[i] = masked_db[i] ^ mask[i];
  db[0] &= 0x7F;

  for (size_t i = 0; i < kDbLen - kHashLen - 1; ++i)
    if (db[i] != 0) return false;
  if (db[kDbLen - kHashLen - 1] != 0x01) return false;

  BytesView salt(db.data() + kDbLen - kHashLen, kHashLen);
  auto m_hash = sha384(message);
  auto h_expect = pss_h(m_hash, salt);
  return ct_equal(BytesView(h_expect.data(), h_expect.size()), h);
}

}  // namespace aspforge::crypto
