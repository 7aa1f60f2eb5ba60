// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/crypto/ecdsa_p384.hpp"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/obj_mac.h>

#include <cstring>
#include <memory>
#include <stdexcept>

#include "aspforge/crypto/hmac.hpp"
#include "aspforge/crypto/sha384.hpp"

namespace aspforge::crypto {

namespace {

struct BnDeleter {
  void operator()(BIGNUM* p) const { BN_free(p); }
};
struct CtxDeleter {
  void operator()(BN_CTX* p) const { BN_CTX_free(p); }
};
struct PointDeleter {
  void operator()(EC_POINT* p) const { EC_POINT_free(p); }
};
using Bn = std::unique_ptr<BIGNUM, BnDeleter>;
using Ctx = std::unique_ptr<BN_CTX, CtxDeleter>;
using Point = std::unique_ptr<EC_POINT, PointDeleter>;

const EC_GROUP* group() {
  static const EC_GROUP* g = EC_GROUP_new_by_curve_name(NID_secp384r1);
  return g;
}

const BIGNUM* order() { return EC_GROUP_get0_order(group()); }

Bn bn_from(BytesView bytes) {
  return Bn(BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), nullptr));
}

std::array<uint8_t, 48> bn_to48(const BIGNUM* v) {
  std::array<uint8_t, 48> out{};
  if (BN_bn2binpad(v, out.data(), 48) < 0)
    throw std::runtime_error("ecdsa: scalar out of range");
  return out;
}

Bytes point_to_oct(const EC_POINT* p, BN_CTX* ctx) {
  Bytes out(kP384PointBytes);
  size_t n = EC_POINT_point2oct(group(), p, POINT_CONVERSION_UNCOMPRESSED, out.data(),
                                out.size(), ctx);
  if (n != kP384PointBytes) throw std::runtime_error("ecdsa: point encoding failed");
  return out;
}

// RFC 6979 nonce generator with HMAC-SHA384; qlen == hlen == 384 bits, so
// the bits2int conversions are plain 48-byte reads. next() yields the
// candidate sequence the RFC prescribes (including its retry path).
class Rfc6979Nonce {
 public:
  Rfc6979Nonce(const std::array<uint8_t, 48>& priv,
               const std::array<uint8_t, 48>& h1, BN_CTX* ctx) {
    auto bits2octets = [&](const std::array<uint8_t, 48>& b) {
      Bn z = bn_from(BytesView(b.data(), b.size()));
      Bn r(BN_new());
      BN_mod(r.get(), z.get(), order(), ctx);
      return bn_to48(r.get());
    };

    v_.fill(0x01);
    k_.fill(0x00);
    auto h1o = bits2octets(h1);

    Bytes msg;
    append(msg, as_view(v_));
    msg.push_back(0x00);
    append(msg, as_view(priv));
    append(msg, as_view(h1o));
    k_ = hmac_sha384(as_view(k_), as_view(msg));
    v_ = hmac_sha384(as_view(k_), as_view(v_));

    msg.clear();
    append(msg, as_view(v_));
    msg.push_back(0x01);
    append(msg, as_view(priv));
    append(msg, as_view(h1o));
    k_ = hmac_sha384(as_view(k_), as_view(msg));
    v_ = hmac_sha384(as_view(k_), as_view(v_));
  }

  Bn next() {
    for (;;) {
      v_ = hmac_sha384(as_view(k_), as_view(v_));
      Bn candidate = bn_from(BytesView(v_.data(), v_.size()));
      step();
      if (!BN_is_zero(candidate.get()) && BN_cmp(candidate.get(), order()) < 0)
        return candidate;
    }
  }

 private:
  void step() {
    Bytes msg;
    append(msg, as_view(v_));
    msg.push_back(0x00);
    k_ = hmac_sha384(as_view(k_), as_view(msg));
    v_ = hmac_sha384(as_view(k_), as_view(v_));
  }

  std::array<uint8_t, 48> v_{}, k_{};
};

}  // namespace

EcdsaP384KeyPair ecdsa_keypair_from_seed(BytesView seed32, BytesView label) {
  Ctx ctx(BN_CTX_new());

  Bytes material;
  append(material, label);
  append(material, seed32);
  auto digest = sha384(as_view(material));

  // scalar = (digest mod (n-1)) + 1, always in [1, n-1]
  Bn n1(BN_dup(order()));
  BN_sub_word(n1.get(), 1);
  Bn scalar = bn_from(BytesView(digest.data(), digest.size()));
  BN_mod(scalar.get(), scalar.get(), n1.get(), ctx.get());
  BN_add_word(scalar.get(), 1);

  Point pub(EC_POINT_new(group()));
  EC_POINT_mul(group(), pub.get(), scalar.get(), nullptr, nullptr, ctx.get());

  EcdsaP384KeyPair key;
  auto s48 = bn_to48(scalar.get());
  key.private_scalar.assign(s48.begin(), s48.end());
  key.public_point = point_to_oct(pub.get(), ctx.get());
  return key;
}

Bytes ecdsa_p384_sha384_sign(const EcdsaP384KeyPair& key, BytesView message) {
  if (!key.has_private()) throw std::invalid_argument("ecdsa: signing needs a private key");
  Ctx ctx(BN_CTX_new());

  auto h1 = sha384(message);
  std::array<uint8_t, 48> priv{};
  std::memcpy(priv.data(), key.private_scalar.data(), 48);

  Bn z = bn_from(BytesView(h1.data(), h1.size()));
  Bn x = bn_from(key.private_scalar);

  Rfc6979Nonce nonce(priv, h1, ctx.get());
  for (;;) {
    Bn k = nonce.next();

    Point rp(EC_POINT_new(group()));
    EC_POINT_mul(group(), rp.get(), k.get(), nullptr, nullptr, ctx.get());
    Bn rx(BN_new()), ry(BN_new());
    EC_POINT_get_affine_coordinates(group(), rp.get(), rx.get(), ry.get(), ctx.get());

    Bn r(BN_new());
    BN_mod(r.get(), rx.get(), order(), ctx.get());
    if (BN_is_zero(r.get())) continue;

    Bn kinv(BN_mod_inverse(nullptr, k.get(), order(), ctx.get()));
    Bn s(BN_new());
    BN_mod_mul(s.get(), r.get(), x.get(), order(), ctx.get());
    BN_mod_add(s.get(), s.get(), z.get(), order(), ctx.get());
    BN_mod_mul(s.get(), s.get(), kinv.get(), order(), ctx.get());
    if (BN_is_zero(s.get())) continue;

    Bytes sig;
    auto r48 = bn_to48(r.get());
    auto s48 = bn_to48(s.get());
    append(sig, as_view(r48));
    append(sig, as_view(s48));
    return sig;
  }
}

bool ecdsa_p384_sha384_verify(BytesView public_point, BytesView message,
                              BytesView signature) {
  if (public_point.size() != kP384PointBytes || signature.size() != kEcdsaSignatureBytes)
    return false;
  Ctx ctx(BN_CTX_new());

  Point q(EC_POINT_new(group()));
  if (!EC_POINT_oct2point(group(), q.get(), public_point.data(), public_point.size(),
                          ctx.get()))
    return false;

  Bn r = bn_from(signature.subspan(0, 48));
  Bn s = bn_from(signature.subspan(48, 48));
  if (BN_is_zero(r.get()) || BN_is_zero(s.get())) return false;
  if (BN_cmp(r.get(), order()) >= 0 || BN_cmp(s.get(), order()) >= 0) return false;

  auto h1 = sha384(message);
  Bn z = bn_from(BytesView(h1.data(), h1.size()));

  Bn w(BN_mod_inverse(nullptr, s.get(), order(), ctx.get()));
  if (!w) return false;
  Bn u1(BN_new()), u2(BN_new());
  BN_mod_mul(u1.get(), z.get(), w.get(), order(), ctx.get());
  BN_mod_mul(u2.get(), r.get(), w.get(), order(), ctx.get());

  Point rp(EC_POINT_new(group()));
  if (!EC_POINT_mul(group(), rp.get(), u1.get(), q.get(), u2.get(), ctx.get()))
    return false;
  if (EC_POINT_is_at_infinity(group(), rp.get())) return false;

  Bn rx(BN_new()), ry(BN_new());
  EC_POINT_get_affine_coordinates(group(), rp.get(), rx.get(), ry.get(), ctx.get());
  Bn v(BN_new());
  BN_mod(v.get(), rx.get(), order(), ctx.get());
  return BN_cmp(v.get(), r.get()) == 0;
}

}  // namespace aspforge::crypto
