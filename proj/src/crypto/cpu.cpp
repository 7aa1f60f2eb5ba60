// Copyright aspforge contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "aspforge/crypto/cpu.hpp"

namespace aspforge::crypto {

const CpuFeatures& cpu_features() {
  static const CpuFeatures f = [] {
    CpuFeatures out;
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    out.aesni = __builtin_cpu_supports("aes") && __builtin_cpu_supports("sse2");
    out.shani = __builtin_cpu_supports("sha") && __builtin_cpu_supports("sse4.1");
#endif
    return out;
  }();
  return f;
}

}  // namespace aspforge::crypto
