#pragma once

#include "mipp/group_crypto.hpp"

namespace fixtures {

// 64-bit test parameters, generated once per binary.
inline const mipp::GroupParams& params64() {
  static const mipp::GroupParams p = mipp::gen_group_params(64, mipp::as_bytes("fixture-64"));
  return p;
}

// Small enough for the oracle: p^2 < 2^63.
inline const mipp::GroupParams& params31() {
  static const mipp::GroupParams p = mipp::gen_group_params(31, mipp::as_bytes("fixture-31"));
  return p;
}

}  // namespace fixtures
