// SPDX-License-Identifier: MIT
#pragma once

#include <array>
#include <cstdint>

namespace convint {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

// Two independent standard normals from one counter block (Box-Muller on 53-bit uniforms).
std::array<double, 2> philox_normal_pair(const PhiloxCounter& ctr, const PhiloxKey& key);

inline PhiloxKey philox_key(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

}  // namespace convint
