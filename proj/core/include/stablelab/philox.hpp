/*
   Copyright 2026 the stablelab authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <array>
#include <cstdint>

namespace stablelab {

/// Philox4x32-10 counter-based generator.
///
/// Every draw is a pure function of (key, counter), so random streams can be
/// indexed by (path, step, coordinate) and evaluated in any order on any
/// number of threads with bit-identical results.
struct Philox4x32 {
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  static constexpr std::uint32_t kMult0 = 0xD2511F53u;
  static constexpr std::uint32_t kMult1 = 0xCD9E8D57u;

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t(kMult0) * ctr[0];
      const std::uint64_t p1 = std::uint64_t(kMult1) * ctr[2];
      const std::array<std::uint32_t, 4> next = {
          std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0],
          std::uint32_t(p1),
          std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1],
          std::uint32_t(p0),
      };
      ctr = next;
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }
};

/// splitmix64 finalizer; used to derive independent subkeys from a master seed.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Two uniforms in the open interval (0,1) indexed by (seed, path, step, coord).
/// One Philox block yields both; the pair feeds one stable draw.
struct CounterUniforms {
  double u0;
  double u1;
};

inline CounterUniforms uniforms_at(std::uint64_t seed, std::uint64_t path,
                                   std::uint32_t step, std::uint32_t coord) {
  const std::array<std::uint32_t, 4> ctr = {
      std::uint32_t(path), std::uint32_t(path >> 32), step, coord};
  const std::array<std::uint32_t, 2> key = {std::uint32_t(seed),
                                            std::uint32_t(seed >> 32)};
  const auto r = Philox4x32::block(ctr, key);
  const std::uint64_t a = (std::uint64_t(r[0]) << 32) | r[1];
  const std::uint64_t b = (std::uint64_t(r[2]) << 32) | r[3];
  // 53-bit mantissas shifted by half an ulp: strictly inside (0,1).
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  return {(double(a >> 11) + 0.5) * kScale, (double(b >> 11) + 0.5) * kScale};
}

}  // namespace stablelab
