// Copyright 2026 The theta-kernels Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>

namespace theta_kernels {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Standard normal draws from a Philox substream keyed by (seed, sample, layer).
///
/// Draws depend only on the key triple and their position in the stream, never
/// on which thread consumes them.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t sample, std::uint32_t layer);

  double next();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t sample_;
  std::uint32_t layer_;
  std::uint32_t block_ = 0;
  std::array<double, 2> cache_{};
  int cached_ = 0;
};

}  // namespace theta_kernels
