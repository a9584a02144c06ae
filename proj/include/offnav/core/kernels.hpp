// Copyright 2026 Offnav Authors
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

#ifndef OFFNAV_CORE_KERNELS_HPP
#define OFFNAV_CORE_KERNELS_HPP

#include <cstdint>

namespace offnav::kern {

// Data-parallel inner-loop kernels. Scalar versions are the reference
// semantics; the AVX2 versions are equivalence-tested against them
// (bit-exact where the operation permits, small tolerance where a
// vectorized exp is involved). Selection happens once at startup.
struct Kernels {
  // Number of samples s in [0, n) with |bias + a[s]*sa - b[s]*sb| > thr.
  int (*indicator_count)(const float* a, const float* b, int n, float sa,
                         float sb, float bias, float thr);

  // Accumulate a (ksize x ksize) stencil, scaled by `scale`, centered on
  // grid cell (ci, cj). Out-of-grid taps are clipped. Grid is row-major
  // with row stride `width` and `height` rows; cell (i, j) lives at
  // grid[j * width + i].
  void (*stamp_add)(float* grid, int width, int height, int ci, int cj,
                    const float* stencil, int ksize, float scale);

  // dst[i] = var[i] * exp(-gamma * counts[i]) for i in [0, n).
  void (*decay_mul_exp)(float* dst, const float* var, const float* counts,
                        int n, float gamma);

  // acc[i] += w * eps[i] for i in [0, n).
  void (*weighted_accum)(double* acc, const double* eps, int n, double w);
};

const Kernels& scalar();
bool avx2_available();
const Kernels& avx2();  // valid only when avx2_available()

// Active implementation: AVX2 when the CPU supports it, overridable with
// OFFNAV_SIMD=scalar|avx2.
const Kernels& active();
const char* active_name();

}  // namespace offnav::kern

#endif  // OFFNAV_CORE_KERNELS_HPP
