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

#include <algorithm>
#include <cmath>

#include "offnav/core/kernels.hpp"

namespace offnav::kern {
namespace {

int indicator_count_scalar(const float* a, const float* b, int n, float sa,
                           float sb, float bias, float thr) {
  int count = 0;
  for (int s = 0; s < n; ++s) {
    const float d = bias + a[s] * sa - b[s] * sb;
    count += (std::fabs(d) > thr) ? 1 : 0;
  }
  return count;
}

void stamp_add_scalar(float* grid, int width, int height, int ci, int cj,
                      const float* stencil, int ksize, float scale) {
  const int half = ksize / 2;
  const int i0 = std::max(0, ci - half);
  const int i1 = std::min(width - 1, ci + half);
  const int j0 = std::max(0, cj - half);
  const int j1 = std::min(height - 1, cj + half);
  for (int j = j0; j <= j1; ++j) {
    const float* srow = stencil + (j - cj + half) * ksize + (i0 - ci + half);
    float* grow = grid + j * width + i0;
    const int n = i1 - i0 + 1;
    for (int i = 0; i < n; ++i) grow[i] += scale * srow[i];
  }
}

void decay_mul_exp_scalar(float* dst, const float* var, const float* counts,
                          int n, float gamma) {
  for (int i = 0; i < n; ++i) {
    dst[i] = var[i] * std::exp(-gamma * counts[i]);
  }
}

void weighted_accum_scalar(double* acc, const double* eps, int n, double w) {
  for (int i = 0; i < n; ++i) acc[i] += w * eps[i];
}

}  // namespace

const Kernels& scalar() {
  static const Kernels k{indicator_count_scalar, stamp_add_scalar,
                         decay_mul_exp_scalar, weighted_accum_scalar};
  return k;
}

}  // namespace offnav::kern
