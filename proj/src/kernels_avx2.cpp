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

// AVX2 kernel variants. Compiled with -mavx2 in its own translation unit;
// only reachable after the runtime CPU check in kernels_dispatch.cpp.
// Elementwise mul/add are kept unfused so results match the scalar
// reference bit-for-bit (both TUs build with -ffp-contract=off); the one
// exception is the vectorized exp, which is equivalence-tested to a
// relative tolerance instead.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "offnav/core/kernels.hpp"

namespace offnav::kern {
namespace {

int indicator_count_avx2(const float* a, const float* b, int n, float sa,
                         float sb, float bias, float thr) {
  const __m256 vsa = _mm256_set1_ps(sa);
  const __m256 vsb = _mm256_set1_ps(sb);
  const __m256 vbias = _mm256_set1_ps(bias);
  const __m256 vthr = _mm256_set1_ps(thr);
  const __m256 sign_mask = _mm256_set1_ps(-0.0f);
  int count = 0;
  int s = 0;
  for (; s + 8 <= n; s += 8) {
    const __m256 va = _mm256_loadu_ps(a + s);
    const __m256 vb = _mm256_loadu_ps(b + s);
    __m256 d = _mm256_add_ps(vbias, _mm256_mul_ps(va, vsa));
    d = _mm256_sub_ps(d, _mm256_mul_ps(vb, vsb));
    d = _mm256_andnot_ps(sign_mask, d);
    const __m256 gt = _mm256_cmp_ps(d, vthr, _CMP_GT_OQ);
    count += __builtin_popcount(_mm256_movemask_ps(gt));
  }
  for (; s < n; ++s) {
    const float d = bias + a[s] * sa - b[s] * sb;
    count += (std::fabs(d) > thr) ? 1 : 0;
  }
  return count;
}

void stamp_add_avx2(float* grid, int width, int height, int ci, int cj,
                    const float* stencil, int ksize, float scale) {
  const int half = ksize / 2;
  const int i0 = std::max(0, ci - half);
  const int i1 = std::min(width - 1, ci + half);
  const int j0 = std::max(0, cj - half);
  const int j1 = std::min(height - 1, cj + half);
  const __m256 vscale = _mm256_set1_ps(scale);
  for (int j = j0; j <= j1; ++j) {
    const float* srow = stencil + (j - cj + half) * ksize + (i0 - ci + half);
    float* grow = grid + j * width + i0;
    const int n = i1 - i0 + 1;
    int i = 0;
    for (; i + 8 <= n; i += 8) {
      const __m256 g = _mm256_loadu_ps(grow + i);
      const __m256 sv = _mm256_loadu_ps(srow + i);
      _mm256_storeu_ps(grow + i, _mm256_add_ps(g, _mm256_mul_ps(vscale, sv)));
    }
    for (; i < n; ++i) grow[i] += scale * srow[i];
  }
}

// exp(x) for 8 floats, |rel err| < 2e-7 over the range used by the decay
// update (x <= 0). Standard exp2-split with a degree-5 polynomial.
__m256 exp_approx_ps(__m256 x) {
  const __m256 log2e = _mm256_set1_ps(1.442695040888963f);
  const __m256 c_ln2_hi = _mm256_set1_ps(-0.693359375f);
  const __m256 c_ln2_lo = _mm256_set1_ps(2.12194440e-4f);
  x = _mm256_max_ps(x, _mm256_set1_ps(-87.0f));
  x = _mm256_min_ps(x, _mm256_set1_ps(88.0f));

  __m256 fx = _mm256_mul_ps(x, log2e);
  fx = _mm256_round_ps(fx, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256 r = _mm256_add_ps(x, _mm256_mul_ps(fx, c_ln2_hi));
  r = _mm256_add_ps(r, _mm256_mul_ps(fx, c_ln2_lo));

  __m256 p = _mm256_set1_ps(1.9875691500e-4f);
  p = _mm256_add_ps(_mm256_mul_ps(p, r), _mm256_set1_ps(1.3981999507e-3f));
  p = _mm256_add_ps(_mm256_mul_ps(p, r), _mm256_set1_ps(8.3334519073e-3f));
  p = _mm256_add_ps(_mm256_mul_ps(p, r), _mm256_set1_ps(4.1665795894e-2f));
  p = _mm256_add_ps(_mm256_mul_ps(p, r), _mm256_set1_ps(1.6666665459e-1f));
  p = _mm256_add_ps(_mm256_mul_ps(p, r), _mm256_set1_ps(5.0000001201e-1f));
  p = _mm256_mul_ps(p, _mm256_mul_ps(r, r));
  p = _mm256_add_ps(p, r);
  p = _mm256_add_ps(p, _mm256_set1_ps(1.0f));

  const __m256i n = _mm256_cvtps_epi32(fx);
  const __m256i pow2n =
      _mm256_slli_epi32(_mm256_add_epi32(n, _mm256_set1_epi32(127)), 23);
  return _mm256_mul_ps(p, _mm256_castsi256_ps(pow2n));
}

void decay_mul_exp_avx2(float* dst, const float* var, const float* counts,
                        int n, float gamma) {
  const __m256 vng = _mm256_set1_ps(-gamma);
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 c = _mm256_loadu_ps(counts + i);
    const __m256 v = _mm256_loadu_ps(var + i);
    const __m256 e = exp_approx_ps(_mm256_mul_ps(vng, c));
    _mm256_storeu_ps(dst + i, _mm256_mul_ps(v, e));
  }
  for (; i < n; ++i) dst[i] = var[i] * std::exp(-gamma * counts[i]);
}

void weighted_accum_avx2(double* acc, const double* eps, int n, double w) {
  const __m256d vw = _mm256_set1_pd(w);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(acc + i);
    const __m256d e = _mm256_loadu_pd(eps + i);
    _mm256_storeu_pd(acc + i, _mm256_add_pd(a, _mm256_mul_pd(vw, e)));
  }
  for (; i < n; ++i) acc[i] += w * eps[i];
}

}  // namespace

const Kernels& avx2() {
  static const Kernels k{indicator_count_avx2, stamp_add_avx2,
                         decay_mul_exp_avx2, weighted_accum_avx2};
  return k;
}

}  // namespace offnav::kern

#endif  // x86_64
