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

#include <cstdlib>
#include <cstring>

#include "offnav/core/kernels.hpp"

namespace offnav::kern {
namespace {

struct Selection {
  const Kernels* impl;
  const char* name;
};

Selection select() {
  const bool have_avx2 = avx2_available();
  if (const char* env = std::getenv("OFFNAV_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return {&scalar(), "scalar"};
    if (std::strcmp(env, "avx2") == 0 && have_avx2) return {&avx2(), "avx2"};
  }
  if (have_avx2) return {&avx2(), "avx2"};
  return {&scalar(), "scalar"};
}

const Selection& selection() {
  static const Selection s = select();
  return s;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

#if !defined(__x86_64__) && !defined(_M_X64)
const Kernels& avx2() { return scalar(); }
#endif

const Kernels& active() { return *selection().impl; }
const char* active_name() { return selection().name; }

}  // namespace offnav::kern
