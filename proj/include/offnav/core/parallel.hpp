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

#ifndef OFFNAV_CORE_PARALLEL_HPP
#define OFFNAV_CORE_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace offnav {

// Worker-parallelism degree: OFFNAV_WORKERS env var, else hardware threads.
inline int default_workers() {
  if (const char* env = std::getenv("OFFNAV_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Static-chunked parallel for. fn(worker_id, index) is called for every
// index in [0, count); each worker owns a contiguous block so per-worker
// scratch buffers are reused across its indices. Results must not depend
// on execution order.
inline void parallel_for(int count, int workers,
                         const std::function<void(int, int)>& fn) {
  if (count <= 0) return;
  if (workers <= 1 || count == 1) {
    for (int i = 0; i < count; ++i) fn(0, i);
    return;
  }
  if (workers > count) workers = count;
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  auto run = [&](int w) {
    const int begin = static_cast<int>(static_cast<long>(count) * w / workers);
    const int end =
        static_cast<int>(static_cast<long>(count) * (w + 1) / workers);
    for (int i = begin; i < end; ++i) fn(w, i);
  };
  for (int w = 1; w < workers; ++w) threads.emplace_back(run, w);
  run(0);
  for (auto& t : threads) t.join();
}

}  // namespace offnav

#endif  // OFFNAV_CORE_PARALLEL_HPP
