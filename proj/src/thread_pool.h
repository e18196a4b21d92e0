// Copyright 2026 The evsound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EVSOUND_THREAD_POOL_H_
#define EVSOUND_THREAD_POOL_H_

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace evsound {

// Runs fn(0..n_jobs-1) across up to n_threads workers. Jobs must be
// independent; results must be written to per-job slots so the outcome does
// not depend on scheduling. The first exception thrown by any job is
// rethrown on the caller thread after all workers finish.
inline void RunParallel(size_t n_jobs, int n_threads,
                        const std::function<void(size_t)>& fn) {
  if (n_jobs == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  size_t workers = n_threads > 0 ? static_cast<size_t>(n_threads)
                                 : (hw > 0 ? hw : 1);
  workers = std::min(workers, n_jobs);
  if (workers <= 1) {
    for (size_t i = 0; i < n_jobs; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n_jobs) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (size_t i = 0; i < workers; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace evsound

#endif  // EVSOUND_THREAD_POOL_H_
