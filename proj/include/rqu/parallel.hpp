// Copyright 2026 The RQU Model Authors
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
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace rqu {

/// Worker count: explicit request, else RQU_THREADS, else hardware
/// concurrency. Always at least 1.
unsigned resolve_threads(std::optional<unsigned> requested = std::nullopt);

/// Runs task(i) for i in [0, n) on up to `threads` workers. Tasks are pulled
/// from a shared counter; the first exception thrown is rethrown after all
/// workers stop.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& task);

/// Maps i -> fn(i) in parallel and returns results in index order.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, unsigned threads, Fn&& fn) {
  std::vector<T> out(n);
  parallel_for(n, threads, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace rqu
