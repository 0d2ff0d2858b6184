#pragma once

#include <algorithm>
#include <atomic>
#include <thread>

namespace archmx::mc {

template <typename T>
std::vector<std::optional<T>> parallel_map(std::size_t count, std::size_t workers,
                                           const std::function<T(std::size_t)>& task) {
  std::vector<std::optional<T>> out(count);
  std::atomic<std::size_t> next{0};
  const auto drain = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i].emplace(task(i));
      } catch (const std::exception&) {
        out[i].reset();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    drain();
    return out;
  }
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(drain);
  }
  return out;
}

}  // namespace archmx::mc
