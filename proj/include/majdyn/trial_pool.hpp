#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace majdyn {

/// Worker count: explicit value, else $MAJDYN_WORKERS, else hardware threads.
unsigned resolve_workers(std::optional<unsigned> requested);

/// Runs fn(i) for i in [0, trials) on a bounded pool. Results are stored by
/// trial index, so the output is independent of the worker count.
template <class Result, class Fn>
std::vector<Result> run_trials(std::uint64_t trials, unsigned workers, Fn&& fn) {
  std::vector<Result> results(trials);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::uint64_t i; (i = next.fetch_add(1)) < trials;) {
      try {
        results[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = trials;
      }
    }
  };
  workers = static_cast<unsigned>(std::clamp<std::uint64_t>(workers, 1, std::max<std::uint64_t>(trials, 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace majdyn
