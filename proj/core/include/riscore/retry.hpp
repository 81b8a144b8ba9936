#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <thread>

#include "riscore/random.hpp"

namespace riscore {

/// Exponential backoff with symmetric multiplicative jitter.
struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{1000};
  double factor = 2.0;
  double jitter = 0.2;

  /// Delay before retry number `retry` (1-based).
  [[nodiscard]] std::chrono::milliseconds delay(int retry, CounterRng& rng) const {
    double ms = static_cast<double>(base_delay.count());
    for (int i = 1; i < retry; ++i) ms *= factor;
    ms *= 1.0 + jitter * (2.0 * rng.unit() - 1.0);
    return std::chrono::milliseconds(static_cast<std::int64_t>(ms));
  }
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

inline Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

}  // namespace riscore
