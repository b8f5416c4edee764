// Deterministic parallel replication: replication r always runs on the stream
// derived from hash(master_seed, r), results land in a vector indexed by r,
// and callers merge in index order.  Output is therefore identical for any
// thread count.
#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "stit/rng.hpp"

namespace stit {

// Thread count from the STIT_THREADS environment variable; defaults to 1.
inline unsigned env_thread_count() {
  if (const char* v = std::getenv("STIT_THREADS")) {
    const long n = std::strtol(v, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
    if (n == 0) {
      const unsigned hw = std::thread::hardware_concurrency();
      return hw ? hw : 1;
    }
  }
  return 1;
}

// fn: (replication index, stream) -> T.  Returns per-replication results in
// replication order.
template <typename T, typename Fn>
inline std::vector<T> run_replications(std::uint64_t master_seed, std::size_t reps,
                                       unsigned threads, Fn&& fn) {
  std::vector<T> results(reps);
  if (threads <= 1) {
    for (std::size_t r = 0; r < reps; ++r) {
      RandomStream rng = RandomStream::for_replication(master_seed, r);
      results[r] = fn(r, rng);
    }
    return results;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= reps) return;
      RandomStream rng = RandomStream::for_replication(master_seed, r);
      results[r] = fn(r, rng);
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = std::min<unsigned>(threads, reps ? static_cast<unsigned>(reps) : 1u);
  pool.reserve(n);
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return results;
}

}  // namespace stit
