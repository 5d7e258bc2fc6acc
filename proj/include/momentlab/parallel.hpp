#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace momentlab {

// Process-wide worker count used by every module. 0 means "hardware".
void set_thread_count(unsigned threads);
unsigned thread_count();

// Splits [begin, end) into at most thread_count() contiguous chunks and runs
// body(chunk_index, lo, hi) for each. Chunk boundaries depend only on the range
// and the chunk count, so callers that merge per-chunk results in chunk order
// get deterministic output.
template <class Body>
void parallel_chunks(std::size_t begin, std::size_t end, Body&& body, unsigned chunks = 0) {
  if (end <= begin) return;
  const std::size_t n = end - begin;
  if (chunks == 0) chunks = thread_count();
  if (chunks > n) chunks = static_cast<unsigned>(n);
  if (chunks <= 1) {
    body(0u, begin, end);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(chunks);
  workers.reserve(chunks);
  for (unsigned c = 0; c < chunks; ++c) {
    const std::size_t lo = begin + n * c / chunks;
    const std::size_t hi = begin + n * (c + 1) / chunks;
    workers.emplace_back([&, c, lo, hi] {
      try {
        body(c, lo, hi);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace momentlab
