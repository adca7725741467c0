#include "hardylab/core/parallel.hpp"

#include <atomic>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <span>
#include <thread>

namespace hardylab {

void CompensatedSum::add(double v) noexcept {
  const double t = sum_ + v;
  if (std::fabs(sum_) >= std::fabs(v)) {
    comp_ += (sum_ - t) + v;
  } else {
    comp_ += (v - t) + sum_;
  }
  sum_ = t;
}

unsigned thread_count() {
  if (const char* env = std::getenv("HARDYLAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v <= 256) return static_cast<unsigned>(v);
  }
  return 1;
}

namespace {
// Set on pool threads so nested loops run inline instead of spawning again.
thread_local bool in_worker = false;
}  // namespace

void for_each_block(std::size_t n, std::size_t block,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  const std::size_t blocks = (n + block - 1) / block;
  const unsigned workers =
      in_worker ? 1u : std::min<unsigned>(thread_count(), static_cast<unsigned>(std::max<std::size_t>(blocks, 1)));
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) body(b, b * block, std::min(n, (b + 1) * block));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      in_worker = true;
      for (;;) {
        const std::size_t b = next.fetch_add(1);
        if (b >= blocks) return;
        try {
          body(b, b * block, std::min(n, (b + 1) * block));
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = blocks;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<double> block_sum(std::size_t n, std::size_t k,
                              const std::function<void(std::size_t, std::span<double>)>& term) {
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks * k, 0.0);
  for_each_block(n, kReductionBlock, [&](std::size_t b, std::size_t begin, std::size_t end) {
    std::vector<CompensatedSum> acc(k);
    std::vector<double> scratch(k);
    for (std::size_t i = begin; i < end; ++i) {
      std::fill(scratch.begin(), scratch.end(), 0.0);
      term(i, scratch);
      for (std::size_t j = 0; j < k; ++j) acc[j].add(scratch[j]);
    }
    for (std::size_t j = 0; j < k; ++j) partial[b * k + j] = acc[j].value();
  });
  std::vector<CompensatedSum> total(k);
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t j = 0; j < k; ++j) total[j].add(partial[b * k + j]);
  std::vector<double> out(k);
  for (std::size_t j = 0; j < k; ++j) out[j] = total[j].value();
  return out;
}

}  // namespace hardylab
