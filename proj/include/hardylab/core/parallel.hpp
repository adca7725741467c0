#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hardylab {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Worker count from HARDYLAB_THREADS (default 1).
unsigned thread_count();

/// Runs body(begin, end) over fixed-size blocks of [0, n). Block boundaries do
/// not depend on the worker count, so any per-block result combined in block
/// order is deterministic.
void for_each_block(std::size_t n, std::size_t block,
                    const std::function<void(std::size_t block_index, std::size_t begin,
                                             std::size_t end)>& body);

inline constexpr std::size_t kReductionBlock = 2048;

/// Deterministic sum of K accumulators over [0, n): term(i, out) adds the
/// contributions of item i into out[0..K).
std::vector<double> block_sum(std::size_t n, std::size_t k,
                              const std::function<void(std::size_t, std::span<double>)>& term);

}  // namespace hardylab
