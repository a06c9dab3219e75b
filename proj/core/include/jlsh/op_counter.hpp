#pragma once

#include <cstdint>

namespace jlsh {

/// Exact arithmetic tally filled in by the instrumented projection and hash
/// paths. A multiply-add (`acc += a * b`) is counted once under
/// `multiply_adds` and not again under `additions` or `multiplications`.
struct OpCounter {
  std::uint64_t additions = 0;
  std::uint64_t subtractions = 0;
  std::uint64_t multiplications = 0;
  std::uint64_t multiply_adds = 0;
  std::uint64_t comparisons = 0;

  std::uint64_t add_sub() const noexcept { return additions + subtractions; }

  OpCounter& operator+=(const OpCounter& o) noexcept {
    additions += o.additions;
    subtractions += o.subtractions;
    multiplications += o.multiplications;
    multiply_adds += o.multiply_adds;
    comparisons += o.comparisons;
    return *this;
  }

  friend bool operator==(const OpCounter&, const OpCounter&) = default;
};

}  // namespace jlsh
