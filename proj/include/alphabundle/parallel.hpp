#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace alphabundle {

// Serial is the reference path; OpenMP must produce bit-identical results,
// which every kernel guarantees by writing only to its own slot.
enum class ExecMode { Serial, OpenMP };

namespace detail {
void parallel_for_impl(std::size_t count, ExecMode mode,
                       const std::function<void(std::size_t)>& body);
}

// Runs body(0..count-1); exceptions are captured per index and the one with
// the smallest index is rethrown, so failures are deterministic too.
template <class F>
void parallel_for(std::size_t count, ExecMode mode, F&& body) {
  detail::parallel_for_impl(count, mode, std::function<void(std::size_t)>(body));
}

}  // namespace alphabundle
