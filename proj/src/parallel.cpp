#include "alphabundle/parallel.hpp"

#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace alphabundle::detail {

void parallel_for_impl(std::size_t count, ExecMode mode,
                       const std::function<void(std::size_t)>& body) {
#ifdef _OPENMP
  if (mode == ExecMode::OpenMP) {
    std::vector<std::exception_ptr> errors(count);
    const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    return;
  }
#else
  (void)mode;
#endif
  for (std::size_t i = 0; i < count; ++i) body(i);
}

}  // namespace alphabundle::detail
