#pragma once

#include <cstddef>
#include <exception>
#include <limits>

namespace orthant::detail {

// Exceptions must not leave an OpenMP region. Each iteration runs through
// capture(); the exception of the lowest failing index is rethrown afterwards
// so the reported error does not depend on scheduling.
class ParallelErrors {
 public:
  template <class F>
  void capture(std::size_t index, F&& body) {
    try {
      body();
    } catch (...) {
#pragma omp critical(orthant_parallel_errors)
      {
        if (index < index_) {
          index_ = index;
          error_ = std::current_exception();
        }
      }
    }
  }

  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::size_t index_ = std::numeric_limits<std::size_t>::max();
  std::exception_ptr error_;
};

}  // namespace orthant::detail
