#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace jdweak {

/// Serial reference: f(i) for i = 0..count-1 in order.
template <class F>
void for_each_index_serial(std::size_t count, F&& f) {
    for (std::size_t i = 0; i < count; ++i) f(i);
}

/// Runs f(i) for every index on up to `workers` OpenMP threads. f must only
/// write to per-index slots, so results never depend on the schedule. If any
/// call throws, the exception of the lowest failing index is rethrown after
/// all threads finish.
template <class F>
void for_each_index(std::size_t count, int workers, F&& f) {
    if (workers <= 1 || count < 2) {
        for_each_index_serial(count, f);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    bool failed = false;
    const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 8) num_threads(workers) reduction(|| : failed)
    for (long long i = 0; i < n; ++i) {
        try {
            f(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
            failed = true;
        }
    }
    if (!failed) return;
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// Largest useful worker count on this machine.
inline int available_workers() { return omp_get_max_threads(); }

}  // namespace jdweak
