#pragma once

#include <cstddef>
#include <functional>

namespace blml {

//! Worker count: BLML_THREADS if set to a positive integer, otherwise the
//! hardware concurrency (at least 1).
std::size_t thread_count();

//! Runs body(i) for i in [0, count) on up to thread_count() threads.
//! The first exception thrown by any body is rethrown after all workers
//! have stopped.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace blml
