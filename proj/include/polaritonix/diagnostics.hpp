// diagnostics.hpp - warning sink and the worker pool used by grid evaluations

#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

namespace polaritonix {

// Warnings are non-fatal notices (pole-coincidence perturbation, coarse grids).
// The default sink writes "warning: <msg>" to stderr.
using WarningSink = std::function<void(std::string_view)>;

void warn(std::string_view message);
WarningSink set_warning_sink(WarningSink sink);  // returns the previous sink

// Worker count: POLARITONIX_THREADS if set to a positive integer, otherwise
// std::thread::hardware_concurrency() (at least 1).
std::size_t worker_count();

// Runs body(i) for i in [0, n) on up to worker_count() threads. Each index is
// visited exactly once; the first exception thrown by any body is rethrown.
// A parallel_for issued from inside a body runs serially on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace polaritonix
