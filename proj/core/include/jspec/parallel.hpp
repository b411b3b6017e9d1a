#pragma once

#include <functional>

namespace jspec {

/// Worker count for grid sweeps: the JSPEC_THREADS environment variable when
/// set, otherwise the hardware concurrency. Results never depend on it;
/// reductions are always performed in index order.
int thread_count();

/// Runs f(i) for i in [0, n), possibly across threads. f must write its
/// result into a preallocated slot i.
void parallel_for(long n, const std::function<void(long)>& f);

} // namespace jspec
