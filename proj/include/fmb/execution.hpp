#pragma once

namespace fmb {

/// Selects between the serial reference loop and the OpenMP kernel. Both
/// paths compute the same quantity; the serial one is kept as the reference
/// the parallel kernels are tested and benchmarked against.
enum class Execution { Serial, Parallel };

/// Number of OpenMP threads parallel kernels will use (0 restores the
/// runtime default).
void set_thread_count(int threads);
int thread_count();

} // namespace fmb
