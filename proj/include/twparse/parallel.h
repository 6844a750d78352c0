#ifndef TWPARSE_PARALLEL_H
#define TWPARSE_PARALLEL_H

#include <cstddef>
#include <functional>

namespace twparse {

// Data-parallel loop over [0, n). jobs <= 1 is the serial reference path;
// jobs > 1 schedules over OpenMP threads. Results must not depend on the
// execution order, so both paths are interchangeable and the tests compare
// them for equality.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn);

// OpenMP's view of available threads (1 when built without OpenMP).
int hardware_jobs();

}  // namespace twparse

#endif
