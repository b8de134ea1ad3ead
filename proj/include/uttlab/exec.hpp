#pragma once

// Every data-parallel kernel takes an Exec tag. Exec::serial is the plain
// loop kept as the reference implementation; Exec::parallel runs the same
// per-item body under OpenMP. Both paths must produce bit-identical output.

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace uttlab {

enum class Exec { serial, parallel };

inline int max_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#if defined(_OPENMP)
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace uttlab
