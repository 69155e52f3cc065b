#include "rmerton/threading.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rmerton {

int worker_count() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("ROBUST_MERTON_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap > 0 && cap < n) n = cap;
        } catch (...) {
            // unparsable value: keep the OpenMP default
        }
    }
    return n < 1 ? 1 : n;
#else
    return 1;
#endif
}

}  // namespace rmerton
