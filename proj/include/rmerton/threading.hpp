#pragma once

namespace rmerton {

// Worker count for OpenMP regions. ROBUST_MERTON_THREADS caps it; 0 or unset
// means the OpenMP default. Always 1 when built without OpenMP.
int worker_count();

}  // namespace rmerton
