#pragma once

#include <optional>

namespace droc {

// Thread count resolution: explicit request, else DROC_THREADS, else the
// OpenMP runtime default.
int resolve_threads(std::optional<int> requested);
void set_threads(int n);
int max_threads();

}  // namespace droc
