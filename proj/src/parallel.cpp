#include "droc/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

#include "droc/errors.hpp"

namespace droc {

int resolve_threads(std::optional<int> requested) {
    if (requested) {
        if (*requested < 1) throw Error(ErrorCode::InvalidArgument, "--threads must be >= 1");
        return *requested;
    }
    if (const char* env = std::getenv("DROC_THREADS"); env && *env) {
        try {
            int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
        }
        throw Error(ErrorCode::InvalidArgument, std::string("bad DROC_THREADS value: ") + env);
    }
    return omp_get_max_threads();
}

void set_threads(int n) { omp_set_num_threads(n); }

int max_threads() { return omp_get_max_threads(); }

}  // namespace droc
